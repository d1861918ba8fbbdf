//! The random-typing ("monkey at the typewriter") model of Zipf's law.
//!
//! A keyboard has `K` letters with probabilities `q_1..q_K` and a space with
//! probability `s`. Every space-terminated string of letters is a word whose
//! probability is the product of its character probabilities. This crate
//! builds keyboards from random spacings of the unit interval, solves for the
//! power-law exponent of the ranked word probabilities, enumerates word
//! ensembles (the top of the infinite ensemble and the complete finite-length
//! cutoff ensemble), runs sampling experiments and analyses the results.
//!
//! Module map:
//!
//! - [`spacings`]: random divisions of `[0, 1]` for several densities.
//! - [`keyboard`]: keyboards, the exponent `β`, log-moment statistics.
//! - [`ensemble`]: words, best-first top-k enumeration, cutoff ensembles.
//! - [`stats`]: rank tables, tail fits, normality diagnostics, entropy.
//! - [`twitter`]: fixed-length message sampling experiments.
//! - [`corpus`]: plain-text tokenization and empirical rank tables.
//! - [`output`]: CSV writers with reproducibility metadata.

pub mod budget;
pub mod corpus;
pub mod ensemble;
mod error;
pub mod keyboard;
mod numeric;
pub mod output;
pub mod rng;
pub mod spacings;
pub mod stats;
pub mod twitter;

pub use budget::MemoryBudget;
pub use ensemble::{
    enumerate_cutoff, tail_inheritance_check, top_k, word_log_prob, CutoffEnsemble,
    RankedEnsemble, RankedEntry, Word,
};
pub use error::{Error, Result};
pub use keyboard::{
    log_moments, make_keyboard, mean_log_letter, miller_beta, shao_hahn_statistic, solve_beta,
    ExponentResult, Keyboard, LogMoments,
};
pub use spacings::{make_spacings, sample_iid, SpacingDistribution, Spacings};
pub use stats::{RankFrequencyTable, TailFit};
pub use twitter::{run_experiment, SampleResult, TwitterConfig};

/// Crate version, recorded in output metadata.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

//! `monkeyzipf`: experiment recipes for the random-typing model of Zipf's law.
//!
//! Every subcommand writes CSV files (each starting with a `# meta:` line)
//! plus `experiment.json` into the output directory.
//!
//! Exit codes: 0 success, 2 invalid input, 3 memory budget exceeded, 4 I/O.

mod commands;
mod experiment;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use monkeyzipf::stats::Centering;
use monkeyzipf::{Error, SpacingDistribution};

#[derive(Parser, Debug)]
#[command(name = "monkeyzipf", version, about = "Random-typing model of Zipf's law: keyboards, ensembles, sampling")]
pub struct Cli {
    /// Master seed; every module derives its own substreams from it.
    #[arg(long, global = true, default_value_t = 1)]
    pub seed: u64,

    /// Output directory, created if missing.
    #[arg(long, global = true, default_value = "out")]
    pub out: PathBuf,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Dist {
    Equal,
    Uniform,
    Beta32,
    Triangular,
}

impl Dist {
    pub const ALL: [Dist; 4] = [Dist::Equal, Dist::Uniform, Dist::Beta32, Dist::Triangular];

    pub fn distribution(self) -> SpacingDistribution {
        match self {
            Dist::Equal => SpacingDistribution::Equal,
            Dist::Uniform => SpacingDistribution::Uniform,
            Dist::Beta32 => SpacingDistribution::Beta32,
            Dist::Triangular => SpacingDistribution::Triangular,
        }
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum CenteringArg {
    SliceMean,
    Asymptotic,
}

impl CenteringArg {
    pub fn centering(self) -> Centering {
        match self {
            CenteringArg::SliceMean => Centering::SliceMean,
            CenteringArg::Asymptotic => Centering::Asymptotic,
        }
    }
}

/// Where the keyboard comes from.
#[derive(Args, Debug, Clone)]
pub struct KeyboardArgs {
    /// Spacing distribution for the letter probabilities.
    #[arg(long, value_enum, default_value = "uniform")]
    pub dist: Dist,

    /// Number of letters.
    #[arg(long = "K", default_value_t = 26)]
    pub size: usize,

    /// Space probability.
    #[arg(long, default_value_t = 0.18)]
    pub s: f64,

    /// Load a keyboard file instead of generating one.
    #[arg(long, conflicts_with = "spacings_file")]
    pub keyboard_file: Option<PathBuf>,

    /// Build the keyboard from explicit spacings (one per line) and `--s`.
    #[arg(long)]
    pub spacings_file: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Build a keyboard, write it to keyboard.txt and report its exponent.
    Keyboard(KeyboardArgs),
    /// Top-k rank tables for the four spacing distributions, with tail fits.
    Figure2 {
        #[arg(long = "K", default_value_t = 26)]
        size: usize,
        #[arg(long, default_value_t = 0.18)]
        s: f64,
        #[arg(long, default_value_t = 475_255)]
        k: usize,
        /// First rank of the tail fit; the first decade is dominated by short words.
        #[arg(long, default_value_t = 10)]
        fit_lo: usize,
        #[arg(long, default_value_t = 100_000)]
        fit_hi: usize,
    },
    /// Cutoff ensemble rank table and normal quantile table.
    Figure3 {
        #[command(flatten)]
        keyboard: KeyboardArgs,
        /// Maximum word length.
        #[arg(long, default_value_t = 4)]
        n: usize,
        /// Number of top words for the tail mass.
        #[arg(long, default_value_t = 100_000)]
        m: usize,
        #[arg(long, default_value_t = 0.25)]
        band_lo: f64,
        #[arg(long, default_value_t = 0.75)]
        band_hi: f64,
        #[arg(long, value_enum, default_value = "slice-mean")]
        centering: CenteringArg,
    },
    /// Mean log letter probability, exponent and log-spacing statistic over a schedule of K.
    Convergence {
        #[arg(long, value_delimiter = ',', default_values_t = [8, 32, 128, 512, 2048])]
        sizes: Vec<usize>,
        #[arg(long, value_enum, value_delimiter = ',', default_values = ["equal", "uniform", "beta32", "triangular"])]
        dists: Vec<Dist>,
        #[arg(long, default_value_t = 0.18)]
        s: f64,
    },
    /// The k most probable words.
    Topk {
        #[command(flatten)]
        keyboard: KeyboardArgs,
        #[arg(long, default_value_t = 1000)]
        k: usize,
    },
    /// Every word of at most n letters, ranked, with the word-length census.
    Cutoff {
        #[command(flatten)]
        keyboard: KeyboardArgs,
        #[arg(long, default_value_t = 4)]
        n: usize,
    },
    /// Sample fixed-length messages and count the words they contain.
    Twitter {
        #[command(flatten)]
        keyboard: KeyboardArgs,
        /// Longest countable word; messages have n + 1 characters.
        #[arg(long, default_value_t = 4)]
        n: usize,
        #[arg(long, default_value_t = 100_000)]
        messages: u64,
        /// Independent substreams; part of the experiment's identity.
        #[arg(long, default_value_t = 4)]
        shards: usize,
    },
    /// Rank-frequency table of a plain UTF-8 text.
    Corpus {
        input: PathBuf,
        #[arg(long, default_value_t = 0)]
        skip_lines: usize,
        #[arg(long)]
        start_marker: Option<String>,
        #[arg(long)]
        end_marker: Option<String>,
        /// Keep letter case.
        #[arg(long)]
        keep_case: bool,
        /// Split words at apostrophes.
        #[arg(long)]
        split_apostrophes: bool,
        #[arg(long, default_value_t = 10)]
        fit_lo: usize,
        #[arg(long, default_value_t = 1000)]
        fit_hi: usize,
    },
}

fn exit_code(err: &Error) -> u8 {
    match err {
        Error::BudgetExceeded { .. } => 3,
        Error::Io(_) => 4,
        _ => 2,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match commands::run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}

//! The resolved description of a run, written as `experiment.json` next to
//! its outputs.

use std::path::PathBuf;

use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum KeyboardSource {
    /// Spacings drawn from a named distribution.
    Generated { distribution: String, size: usize, seed: u64 },
    /// A keyboard file as written by the `keyboard` subcommand.
    File { path: PathBuf },
    /// Explicit spacings, one per line.
    Spacings { path: PathBuf },
}

/// A keyboard as resolved for a run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KeyboardSpec {
    pub source: KeyboardSource,
    pub space: f64,
    pub size: usize,
    pub fingerprint: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "subcommand", rename_all = "snake_case")]
pub enum Params {
    Keyboard,
    Figure2 { k: usize, fit_range: (usize, usize) },
    Figure3 { n: usize, m: usize, band: (f64, f64), centering: String },
    Convergence { sizes: Vec<usize>, distributions: Vec<String>, space: f64 },
    Topk { k: usize },
    Cutoff { n: usize },
    Twitter { n: usize, messages: u64, shards: usize },
    Corpus {
        input: PathBuf,
        skip_lines: usize,
        start_marker: Option<String>,
        end_marker: Option<String>,
        fold_case: bool,
        internal_apostrophes: bool,
        fit_range: (usize, usize),
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentSpec {
    pub version: String,
    pub prng: String,
    pub seed: u64,
    pub out_dir: PathBuf,
    pub memory_budget: u64,
    pub keyboards: Vec<KeyboardSpec>,
    #[serde(flatten)]
    pub params: Params,
}

use std::io;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid spacings: {0}")]
    InvalidSpacings(String),

    #[error("invalid keyboard: {0}")]
    InvalidKeyboard(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("{kind} has no i.i.d. sampling step")]
    NotContinuous { kind: &'static str },

    #[error("root solve did not converge after {iterations} iterations (residual {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },

    #[error("memory budget exceeded: need about {required} bytes, budget is {budget} bytes")]
    BudgetExceeded { required: u64, budget: u64 },

    #[error("keyboard mismatch: {left} vs {right}")]
    KeyboardMismatch { left: String, right: String },

    #[error("input is not valid UTF-8 at byte offset {offset}")]
    Decode { offset: usize },

    #[error("parse error on line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error(transparent)]
    Io(#[from] io::Error),
}

impl Error {
    /// True for errors caused by bad caller input (as opposed to resources or I/O).
    pub fn is_validation(&self) -> bool {
        !matches!(self, Error::BudgetExceeded { .. } | Error::Io(_))
    }
}

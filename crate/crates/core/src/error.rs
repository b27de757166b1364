//! Crate-wide error type.

use crate::mpc::MpcTrace;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("not a permutation: {reason}")]
    NotAPermutation { reason: String },

    #[error("index {index} out of range for {len} items")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("metric {metric} requires element weights, but the instance has none")]
    MissingWeights { metric: &'static str },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("parse error at line {line}, column {col}: {msg}")]
    Parse { line: usize, col: usize, msg: String },

    #[error("oracle budget exceeded: {what} = {value} is above the limit {limit}")]
    BudgetExceeded {
        what: &'static str,
        value: usize,
        limit: usize,
    },

    #[error("machine budget exceeded: {requested} machines requested, budget {budget}")]
    MachineBudget { requested: usize, budget: usize },

    #[error("word cap exceeded on machine {machine} in round {round}: {words} words > cap {cap}")]
    CapExceeded {
        machine: u64,
        round: usize,
        words: usize,
        cap: usize,
        /// Trace up to the point of failure, with `failed` set.
        trace: Box<MpcTrace>,
    },

    #[error("internal invariant violated: {0}")]
    Invariant(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

use std::path::PathBuf;

use crate::mdp::Violation;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid arm MDP: {}", join(.0))]
    InvalidMdp(Vec<Violation>),

    #[error("invalid instance: {0}")]
    InvalidInstance(String),

    #[error("{what} {index} out of range (limit {limit})")]
    OutOfRange {
        what: &'static str,
        index: usize,
        limit: usize,
    },

    #[error("contract violation: {0}")]
    Contract(String),

    #[error("value iteration did not converge in {iters} iterations (last residual {residual:e})")]
    NotConverged { iters: usize, residual: f64 },

    #[error("index outside bound ±{bound} at state {state}")]
    IndexOutsideBound { state: usize, bound: f64 },

    #[error("non-indexable at state {state}")]
    NonIndexable { state: usize },

    #[error("index table failed at state {state}: {source}")]
    IndexTable {
        state: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("arm {arm}: {source}")]
    Arm {
        arm: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("trial {trial} failed: {source}")]
    Trial {
        trial: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("config: {0}")]
    Config(String),

    #[error("{path}: {message}")]
    Load { path: PathBuf, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

fn join(violations: &[Violation]) -> String {
    violations
        .iter()
        .map(ToString::to_string)
        .collect::<Vec<_>>()
        .join("; ")
}

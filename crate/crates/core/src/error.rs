use std::path::PathBuf;

use thiserror::Error;

/// Errors produced by the channel model, the scheduler and the simulator.
#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("dimension mismatch: expected {expected} phases, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("user {user} has zero TDMA rate and cannot offload")]
    ZeroTdmaRate { user: usize },

    #[error("{candidates} phase candidates exceed the search budget of {budget}; use the eta search instead")]
    BudgetExceeded { candidates: f64, budget: usize },

    #[error("internal consistency error: {component} = {value:e} is negative")]
    Inconsistent { component: &'static str, value: f64 },

    #[error("config error at `{path}`: {message}")]
    Config { path: String, message: String },

    #[error("I/O error on {}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("serialization error: {0}")]
    Serialization(String),
}

impl Error {
    pub(crate) fn config(path: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Config {
            path: path.into(),
            message: message.into(),
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

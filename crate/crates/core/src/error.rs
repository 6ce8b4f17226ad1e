use std::path::PathBuf;

use thiserror::Error;

/// Errors produced by the welfare, rule and ingestion layers.
#[derive(Debug, Error)]
pub enum Error {
    /// A value lies outside the domain of a transform (e.g. a zero income
    /// under logarithmic welfare).
    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid argument: {0}")]
    Argument(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("root solver did not converge after {iterations} iterations (|H| = {residual:e})")]
    Solver { iterations: usize, residual: f64 },

    #[error("{path}:{line}: {message}")]
    Parse {
        path: PathBuf,
        line: u64,
        message: String,
    },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn argument(msg: impl Into<String>) -> Self {
        Error::Argument(msg.into())
    }

    pub(crate) fn precondition(msg: impl Into<String>) -> Self {
        Error::Precondition(msg.into())
    }

    /// True for errors raised by a numerical solver rather than by input
    /// validation.
    pub fn is_solver(&self) -> bool {
        matches!(self, Error::Solver { .. })
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

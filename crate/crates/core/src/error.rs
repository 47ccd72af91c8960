use std::path::PathBuf;

use thiserror::Error;

/// Errors shared across the solver, baseline, and experiment modules.
#[derive(Debug, Error)]
pub enum Error {
    /// A precondition on operation arguments was violated.
    #[error("domain error: {0}")]
    Domain(String),

    /// A value failed structural validation (e.g. a non-unitary gate matrix).
    #[error("validation error: {0}")]
    Validation(String),

    /// An inconsistent or unsupported configuration was requested.
    #[error("configuration error: {0}")]
    Config(String),

    /// A request exceeded the configured memory budget.
    #[error("resource error: requested dimension {required} exceeds budget {budget}")]
    Resource { required: u64, budget: u64 },

    /// Marginal readout hit a vanishing reference amplitude.
    #[error("readout-singular error: {0}")]
    ReadoutSingular(String),

    #[error("io error on {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}

use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum EikonalError {
    /// A point or index outside the grid.
    #[error("domain error: {0}")]
    Domain(String),

    /// Bad problem, decomposition or experiment configuration.
    #[error("configuration error: {0}")]
    Config(String),

    #[error("shape mismatch: expected {expected:?}, got {got:?}")]
    Shape { expected: (usize, usize), got: (usize, usize) },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: {msg}")]
    Parse { path: PathBuf, msg: String },

    #[error("solver did not terminate within {0} cell removals")]
    Budget(usize),
}

impl EikonalError {
    pub fn config(msg: impl Into<String>) -> Self {
        EikonalError::Config(msg.into())
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        EikonalError::Io { path: path.into(), source }
    }

    pub fn is_config(&self) -> bool {
        matches!(self, EikonalError::Config(_))
    }
}

pub type Result<T> = std::result::Result<T, EikonalError>;

use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum KineticError {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// Zero or negative density (or temperature) where moments are required.
    #[error("degenerate macroscopic state: {0}")]
    Degenerate(String),

    #[error("ansatz temperature {value:e} at x = {x:e} is below the floor {floor:e}")]
    TemperatureFloor { value: f64, x: f64, floor: f64 },

    #[error("non-finite coefficient encountered at step {step}")]
    NonFinite { step: usize },

    #[error("singular system: {0}")]
    Singular(String),

    #[error("config line {line}: {message}")]
    ConfigLine { line: usize, message: String },

    #[error("config: {0}")]
    Config(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

pub type Result<T, E = KineticError> = std::result::Result<T, E>;

impl KineticError {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Self::InvalidArgument(msg.into())
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Self::Io {
            path: path.into(),
            source,
        }
    }
}

use std::path::PathBuf;

use thiserror::Error;

/// Errors produced by the toolkit.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid simplex {vertices:?}: {reason}")]
    InvalidSimplex { vertices: Vec<u32>, reason: String },

    #[error("dimension {requested} out of range (max dimension {max})")]
    DimensionOutOfRange { requested: usize, max: usize },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid filtration: {0}")]
    InvalidFiltration(String),

    #[error("invalid distance matrix: {0}")]
    InvalidDistanceMatrix(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("parse error at row {row}: {message}")]
    Parse { row: usize, message: String },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}

//! Error type shared by all core modules.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CoreError {
    #[error("validation: {0}")]
    Validation(String),

    #[error("unsupported shape: {0}")]
    UnsupportedShape(String),

    #[error("receiver at ({0}, {1}, {2}) lies inside the source support (singular kernel)")]
    SingularKernel(f64, f64, f64),

    #[error("dataset is missing the sample at k = {missing_k:.12} (have {have} of {expected})")]
    IncompleteDataset {
        missing_k: f64,
        have: usize,
        expected: usize,
    },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("eigensolver failed: {0}")]
    Eigensolver(String),

    #[error("eigenpair residual {residual:.3e} exceeds {bound:.3e} (matrix norm {norm:.3e})")]
    EigenResidual {
        residual: f64,
        bound: f64,
        norm: f64,
    },

    #[error("no opposite observation found for {0}")]
    MissingOpposite(String),

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl CoreError {
    pub fn validation(msg: impl Into<String>) -> Self {
        CoreError::Validation(msg.into())
    }
}

pub type Result<T> = std::result::Result<T, CoreError>;

use thiserror::Error;

/// Errors raised across the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("matrix is not Hermitian (residual {residual:e})")]
    NotHermitian { residual: f64 },
    #[error("input vector {0} is zero")]
    ZeroVector(usize),
    #[error("input vectors are not orthonormal (residual {0:e})")]
    NotOrthonormal(f64),
    #[error("bipartition {0} does not fit {1} parties")]
    CutOutOfRange(String, usize),
    #[error("closed form does not apply: {0}")]
    NotApplicable(String),
    #[error("value not representable exactly: {0}")]
    Inexact(String),
    #[error("over budget: {0}")]
    Budget(String),
    #[error("solver failed: {0}")]
    Solver(String),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

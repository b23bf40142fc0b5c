use matrix_core::MatrixError;
use thiserror::Error;

/// Errors reported when constructing or converting channels.
#[derive(Debug, Error)]
pub enum ChannelError {
    #[error("channel is not trace preserving (max |sum K^dag K - 1| entry = {deviation:.3e})")]
    NotTracePreserving { deviation: f64 },
    #[error("parameter {name} = {value} outside its domain {domain}")]
    ParameterOutOfRange { name: &'static str, value: f64, domain: &'static str },
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("matrix is not unitary (deviation {deviation:.3e})")]
    NotUnitary { deviation: f64 },
    #[error(transparent)]
    Matrix(#[from] MatrixError),
}

use thiserror::Error;

/// Errors reported by matrix and tensor operations.
#[derive(Debug, Error)]
pub enum MatrixError {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("matrix is not Hermitian (max |M - M^dag| entry = {deviation:.3e})")]
    NotHermitian { deviation: f64 },
    #[error("matrix is not positive semidefinite (min eigenvalue = {min_eigenvalue:.3e})")]
    NotPsd { min_eigenvalue: f64 },
    #[error("invalid tensor factor index {index} for {factors} factors")]
    BadFactorIndex { index: usize, factors: usize },
}

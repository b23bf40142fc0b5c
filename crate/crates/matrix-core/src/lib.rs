//! Dense complex linear algebra primitives for small quantum-information
//! workloads (matrices up to a few hundred rows).
//!
//! The crate provides a row-major [`ComplexMatrix`], tensor-factor
//! bookkeeping through [`TensorDims`], the usual multilinear operations
//! (Kronecker products, partial trace/transpose, trace-and-replace,
//! factor permutation) and a cyclic-Jacobi Hermitian eigensolver with the
//! spectral helpers built on it (PSD square root, PSD clipping, operator
//! norm).
//!
//! Conventions used by every downstream crate:
//!
//! - matrices are row-major; entry `(i, j)` sits at `i * cols + j`,
//! - tensor factors are big-endian: factor 0 is the slowest index, so a
//!   matrix on dims `[d0, d1]` indexes its rows as `i0 * d1 + i1`.
//!
//! All operations are pure functions on immutable inputs and therefore
//! safe to call concurrently.

mod eig;
mod error;
mod matrix;
mod tensor;

pub use eig::{clip_to_psd, herm_eig, op_norm, psd_sqrt};
pub use error::MatrixError;
pub use matrix::ComplexMatrix;
pub use tensor::{
    kron, partial_trace, partial_transpose, permute_factors, trace_and_replace, TensorDims,
};

/// Complex scalar type used throughout the workspace.
pub type C64 = num_complex::Complex64;

/// Shorthand for a complex scalar from its real and imaginary parts.
pub fn c64(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

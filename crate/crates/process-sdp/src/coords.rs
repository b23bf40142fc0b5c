//! Real-coordinate embedding of Hermitian block variables.
//!
//! A Hermitian `n x n` matrix maps isometrically to `n^2` reals: the
//! diagonal, then for each upper-triangle entry `sqrt(2) Re` and
//! `sqrt(2) Im`. Frobenius inner products become Euclidean ones, so the
//! conic solver can work on flat `f64` vectors.

use matrix_core::{c64, ComplexMatrix};

pub(crate) const SQRT2: f64 = std::f64::consts::SQRT_2;

/// Number of real coordinates of a Hermitian block of dimension `n`.
pub(crate) fn herm_len(n: usize) -> usize {
    n * n
}

/// Writes the coordinates of Hermitian `m` into `out`.
pub(crate) fn encode_herm(m: &ComplexMatrix, out: &mut [f64]) {
    let n = m.rows();
    debug_assert_eq!(out.len(), herm_len(n));
    let mut k = 0;
    for i in 0..n {
        out[k] = m[(i, i)].re;
        k += 1;
    }
    for i in 0..n {
        for j in (i + 1)..n {
            let z = (m[(i, j)] + m[(j, i)].conj()).scale(0.5);
            out[k] = SQRT2 * z.re;
            out[k + 1] = SQRT2 * z.im;
            k += 2;
        }
    }
}

/// Rebuilds the Hermitian matrix from its coordinates.
pub(crate) fn decode_herm(v: &[f64], n: usize) -> ComplexMatrix {
    debug_assert_eq!(v.len(), herm_len(n));
    let mut m = ComplexMatrix::zeros(n, n);
    let mut k = n;
    for i in 0..n {
        m[(i, i)] = c64(v[i], 0.0);
    }
    for i in 0..n {
        for j in (i + 1)..n {
            let z = c64(v[k] / SQRT2, v[k + 1] / SQRT2);
            m[(i, j)] = z;
            m[(j, i)] = z.conj();
            k += 2;
        }
    }
    m
}

/// Offsets of each block inside the flat coordinate vector.
pub(crate) fn block_offsets(block_dims: &[usize]) -> (Vec<usize>, usize) {
    let mut offsets = Vec::with_capacity(block_dims.len());
    let mut total = 0;
    for &d in block_dims {
        offsets.push(total);
        total += herm_len(d);
    }
    (offsets, total)
}

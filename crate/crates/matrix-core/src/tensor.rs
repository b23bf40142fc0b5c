use num_complex::Complex64;

use crate::error::MatrixError;
use crate::matrix::ComplexMatrix;

/// Ordered local dimensions of the tensor factors a square matrix acts on.
///
/// Factor 0 is the slowest index (big-endian), so dims `[d0, d1]` index a
/// basis vector as `i0 * d1 + i1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TensorDims {
    factor_dims: Vec<usize>,
}

impl TensorDims {
    pub fn new(factor_dims: &[usize]) -> Self {
        assert!(factor_dims.iter().all(|&d| d > 0), "factor dims must be positive");
        Self { factor_dims: factor_dims.to_vec() }
    }

    pub fn factor_dims(&self) -> &[usize] {
        &self.factor_dims
    }

    pub fn num_factors(&self) -> usize {
        self.factor_dims.len()
    }

    /// Product of all factor dimensions.
    pub fn total_dim(&self) -> usize {
        self.factor_dims.iter().product()
    }

    /// Big-endian strides: `strides[k]` is the product of dims after `k`.
    pub fn strides(&self) -> Vec<usize> {
        let n = self.factor_dims.len();
        let mut s = vec![1usize; n];
        for k in (0..n.saturating_sub(1)).rev() {
            s[k] = s[k + 1] * self.factor_dims[k + 1];
        }
        s
    }

    fn check_matrix(&self, m: &ComplexMatrix) -> Result<(), MatrixError> {
        if !m.is_square() || m.rows() != self.total_dim() {
            return Err(MatrixError::DimensionMismatch(format!(
                "matrix is {}x{} but factor dims {:?} give total dim {}",
                m.rows(),
                m.cols(),
                self.factor_dims,
                self.total_dim()
            )));
        }
        Ok(())
    }

    fn check_subset(&self, subset: &[usize]) -> Result<(), MatrixError> {
        for &k in subset {
            if k >= self.factor_dims.len() {
                return Err(MatrixError::BadFactorIndex {
                    index: k,
                    factors: self.factor_dims.len(),
                });
            }
        }
        Ok(())
    }

    /// Dimension of the subsystem formed by `subset`.
    pub fn subset_dim(&self, subset: &[usize]) -> usize {
        subset.iter().map(|&k| self.factor_dims[k]).product()
    }

    /// For every full index, its component inside `subset` (packed in the
    /// subset's own order of increasing factor position) and its component
    /// in the complement, both as offsets in the full index space.
    fn split_offsets(&self, subset: &[usize]) -> SplitOffsets {
        let strides = self.strides();
        let total = self.total_dim();
        let in_subset: Vec<bool> = {
            let mut v = vec![false; self.factor_dims.len()];
            for &k in subset {
                v[k] = true;
            }
            v
        };

        // Packed index maps for the subset and its complement.
        let mut sub_index = vec![0usize; total];
        let mut keep_index = vec![0usize; total];
        let mut sub_offset = vec![0usize; total];
        for i in 0..total {
            let mut rest = i;
            let (mut si, mut ki, mut so) = (0usize, 0usize, 0usize);
            for (k, &d) in self.factor_dims.iter().enumerate() {
                let digit = rest / strides[k];
                rest %= strides[k];
                if in_subset[k] {
                    si = si * d + digit;
                    so += digit * strides[k];
                } else {
                    ki = ki * d + digit;
                }
            }
            sub_index[i] = si;
            keep_index[i] = ki;
            sub_offset[i] = so;
        }
        SplitOffsets { sub_index, keep_index, sub_offset }
    }
}

struct SplitOffsets {
    /// Packed index of the subset component of each full index.
    sub_index: Vec<usize>,
    /// Packed index of the complement component of each full index.
    keep_index: Vec<usize>,
    /// Subset component expressed as an offset in the full index space.
    sub_offset: Vec<usize>,
}

/// Kronecker product: `(a (x) b)[(i*rb+k), (j*cb+l)] = a[i,j] * b[k,l]`.
pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    let (ra, ca) = (a.rows(), a.cols());
    let (rb, cb) = (b.rows(), b.cols());
    let mut out = ComplexMatrix::zeros(ra * rb, ca * cb);
    for i in 0..ra {
        for j in 0..ca {
            let aij = a[(i, j)];
            if aij == Complex64::ZERO {
                continue;
            }
            for k in 0..rb {
                for l in 0..cb {
                    out[(i * rb + k, j * cb + l)] = aij * b[(k, l)];
                }
            }
        }
    }
    out
}

/// Partial trace over the listed factors; the kept factors stay in their
/// original order.
pub fn partial_trace(
    m: &ComplexMatrix,
    dims: &TensorDims,
    traced: &[usize],
) -> Result<ComplexMatrix, MatrixError> {
    dims.check_matrix(m)?;
    dims.check_subset(traced)?;
    let total = dims.total_dim();
    let split = dims.split_offsets(traced);
    let keep_dim = total / dims.subset_dim(traced);

    let mut out = ComplexMatrix::zeros(keep_dim, keep_dim);
    for r in 0..total {
        let kr = split.keep_index[r];
        let sr = split.sub_index[r];
        for c in 0..total {
            if split.sub_index[c] == sr {
                out[(kr, split.keep_index[c])] += m[(r, c)];
            }
        }
    }
    Ok(out)
}

/// Transposition applied only on the listed factors.
pub fn partial_transpose(
    m: &ComplexMatrix,
    dims: &TensorDims,
    transposed: &[usize],
) -> Result<ComplexMatrix, MatrixError> {
    dims.check_matrix(m)?;
    dims.check_subset(transposed)?;
    let total = dims.total_dim();
    let split = dims.split_offsets(transposed);

    let mut out = ComplexMatrix::zeros(total, total);
    for r in 0..total {
        let (kr, or) = (r - split.sub_offset[r], split.sub_offset[r]);
        for c in 0..total {
            let (kc, oc) = (c - split.sub_offset[c], split.sub_offset[c]);
            out[(kr + oc, kc + or)] = m[(r, c)];
        }
    }
    Ok(out)
}

/// Trace-and-replace: traces out the listed factors and reinserts the
/// maximally mixed state in their place, `X -> tr_A(X) (x) 1_A / d_A`.
///
/// Idempotent, self-adjoint, and commuting for disjoint subsets.
pub fn trace_and_replace(
    m: &ComplexMatrix,
    dims: &TensorDims,
    subset: &[usize],
) -> Result<ComplexMatrix, MatrixError> {
    dims.check_matrix(m)?;
    dims.check_subset(subset)?;
    let total = dims.total_dim();
    let d_sub = dims.subset_dim(subset);
    let split = dims.split_offsets(subset);
    let pt = partial_trace(m, dims, subset)?;
    let inv = 1.0 / d_sub as f64;

    let mut out = ComplexMatrix::zeros(total, total);
    for r in 0..total {
        let sr = split.sub_index[r];
        let kr = split.keep_index[r];
        for c in 0..total {
            if split.sub_index[c] == sr {
                out[(r, c)] = pt[(kr, split.keep_index[c])] * inv;
            }
        }
    }
    Ok(out)
}

/// Reorders tensor factors: factor `p` of the result is factor `perm[p]`
/// of the input. Returns the permuted matrix and its new dims.
pub fn permute_factors(
    m: &ComplexMatrix,
    dims: &TensorDims,
    perm: &[usize],
) -> Result<(ComplexMatrix, TensorDims), MatrixError> {
    dims.check_matrix(m)?;
    if perm.len() != dims.num_factors() {
        return Err(MatrixError::DimensionMismatch(format!(
            "permutation length {} does not match {} factors",
            perm.len(),
            dims.num_factors()
        )));
    }
    dims.check_subset(perm)?;
    {
        let mut seen = vec![false; perm.len()];
        for &p in perm {
            if seen[p] {
                return Err(MatrixError::DimensionMismatch(format!(
                    "permutation {perm:?} repeats factor {p}"
                )));
            }
            seen[p] = true;
        }
    }

    let new_dims =
        TensorDims::new(&perm.iter().map(|&p| dims.factor_dims()[p]).collect::<Vec<_>>());
    let old_strides = dims.strides();
    let new_strides = new_dims.strides();
    let total = dims.total_dim();

    // new_index[i]: position of old basis index i after the reorder.
    let mut new_index = vec![0usize; total];
    for i in 0..total {
        let mut rest = i;
        let mut digits = vec![0usize; dims.num_factors()];
        for k in 0..dims.num_factors() {
            digits[k] = rest / old_strides[k];
            rest %= old_strides[k];
        }
        new_index[i] = perm.iter().enumerate().map(|(p, &k)| digits[k] * new_strides[p]).sum();
    }

    let mut out = ComplexMatrix::zeros(total, total);
    for r in 0..total {
        for c in 0..total {
            out[(new_index[r], new_index[c])] = m[(r, c)];
        }
    }
    Ok((out, new_dims))
}

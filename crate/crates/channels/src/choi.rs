use matrix_core::{herm_eig, partial_trace, ComplexMatrix, TensorDims};

use crate::error::ChannelError;
use crate::kraus::KrausChannel;

/// Eigenvalues of the unnormalized Choi matrix below this threshold are
/// dropped during Kraus extraction (boundary channels are rank deficient).
const KRAUS_RANK_TOL: f64 = 1e-10;

/// Tolerances of the Choi invariants.
const CHOI_PSD_TOL: f64 = 1e-10;
const CHOI_MARGINAL_TOL: f64 = 1e-9;

/// A channel as its Choi operator on `H_ref (x) H_out`, reference first.
#[derive(Clone, Debug)]
pub struct ChoiOperator {
    d_in: usize,
    d_out: usize,
    matrix: ComplexMatrix,
    normalized: bool,
}

impl ChoiOperator {
    /// Wraps an existing Choi matrix; use [`validate`](Self::validate) to
    /// check the PSD and marginal invariants.
    pub fn new(d_in: usize, d_out: usize, matrix: ComplexMatrix, normalized: bool) -> Result<Self, ChannelError> {
        if matrix.rows() != d_in * d_out || !matrix.is_square() {
            return Err(ChannelError::DimensionMismatch(format!(
                "Choi matrix is {}x{}, expected {}",
                matrix.rows(),
                matrix.cols(),
                d_in * d_out
            )));
        }
        Ok(Self { d_in, d_out, matrix, normalized })
    }

    pub fn d_in(&self) -> usize {
        self.d_in
    }

    pub fn d_out(&self) -> usize {
        self.d_out
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn is_normalized(&self) -> bool {
        self.normalized
    }

    /// The same Choi with unit trace.
    pub fn normalized(&self) -> Self {
        if self.normalized {
            self.clone()
        } else {
            Self {
                d_in: self.d_in,
                d_out: self.d_out,
                matrix: self.matrix.scaled_re(1.0 / self.d_in as f64),
                normalized: true,
            }
        }
    }

    /// The same Choi with trace `d_in`.
    pub fn unnormalized(&self) -> Self {
        if self.normalized {
            Self {
                d_in: self.d_in,
                d_out: self.d_out,
                matrix: self.matrix.scaled_re(self.d_in as f64),
                normalized: false,
            }
        } else {
            self.clone()
        }
    }

    /// Checks positivity and the trace-preservation marginal
    /// `tr_out(Choi) = 1/d_in` (normalized) or `1` (unnormalized).
    pub fn validate(&self) -> Result<(), ChannelError> {
        let scale = self.matrix.max_abs().max(1.0);
        let (eigs, _) = herm_eig(&self.matrix)?;
        if let Some(&min) = eigs.last() {
            if min < -CHOI_PSD_TOL * scale {
                return Err(ChannelError::Matrix(matrix_core::MatrixError::NotPsd {
                    min_eigenvalue: min,
                }));
            }
        }
        let dims = TensorDims::new(&[self.d_in, self.d_out]);
        let marginal = partial_trace(&self.matrix, &dims, &[1])?;
        let weight = if self.normalized { 1.0 / self.d_in as f64 } else { 1.0 };
        let target = ComplexMatrix::identity(self.d_in).scaled_re(weight);
        let deviation = marginal.max_abs_diff(&target);
        if deviation > CHOI_MARGINAL_TOL {
            return Err(ChannelError::NotTracePreserving { deviation });
        }
        Ok(())
    }

    /// Applies the channel to a state through the Choi matrix.
    pub fn apply(&self, rho: &ComplexMatrix) -> Result<ComplexMatrix, ChannelError> {
        if rho.rows() != self.d_in || rho.cols() != self.d_in {
            return Err(ChannelError::DimensionMismatch(format!(
                "state is {}x{}, channel input dimension is {}",
                rho.rows(),
                rho.cols(),
                self.d_in
            )));
        }
        let bar = self.unnormalized();
        let mut out = ComplexMatrix::zeros(self.d_out, self.d_out);
        for a in 0..self.d_out {
            for b in 0..self.d_out {
                let mut acc = matrix_core::c64(0.0, 0.0);
                for i in 0..self.d_in {
                    for j in 0..self.d_in {
                        acc += rho[(i, j)]
                            * bar.matrix[(i * self.d_out + a, j * self.d_out + b)];
                    }
                }
                out[(a, b)] = acc;
            }
        }
        Ok(out)
    }
}

/// Choi operator of a Kraus channel:
/// `sum_n (1 (x) K_n) |Omega><Omega| (1 (x) K_n)^dag`, divided by `d_in`
/// when `normalized` is set.
pub fn kraus_to_choi(c: &KrausChannel, normalized: bool) -> ChoiOperator {
    let (d_in, d_out) = (c.d_in(), c.d_out());
    let dim = d_in * d_out;
    let mut m = ComplexMatrix::zeros(dim, dim);
    for k in c.kraus() {
        // (1 (x) K)|Omega> has amplitude K[a, i] at index (i, a).
        for i in 0..d_in {
            for a in 0..d_out {
                let v = k[(a, i)];
                if v == matrix_core::c64(0.0, 0.0) {
                    continue;
                }
                for j in 0..d_in {
                    for b in 0..d_out {
                        m[(i * d_out + a, j * d_out + b)] += v * k[(b, j)].conj();
                    }
                }
            }
        }
    }
    if normalized {
        m = m.scaled_re(1.0 / d_in as f64);
    }
    ChoiOperator { d_in, d_out, matrix: m, normalized }
}

/// Kraus channel from a Choi operator via its eigendecomposition; the
/// Kraus count equals the numerical rank.
pub fn choi_to_kraus(choi: &ChoiOperator) -> Result<KrausChannel, ChannelError> {
    let bar = choi.unnormalized();
    let scale = bar.matrix.max_abs().max(1.0);
    let (eigs, v) = herm_eig(&bar.matrix)?;
    if let Some(&min) = eigs.last() {
        if min < -CHOI_PSD_TOL * scale {
            return Err(ChannelError::Matrix(matrix_core::MatrixError::NotPsd {
                min_eigenvalue: min,
            }));
        }
    }
    let (d_in, d_out) = (choi.d_in, choi.d_out);
    let mut kraus = Vec::new();
    for (k, &lambda) in eigs.iter().enumerate() {
        if lambda <= KRAUS_RANK_TOL {
            continue;
        }
        let w = lambda.sqrt();
        kraus.push(ComplexMatrix::from_fn(d_out, d_in, |a, i| {
            v[(i * d_out + a, k)] * w
        }));
    }
    KrausChannel::new(kraus)
}

//! Fidelities and distances between quantum states and channels.
//!
//! The state fidelity is `F(rho, sigma) = tr |sqrt(rho) sqrt(sigma)|`,
//! computed as the sum of singular values of `sqrt(rho) sqrt(sigma)`
//! (one PSD square root fewer than the textbook form, which is gentler
//! near rank deficiency). Channel fidelities compare normalized Choi
//! states. The Bures angle `D = arccos F` and the Fuchs-van-de-Graaf
//! bracket `1 - cos D <= d <= sin D` are bundled in [`DistanceReport`].
//!
//! Unitary channels additionally get closed forms: the eigenphase spread
//! [`unitary_theta`] and the resulting `N`-copy discrimination distance
//! and fidelity [`unitary_discrimination`].

use channels::{ChannelError, ChoiOperator, KrausChannel};
use matrix_core::{herm_eig, ComplexMatrix};
use thiserror::Error;

/// Errors reported by metric computations.
#[derive(Debug, Error)]
pub enum MetricError {
    #[error("input is not a density matrix: {0}")]
    NotDensity(String),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("matrix is not unitary (deviation {deviation:.3e})")]
    NotUnitary { deviation: f64 },
    #[error("angle {0} outside [0, pi/2]")]
    AngleOutOfRange(f64),
    #[error(transparent)]
    Matrix(#[from] matrix_core::MatrixError),
    #[error(transparent)]
    Channel(#[from] ChannelError),
}

/// Fidelity together with the distances it induces.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DistanceReport {
    pub fidelity: f64,
    /// Bures angle `arccos F`.
    pub bures_angle: f64,
    /// Fuchs-van-de-Graaf lower bound `1 - cos D` on the trace distance.
    pub fvg_lower: f64,
    /// Fuchs-van-de-Graaf upper bound `sin D` on the trace distance.
    pub fvg_upper: f64,
}

impl DistanceReport {
    pub fn from_fidelity(fidelity: f64) -> Self {
        let f = fidelity.clamp(0.0, 1.0);
        let angle = f.acos();
        Self { fidelity: f, bures_angle: angle, fvg_lower: 1.0 - angle.cos(), fvg_upper: angle.sin() }
    }
}

fn require_density(rho: &ComplexMatrix, label: &str) -> Result<(), MetricError> {
    if !rho.is_square() {
        return Err(MetricError::NotDensity(format!("{label} is not square")));
    }
    if (rho.trace().re - 1.0).abs() > 1e-8 || rho.trace().im.abs() > 1e-10 {
        return Err(MetricError::NotDensity(format!(
            "{label} has trace {:.6} + {:.2e}i",
            rho.trace().re,
            rho.trace().im
        )));
    }
    let (eigs, _) = herm_eig(rho)?;
    if let Some(&min) = eigs.last() {
        if min < -1e-8 {
            return Err(MetricError::NotDensity(format!(
                "{label} has negative eigenvalue {min:.3e}"
            )));
        }
    }
    Ok(())
}

/// Sum of singular values of a matrix (trace norm), computed from the
/// Hermitian dilation `[[0, M], [M^dag, 0]]` whose spectrum is the
/// singular values with both signs. This avoids squaring the matrix and
/// keeps full absolute accuracy for small singular values.
fn trace_norm(m: &ComplexMatrix) -> f64 {
    let n = m.rows();
    let k = m.cols();
    let dag = m.dagger();
    let dilation = ComplexMatrix::from_fn(n + k, n + k, |i, j| {
        if i < n && j >= n {
            m[(i, j - n)]
        } else if i >= n && j < n {
            dag[(i - n, j)]
        } else {
            matrix_core::c64(0.0, 0.0)
        }
    });
    let (eigs, _) = herm_eig(&dilation).expect("dilation is Hermitian by construction");
    0.5 * eigs.iter().map(|x| x.abs()).sum::<f64>()
}

/// Relative eigenvalue cutoff when factoring a density matrix. True zero
/// eigenvalues of a rank-deficient input surface as rounding noise of
/// order machine epsilon; their square roots (~1e-8) would dominate the
/// fidelity error, so anything below this fraction of the top eigenvalue
/// is treated as exact zero.
const FACTOR_CLIP: f64 = 1e-13;

/// A factor `A` with `rho = A A^dag`, built from the eigendecomposition
/// with near-zero eigenvalues dropped.
fn density_factor(rho: &ComplexMatrix) -> Result<ComplexMatrix, MetricError> {
    let (eigs, basis) = herm_eig(rho)?;
    let top = eigs.first().copied().unwrap_or(0.0).max(0.0);
    let kept: Vec<(usize, f64)> = eigs
        .iter()
        .enumerate()
        .filter(|(_, &l)| l > FACTOR_CLIP * top)
        .map(|(k, &l)| (k, l.sqrt()))
        .collect();
    let n = rho.rows();
    Ok(ComplexMatrix::from_fn(n, kept.len(), |i, j| {
        let (k, root) = kept[j];
        basis[(i, k)] * root
    }))
}

/// Uhlmann fidelity `tr |sqrt(rho) sqrt(sigma)|` between density matrices.
///
/// Evaluated as `tr |A^dag B|` for factorizations `rho = A A^dag`,
/// `sigma = B B^dag`, which is invariant under the choice of factor and
/// avoids square roots of eigenvalues that are zero up to rounding.
pub fn state_fidelity(rho: &ComplexMatrix, sigma: &ComplexMatrix) -> Result<f64, MetricError> {
    require_density(rho, "rho")?;
    require_density(sigma, "sigma")?;
    if rho.rows() != sigma.rows() {
        return Err(MetricError::DimensionMismatch(format!(
            "{} vs {}",
            rho.rows(),
            sigma.rows()
        )));
    }
    let a = density_factor(rho)?;
    let b = density_factor(sigma)?;
    Ok(trace_norm(&(&a.dagger() * &b)).clamp(0.0, 1.0))
}

/// Choi fidelity of two channels: the state fidelity of their normalized
/// Choi operators.
///
/// The Kraus form gives an exact factorization of each Choi state (its
/// columns are the vectorized Kraus operators over `sqrt(d_in)`), so the
/// fidelity reduces to the trace norm of the small Gram matrix
/// `tr(K_m^dag L_n) / d_in` with no eigendecomposition of the Choi
/// operators themselves.
pub fn cj_fidelity(a: &KrausChannel, b: &KrausChannel) -> Result<f64, MetricError> {
    if a.d_in() != b.d_in() || a.d_out() != b.d_out() {
        return Err(MetricError::DimensionMismatch(format!(
            "({}, {}) vs ({}, {})",
            a.d_in(),
            a.d_out(),
            b.d_in(),
            b.d_out()
        )));
    }
    let d = a.d_in() as f64;
    let gram = ComplexMatrix::from_fn(a.kraus().len(), b.kraus().len(), |m, n| {
        a.kraus()[m].hs_inner(&b.kraus()[n]) / d
    });
    Ok(trace_norm(&gram).clamp(0.0, 1.0))
}

/// Choi fidelity from precomputed Choi operators.
pub fn cj_fidelity_choi(a: &ChoiOperator, b: &ChoiOperator) -> Result<f64, MetricError> {
    if a.d_in() != b.d_in() || a.d_out() != b.d_out() {
        return Err(MetricError::DimensionMismatch(format!(
            "({}, {}) vs ({}, {})",
            a.d_in(),
            a.d_out(),
            b.d_in(),
            b.d_out()
        )));
    }
    state_fidelity(a.normalized().matrix(), b.normalized().matrix())
}

/// Closed-form Choi fidelity of two amplitude-damping channels:
/// `(1 + sqrt(g g') + sqrt((1-g)(1-g'))) / 2`.
pub fn ad_cj_fidelity(gamma: f64, gamma_prime: f64) -> Result<f64, MetricError> {
    for &g in &[gamma, gamma_prime] {
        if !(0.0..=1.0).contains(&g) {
            return Err(MetricError::NotDensity(format!("gamma = {g} outside [0, 1]")));
        }
    }
    Ok(0.5
        * (1.0
            + (gamma * gamma_prime).sqrt()
            + ((1.0 - gamma) * (1.0 - gamma_prime)).sqrt()))
}

/// Closed-form Choi fidelity of two Pauli-noise channels: the
/// Bhattacharyya coefficient `sum_j sqrt(p_j q_j)`.
pub fn pauli_cj_fidelity(p: &[f64; 4], q: &[f64; 4]) -> Result<f64, MetricError> {
    for v in [p, q] {
        if v.iter().any(|&x| x < -1e-12) {
            return Err(MetricError::NotDensity("negative probability entry".into()));
        }
    }
    Ok(p.iter().zip(q).map(|(&a, &b)| (a.max(0.0) * b.max(0.0)).sqrt()).sum())
}

/// Eigenphase spread of a unitary: the largest pairwise circle distance
/// between eigenphases (each pairwise distance folded into `[0, pi]`).
pub fn unitary_theta(v: &ComplexMatrix) -> Result<f64, MetricError> {
    let phases = eigenphases(v)?;
    let mut theta: f64 = 0.0;
    for (i, &a) in phases.iter().enumerate() {
        for &b in phases.iter().skip(i + 1) {
            let d = (a - b).rem_euclid(2.0 * std::f64::consts::PI);
            theta = theta.max(d.min(2.0 * std::f64::consts::PI - d));
        }
    }
    Ok(theta)
}

/// Eigenphases of a unitary matrix, in radians.
///
/// A unitary is normal, so its real and imaginary Hermitian parts
/// commute; a generic real combination of the two resolves degeneracies
/// and yields the common eigenbasis.
fn eigenphases(v: &ComplexMatrix) -> Result<Vec<f64>, MetricError> {
    if !v.is_square() {
        return Err(MetricError::DimensionMismatch("unitary must be square".into()));
    }
    let n = v.rows();
    let deviation = (&v.dagger() * v).max_abs_diff(&ComplexMatrix::identity(n));
    if deviation > 1e-9 {
        return Err(MetricError::NotUnitary { deviation });
    }
    let dag = v.dagger();
    let re = ComplexMatrix::from_fn(n, n, |i, j| (v[(i, j)] + dag[(i, j)]) * 0.5);
    let im = ComplexMatrix::from_fn(n, n, |i, j| {
        (v[(i, j)] - dag[(i, j)]) * matrix_core::c64(0.0, -0.5)
    });
    // Mixing angle chosen away from any structure of the inputs.
    let c = 0.739_085_133_215_160_64;
    let mix = ComplexMatrix::from_fn(n, n, |i, j| re[(i, j)] + im[(i, j)] * c);
    let (_, basis) = herm_eig(&mix)?;
    let mut phases = Vec::with_capacity(n);
    for k in 0..n {
        let col: Vec<_> = (0..n).map(|i| basis[(i, k)]).collect();
        let vv = v.mul_vec(&col);
        let amp: num_complex::Complex64 =
            col.iter().zip(&vv).map(|(a, b)| a.conj() * b).sum();
        phases.push(amp.im.atan2(amp.re));
    }
    Ok(phases)
}

/// Result of discriminating two unitaries with `n` parallel uses.
#[derive(Clone, Copy, Debug)]
pub struct UnitaryDiscrimination {
    /// Bures-angle distance `n Theta / 2`, capped at `pi/2`.
    pub distance: f64,
    /// Worst-case fidelity `cos(n Theta / 2)`, floored at 0.
    pub fidelity: f64,
    /// Set when `n Theta >= pi`, i.e. the pair is perfectly
    /// distinguishable with `n` uses.
    pub saturated: bool,
}

/// `n`-copy discrimination distance `n Theta(U_0 U_1^dag) / 2` and the
/// matching fidelity `cos(n Theta / 2)`.
pub fn unitary_discrimination(
    u0: &ComplexMatrix,
    u1: &ComplexMatrix,
    n: usize,
) -> Result<UnitaryDiscrimination, MetricError> {
    let theta = unitary_theta(&(u0 * &u1.dagger()))?;
    let raw = n as f64 * theta;
    if raw >= std::f64::consts::PI {
        Ok(UnitaryDiscrimination {
            distance: std::f64::consts::FRAC_PI_2,
            fidelity: 0.0,
            saturated: true,
        })
    } else {
        Ok(UnitaryDiscrimination { distance: raw / 2.0, fidelity: (raw / 2.0).cos(), saturated: false })
    }
}

/// Fuchs-van-de-Graaf bracket `(1 - cos D, sin D)` for a Bures angle `D`.
pub fn fuchs_van_de_graaf(angle: f64) -> Result<(f64, f64), MetricError> {
    if !(0.0..=std::f64::consts::FRAC_PI_2 + 1e-12).contains(&angle) {
        return Err(MetricError::AngleOutOfRange(angle));
    }
    Ok((1.0 - angle.cos(), angle.sin()))
}

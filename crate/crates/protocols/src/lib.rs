//! Explicit cloning and replication protocols with computable
//! fidelities.
//!
//! Four protocol families are covered:
//!
//! * dummy processes, which ignore the input uses and output a fixed
//!   channel ([`dummy_fidelity`]);
//! * measure/estimate-and-prepare processes driven by an [`Estimator`]
//!   ([`pauli_mp_fidelity`], [`ad_ep_fidelity`]), with derivative-free
//!   estimator optimization ([`optimize_estimator`]);
//! * coherent processes: the unary-encoded phase-gate replicator
//!   ([`phase_coherent_process`]), the amplitude-damping instrument
//!   protocol ([`ad_coherent_fidelity`]), and the error-mitigation comb
//!   for noisy phase gates ([`error_mitigation`],
//!   [`noisy_phase_a_process`]);
//! * closed-form estimation benchmarks: exact covariant phase
//!   estimation ([`phase_estimation_exact`]) and the
//!   measure-and-prepare ceilings ([`phase_mp_bound`],
//!   [`su2_mp_bound`], [`noisy_phase_b_mp_bound`]).
//!
//! Structural checks ([`trash_replace_equivalence_check`],
//! [`pauli_invariance_check`], [`binom_sqrt_bound_check`]) validate the
//! reductions these protocols rely on.

mod ad;
mod dummy;
mod equivalence;
mod mitigation;
mod optimize;
mod pauli;
mod phase;

pub use ad::{ad_coherent_fidelity, ad_ep_fidelity};
pub use dummy::{dummy_fidelity, DummyResult, ParameterNet};
pub use equivalence::{pauli_invariance_check, trash_replace_equivalence_check};
pub use mitigation::{error_mitigation, noisy_phase_a_process, noisy_phase_b_mp_bound};
pub use optimize::{optimize_estimator, OptimizeMode};
pub use pauli::{
    binom_sqrt_bound_check, compositions, pauli_ep_fidelity, pauli_mp_fidelity, PauliEstimator,
};
pub use phase::{
    phase_coherent_exponents, phase_coherent_process, phase_estimation_exact, phase_mp_bound,
    su2_mp_bound,
};

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Errors reported by protocol evaluations.
#[derive(Debug, Error)]
pub enum ProtocolError {
    #[error("copy counts must satisfy n <= m, got n = {n}, m = {m}")]
    CopyOrder { n: usize, m: usize },
    #[error("parameter net is empty")]
    EmptyNet,
    #[error("{name} = {value} outside {domain}")]
    OutOfDomain {
        name: &'static str,
        value: f64,
        domain: &'static str,
    },
    #[error("estimator defines {got} values but {needed} outcomes are possible")]
    EstimatorSize { got: usize, needed: usize },
    #[error("problem instance is degenerate: {0}")]
    Degenerate(&'static str),
    #[error("dimension 2^{0} exceeds the desk-scale cap 2^20")]
    DimensionCap(usize),
    #[error(transparent)]
    Matrix(#[from] matrix_core::MatrixError),
    #[error(transparent)]
    Channel(#[from] channels::ChannelError),
    #[error(transparent)]
    Metric(#[from] metrics::MetricError),
}

/// A parameter estimate for every possible outcome count `t` in
/// `{0..n}`; estimates are clipped to the family's domain when used.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Estimator {
    pub values: Vec<f64>,
}

impl Estimator {
    pub fn new(values: Vec<f64>) -> Self {
        Self { values }
    }

    /// Number of outcomes covered (`n + 1` for `n` uses).
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// The estimate for outcome `t`, clipped to `[0, 1]`.
    pub fn estimate(&self, t: usize) -> f64 {
        self.values[t].clamp(0.0, 1.0)
    }

    /// Frequency estimator `t / n`.
    pub fn natural_frequency(n: usize) -> Self {
        Self::new((0..=n).map(|t| t as f64 / n.max(1) as f64).collect())
    }

    /// Doubled-frequency estimator `min(2 t / n, 1)`, matched to an
    /// instrument that observes each decay with probability one half.
    pub fn natural_half_rate(n: usize) -> Self {
        Self::new(
            (0..=n)
                .map(|t| (2.0 * t as f64 / n.max(1) as f64).min(1.0))
                .collect(),
        )
    }
}

/// Worst-case fidelity of a protocol over a parameter net.
#[derive(Clone, Debug, Serialize)]
pub struct ProtocolResult {
    pub n: usize,
    pub m: usize,
    /// Minimum of `per_parameter_fidelities`.
    pub worst_case_fidelity: f64,
    /// `(parameter, fidelity)` pairs over the evaluation net. For nets
    /// of multi-dimensional parameters the first component is the net
    /// index.
    pub per_parameter_fidelities: Vec<(f64, f64)>,
    /// The estimator used, when the protocol is estimator-driven.
    pub estimator: Option<Estimator>,
}

impl ProtocolResult {
    pub(crate) fn from_grid(
        n: usize,
        m: usize,
        grid: Vec<(f64, f64)>,
        estimator: Option<Estimator>,
    ) -> Self {
        let worst = grid
            .iter()
            .map(|&(_, f)| f)
            .fold(f64::INFINITY, f64::min)
            .min(1.0);
        Self {
            n,
            m,
            worst_case_fidelity: worst,
            per_parameter_fidelities: grid,
            estimator,
        }
    }
}

pub(crate) fn check_counts(n: usize, m: usize) -> Result<(), ProtocolError> {
    if n > m {
        return Err(ProtocolError::CopyOrder { n, m });
    }
    Ok(())
}

/// Binomial probability `C(n, t) p^t (1-p)^(n-t)` with the `0^0 = 1`
/// convention at the endpoints.
pub(crate) fn binom_pmf(t: usize, n: usize, p: f64) -> f64 {
    if p <= 0.0 {
        return if t == 0 { 1.0 } else { 0.0 };
    }
    if p >= 1.0 {
        return if t == n { 1.0 } else { 0.0 };
    }
    let ln = ln_choose(n, t) + t as f64 * p.ln() + (n - t) as f64 * (1.0 - p).ln();
    ln.exp()
}

pub(crate) fn ln_choose(n: usize, k: usize) -> f64 {
    ln_factorial(n) - ln_factorial(k) - ln_factorial(n - k)
}

pub(crate) fn ln_factorial(n: usize) -> f64 {
    statrs::function::gamma::ln_gamma(n as f64 + 1.0)
}

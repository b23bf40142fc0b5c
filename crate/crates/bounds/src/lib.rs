//! Analytic lower bounds on the error of cloning and replicating
//! quantum channels.
//!
//! The toolbox has three layers:
//!
//! * special functions: the lower Lambert branch [`lambert_w_m1`], the
//!   rate function [`a_function`] built from it, and the weaker
//!   grid-free variant [`a_tilde`];
//! * local curvature of a channel curve: the operators
//!   `alpha = sum K'_n^dag K'_n` and `beta = sum K'_n^dag K_n`
//!   ([`alpha_beta`]), the gauge freedom that can sometimes remove
//!   `beta` ([`beta_removable`]), the resulting Fisher-information
//!   envelope [`f_n`], and a finite-difference quantum Fisher
//!   information for state curves ([`qfi_state`]);
//! * the bounds themselves: distances that any cloning process must
//!   leave between copy counts `n` and `m`, for states, channel pairs,
//!   smooth channel families, and unitary families in diamond norm.
//!
//! All bounds are Bures-angle distances in `[0, pi/2]`; the companion
//! fidelity upper bound is the cosine, bundled in [`BoundReport`].

mod cloning;
mod curvature;
mod special;

pub use cloning::{
    cloning_lower_discrimination, cloning_lower_metrology, linear_replication_bound,
    quadratic_replication_bound, state_cloning_lower, unitary_diamond_lower,
};
pub use curvature::{alpha_beta, beta_removable, cj_curve_qfi, f_n, qfi_state, AlphaBeta};
pub use special::{a_function, a_tilde, lambert_w_m1};

use thiserror::Error;

/// Errors reported by bound computations.
#[derive(Debug, Error)]
pub enum BoundError {
    #[error("{name} = {value} outside {domain}")]
    OutOfDomain {
        name: &'static str,
        value: f64,
        domain: &'static str,
    },
    #[error("copy counts must satisfy n <= m, got n = {n}, m = {m}")]
    CopyOrder { n: usize, m: usize },
    #[error("finite-difference step {0:.3e} is too small for double precision")]
    StepTooSmall(f64),
    #[error(
        "bound branch requires beta-removability = {expected}, but the curve has \
         removability residual {residual:.3e}"
    )]
    WrongBranch { expected: bool, residual: f64 },
    #[error(transparent)]
    Matrix(#[from] matrix_core::MatrixError),
    #[error(transparent)]
    Channel(#[from] channels::ChannelError),
    #[error(transparent)]
    Metric(#[from] metrics::MetricError),
}

/// Which bound produced a [`BoundReport`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BoundKind {
    State,
    UnitaryDiamond,
    LinearRate,
    QuadraticRate,
    Pauli,
    Ad,
}

/// A lower bound on the cloning distance together with the fidelity
/// upper bound it implies.
#[derive(Clone, Copy, Debug)]
pub struct BoundReport {
    pub kind: BoundKind,
    pub n: usize,
    pub m: usize,
    /// Lower bound on the Bures-angle cloning distance, in `[0, pi/2]`.
    pub value: f64,
    /// Companion upper bound `cos(value)` on the cloning fidelity.
    pub fidelity: f64,
}

impl BoundReport {
    pub fn new(kind: BoundKind, n: usize, m: usize, value: f64) -> Self {
        let value = value.clamp(0.0, std::f64::consts::FRAC_PI_2);
        Self {
            kind,
            n,
            m,
            value,
            fidelity: value.cos(),
        }
    }
}

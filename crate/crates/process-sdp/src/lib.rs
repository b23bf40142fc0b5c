//! Higher-order quantum processes and the semidefinite programs that
//! optimize them.
//!
//! A process (superchannel) consumes `N` calls of an unknown channel and
//! emits one channel. It is represented here by the Choi operator of its
//! action on channel Choi operators ([`ProcessChoi`]), constrained to a
//! causal class by a trace-and-replace projector ([`ProcessProjector`]):
//! parallel, sequential, or non-causal slot wiring.
//!
//! On top of that representation sit two optimization layers:
//!
//! * a generic first-order conic solver ([`solve`]) for small problems
//!   over Hermitian PSD blocks with affine constraints, and
//! * a structured solver ([`worst_case_sdp`], [`feasibility_sdp`]) for
//!   the worst-case channel-cloning fidelity over a net of channels,
//!   optionally restricted by a positive-partial-transpose constraint
//!   that contains all measure-and-prepare processes.

mod clone_sdp;
mod coords;
mod process;
mod solver;

pub use clone_sdp::{
    feasibility_sdp, uniform_grid, worst_case_sdp, CloneOptions, CloneSolution,
};
pub use process::{
    apply_process, evaluate_each, evaluate_process, ProcessChoi, ProcessDims, ProcessKind,
    ProcessProjector,
};
pub use solver::{
    real_embedding, solve, solve_with, Constraint, SdpProblem, SdpSolution, SolveOptions,
    SolveStatus, Term,
};

use thiserror::Error;

/// Errors reported by process construction and the SDP layer.
#[derive(Debug, Error)]
pub enum SdpError {
    #[error("{0} slots unsupported (projectors are implemented for 1 and 2)")]
    UnsupportedSlots(usize),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("channel net is empty")]
    EmptyNet,
    #[error("ill-formed problem: {0}")]
    BadProblem(String),
    #[error("process dimension {0} exceeds the desk-scale solver cap {1}")]
    TooLarge(usize, usize),
    #[error(transparent)]
    Matrix(#[from] matrix_core::MatrixError),
    #[error(transparent)]
    Channel(#[from] channels::ChannelError),
    #[error(transparent)]
    Metric(#[from] metrics::MetricError),
}

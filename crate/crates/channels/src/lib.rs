//! Quantum channels for qubit-scale numerics.
//!
//! A channel is held either as a Kraus set ([`KrausChannel`]) or as its
//! Choi operator ([`ChoiOperator`]); the two representations convert
//! losslessly into each other. The crate ships constructors for the
//! channel families used throughout the workspace (amplitude damping,
//! Pauli noise, bit flips, phase gates, trash-and-replace, and noisy
//! phase gates) plus [`ChannelCurve`], a smooth one-parameter family
//! carrying Kraus derivatives for metrology-style bounds.
//!
//! Conventions:
//!
//! - the Choi operator lives on `H_ref (x) H_out` with the reference
//!   (input copy) factor first,
//! - `normalized` Choi matrices have unit trace; unnormalized ones have
//!   trace `d_in`,
//! - Kraus operators are `d_out x d_in`.

mod choi;
mod curve;
mod error;
mod families;
mod kraus;

pub use choi::{choi_to_kraus, kraus_to_choi, ChoiOperator};
pub use curve::{ad_curve, custom_curve, noisy_phase_b_curve, pauli_curve, phase_curve, ChannelCurve};
pub use error::ChannelError;
pub use families::{
    amplitude_damping, bit_flip, noisy_phase_a, noisy_phase_b, pauli, phase_gate,
    trash_and_replace, unitary_channel,
};
pub use kraus::{compose_channels, tensor_channels, KrausChannel};

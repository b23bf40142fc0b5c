use matrix_core::{c64, ComplexMatrix};

use crate::phase::phase_coherent_process;
use crate::{check_counts, ProtocolError, ProtocolResult};

/// Split a qubit Kraus operator into its parity-preserving and
/// parity-flipping parts: `K = K0 + sigma_x K1` with `K0` the diagonal
/// part of `K` and `K1 = sigma_x * (antidiagonal part of K)`, itself
/// diagonal. Measuring the parity flag and undoing the flip turns each
/// branch into a diagonal operator; the branch weights satisfy
/// `K0^dag K0 + K1^dag K1 = diag(K^dag K)`.
pub fn error_mitigation(k: &ComplexMatrix) -> Result<(ComplexMatrix, ComplexMatrix), ProtocolError> {
    if k.rows() != 2 || k.cols() != 2 {
        return Err(ProtocolError::Matrix(
            matrix_core::MatrixError::DimensionMismatch(format!(
                "expected a 2x2 Kraus operator, got {}x{}",
                k.rows(),
                k.cols()
            )),
        ));
    }
    let mut k0 = ComplexMatrix::zeros(2, 2);
    k0[(0, 0)] = k[(0, 0)];
    k0[(1, 1)] = k[(1, 1)];
    // sigma_x * antidiag(k): (0,0) <- k[(1,0)], (1,1) <- k[(0,1)].
    let mut k1 = ComplexMatrix::zeros(2, 2);
    k1[(0, 0)] = k[(1, 0)];
    k1[(1, 1)] = k[(0, 1)];
    Ok((k0, k1))
}

/// Phase-gate replication through noisy gates `A_theta` (bit flip after
/// the gate): the mitigation comb removes the noise exactly, so the
/// protocol reduces to the coherent phase replicator.
///
/// Exactness is verified on a theta grid before delegating: every
/// mitigated branch of `A_theta` must be proportional to `U_theta`, so
/// the corrected channel is the unitary `U_theta` itself.
pub fn noisy_phase_a_process(n: usize, m: usize, p: f64) -> Result<ProtocolResult, ProtocolError> {
    check_counts(n, m)?;
    if !(0.0..=1.0).contains(&p) {
        return Err(ProtocolError::OutOfDomain {
            name: "p",
            value: p,
            domain: "[0, 1]",
        });
    }
    for i in 0..16 {
        let theta = i as f64 / 16.0 * std::f64::consts::TAU;
        let a = channels::noisy_phase_a(theta, p)?;
        let u = &channels::phase_gate(theta).kraus()[0].clone();
        let mut reconstructed = ComplexMatrix::zeros(2, 2);
        for k in a.kraus() {
            let (k0, k1) = error_mitigation(k)?;
            // Each branch must be a multiple of U_theta; accumulate the
            // squared weights to check they reproduce the unitary.
            for b in [&k0, &k1] {
                let coeff = u.hs_inner(b) / c64(2.0, 0.0);
                let dev = (b - &u.scaled(coeff)).max_abs();
                if dev > 1e-12 {
                    return Err(ProtocolError::Degenerate(
                        "mitigated branch is not proportional to the clean gate",
                    ));
                }
                reconstructed = &reconstructed + &u.scaled_re(coeff.norm_sqr());
            }
        }
        if (&reconstructed - u).max_abs() > 1e-12 {
            return Err(ProtocolError::Degenerate(
                "mitigated branches do not recompose the clean gate",
            ));
        }
    }
    phase_coherent_process(n, m)
}

/// Measure-and-prepare ceiling for replication through noisy gates
/// `B_theta` (bit flip before the gate), where mitigation cannot help:
/// `(1 - pi^2 / (2 (1-2p)^2 n^2))^m`, floored at zero.
pub fn noisy_phase_b_mp_bound(n: usize, m: usize, p: f64) -> Result<f64, ProtocolError> {
    if !(0.0..=1.0).contains(&p) {
        return Err(ProtocolError::OutOfDomain {
            name: "p",
            value: p,
            domain: "[0, 1]",
        });
    }
    if (p - 0.5).abs() < 1e-12 {
        return Err(ProtocolError::Degenerate(
            "p = 1/2 erases all phase information; the bound is trivial",
        ));
    }
    let contrast = (1.0 - 2.0 * p).powi(2);
    let base = 1.0 - std::f64::consts::PI.powi(2) / (2.0 * contrast * (n * n) as f64);
    Ok(base.max(0.0).powi(m as i32))
}

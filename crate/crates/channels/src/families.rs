use matrix_core::{c64, herm_eig, ComplexMatrix};

use crate::error::ChannelError;
use crate::kraus::{compose_channels, KrausChannel};

fn check_unit_interval(name: &'static str, value: f64) -> Result<(), ChannelError> {
    if (0.0..=1.0).contains(&value) {
        Ok(())
    } else {
        Err(ChannelError::ParameterOutOfRange { name, value, domain: "[0, 1]" })
    }
}

/// The four Pauli matrices, identity first.
pub(crate) fn pauli_matrices() -> [ComplexMatrix; 4] {
    [
        ComplexMatrix::identity(2),
        ComplexMatrix::from_rows(&[
            vec![c64(0.0, 0.0), c64(1.0, 0.0)],
            vec![c64(1.0, 0.0), c64(0.0, 0.0)],
        ]),
        ComplexMatrix::from_rows(&[
            vec![c64(0.0, 0.0), c64(0.0, -1.0)],
            vec![c64(0.0, 1.0), c64(0.0, 0.0)],
        ]),
        ComplexMatrix::from_real_diag(&[1.0, -1.0]),
    ]
}

/// Amplitude damping with decay probability `gamma`:
/// `K_0 = diag(1, sqrt(1-gamma))`, `K_1 = sqrt(gamma) |0><1|`.
pub fn amplitude_damping(gamma: f64) -> Result<KrausChannel, ChannelError> {
    check_unit_interval("gamma", gamma)?;
    let k0 = ComplexMatrix::from_real_diag(&[1.0, (1.0 - gamma).sqrt()]);
    let mut k1 = ComplexMatrix::zeros(2, 2);
    k1[(0, 1)] = c64(gamma.sqrt(), 0.0);
    KrausChannel::new(vec![k0, k1])
}

/// Pauli-noise channel `sum_j p_j sigma_j . sigma_j`.
pub fn pauli(p: [f64; 4]) -> Result<KrausChannel, ChannelError> {
    let total: f64 = p.iter().sum();
    if (total - 1.0).abs() > 1e-10 {
        return Err(ChannelError::ParameterOutOfRange {
            name: "sum p_j",
            value: total,
            domain: "1",
        });
    }
    for &pj in &p {
        if !(-1e-12..=1.0 + 1e-12).contains(&pj) {
            return Err(ChannelError::ParameterOutOfRange { name: "p_j", value: pj, domain: "[0, 1]" });
        }
    }
    let sigmas = pauli_matrices();
    let kraus: Vec<ComplexMatrix> = p
        .iter()
        .zip(&sigmas)
        .filter(|(&pj, _)| pj > 0.0)
        .map(|(&pj, s)| s.scaled_re(pj.sqrt()))
        .collect();
    KrausChannel::new(kraus)
}

/// Bit-flip channel `(1-p) . + p sigma_x . sigma_x`.
pub fn bit_flip(p: f64) -> Result<KrausChannel, ChannelError> {
    check_unit_interval("p", p)?;
    pauli([1.0 - p, p, 0.0, 0.0])
}

/// Phase gate `e^{i theta sigma_z} . e^{-i theta sigma_z}`.
pub fn phase_gate(theta: f64) -> KrausChannel {
    let u = ComplexMatrix::from_fn(2, 2, |i, j| {
        if i != j {
            c64(0.0, 0.0)
        } else if i == 0 {
            c64(0.0, theta).exp()
        } else {
            c64(0.0, -theta).exp()
        }
    });
    KrausChannel::new(vec![u]).expect("phase gate is unitary")
}

/// Unitary conjugation channel `U . U^dag`.
pub fn unitary_channel(u: &ComplexMatrix) -> Result<KrausChannel, ChannelError> {
    if !u.is_square() {
        return Err(ChannelError::DimensionMismatch("unitary must be square".into()));
    }
    let deviation = (&u.dagger() * u).max_abs_diff(&ComplexMatrix::identity(u.rows()));
    if deviation > 1e-9 {
        return Err(ChannelError::NotUnitary { deviation });
    }
    KrausChannel::new(vec![u.clone()])
}

/// Trash-and-replace channel: discards the input and outputs `rho`.
pub fn trash_and_replace(rho: &ComplexMatrix, d_in: usize) -> Result<KrausChannel, ChannelError> {
    if !rho.is_square() {
        return Err(ChannelError::DimensionMismatch("output state must be square".into()));
    }
    if (rho.trace().re - 1.0).abs() > 1e-8 || rho.trace().im.abs() > 1e-10 {
        return Err(ChannelError::ParameterOutOfRange {
            name: "tr rho",
            value: rho.trace().re,
            domain: "1",
        });
    }
    let (eigs, v) = herm_eig(rho)?;
    let d_out = rho.rows();
    let mut kraus = Vec::new();
    for (k, &lambda) in eigs.iter().enumerate() {
        if lambda <= 1e-14 {
            continue;
        }
        let w = lambda.sqrt();
        for i in 0..d_in {
            // sqrt(lambda_k) |v_k><i|
            kraus.push(ComplexMatrix::from_fn(d_out, d_in, |a, j| {
                if j == i {
                    v[(a, k)] * w
                } else {
                    c64(0.0, 0.0)
                }
            }));
        }
    }
    KrausChannel::new(kraus)
}

/// Phase gate followed by bit-flip noise: `A_theta = X_p o U_theta`.
pub fn noisy_phase_a(theta: f64, p: f64) -> Result<KrausChannel, ChannelError> {
    compose_channels(&bit_flip(p)?, &phase_gate(theta))
}

/// Bit-flip noise followed by the phase gate: `B_theta = U_theta o X_p`.
pub fn noisy_phase_b(theta: f64, p: f64) -> Result<KrausChannel, ChannelError> {
    compose_channels(&phase_gate(theta), &bit_flip(p)?)
}

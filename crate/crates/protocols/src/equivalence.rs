use channels::{kraus_to_choi, tensor_channels, trash_and_replace, KrausChannel};
use matrix_core::{c64, kron, ComplexMatrix};
use metrics::{cj_fidelity, state_fidelity};

use crate::ProtocolError;

/// Check the reduction from channel cloning of trash-and-replace
/// channels to state cloning: for a state cloner `P` from `d^n` to
/// `d^m` systems,
/// `F_CJ(T_{P[rho^(x)n]}, T_rho^(x)m) = F(P[rho^(x)n], rho^(x)m)`.
/// Both sides are computed independently and returned as
/// `(channel_side, state_side)`.
pub fn trash_replace_equivalence_check(
    state_cloner: &KrausChannel,
    rho: &ComplexMatrix,
) -> Result<(f64, f64), ProtocolError> {
    let d = rho.rows();
    let (n, m) = (
        exact_log(state_cloner.d_in(), d)?,
        exact_log(state_cloner.d_out(), d)?,
    );
    let rho_n = kron_power(rho, n);
    let rho_m = kron_power(rho, m);
    let sigma = state_cloner.apply(&rho_n)?;
    let rhs = state_fidelity(&sigma, &rho_m)?;

    let t_sigma = trash_and_replace(&sigma, state_cloner.d_out())?;
    let t_rho = trash_and_replace(rho, d)?;
    let mut t_rho_m = t_rho.clone();
    for _ in 1..m {
        t_rho_m = tensor_channels(&t_rho_m, &t_rho);
    }
    let lhs = cj_fidelity(&t_sigma, &t_rho_m)?;
    Ok((lhs, rhs))
}

fn exact_log(total: usize, d: usize) -> Result<usize, ProtocolError> {
    let mut k = 0;
    let mut acc = 1;
    while acc < total {
        acc *= d;
        k += 1;
    }
    if acc != total {
        return Err(ProtocolError::Matrix(
            matrix_core::MatrixError::DimensionMismatch(format!(
                "{total} is not a power of the state dimension {d}"
            )),
        ));
    }
    Ok(k)
}

fn kron_power(rho: &ComplexMatrix, k: usize) -> ComplexMatrix {
    let mut out = ComplexMatrix::identity(1);
    for _ in 0..k {
        out = kron(&out, rho);
    }
    out
}

/// Check that the Bell-measurement process reproduces Pauli channels:
/// decompose the Choi of `N_p` in the Bell basis and re-prepare each
/// outcome `j` as the Pauli conjugation `sigma_j . sigma_j`. The
/// reconstruction equals `N_p` exactly; the returned residual is the
/// largest Choi-entry deviation.
pub fn pauli_invariance_check(p: &[f64; 4]) -> Result<f64, ProtocolError> {
    let channel = channels::pauli(*p)?;
    let choi = kraus_to_choi(&channel, true);
    let sigmas = [
        ComplexMatrix::identity(2),
        ComplexMatrix::from_fn(2, 2, |i, j| c64(if i != j { 1.0 } else { 0.0 }, 0.0)),
        ComplexMatrix::from_fn(2, 2, |i, j| {
            if i == j {
                c64(0.0, 0.0)
            } else if i == 0 {
                c64(0.0, -1.0)
            } else {
                c64(0.0, 1.0)
            }
        }),
        ComplexMatrix::from_real_diag(&[1.0, -1.0]),
    ];
    // Bell vectors |Phi_j> = (id x sigma_j)|Phi+>, components
    // Phi_j[(i, a)] = sigma_j[a, i] / sqrt(2).
    let bells: Vec<Vec<num_complex::Complex64>> = sigmas
        .iter()
        .map(|s| {
            (0..4)
                .map(|idx| s[(idx % 2, idx / 2)] * std::f64::consts::FRAC_1_SQRT_2)
                .collect()
        })
        .collect();
    let mut reconstruction = ComplexMatrix::zeros(4, 4);
    for bell in &bells {
        let mut weight = c64(0.0, 0.0);
        for r in 0..4 {
            for c in 0..4 {
                weight += bell[r].conj() * choi.matrix()[(r, c)] * bell[c];
            }
        }
        let projector = ComplexMatrix::from_fn(4, 4, |r, c| bell[r] * bell[c].conj());
        reconstruction = &reconstruction + &projector.scaled_re(weight.re);
    }
    Ok(reconstruction.max_abs_diff(choi.matrix()))
}

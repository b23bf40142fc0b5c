use num_complex::Complex64;

use crate::{check_counts, ProtocolError, ProtocolResult};

use std::f64::consts::PI;

/// Measure-and-prepare ceiling for phase-gate replication:
/// `(1 - pi^2 / (2 n^2))^m`, floored at zero.
pub fn phase_mp_bound(n: usize, m: usize) -> f64 {
    (1.0 - PI * PI / (2.0 * (n * n) as f64)).max(0.0).powi(m as i32)
}

/// Measure-and-prepare ceiling for general SU(2) gate replication:
/// `(1 - pi^2 / n^2)^(m/2)`, floored at zero.
pub fn su2_mp_bound(n: usize, m: usize) -> f64 {
    (1.0 - PI * PI / ((n * n) as f64))
        .max(0.0)
        .powf(m as f64 / 2.0)
}

/// Exact expected alignment fidelity of covariant phase estimation on
/// the sine state `c_k = sqrt(2/(n+2)) sin((k+1) pi / (n+2))` over `n`
/// uses, in the canonical encoding `|k> -> e^{i k phi} |k>`:
/// `E[f] = (1 + sum_k c_k c_{k+1}) / 2 = (1 + cos(pi/(n+2))) / 2`,
/// asymptotically `1 - pi^2/(4 n^2)`.
pub fn phase_estimation_exact(n: usize) -> f64 {
    0.5 * (1.0 + (PI / (n + 2) as f64).cos())
}

/// Per-Hamming-weight phase exponents of the unary-encoded coherent
/// phase replicator: weight-`w` basis states of the `m`-qubit output
/// acquire phase `theta * e_w` where `e_w = n - 2 floor(w - (m-n)/2)`
/// inside the window `|m/2 - w| <= n/2` (matching the target exponent
/// `m - 2w`) and `e_w = n` outside it (the ancilla register is left
/// untouched).
pub fn phase_coherent_exponents(n: usize, m: usize) -> Vec<i64> {
    (0..=m as i64)
        .map(|w| {
            let shifted = w as f64 - (m as i64 - n as i64) as f64 / 2.0;
            let nw = shifted.floor() as i64;
            if (0..=n as i64).contains(&nw) {
                n as i64 - 2 * nw
            } else {
                n as i64
            }
        })
        .collect()
}

/// Coherent `n -> m` phase-gate replication through the unary encoding.
///
/// The process conjugates `U_theta^(x) n` on an `n`-qubit ancilla by
/// the weight-controlled isometry `|k> -> |k> |Unary(n_{|k|})>`; the
/// composite is the diagonal unitary with exponents
/// [`phase_coherent_exponents`]. The Choi fidelity against
/// `U_theta^(x) m`,
/// `|sum_w C(m,w) e^{i theta (e_w - m + 2w)}| / 2^m`, is minimized
/// over a 64-point theta grid; it is exactly 1 whenever the good
/// window covers every Hamming weight (in particular at `n = m`).
pub fn phase_coherent_process(n: usize, m: usize) -> Result<ProtocolResult, ProtocolError> {
    check_counts(n, m)?;
    if m + n > 20 {
        return Err(ProtocolError::DimensionCap(m + n));
    }
    let exps = phase_coherent_exponents(n, m);
    let deltas: Vec<i64> = exps
        .iter()
        .enumerate()
        .map(|(w, &e)| e - m as i64 + 2 * w as i64)
        .collect();
    let weights: Vec<f64> = (0..=m).map(|w| crate::ln_choose(m, w).exp()).collect();
    let dim = (1u64 << m) as f64;

    let grid = (0..64)
        .map(|i| {
            let theta = i as f64 / 64.0 * std::f64::consts::TAU;
            let amp: Complex64 = deltas
                .iter()
                .zip(&weights)
                .map(|(&d, &c)| Complex64::from_polar(c, theta * d as f64))
                .sum();
            (theta, (amp.norm() / dim).min(1.0))
        })
        .collect();
    Ok(ProtocolResult::from_grid(n, m, grid, None))
}

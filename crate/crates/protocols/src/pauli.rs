use metrics::pauli_cj_fidelity;

use crate::{binom_pmf, check_counts, ln_factorial, ProtocolError, ProtocolResult};

/// All compositions of `n` into four ordered nonnegative parts, in
/// lexicographic order. This order indexes [`PauliEstimator`] values.
pub fn compositions(n: usize) -> Vec<[usize; 4]> {
    let mut out = Vec::new();
    for t0 in 0..=n {
        for t1 in 0..=n - t0 {
            for t2 in 0..=n - t0 - t1 {
                out.push([t0, t1, t2, n - t0 - t1 - t2]);
            }
        }
    }
    out
}

/// A Pauli-probability estimate for every multinomial outcome of `n`
/// Bell measurements, indexed by [`compositions`]`(n)` order.
#[derive(Clone, Debug, PartialEq)]
pub struct PauliEstimator {
    pub n: usize,
    pub estimates: Vec<[f64; 4]>,
}

impl PauliEstimator {
    /// Frequency estimator `p_hat = t / n`.
    pub fn natural(n: usize) -> Self {
        let estimates = compositions(n)
            .iter()
            .map(|t| {
                let d = n.max(1) as f64;
                [
                    t[0] as f64 / d,
                    t[1] as f64 / d,
                    t[2] as f64 / d,
                    t[3] as f64 / d,
                ]
            })
            .collect();
        Self { n, estimates }
    }

    /// Bit-flip-restricted estimator: outcome totals are reduced to the
    /// flip count `t_1` and mapped through the scalar table
    /// `q_hat = values[t_1]` to the estimate `(1-q_hat, q_hat, 0, 0)`.
    pub fn bit_flip(n: usize, values: &crate::Estimator) -> Result<Self, ProtocolError> {
        if values.len() != n + 1 {
            return Err(ProtocolError::EstimatorSize {
                got: values.len(),
                needed: n + 1,
            });
        }
        let estimates = compositions(n)
            .iter()
            .map(|t| {
                let q = values.estimate(t[1]);
                [1.0 - q, q, 0.0, 0.0]
            })
            .collect();
        Ok(Self { n, estimates })
    }
}

fn multinomial_pmf(t: &[usize; 4], n: usize, p: &[f64; 4]) -> f64 {
    let mut ln = ln_factorial(n);
    for j in 0..4 {
        if t[j] > 0 {
            if p[j] <= 0.0 {
                return 0.0;
            }
            ln += t[j] as f64 * p[j].ln() - ln_factorial(t[j]);
        }
    }
    ln.exp()
}

/// Exact worst-case fidelity of the Bell-measure-and-prepare Pauli
/// cloner: `sum_t Mult(t | n, p) F_CJ(N_{p_hat(t)}, N_p)^(m-n)`,
/// minimized over the net. Parameters are reported by net index.
pub fn pauli_mp_fidelity(
    p_net: &[[f64; 4]],
    n: usize,
    m: usize,
    est: &PauliEstimator,
) -> Result<ProtocolResult, ProtocolError> {
    check_counts(n, m)?;
    if p_net.is_empty() {
        return Err(ProtocolError::EmptyNet);
    }
    let totals = compositions(n);
    if est.estimates.len() != totals.len() || est.n != n {
        return Err(ProtocolError::EstimatorSize {
            got: est.estimates.len(),
            needed: totals.len(),
        });
    }
    let mut grid = Vec::with_capacity(p_net.len());
    for (idx, p) in p_net.iter().enumerate() {
        let mut fid = 0.0;
        for (t, p_hat) in totals.iter().zip(&est.estimates) {
            let w = multinomial_pmf(t, n, p);
            if w > 0.0 {
                fid += w * pauli_cj_fidelity(p_hat, p)?.powi((m - n) as i32);
            }
        }
        grid.push((idx as f64, fid.min(1.0)));
    }
    Ok(ProtocolResult::from_grid(n, m, grid, None))
}

/// Exact worst-case fidelity of the Pauli estimate-and-prepare cloner,
/// which measures the `n` uses and prepares all `m` outputs fresh as
/// `N_{p_hat(t)}^(x) m`. The averaged output is diagonal in the Bell
/// product basis, so the Choi fidelity is the classical Bhattacharyya
/// coefficient over `m`-copy outcome types:
/// `sum_c Mult(m, c) sqrt((sum_t Pr(t) prod_j p_hat_j^c_j) prod_j p_j^c_j)`.
///
/// Unlike [`pauli_mp_fidelity`], the mixing over outcomes happens
/// before the fidelity, which is why a biased two-point estimator can
/// beat the frequency estimator here.
pub fn pauli_ep_fidelity(
    p_net: &[[f64; 4]],
    n: usize,
    m: usize,
    est: &PauliEstimator,
) -> Result<ProtocolResult, ProtocolError> {
    check_counts(n, m)?;
    if p_net.is_empty() {
        return Err(ProtocolError::EmptyNet);
    }
    let totals = compositions(n);
    if est.estimates.len() != totals.len() || est.n != n {
        return Err(ProtocolError::EstimatorSize {
            got: est.estimates.len(),
            needed: totals.len(),
        });
    }
    let types = compositions(m);
    let mut grid = Vec::with_capacity(p_net.len());
    for (idx, p) in p_net.iter().enumerate() {
        let weights: Vec<f64> = totals.iter().map(|t| multinomial_pmf(t, n, p)).collect();
        let mut fid = 0.0;
        for c in &types {
            let mut prepared = 0.0;
            for (w, p_hat) in weights.iter().zip(&est.estimates) {
                if *w > 0.0 {
                    prepared += w * pow_prod(p_hat, c);
                }
            }
            let target = pow_prod(p, c);
            if prepared > 0.0 && target > 0.0 {
                let mult = (ln_factorial(m)
                    - c.iter().map(|&cj| ln_factorial(cj)).sum::<f64>())
                .exp();
                fid += mult * (prepared * target).sqrt();
            }
        }
        grid.push((idx as f64, fid.min(1.0)));
    }
    Ok(ProtocolResult::from_grid(n, m, grid, None))
}

fn pow_prod(p: &[f64; 4], c: &[usize; 4]) -> f64 {
    let mut out = 1.0;
    for j in 0..4 {
        if c[j] > 0 {
            if p[j] <= 0.0 {
                return 0.0;
            }
            out *= p[j].powi(c[j] as i32);
        }
    }
    out
}

/// Exact `E[sqrt(X)]` for `X ~ Bin(n, p)` next to the lower bound
/// `sqrt(p n) (1 - (1-p)/(2 p n))`; the exact value dominates the
/// bound.
pub fn binom_sqrt_bound_check(n: usize, p: f64) -> Result<(f64, f64), ProtocolError> {
    if n == 0 || n > 60 {
        return Err(ProtocolError::OutOfDomain {
            name: "n",
            value: n as f64,
            domain: "[1, 60]",
        });
    }
    if !(p > 0.0 && p <= 1.0) {
        return Err(ProtocolError::OutOfDomain {
            name: "p",
            value: p,
            domain: "(0, 1]",
        });
    }
    let exact: f64 = (0..=n)
        .map(|t| binom_pmf(t, n, p) * (t as f64).sqrt())
        .sum();
    let bound = (p * n as f64).sqrt() * (1.0 - (1.0 - p) / (2.0 * p * n as f64));
    Ok((exact, bound))
}

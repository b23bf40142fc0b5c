use metrics::ad_cj_fidelity;

use crate::{binom_pmf, check_counts, Estimator, ProtocolError, ProtocolResult};

fn check_ad_inputs(
    gamma_net: &[f64],
    n: usize,
    m: usize,
    est: &Estimator,
) -> Result<(), ProtocolError> {
    check_counts(n, m)?;
    if gamma_net.is_empty() {
        return Err(ProtocolError::EmptyNet);
    }
    if est.len() != n + 1 {
        return Err(ProtocolError::EstimatorSize {
            got: est.len(),
            needed: n + 1,
        });
    }
    for &g in gamma_net {
        if !(0.0..=1.0).contains(&g) {
            return Err(ProtocolError::OutOfDomain {
                name: "gamma",
                value: g,
                domain: "[0, 1]",
            });
        }
    }
    Ok(())
}

/// Concavity lower bound on the estimate-and-prepare amplitude-damping
/// cloner: each of the `n` uses is probed with `|1>`, the decay count
/// `t ~ Bin(n, gamma)` drives the estimate, and all `m` outputs are
/// prepared fresh:
/// `F >= sum_t Bin(t | n, gamma) F_CJ(E_{gamma_hat(t)}, E_gamma)^m`,
/// minimized over the net.
pub fn ad_ep_fidelity(
    gamma_net: &[f64],
    n: usize,
    m: usize,
    est: &Estimator,
) -> Result<ProtocolResult, ProtocolError> {
    check_ad_inputs(gamma_net, n, m, est)?;
    let grid = gamma_net
        .iter()
        .map(|&g| {
            let fid: f64 = (0..=n)
                .map(|t| {
                    binom_pmf(t, n, g)
                        * ad_cj_fidelity(est.estimate(t), g)
                            .expect("estimates clipped to [0,1]")
                            .powi(m as i32)
                })
                .sum();
            (g, fid.min(1.0))
        })
        .collect();
    Ok(ProtocolResult::from_grid(n, m, grid, Some(est.clone())))
}

/// Exact fidelity of the coherent amplitude-damping cloner: the `n`
/// uses pass through an instrument that observes each decay with
/// probability one half and preserves the channel action, so only the
/// `m - n` extra copies pay the estimation penalty:
/// `F = sum_t Bin(t | n, gamma/2) F_CJ(E_{gamma_hat(t)}, E_gamma)^(m-n)`,
/// minimized over the net. At `m = n` this is exactly 1.
pub fn ad_coherent_fidelity(
    gamma_net: &[f64],
    n: usize,
    m: usize,
    est: &Estimator,
) -> Result<ProtocolResult, ProtocolError> {
    check_ad_inputs(gamma_net, n, m, est)?;
    let grid = gamma_net
        .iter()
        .map(|&g| {
            let fid: f64 = (0..=n)
                .map(|t| {
                    binom_pmf(t, n, g / 2.0)
                        * ad_cj_fidelity(est.estimate(t), g)
                            .expect("estimates clipped to [0,1]")
                            .powi((m - n) as i32)
                })
                .sum();
            (g, fid.min(1.0))
        })
        .collect();
    Ok(ProtocolResult::from_grid(n, m, grid, Some(est.clone())))
}

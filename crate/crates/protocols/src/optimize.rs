use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::pauli::PauliEstimator;
use crate::{ad_coherent_fidelity, ad_ep_fidelity, Estimator, ProtocolError};

/// Which protocol's worst-case fidelity an estimator is tuned for.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OptimizeMode {
    /// Estimate-and-prepare amplitude-damping cloner.
    Ep,
    /// Coherent amplitude-damping cloner.
    Coherent,
    /// Bit-flip-restricted Pauli measure-and-prepare cloner; the net
    /// entries are flip probabilities.
    Pauli,
}

const RESTARTS: usize = 10;
const EVALS_PER_RESTART: usize = 2000;

/// Derivative-free ascent of the worst-case fidelity over the `n + 1`
/// estimator values, by Nelder-Mead with random restarts. The result
/// never scores below `init`; with `m = n` the objective is constant
/// and `init` is returned unchanged. Deterministic for a given `seed`.
pub fn optimize_estimator(
    mode: OptimizeMode,
    net: &[f64],
    n: usize,
    m: usize,
    init: &Estimator,
    seed: u64,
) -> Result<Estimator, ProtocolError> {
    if net.is_empty() {
        return Err(ProtocolError::EmptyNet);
    }
    if init.len() != n + 1 {
        return Err(ProtocolError::EstimatorSize {
            got: init.len(),
            needed: n + 1,
        });
    }
    if m == n {
        return Ok(init.clone());
    }

    let objective = |v: &[f64]| -> Result<f64, ProtocolError> {
        let est = Estimator::new(v.to_vec());
        let r = match mode {
            OptimizeMode::Ep => ad_ep_fidelity(net, n, m, &est)?,
            OptimizeMode::Coherent => ad_coherent_fidelity(net, n, m, &est)?,
            OptimizeMode::Pauli => {
                let p_net: Vec<[f64; 4]> = net.iter().map(|&p| [1.0 - p, p, 0.0, 0.0]).collect();
                crate::pauli_ep_fidelity(&p_net, n, m, &PauliEstimator::bit_flip(n, &est)?)?
            }
        };
        Ok(r.worst_case_fidelity)
    };

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut best = init.values.clone();
    let mut best_val = objective(&best)?;
    for restart in 0..RESTARTS {
        let start: Vec<f64> = if restart == 0 {
            init.values.clone()
        } else {
            init.values
                .iter()
                .map(|&v| (v + rng.gen_range(-0.3..0.3)).clamp(0.0, 1.0))
                .collect()
        };
        let (cand, val) = nelder_mead(&objective, &start, EVALS_PER_RESTART)?;
        if val > best_val {
            best_val = val;
            best = cand;
        }
    }
    Ok(Estimator::new(
        best.iter().map(|v| v.clamp(0.0, 1.0)).collect(),
    ))
}

/// Nelder-Mead maximization with a fixed evaluation budget.
fn nelder_mead(
    f: &impl Fn(&[f64]) -> Result<f64, ProtocolError>,
    start: &[f64],
    budget: usize,
) -> Result<(Vec<f64>, f64), ProtocolError> {
    let d = start.len();
    let mut evals = 0usize;
    let eval = |x: &[f64], evals: &mut usize| -> Result<f64, ProtocolError> {
        *evals += 1;
        f(x)
    };

    let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(d + 1);
    let v0 = eval(start, &mut evals)?;
    simplex.push((start.to_vec(), v0));
    for i in 0..d {
        let mut x = start.to_vec();
        x[i] = (x[i] + 0.1).clamp(0.0, 1.0);
        if (x[i] - start[i]).abs() < 1e-3 {
            x[i] = (start[i] - 0.1).clamp(0.0, 1.0);
        }
        let v = eval(&x, &mut evals)?;
        simplex.push((x, v));
    }

    while evals < budget {
        // Descending by objective: best first.
        simplex.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap());
        let spread = simplex[0].1 - simplex[d].1;
        let size: f64 = (0..d)
            .map(|i| (simplex[0].0[i] - simplex[d].0[i]).abs())
            .fold(0.0, f64::max);
        if spread < 1e-14 && size < 1e-10 {
            break;
        }
        let centroid: Vec<f64> = (0..d)
            .map(|i| simplex[..d].iter().map(|(x, _)| x[i]).sum::<f64>() / d as f64)
            .collect();
        let worst = simplex[d].clone();
        let reflect: Vec<f64> = (0..d)
            .map(|i| (2.0 * centroid[i] - worst.0[i]).clamp(0.0, 1.0))
            .collect();
        let fr = eval(&reflect, &mut evals)?;
        if fr > simplex[0].1 {
            let expand: Vec<f64> = (0..d)
                .map(|i| (centroid[i] + 2.0 * (reflect[i] - centroid[i])).clamp(0.0, 1.0))
                .collect();
            let fe = eval(&expand, &mut evals)?;
            simplex[d] = if fe > fr { (expand, fe) } else { (reflect, fr) };
        } else if fr > simplex[d - 1].1 {
            simplex[d] = (reflect, fr);
        } else {
            let contract: Vec<f64> = (0..d)
                .map(|i| (centroid[i] + 0.5 * (worst.0[i] - centroid[i])).clamp(0.0, 1.0))
                .collect();
            let fc = eval(&contract, &mut evals)?;
            if fc > worst.1 {
                simplex[d] = (contract, fc);
            } else {
                // Shrink toward the best vertex.
                let best = simplex[0].0.clone();
                for entry in simplex.iter_mut().skip(1) {
                    let x: Vec<f64> = (0..d)
                        .map(|i| (best[i] + 0.5 * (entry.0[i] - best[i])).clamp(0.0, 1.0))
                        .collect();
                    let v = eval(&x, &mut evals)?;
                    *entry = (x, v);
                    if evals >= budget {
                        break;
                    }
                }
            }
        }
    }
    simplex.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap());
    Ok(simplex[0].clone())
}

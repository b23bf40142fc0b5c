use metrics::{ad_cj_fidelity, pauli_cj_fidelity};

use crate::{check_counts, ProtocolError};

/// The adversary's parameter net for a dummy-process evaluation.
#[derive(Clone, Debug)]
pub enum ParameterNet {
    /// Amplitude-damping rates `gamma`.
    AmplitudeDamping(Vec<f64>),
    /// Pauli probability 4-vectors.
    Pauli(Vec<[f64; 4]>),
}

/// Outcome of the dummy-process max-min.
#[derive(Clone, Debug)]
pub struct DummyResult {
    /// Parameter of the best fixed output channel (`[gamma]` or the
    /// Pauli 4-vector).
    pub parameter: Vec<f64>,
    /// `max_dummy min_net F_CJ` for a single extra copy.
    pub base_fidelity: f64,
    /// `base_fidelity^(m - n)`.
    pub fidelity: f64,
}

/// Best fixed ("dummy") channel from the same family, ignoring all `n`
/// input uses: the channel maximizing the worst-case single-copy Choi
/// fidelity over the net, with overall fidelity `(max min F_CJ)^(m-n)`.
pub fn dummy_fidelity(
    net: &ParameterNet,
    n: usize,
    m: usize,
) -> Result<DummyResult, ProtocolError> {
    check_counts(n, m)?;
    let (parameter, base) = match net {
        ParameterNet::AmplitudeDamping(gammas) => {
            if gammas.is_empty() {
                return Err(ProtocolError::EmptyNet);
            }
            let objective = |gd: f64| {
                gammas
                    .iter()
                    .map(|&g| ad_cj_fidelity(g, gd).expect("net inside [0,1]"))
                    .fold(f64::INFINITY, f64::min)
            };
            let gd = golden_argmax(objective, 0.0, 1.0);
            (vec![gd], objective(gd))
        }
        ParameterNet::Pauli(ps) => {
            if ps.is_empty() {
                return Err(ProtocolError::EmptyNet);
            }
            let objective = |q: &[f64; 4]| {
                ps.iter()
                    .map(|p| pauli_cj_fidelity(p, q).expect("valid distributions"))
                    .fold(f64::INFINITY, f64::min)
            };
            let q = simplex_argmax(objective);
            (q.to_vec(), objective(&q))
        }
    };
    Ok(DummyResult {
        parameter,
        base_fidelity: base,
        fidelity: base.powi((m - n) as i32),
    })
}

/// Argmax of a concave function on `[lo, hi]` by golden-section search.
fn golden_argmax(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
    let phi = (5.0f64.sqrt() - 1.0) / 2.0;
    let mut x1 = hi - phi * (hi - lo);
    let mut x2 = lo + phi * (hi - lo);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    while hi - lo > 1e-14 {
        if f1 < f2 {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + phi * (hi - lo);
            f2 = f(x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - phi * (hi - lo);
            f1 = f(x1);
        }
    }
    0.5 * (lo + hi)
}

/// Argmax of a concave function over the probability simplex on four
/// outcomes, by iterated box refinement of the three free coordinates.
fn simplex_argmax(f: impl Fn(&[f64; 4]) -> f64) -> [f64; 4] {
    let mut center = [0.25f64; 3];
    let mut width = 1.0f64;
    let mut global_best = f64::NEG_INFINITY;
    let mut global_q = [0.25; 4];
    const GRID: i32 = 4;
    for _ in 0..72 {
        let mut best = f64::NEG_INFINITY;
        let mut best_c = center;
        for i in -GRID..=GRID {
            for j in -GRID..=GRID {
                for k in -GRID..=GRID {
                    let q0 = center[0] + i as f64 * width / GRID as f64;
                    let q1 = center[1] + j as f64 * width / GRID as f64;
                    let q2 = center[2] + k as f64 * width / GRID as f64;
                    let q3 = 1.0 - q0 - q1 - q2;
                    if q0 < 0.0 || q1 < 0.0 || q2 < 0.0 || q3 < 0.0 {
                        continue;
                    }
                    let q = [q0, q1, q2, q3];
                    let v = f(&q);
                    if v > best {
                        best = v;
                        best_c = [q0, q1, q2];
                    }
                    if v > global_best {
                        global_best = v;
                        global_q = q;
                    }
                }
            }
        }
        center = best_c;
        width *= 0.55;
        if width < 5e-16 {
            break;
        }
    }
    global_q
}

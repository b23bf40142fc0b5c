use channels::{kraus_to_choi, tensor_channels, KrausChannel};
use matrix_core::{partial_transpose, ComplexMatrix};
use metrics::cj_fidelity_choi;
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::coords::{block_offsets, decode_herm, encode_herm, herm_len};
use crate::process::{apply_process, contract_slots, slot_choi};
use crate::solver::{admm_loop, SolveOptions, SolveStatus};
use crate::{ProcessChoi, ProcessDims, ProcessKind, ProcessProjector, SdpError};

/// Largest process dimension the structured solver accepts; the normal
/// matrix is dense of side `dim^2`.
const MAX_PROCESS_DIM: usize = 96;

/// Options of the worst-case cloning SDP.
#[derive(Clone, Copy, Debug)]
pub struct CloneOptions {
    pub kind: ProcessKind,
    /// Restrict the process Choi to positive partial transpose across
    /// the produced-channel / slot bipartition; contains every
    /// measure-and-prepare process.
    pub ppt: bool,
    pub tol: f64,
    pub max_iters: usize,
    pub rho: f64,
}

impl Default for CloneOptions {
    fn default() -> Self {
        Self {
            kind: ProcessKind::Parallel,
            ppt: false,
            tol: 1e-7,
            max_iters: 200_000,
            rho: 1.0,
        }
    }
}

/// Outcome of [`worst_case_sdp`]: the found process, its exact
/// per-channel fidelities, and solver diagnostics. `t_star` is the
/// minimum fidelity of the returned process over the net, computed
/// exactly rather than read off the solver objective.
#[derive(Clone, Debug)]
pub struct CloneSolution {
    pub t_star: f64,
    pub process: ProcessChoi,
    pub per_channel: Vec<f64>,
    /// Objective value of the cone-feasible solver iterate.
    pub objective: f64,
    pub status: SolveStatus,
    pub iterations: usize,
    pub primal_residual: f64,
    pub dual_residual: f64,
}

/// `count` evenly spaced points covering `[a, b]` inclusive.
pub fn uniform_grid(a: f64, b: f64, count: usize) -> Vec<f64> {
    assert!(count >= 1);
    if count == 1 {
        return vec![a];
    }
    (0..count)
        .map(|k| a + (b - a) * k as f64 / (count - 1) as f64)
        .collect()
}

/// Maximizes the worst-case Choi fidelity `min_i F(P[E_i^(x)n], E_i^(x)m)`
/// over processes of the requested causal class, by the splitting
/// iteration with one process block, one fidelity block per net
/// channel, and scalar slacks tying each fidelity to the common level.
pub fn worst_case_sdp(
    net: &[KrausChannel],
    n: usize,
    m: usize,
    opts: &CloneOptions,
) -> Result<CloneSolution, SdpError> {
    if net.is_empty() {
        return Err(SdpError::EmptyNet);
    }
    if !(1..=2).contains(&n) || n > m {
        return Err(SdpError::BadProblem(format!(
            "need 1 <= n <= 2 and n <= m, got n = {n}, m = {m}"
        )));
    }
    let d = net[0].d_in();
    for e in net {
        if e.d_in() != d || e.d_out() != d {
            return Err(SdpError::DimensionMismatch(
                "net channels must share one square dimension".into(),
            ));
        }
    }
    let d_io = d.pow(m as u32);
    let dims = ProcessDims {
        d_in: d_io,
        d_out: d_io,
        slots: vec![(d, d); n],
    };
    let big_d = dims.total_dim();
    if big_d > MAX_PROCESS_DIM {
        return Err(SdpError::TooLarge(big_d, MAX_PROCESS_DIM));
    }
    let f_dim = d_io * d_io;
    let h = net.len();
    let projector = ProcessProjector::new(opts.kind, &dims)?;
    let tdims = dims.tensor_dims();
    let trace_target = dims.required_trace();

    // Per-channel data: slot-space Choi R_i, its conjugate for the
    // adjoint, and the normalized target Choi of E_i^(x)m.
    let mut slot_r = Vec::with_capacity(h);
    let mut slot_r_conj = Vec::with_capacity(h);
    let mut targets = Vec::with_capacity(h);
    for e in net {
        let per_slot = vec![kraus_to_choi(e, false); n];
        let r = slot_choi(&per_slot)?;
        slot_r_conj.push(r.conj());
        slot_r.push(r);
        let mut tensor = e.clone();
        for _ in 1..m {
            tensor = tensor_channels(&tensor, e);
        }
        targets.push(kraus_to_choi(&tensor, true));
    }

    // Normal operator of the affine projection on the process block,
    // restricted to the projector's range:
    // Pi (kappa I + sum_i L_i^* L_i) Pi + (I - Pi).
    let herm_d = herm_len(big_d);
    let kappa = if opts.ppt { 2.0 } else { 1.0 };
    let inv_din = 1.0 / dims.d_in as f64;
    let mut normal = DMatrix::<f64>::zeros(herm_d, herm_d);
    let mut basis = vec![0.0; herm_d];
    let mut col = vec![0.0; herm_d];
    for k in 0..herm_d {
        basis[k] = 1.0;
        let s_k = decode_herm(&basis, big_d);
        basis[k] = 0.0;
        let p_k = projector.apply(&s_k)?;
        let mut acc = p_k.scaled_re(kappa);
        for i in 0..h {
            let tl = contract_slots(&p_k, &slot_r[i], f_dim, dims.d_in);
            add_scaled_kron(&mut acc, &tl, &slot_r_conj[i], inv_din);
        }
        let out = &(&projector.apply(&acc)? + &s_k) - &p_k;
        encode_herm(&out, &mut col);
        for (r, v) in col.iter().enumerate() {
            normal[(r, k)] = *v;
        }
    }
    // Symmetrize away floating-point asymmetry before factorization.
    let normal = (&normal + normal.transpose()) * 0.5;
    let chol = normal
        .cholesky()
        .ok_or_else(|| SdpError::BadProblem("normal operator not positive definite".into()))?;
    let mut id_coords = vec![0.0; herm_d];
    encode_herm(&ComplexMatrix::identity(big_d), &mut id_coords);
    let w_vec = chol.solve(&DVector::from_column_slice(&id_coords));
    let tr_w: f64 = (0..big_d).map(|i| w_vec[i]).sum();

    // Block layout: process, h fidelity blocks, h slacks, level t,
    // optional partial-transpose copy.
    let mut block_dims = vec![big_d];
    block_dims.extend(std::iter::repeat(2 * f_dim).take(h));
    block_dims.extend(std::iter::repeat(1).take(h));
    block_dims.push(1);
    if opts.ppt {
        block_dims.push(big_d);
    }
    let (offsets, total) = block_offsets(&block_dims);
    let s_off = offsets[0];
    let b_off: Vec<usize> = (0..h).map(|i| offsets[1 + i]).collect();
    let slack_off = offsets[1 + h];
    let t_off = offsets[1 + 2 * h];
    let p_off = opts.ppt.then(|| offsets[2 + 2 * h]);

    let mut objective = vec![0.0; total];
    objective[t_off] = 1.0;

    let sigma: Vec<&ComplexMatrix> = targets.iter().map(|t| t.matrix()).collect();
    let a_coeff = f_dim as f64 / 2.0 + 1.0;

    let mut project = |v: &[f64]| -> Vec<f64> {
        let mut out = vec![0.0; total];
        let s0 = decode_herm(&v[s_off..s_off + herm_d], big_d);
        let blocks0: Vec<ComplexMatrix> = (0..h)
            .map(|i| decode_herm(&v[b_off[i]..b_off[i] + herm_len(2 * f_dim)], 2 * f_dim))
            .collect();
        let t0 = v[t_off];

        // Couple each fidelity-block trace to the slack and the level.
        let y0: Vec<f64> = blocks0
            .iter()
            .map(|b| (0..f_dim).map(|k| b[(k, f_dim + k)].re).sum())
            .collect();
        let resid: Vec<f64> = (0..h)
            .map(|i| v[slack_off + i] + t0 - y0[i])
            .collect();
        let resid_sum: f64 = resid.iter().sum();
        let lambda: Vec<f64> = resid
            .iter()
            .map(|r| (r - resid_sum / (a_coeff + h as f64)) / a_coeff)
            .collect();
        let lambda_sum: f64 = lambda.iter().sum();
        for i in 0..h {
            out[slack_off + i] = v[slack_off + i] - lambda[i];
        }
        out[t_off] = t0 - lambda_sum;

        // Joint least squares of the process block with the top-left
        // fidelity corners tied to its channel action.
        let mut rhs = s0;
        if let Some(poff) = p_off {
            let p0 = decode_herm(&v[poff..poff + herm_d], big_d);
            let gamma = partial_transpose(&p0, &tdims, &[0, 1]).expect("dims fixed");
            rhs = &rhs + &gamma;
        }
        for i in 0..h {
            let tl0 = corner(&blocks0[i], f_dim);
            add_scaled_kron(&mut rhs, &tl0, &slot_r_conj[i], inv_din);
        }
        let rhs_p = projector.apply(&rhs).expect("dims fixed");
        let mut rhs_coords = vec![0.0; herm_d];
        encode_herm(&rhs_p, &mut rhs_coords);
        let mut sol = chol.solve(&DVector::from_column_slice(&rhs_coords));
        let tr_free: f64 = (0..big_d).map(|i| sol[i]).sum();
        let mu = (trace_target - tr_free) / tr_w;
        for k in 0..herm_d {
            sol[k] += mu * w_vec[k];
        }
        out[s_off..s_off + herm_d].copy_from_slice(sol.as_slice());
        let s_new = decode_herm(&out[s_off..s_off + herm_d], big_d);

        for i in 0..h {
            let tl = contract_slots(&s_new, &slot_r[i], f_dim, dims.d_in);
            let dy = ((y0[i] + (f_dim as f64 / 2.0) * lambda[i]) - y0[i]) / f_dim as f64;
            let mut b = ComplexMatrix::zeros(2 * f_dim, 2 * f_dim);
            for r in 0..f_dim {
                for c in 0..f_dim {
                    b[(r, c)] = tl[(r, c)];
                    b[(f_dim + r, f_dim + c)] = sigma[i][(r, c)];
                    let y = blocks0[i][(r, f_dim + c)]
                        + if r == c {
                            Complex64::new(dy, 0.0)
                        } else {
                            Complex64::ZERO
                        };
                    b[(r, f_dim + c)] = y;
                    b[(f_dim + c, r)] = y.conj();
                }
            }
            encode_herm(&b, &mut out[b_off[i]..b_off[i] + herm_len(2 * f_dim)]);
        }

        if let Some(poff) = p_off {
            let gamma = partial_transpose(&s_new, &tdims, &[0, 1]).expect("dims fixed");
            encode_herm(&gamma, &mut out[poff..poff + herm_d]);
        }
        out
    };

    let solve_opts = SolveOptions {
        tol: opts.tol,
        max_iters: opts.max_iters,
        rho: opts.rho,
    };
    let outcome = admm_loop(&block_dims, &mut project, &objective, &solve_opts)?;

    // Report the cone-feasible process snapped back onto the structural
    // subspace, with its exact worst-case fidelity.
    let s_z = decode_herm(&outcome.z[s_off..s_off + herm_d], big_d);
    let mut s_rep = projector.apply(&s_z)?;
    let tr = s_rep.trace().re;
    s_rep = &s_rep
        + &ComplexMatrix::identity(big_d).scaled_re((trace_target - tr) / big_d as f64);
    let process = ProcessChoi::new(dims.clone(), opts.kind, s_rep)?;

    let mut per_channel = Vec::with_capacity(h);
    for (e, target) in net.iter().zip(&targets) {
        let per_slot = vec![kraus_to_choi(e, false); n];
        let produced = crate::process::sanitized(&apply_process(&process, &per_slot)?)?;
        per_channel.push(cj_fidelity_choi(&produced, target)?);
    }
    let t_star = per_channel.iter().copied().fold(f64::INFINITY, f64::min);

    Ok(CloneSolution {
        t_star,
        process,
        per_channel,
        objective: outcome.z[t_off],
        status: outcome.status,
        iterations: outcome.iterations,
        primal_residual: outcome.primal,
        dual_residual: outcome.dual,
    })
}

/// Decides whether worst-case fidelity `x` is attainable, via the
/// maximization: feasible iff the maximized level reaches `x - 1e-5`.
pub fn feasibility_sdp(
    net: &[KrausChannel],
    x: f64,
    n: usize,
    m: usize,
    opts: &CloneOptions,
) -> Result<(bool, CloneSolution), SdpError> {
    let solution = worst_case_sdp(net, n, m, opts)?;
    Ok((solution.t_star >= x - 1e-5, solution))
}

/// Top-left `f x f` corner of a `2f x 2f` block.
fn corner(b: &ComplexMatrix, f: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(f, f, |r, c| b[(r, c)])
}

/// `acc += s * kron(a, b)`.
fn add_scaled_kron(acc: &mut ComplexMatrix, a: &ComplexMatrix, b: &ComplexMatrix, s: f64) {
    let (ra, ca) = (a.rows(), a.cols());
    let (rb, cb) = (b.rows(), b.cols());
    for i in 0..ra {
        for j in 0..ca {
            let aij = a[(i, j)] * s;
            if aij == Complex64::ZERO {
                continue;
            }
            for k in 0..rb {
                for l in 0..cb {
                    acc[(i * rb + k, j * cb + l)] += aij * b[(k, l)];
                }
            }
        }
    }
}

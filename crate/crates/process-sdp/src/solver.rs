use matrix_core::ComplexMatrix;
use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::coords::{block_offsets, decode_herm, encode_herm, herm_len, SQRT2};
use crate::SdpError;

/// One entry `coeff * X_block[row, col]` of a real linear functional on
/// the Hermitian block variables; the functional value is
/// `sum Re((re + i im) X[row, col])`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Term {
    pub block: usize,
    pub row: usize,
    pub col: usize,
    pub re: f64,
    pub im: f64,
}

/// An affine equality `functional(X) = rhs`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Constraint {
    pub terms: Vec<Term>,
    pub rhs: f64,
}

/// A semidefinite program over Hermitian PSD blocks: optimize a linear
/// functional subject to affine equalities.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SdpProblem {
    /// Dimensions of the PSD blocks.
    pub blocks: Vec<usize>,
    pub constraints: Vec<Constraint>,
    pub objective: Vec<Term>,
    pub maximize: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SolveStatus {
    Optimal,
    Infeasible,
    MaxIters,
}

/// Result of a solve: the block matrices of the cone-feasible iterate,
/// the objective value there, and the final residuals.
#[derive(Clone, Debug)]
pub struct SdpSolution {
    pub blocks: Vec<ComplexMatrix>,
    pub objective: f64,
    pub primal_residual: f64,
    pub dual_residual: f64,
    pub status: SolveStatus,
    pub iterations: usize,
}

#[derive(Clone, Copy, Debug)]
pub struct SolveOptions {
    /// Relative residual at which iteration stops.
    pub tol: f64,
    pub max_iters: usize,
    /// Initial penalty parameter; adapted during the run.
    pub rho: f64,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self {
            tol: 1e-7,
            max_iters: 200_000,
            rho: 1.0,
        }
    }
}

pub(crate) struct AdmmOutcome {
    pub z: Vec<f64>,
    pub status: SolveStatus,
    pub iterations: usize,
    pub primal: f64,
    pub dual: f64,
}

/// Operator-splitting iteration shared by the generic and structured
/// solvers: alternate the affine projection (with the objective folded
/// in as a gradient shift) and the blockwise PSD-cone projection, with
/// over-relaxation 1.5 and a residual-balancing penalty update.
pub(crate) fn admm_loop(
    block_dims: &[usize],
    project_affine: &mut dyn FnMut(&[f64]) -> Vec<f64>,
    objective: &[f64],
    opts: &SolveOptions,
) -> Result<AdmmOutcome, SdpError> {
    const ALPHA: f64 = 1.5;
    let (offsets, total) = block_offsets(block_dims);
    assert_eq!(objective.len(), total);
    let mut z = vec![0.0; total];
    let mut u = vec![0.0; total];
    let mut rho = opts.rho;
    let mut primal = f64::INFINITY;
    let mut dual = f64::INFINITY;
    let mut stalled = 0usize;
    let trace = std::env::var_os("CHANCLONE_SDP_TRACE").is_some();

    for iter in 1..=opts.max_iters {
        let v: Vec<f64> = (0..total)
            .map(|k| z[k] - u[k] + objective[k] / rho)
            .collect();
        let x = project_affine(&v);

        let z_prev = z.clone();
        let mut w = vec![0.0; total];
        for k in 0..total {
            let xr = ALPHA * x[k] + (1.0 - ALPHA) * z[k];
            w[k] = xr + u[k];
        }
        z = project_cone(&w, block_dims, &offsets)?;
        for k in 0..total {
            u[k] += w[k] - u[k] - z[k];
        }

        primal = norm_diff(&x, &z);
        dual = rho * norm_diff(&z, &z_prev);
        let scale = norm(&x).max(norm(&z)).max(1.0);
        if trace && iter % 1000 == 0 {
            let obj: f64 = objective.iter().zip(&z).map(|(c, zk)| c * zk).sum();
            eprintln!(
                "iter {iter}: primal {primal:.3e} dual {dual:.3e} rho {rho:.3e} scale {scale:.3e} obj {obj:.8}"
            );
        }
        if primal <= opts.tol * scale && dual <= opts.tol * scale {
            return Ok(AdmmOutcome {
                z,
                status: SolveStatus::Optimal,
                iterations: iter,
                primal,
                dual,
            });
        }

        // Divergence of the scaled dual variable with a stalled primal
        // residual certifies an empty intersection.
        if primal > 1e3 * opts.tol * scale && dual < 1e-2 * opts.tol * scale {
            stalled += 1;
            if stalled >= 2000 && norm(&u) > 1e3 * scale {
                return Ok(AdmmOutcome {
                    z,
                    status: SolveStatus::Infeasible,
                    iterations: iter,
                    primal,
                    dual,
                });
            }
        } else {
            stalled = 0;
        }

        if iter % 50 == 0 {
            if primal > 5.0 * dual && rho < 1e4 {
                rho *= 2.0;
                for uk in &mut u {
                    *uk *= 0.5;
                }
            } else if dual > 5.0 * primal && rho > 1e-4 {
                rho *= 0.5;
                for uk in &mut u {
                    *uk *= 2.0;
                }
            }
        }
    }
    Ok(AdmmOutcome {
        z,
        status: SolveStatus::MaxIters,
        iterations: opts.max_iters,
        primal,
        dual,
    })
}

fn project_cone(
    v: &[f64],
    block_dims: &[usize],
    offsets: &[usize],
) -> Result<Vec<f64>, SdpError> {
    let mut out = v.to_vec();
    for (b, &n) in block_dims.iter().enumerate() {
        let off = offsets[b];
        if n == 1 {
            out[off] = v[off].max(0.0);
            continue;
        }
        let m = decode_herm(&v[off..off + herm_len(n)], n);
        let clipped = clip_psd_fast(&m);
        encode_herm(&clipped, &mut out[off..off + herm_len(n)]);
    }
    Ok(out)
}

/// Eigenvalue clipping onto the PSD cone via the dense symmetric
/// eigensolver (fast in the hot loop; negative modes are dropped).
fn clip_psd_fast(m: &ComplexMatrix) -> ComplexMatrix {
    let n = m.rows();
    let nm = DMatrix::from_fn(n, n, |r, c| {
        let z = m[(r, c)];
        nalgebra::Complex::new(z.re, z.im)
    });
    let eig = nm.symmetric_eigen();
    let mut out = ComplexMatrix::zeros(n, n);
    for (k, &lambda) in eig.eigenvalues.iter().enumerate() {
        if lambda <= 0.0 {
            continue;
        }
        let col = eig.eigenvectors.column(k);
        for r in 0..n {
            let vr = col[r] * lambda;
            for c in 0..n {
                let z = vr * col[c].conj();
                out[(r, c)] += matrix_core::c64(z.re, z.im);
            }
        }
    }
    out.hermitized()
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|a| a * a).sum::<f64>().sqrt()
}

fn norm_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

/// Adds the real-coordinate coefficients of `Re((re + i im) X[r, c])`
/// to `out`.
fn add_term(out: &mut [f64], term: &Term, n: usize, off: usize) {
    let (r, c) = (term.row, term.col);
    if r == c {
        out[off + r] += term.re;
        return;
    }
    let (i, j, sign) = if r < c { (r, c, 1.0) } else { (c, r, -1.0) };
    let pair = i * (2 * n - i - 1) / 2 + (j - i - 1);
    let base = off + n + 2 * pair;
    out[base] += term.re / SQRT2;
    out[base + 1] += -sign * term.im / SQRT2;
}

fn functional_vector(
    terms: &[Term],
    blocks: &[usize],
    offsets: &[usize],
    total: usize,
) -> Result<Vec<f64>, SdpError> {
    let mut out = vec![0.0; total];
    for t in terms {
        let n = *blocks
            .get(t.block)
            .ok_or_else(|| SdpError::BadProblem(format!("block {} out of range", t.block)))?;
        if t.row >= n || t.col >= n {
            return Err(SdpError::BadProblem(format!(
                "entry ({}, {}) outside block of dim {n}",
                t.row, t.col
            )));
        }
        add_term(&mut out, t, n, offsets[t.block]);
    }
    Ok(out)
}

/// Solves the program with default options.
pub fn solve(problem: &SdpProblem) -> Result<SdpSolution, SdpError> {
    solve_with(problem, &SolveOptions::default())
}

/// Solves the program: the affine projection is a prefactored
/// normal-equation solve, the cone projection clips eigenvalues
/// blockwise.
pub fn solve_with(problem: &SdpProblem, opts: &SolveOptions) -> Result<SdpSolution, SdpError> {
    let (offsets, total) = block_offsets(&problem.blocks);
    if problem.blocks.iter().any(|&d| d == 0) {
        return Err(SdpError::BadProblem("zero-dimensional block".into()));
    }
    let rows = problem.constraints.len();
    let mut a = DMatrix::<f64>::zeros(rows, total);
    let mut b = DVector::<f64>::zeros(rows);
    for (k, con) in problem.constraints.iter().enumerate() {
        let v = functional_vector(&con.terms, &problem.blocks, &offsets, total)?;
        for (j, val) in v.iter().enumerate() {
            a[(k, j)] = *val;
        }
        b[k] = con.rhs;
    }
    let mut obj = functional_vector(&problem.objective, &problem.blocks, &offsets, total)?;
    if !problem.maximize {
        for o in &mut obj {
            *o = -*o;
        }
    }

    let gram = &a * a.transpose();
    let ridge = 1e-12 * (gram.diagonal().sum() / rows.max(1) as f64).max(1.0);
    let chol = (gram + DMatrix::identity(rows, rows) * ridge)
        .cholesky()
        .ok_or_else(|| SdpError::BadProblem("degenerate constraint system".into()))?;

    let mut project = |v: &[f64]| -> Vec<f64> {
        if rows == 0 {
            return v.to_vec();
        }
        let vv = DVector::from_column_slice(v);
        let resid = &a * &vv - &b;
        let corr = a.transpose() * chol.solve(&resid);
        (0..total).map(|k| v[k] - corr[k]).collect()
    };

    let outcome = admm_loop(&problem.blocks, &mut project, &obj, opts)?;
    let blocks: Vec<ComplexMatrix> = problem
        .blocks
        .iter()
        .enumerate()
        .map(|(i, &n)| decode_herm(&outcome.z[offsets[i]..offsets[i] + herm_len(n)], n))
        .collect();
    let raw_obj: f64 = obj
        .iter()
        .zip(&outcome.z)
        .map(|(c, zk)| c * zk)
        .sum();
    Ok(SdpSolution {
        blocks,
        objective: if problem.maximize { raw_obj } else { -raw_obj },
        primal_residual: outcome.primal,
        dual_residual: outcome.dual,
        status: outcome.status,
        iterations: outcome.iterations,
    })
}

/// Rewrites the program over doubled real blocks through the symmetric
/// embedding `X -> [[Re X, -Im X], [Im X, Re X]]` with trace-halved
/// functionals; optima agree with the complex original.
pub fn real_embedding(problem: &SdpProblem) -> SdpProblem {
    let embed_terms = |terms: &[Term]| -> Vec<Term> {
        let mut out = Vec::with_capacity(terms.len() * 4);
        for t in terms {
            let n = problem.blocks[t.block];
            let (r, c) = (t.row, t.col);
            out.push(Term {
                block: t.block,
                row: r,
                col: c,
                re: t.re / 2.0,
                im: 0.0,
            });
            out.push(Term {
                block: t.block,
                row: n + r,
                col: n + c,
                re: t.re / 2.0,
                im: 0.0,
            });
            out.push(Term {
                block: t.block,
                row: n + r,
                col: c,
                re: -t.im / 2.0,
                im: 0.0,
            });
            out.push(Term {
                block: t.block,
                row: r,
                col: n + c,
                re: t.im / 2.0,
                im: 0.0,
            });
        }
        out
    };
    SdpProblem {
        blocks: problem.blocks.iter().map(|&n| 2 * n).collect(),
        constraints: problem
            .constraints
            .iter()
            .map(|c| Constraint {
                terms: embed_terms(&c.terms),
                rhs: c.rhs,
            })
            .collect(),
        objective: embed_terms(&problem.objective),
        maximize: problem.maximize,
    }
}

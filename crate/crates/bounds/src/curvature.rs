use channels::{kraus_to_choi, ChannelCurve};
use matrix_core::{c64, op_norm, ComplexMatrix};
use metrics::state_fidelity;

use crate::BoundError;

/// Residual below which `i beta` counts as lying in the Hermitian span
/// of the Kraus products, i.e. `beta` can be gauged away.
const REMOVABLE_TOL: f64 = 1e-8;

/// The local curvature operators of a channel curve at a point:
/// `alpha = sum_n K'_n^dag K'_n` (PSD) and
/// `beta = sum_n K'_n^dag K_n` (anti-Hermitian by trace preservation),
/// with their operator norms.
#[derive(Clone, Debug)]
pub struct AlphaBeta {
    pub alpha: ComplexMatrix,
    pub beta: ComplexMatrix,
    pub alpha_norm: f64,
    pub beta_norm: f64,
}

fn alpha_beta_from(kraus: &[ComplexMatrix], dots: &[ComplexMatrix]) -> AlphaBeta {
    let d = kraus[0].cols();
    let mut alpha = ComplexMatrix::zeros(d, d);
    let mut beta = ComplexMatrix::zeros(d, d);
    for (k, dk) in kraus.iter().zip(dots) {
        let dkd = dk.dagger();
        alpha = &alpha + &(&dkd * dk);
        beta = &beta + &(&dkd * k);
    }
    let alpha = alpha.hermitized();
    AlphaBeta {
        alpha_norm: op_norm(&alpha),
        beta_norm: op_norm(&beta),
        alpha,
        beta,
    }
}

/// Kraus derivatives after applying a Hermitian gauge `h` on the Kraus
/// index space: `K'_n -> K'_n + i sum_m h_{nm} K_m`.
fn gauged_dots(
    kraus: &[ComplexMatrix],
    dots: &[ComplexMatrix],
    h: &ComplexMatrix,
) -> Vec<ComplexMatrix> {
    let r = kraus.len();
    dots.iter()
        .enumerate()
        .map(|(n, dk)| {
            let mut out = dk.clone();
            for m in 0..r {
                out = &out + &kraus[m].scaled(c64(0.0, 1.0) * h[(n, m)]);
            }
            out
        })
        .collect()
}

/// `alpha` and `beta` of `curve` at `x`, optionally in the Kraus
/// representation reached by the Hermitian gauge `h` (an `r x r` matrix
/// on the Kraus index space, `r` the number of Kraus operators).
pub fn alpha_beta(
    curve: &ChannelCurve,
    x: f64,
    gauge: Option<&ComplexMatrix>,
) -> Result<AlphaBeta, BoundError> {
    let ch = curve.kraus_at(x)?;
    let dots = curve.kraus_dot_at(x)?;
    match gauge {
        None => Ok(alpha_beta_from(ch.kraus(), &dots)),
        Some(h) => {
            h.require_hermitian(1e-10)?;
            if h.rows() != ch.kraus().len() {
                return Err(BoundError::Matrix(
                    matrix_core::MatrixError::DimensionMismatch(format!(
                        "gauge is {}x{} but the curve has {} Kraus operators",
                        h.rows(),
                        h.cols(),
                        ch.kraus().len()
                    )),
                ));
            }
            let dots = gauged_dots(ch.kraus(), &dots, h);
            Ok(alpha_beta_from(ch.kraus(), &dots))
        }
    }
}

/// Least-squares decision whether `i beta` lies in the Hermitian span of
/// the Kraus products `{K_i^dag K_j}`, i.e. whether a gauge exists that
/// sets `beta = 0`. Returns the verdict, the residual Frobenius norm,
/// and, when removable, the gauge matrix achieving it.
fn removability(
    kraus: &[ComplexMatrix],
    dots: &[ComplexMatrix],
) -> Result<(bool, f64, Option<ComplexMatrix>), BoundError> {
    let ab = alpha_beta_from(kraus, dots);
    let target = ab.beta.scaled(c64(0.0, 1.0)).hermitized();
    let r = kraus.len();
    let d = kraus[0].cols();

    // Hermitian basis of coefficient matrices c, mapped through
    // c -> sum_{mn} c_{mn} K_m^dag K_n.
    let mut basis_ops: Vec<ComplexMatrix> = Vec::with_capacity(r * r);
    let products: Vec<Vec<ComplexMatrix>> = (0..r)
        .map(|m| (0..r).map(|n| &kraus[m].dagger() * &kraus[n]).collect())
        .collect();
    let mut coeffs: Vec<ComplexMatrix> = Vec::with_capacity(r * r);
    for m in 0..r {
        coeffs.push(basis_coeff(r, m, m, BasisKind::Diag));
        for n in m + 1..r {
            coeffs.push(basis_coeff(r, m, n, BasisKind::Sym));
            coeffs.push(basis_coeff(r, m, n, BasisKind::Skew));
        }
    }
    for c in &coeffs {
        let mut op = ComplexMatrix::zeros(d, d);
        for m in 0..r {
            for n in 0..r {
                if c[(m, n)].norm() > 0.0 {
                    op = &op + &products[m][n].scaled(c[(m, n)]);
                }
            }
        }
        basis_ops.push(op.hermitized());
    }

    // Ridge-regularized normal equations on the real span.
    let k = basis_ops.len();
    let mut gram = vec![0.0f64; k * k];
    let mut rhs = vec![0.0f64; k];
    for i in 0..k {
        for j in 0..k {
            gram[i * k + j] = basis_ops[i].hs_inner(&basis_ops[j]).re;
        }
        gram[i * k + i] += 1e-12;
        rhs[i] = basis_ops[i].hs_inner(&target).re;
    }
    let x = solve_dense(&mut gram, &mut rhs, k);

    let mut recon = ComplexMatrix::zeros(d, d);
    let mut c_total = ComplexMatrix::zeros(r, r);
    for i in 0..k {
        recon = &recon + &basis_ops[i].scaled_re(x[i]);
        c_total = &c_total + &coeffs[i].scaled_re(x[i]);
    }
    let residual = (&target - &recon).frob_norm();
    if residual < REMOVABLE_TOL {
        // beta - i sum h_{mn} K_m^dag K_n = 0 at h = -c.
        Ok((true, residual, Some(c_total.scaled_re(-1.0))))
    } else {
        Ok((false, residual, None))
    }
}

enum BasisKind {
    Diag,
    Sym,
    Skew,
}

fn basis_coeff(r: usize, m: usize, n: usize, kind: BasisKind) -> ComplexMatrix {
    let mut c = ComplexMatrix::zeros(r, r);
    match kind {
        BasisKind::Diag => c[(m, m)] = c64(1.0, 0.0),
        BasisKind::Sym => {
            let s = std::f64::consts::FRAC_1_SQRT_2;
            c[(m, n)] = c64(s, 0.0);
            c[(n, m)] = c64(s, 0.0);
        }
        BasisKind::Skew => {
            let s = std::f64::consts::FRAC_1_SQRT_2;
            c[(m, n)] = c64(0.0, s);
            c[(n, m)] = c64(0.0, -s);
        }
    }
    c
}

/// Gaussian elimination with partial pivoting on a dense `k x k` system.
fn solve_dense(a: &mut [f64], b: &mut [f64], k: usize) -> Vec<f64> {
    for col in 0..k {
        let pivot = (col..k)
            .max_by(|&i, &j| {
                a[i * k + col]
                    .abs()
                    .partial_cmp(&a[j * k + col].abs())
                    .unwrap()
            })
            .unwrap();
        if pivot != col {
            for j in 0..k {
                a.swap(col * k + j, pivot * k + j);
            }
            b.swap(col, pivot);
        }
        let p = a[col * k + col];
        for row in col + 1..k {
            let f = a[row * k + col] / p;
            if f != 0.0 {
                for j in col..k {
                    a[row * k + j] -= f * a[col * k + j];
                }
                b[row] -= f * b[col];
            }
        }
    }
    let mut x = vec![0.0; k];
    for row in (0..k).rev() {
        let mut s = b[row];
        for j in row + 1..k {
            s -= a[row * k + j] * x[j];
        }
        x[row] = s / a[row * k + row];
    }
    x
}

/// Whether `beta` can be removed by a Kraus gauge at `x`, and the
/// least-squares residual of the span membership test.
pub fn beta_removable(curve: &ChannelCurve, x: f64) -> Result<(bool, f64), BoundError> {
    let ch = curve.kraus_at(x)?;
    let dots = curve.kraus_dot_at(x)?;
    let (ok, residual, _) = removability(ch.kraus(), &dots)?;
    Ok((ok, residual))
}

/// The Fisher-information envelope
/// `f_N = N sqrt(|alpha|) ((N-1) |beta| + sqrt(|alpha|))`.
///
/// With an explicit `gauge` the formula is evaluated in that
/// representation. Without one, the representation is chosen
/// automatically: if `beta` is removable the gauge achieving `beta = 0`
/// is constructed and `f_N = N |alpha|` there; otherwise the curve's
/// natural representation is used. Global minimization over all gauges
/// is not attempted.
pub fn f_n(
    curve: &ChannelCurve,
    x: f64,
    n: usize,
    gauge: Option<&ComplexMatrix>,
) -> Result<f64, BoundError> {
    let ab = match gauge {
        Some(_) => alpha_beta(curve, x, gauge)?,
        None => {
            let ch = curve.kraus_at(x)?;
            let dots = curve.kraus_dot_at(x)?;
            let (_, _, h) = removability(ch.kraus(), &dots)?;
            alpha_beta(curve, x, h.as_ref())?
        }
    };
    let n = n as f64;
    Ok(n * ab.alpha_norm.sqrt() * ((n - 1.0) * ab.beta_norm + ab.alpha_norm.sqrt()))
}

/// Quantum Fisher information of a state curve at `x` from the
/// symmetric finite difference `8 (1 - F(rho_{x-dx/2}, rho_{x+dx/2})) / dx^2`.
pub fn qfi_state(
    rho_fn: impl Fn(f64) -> ComplexMatrix,
    x: f64,
    dx: f64,
) -> Result<f64, BoundError> {
    if dx < 1e-7 {
        return Err(BoundError::StepTooSmall(dx));
    }
    let f = state_fidelity(&rho_fn(x - dx / 2.0), &rho_fn(x + dx / 2.0))?;
    Ok(8.0 * (1.0 - f) / (dx * dx))
}

/// Quantum Fisher information of the normalized Choi states of `curve`
/// at `x`, with the default step `dx = 1e-4`.
pub fn cj_curve_qfi(curve: &ChannelCurve, x: f64) -> Result<f64, BoundError> {
    let c = curve.clone();
    qfi_state(
        move |t| {
            kraus_to_choi(&c.kraus_at(t).expect("interior point"), true)
                .matrix()
                .clone()
        },
        x,
        1e-4,
    )
}

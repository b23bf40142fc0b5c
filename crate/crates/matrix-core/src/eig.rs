use num_complex::Complex64;

use crate::error::MatrixError;
use crate::matrix::ComplexMatrix;

/// Relative off-diagonal Frobenius threshold at which Jacobi sweeps stop.
const JACOBI_TOL: f64 = 1e-13;
const MAX_SWEEPS: usize = 100;

/// Entrywise Hermiticity tolerance required of eigensolver inputs.
const HERM_TOL: f64 = 1e-10;

/// Eigenvalue floor below which a nominally-PSD matrix is rejected.
const PSD_TOL: f64 = 1e-10;

/// Eigendecomposition of a Hermitian matrix by cyclic Jacobi rotations.
///
/// Returns the eigenvalues in descending order and the unitary matrix
/// whose columns are the matching eigenvectors, so that
/// `h = V diag(lambda) V^dag`.
pub fn herm_eig(h: &ComplexMatrix) -> Result<(Vec<f64>, ComplexMatrix), MatrixError> {
    let scale = h.max_abs().max(1.0);
    h.require_hermitian(HERM_TOL * scale)?;
    let n = h.rows();
    let mut a = h.hermitized();
    let mut v = ComplexMatrix::identity(n);
    let frob = a.frob_norm().max(1.0);

    for _sweep in 0..MAX_SWEEPS {
        if off_diag_frob(&a) <= JACOBI_TOL * frob {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[(p, q)];
                let r = apq.norm();
                if r == 0.0 {
                    continue;
                }
                // Unitary plane rotation annihilating a[p][q]: a phase
                // factor e^{i phi} = apq / |apq| times a real Jacobi
                // rotation with tan(2 theta) = 2|apq| / (a_qq - a_pp).
                let phase = apq / r;
                let theta = 0.5 * (2.0 * r).atan2(a[(q, q)].re - a[(p, p)].re);
                let c = theta.cos();
                let s = theta.sin();
                let spq = phase * s; // J[p][q] entry
                let sqp = -phase.conj() * s; // J[q][p] entry

                // A <- A J (columns p, q).
                for i in 0..n {
                    let aip = a[(i, p)];
                    let aiq = a[(i, q)];
                    a[(i, p)] = aip * c + aiq * sqp;
                    a[(i, q)] = aip * spq + aiq * c;
                }
                // A <- J^dag A (rows p, q).
                for j in 0..n {
                    let apj = a[(p, j)];
                    let aqj = a[(q, j)];
                    a[(p, j)] = apj * c + aqj * sqp.conj();
                    a[(q, j)] = apj * spq.conj() + aqj * c;
                }
                a[(p, q)] = Complex64::ZERO;
                a[(q, p)] = Complex64::ZERO;
                // V <- V J.
                for i in 0..n {
                    let vip = v[(i, p)];
                    let viq = v[(i, q)];
                    v[(i, p)] = vip * c + viq * sqp;
                    v[(i, q)] = vip * spq + viq * c;
                }
            }
        }
    }

    // Sort eigenpairs by descending eigenvalue.
    let mut order: Vec<usize> = (0..n).collect();
    let eigs: Vec<f64> = (0..n).map(|i| a[(i, i)].re).collect();
    order.sort_by(|&i, &j| eigs[j].partial_cmp(&eigs[i]).unwrap());
    let sorted_eigs: Vec<f64> = order.iter().map(|&i| eigs[i]).collect();
    let sorted_v = ComplexMatrix::from_fn(n, n, |i, j| v[(i, order[j])]);
    Ok((sorted_eigs, sorted_v))
}

fn off_diag_frob(a: &ComplexMatrix) -> f64 {
    let n = a.rows();
    let mut sum = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                sum += a[(i, j)].norm_sqr();
            }
        }
    }
    sum.sqrt()
}

/// Applies a real function to the eigenvalues of a Hermitian matrix.
fn spectral_map(
    h: &ComplexMatrix,
    f: impl Fn(f64) -> f64,
) -> Result<ComplexMatrix, MatrixError> {
    let (eigs, v) = herm_eig(h)?;
    let n = h.rows();
    let mut out = ComplexMatrix::zeros(n, n);
    for k in 0..n {
        let fe = f(eigs[k]);
        if fe == 0.0 {
            continue;
        }
        for i in 0..n {
            let vik = v[(i, k)] * fe;
            for j in 0..n {
                out[(i, j)] += vik * v[(j, k)].conj();
            }
        }
    }
    Ok(out)
}

/// PSD square root of a Hermitian PSD matrix.
///
/// Eigenvalues in `[-1e-10 * scale, 0)` are clipped to zero; anything
/// lower is rejected as not PSD.
pub fn psd_sqrt(h: &ComplexMatrix) -> Result<ComplexMatrix, MatrixError> {
    let scale = h.max_abs().max(1.0);
    let (eigs, _) = herm_eig(h)?;
    if let Some(&min) = eigs.last() {
        if min < -PSD_TOL * scale {
            return Err(MatrixError::NotPsd { min_eigenvalue: min });
        }
    }
    spectral_map(h, |x| if x > 0.0 { x.sqrt() } else { 0.0 })
}

/// Nearest PSD matrix in Frobenius norm: clips negative eigenvalues to 0.
pub fn clip_to_psd(h: &ComplexMatrix) -> Result<ComplexMatrix, MatrixError> {
    spectral_map(h, |x| x.max(0.0))
}

/// Operator norm (largest singular value).
pub fn op_norm(m: &ComplexMatrix) -> f64 {
    let gram = &m.dagger() * m;
    let (eigs, _) = herm_eig(&gram).expect("gram matrix is Hermitian by construction");
    eigs.first().map_or(0.0, |&x| x.max(0.0).sqrt())
}

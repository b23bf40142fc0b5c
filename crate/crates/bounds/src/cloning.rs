use channels::{ChannelCurve, KrausChannel};
use matrix_core::ComplexMatrix;
use metrics::{cj_fidelity, state_fidelity, unitary_theta};

use crate::curvature::{beta_removable, cj_curve_qfi, f_n};
use crate::special::a_function;
use crate::BoundError;

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};

/// Absolute tolerance of the adaptive Simpson quadrature.
const SIMPSON_TOL: f64 = 1e-8;
/// Endpoint shrink applied when an integration limit sits on the curve's
/// domain boundary (where Kraus derivatives may be singular).
const ENDPOINT_SHRINK: f64 = 1e-6;

fn check_counts(n: usize, m: usize) -> Result<(), BoundError> {
    if n > m {
        return Err(BoundError::CopyOrder { n, m });
    }
    Ok(())
}

/// Lower bound on the distance of any `n -> m` cloner of a state pair:
/// `max(0, (arccos F^m - arccos F^n) / 2)` with `F` the state fidelity,
/// using the power law `F(rho^(x)k, sigma^(x)k) = F(rho, sigma)^k`.
pub fn state_cloning_lower(
    rho0: &ComplexMatrix,
    rho1: &ComplexMatrix,
    n: usize,
    m: usize,
) -> Result<f64, BoundError> {
    check_counts(n, m)?;
    let f = state_fidelity(rho0, rho1)?;
    Ok((0.5 * (f.powi(m as i32).acos() - f.powi(n as i32).acos())).max(0.0))
}

fn single_unitary(e: &KrausChannel) -> Option<&ComplexMatrix> {
    if e.d_in() != e.d_out() || e.kraus().len() != 1 {
        return None;
    }
    let k = &e.kraus()[0];
    let dev = (&k.dagger() * k).max_abs_diff(&ComplexMatrix::identity(e.d_in()));
    (dev < 1e-9).then_some(k)
}

/// Lower bound on the `n -> m` cloning distance of a channel pair, by
/// comparing the `m`-copy target distance with what `n` uses can
/// discriminate.
///
/// For a unitary pair both terms use the eigenphase-spread closed form
/// `min(k Theta / 2, pi/2)`. Otherwise the target term is the Choi
/// Bures angle `arccos F^m` and the `n`-use term the subadditive cap
/// `min(n arccos F, pi/2)`.
pub fn cloning_lower_discrimination(
    e0: &KrausChannel,
    e1: &KrausChannel,
    n: usize,
    m: usize,
) -> Result<f64, BoundError> {
    check_counts(n, m)?;
    if let (Some(u0), Some(u1)) = (single_unitary(e0), single_unitary(e1)) {
        let theta = unitary_theta(&(u0 * &u1.dagger()))?;
        let d_m = (m as f64 * theta / 2.0).min(FRAC_PI_2);
        let d_n = (n as f64 * theta / 2.0).min(FRAC_PI_2);
        return Ok((0.5 * (d_m - d_n)).max(0.0));
    }
    let f = cj_fidelity(e0, e1)?;
    let d_m = f.powi(m as i32).acos();
    let d_n = (n as f64 * f.acos()).min(FRAC_PI_2);
    Ok((0.5 * (d_m - d_n)).max(0.0))
}

/// Lower bound on the `n -> m` cloning distance across a parameter
/// interval of a smooth channel curve: the `m`-copy Choi distance of
/// the endpoint channels minus the metrology cap
/// `int_a^b sqrt(f_n) dx` on `n`-use discrimination, halved.
///
/// The integral runs by adaptive Simpson (absolute tolerance `1e-8`);
/// limits that touch the curve's domain boundary are pulled inward by
/// `1e-6` to avoid singular Kraus derivatives.
pub fn cloning_lower_metrology(
    curve: &ChannelCurve,
    interval: (f64, f64),
    n: usize,
    m: usize,
) -> Result<f64, BoundError> {
    check_counts(n, m)?;
    let (a, b) = interval;
    if !(a < b) {
        return Err(BoundError::OutOfDomain {
            name: "interval",
            value: b - a,
            domain: "(0, inf) width",
        });
    }
    let f = cj_fidelity(&curve.kraus_at(a)?, &curve.kraus_at(b)?)?;
    let d_m = f.powi(m as i32).acos();

    let (dom_lo, dom_hi) = curve.domain();
    let lo = if a <= dom_lo { a + ENDPOINT_SHRINK } else { a };
    let hi = if b >= dom_hi { b - ENDPOINT_SHRINK } else { b };
    let integrand =
        |x: f64| -> Result<f64, BoundError> { Ok(f_n(curve, x, n, None)?.max(0.0).sqrt()) };
    let d_n = adaptive_simpson(&integrand, lo, hi, SIMPSON_TOL)?.min(FRAC_PI_2);
    Ok((0.5 * (d_m - d_n)).max(0.0))
}

/// Asymptotic bound on the replication distance at linear overhead
/// `m = (1 + lambda) n` for curves whose `beta` is removable:
/// `A(4 |alpha| / ((1 + lambda) QFI))` with `alpha` in the `beta = 0`
/// representation and QFI that of the Choi states.
pub fn linear_replication_bound(
    curve: &ChannelCurve,
    x: f64,
    lambda: f64,
) -> Result<f64, BoundError> {
    if lambda < 0.0 {
        return Err(BoundError::OutOfDomain {
            name: "lambda",
            value: lambda,
            domain: "[0, inf)",
        });
    }
    let (removable, residual) = beta_removable(curve, x)?;
    if !removable {
        return Err(BoundError::WrongBranch {
            expected: true,
            residual,
        });
    }
    let alpha4 = 4.0 * f_n(curve, x, 1, None)?;
    let qfi = cj_curve_qfi(curve, x)?;
    a_function(alpha4 / ((1.0 + lambda) * qfi))
}

/// Asymptotic bound on the replication distance at quadratic overhead
/// `m = (1 + lambda) n^2` for curves whose `beta` is not removable:
/// `A(4 sqrt(|alpha| |beta|) / ((1 + lambda) QFI))` in the natural
/// representation.
pub fn quadratic_replication_bound(
    curve: &ChannelCurve,
    x: f64,
    lambda: f64,
) -> Result<f64, BoundError> {
    if lambda < 0.0 {
        return Err(BoundError::OutOfDomain {
            name: "lambda",
            value: lambda,
            domain: "[0, inf)",
        });
    }
    let (removable, residual) = beta_removable(curve, x)?;
    if removable {
        return Err(BoundError::WrongBranch {
            expected: false,
            residual,
        });
    }
    let ab = crate::curvature::alpha_beta(curve, x, None)?;
    let qfi = cj_curve_qfi(curve, x)?;
    a_function(4.0 * (ab.alpha_norm * ab.beta_norm).sqrt() / ((1.0 + lambda) * qfi))
}

/// Diamond-distance lower bound for `n -> m` cloning of the full
/// unitary family: `(pi/4) (1 - n/m)`.
pub fn unitary_diamond_lower(n: usize, m: usize) -> Result<f64, BoundError> {
    check_counts(n, m)?;
    Ok(FRAC_PI_4 * (1.0 - n as f64 / m as f64))
}

fn adaptive_simpson(
    f: &impl Fn(f64) -> Result<f64, BoundError>,
    a: f64,
    b: f64,
    tol: f64,
) -> Result<f64, BoundError> {
    let fa = f(a)?;
    let fb = f(b)?;
    let m = 0.5 * (a + b);
    let fm = f(m)?;
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    simpson_step(f, a, b, fa, fm, fb, whole, tol, 30)
}

#[allow(clippy::too_many_arguments)]
fn simpson_step(
    f: &impl Fn(f64) -> Result<f64, BoundError>,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: usize,
) -> Result<f64, BoundError> {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm)?;
    let frm = f(rm)?;
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * tol {
        Ok(left + right + delta / 15.0)
    } else {
        let l = simpson_step(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1)?;
        let r = simpson_step(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1)?;
        Ok(l + r)
    }
}

use crate::BoundError;

/// Residual tolerance for the Lambert-W Halley iteration.
const W_TOL: f64 = 1e-13;
const W_MAX_ITERS: usize = 50;

/// Lower real branch `W_{-1}` of the Lambert W function on `[-1/e, 0)`.
///
/// Halley iteration from the asymptotic guess
/// `w0 = ln(-y) - ln(-ln(-y))`, converged when `|w e^w - y| <= 1e-13`.
pub fn lambert_w_m1(y: f64) -> Result<f64, BoundError> {
    let branch_point = -(-1.0f64).exp();
    if !(branch_point - 1e-15..0.0).contains(&y) {
        return Err(BoundError::OutOfDomain {
            name: "y",
            value: y,
            domain: "[-1/e, 0)",
        });
    }
    if y <= branch_point {
        return Ok(-1.0);
    }
    let l = (-y).ln();
    let mut w = if l < -1.0 + 1e-6 {
        // Near the branch point the log guess degenerates; use the
        // square-root expansion around w = -1 instead.
        -1.0 - (2.0 * (1.0 + std::f64::consts::E * y).max(0.0)).sqrt()
    } else {
        l - (-l).ln()
    };
    for _ in 0..W_MAX_ITERS {
        let e = w.exp();
        let f = w * e - y;
        if f.abs() <= W_TOL {
            break;
        }
        let fp = e * (w + 1.0);
        let denom = fp - f * (w + 2.0) / (2.0 * (w + 1.0));
        w -= f / denom;
    }
    Ok(w.min(-1.0))
}

/// The replication rate function
/// `A(z) = (arccos zeta - sqrt(2 z ln(1/zeta))) / 2` with
/// `zeta(z) = sqrt(-z / W_{-1}(-z e^{-z}))`, extended by `A(z) = 0` for
/// `z >= 1` and `A(0) = pi/4`.
///
/// `A` is the closed form of the one-dimensional maximization
/// `max_{u in (0,1]} (arccos u - sqrt(2 z ln(1/u))) / 2`; it decreases
/// monotonically from `pi/4` to `0` on `[0, 1]`.
pub fn a_function(z: f64) -> Result<f64, BoundError> {
    if z < 0.0 || !z.is_finite() {
        return Err(BoundError::OutOfDomain {
            name: "z",
            value: z,
            domain: "[0, inf)",
        });
    }
    if z >= 1.0 {
        return Ok(0.0);
    }
    if z == 0.0 {
        return Ok(std::f64::consts::FRAC_PI_4);
    }
    let w = lambert_w_m1(-z * (-z).exp())?;
    let zeta = (-z / w).sqrt().clamp(0.0, 1.0);
    let value = 0.5 * (zeta.acos() - (2.0 * z * (1.0 / zeta).ln()).sqrt());
    Ok(value.clamp(0.0, std::f64::consts::FRAC_PI_4))
}

/// The weaker rate function
/// `A~(z) = max_{0 <= x <= 1} (arccos x^{1/z} - arccos x) / 2` for
/// `z in (0, 1]`, with `A~(1) = 0` and `A~(0+) = pi/4`.
///
/// The inner maximization is unimodal in practice; a 1000-point
/// pre-scan brackets the maximizer before golden-section refinement.
pub fn a_tilde(z: f64) -> Result<f64, BoundError> {
    if !(z > 0.0 && z <= 1.0) {
        return Err(BoundError::OutOfDomain {
            name: "z",
            value: z,
            domain: "(0, 1]",
        });
    }
    if z == 1.0 {
        return Ok(0.0);
    }
    let exponent = 1.0 / z;
    let objective = |x: f64| 0.5 * (x.powf(exponent).acos() - x.acos());

    const SCAN: usize = 1000;
    let mut best_i = 0;
    let mut best = f64::NEG_INFINITY;
    for i in 0..=SCAN {
        let x = i as f64 / SCAN as f64;
        let v = objective(x);
        if v > best {
            best = v;
            best_i = i;
        }
    }
    let lo = (best_i.saturating_sub(1)) as f64 / SCAN as f64;
    let hi = ((best_i + 1).min(SCAN)) as f64 / SCAN as f64;
    Ok(golden_max(objective, lo, hi, 1e-12))
}

/// Golden-section maximization of a unimodal function on `[lo, hi]`.
pub(crate) fn golden_max(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64, tol: f64) -> f64 {
    let phi = (5.0f64.sqrt() - 1.0) / 2.0;
    let mut x1 = hi - phi * (hi - lo);
    let mut x2 = lo + phi * (hi - lo);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    while hi - lo > tol {
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
    f1.max(f2)
}

use std::sync::Arc;

use matrix_core::{c64, ComplexMatrix};

use crate::error::ChannelError;
use crate::families::{pauli_matrices, phase_gate};
use crate::kraus::KrausChannel;

/// Central-difference step used when no analytic derivative is supplied.
const FD_STEP: f64 = 1e-5;

type KrausFn = dyn Fn(f64) -> KrausChannel + Send + Sync;
type DotFn = dyn Fn(f64) -> Vec<ComplexMatrix> + Send + Sync;

/// A smooth one-parameter channel family `x -> E_x` with per-Kraus
/// derivatives `dK_n/dx` in a fixed, consistent Kraus ordering.
#[derive(Clone)]
pub struct ChannelCurve {
    kraus_fn: Arc<KrausFn>,
    dot_fn: Option<Arc<DotFn>>,
    domain: (f64, f64),
}

impl ChannelCurve {
    pub fn domain(&self) -> (f64, f64) {
        self.domain
    }

    fn check_domain(&self, x: f64) -> Result<(), ChannelError> {
        if x < self.domain.0 || x > self.domain.1 {
            return Err(ChannelError::ParameterOutOfRange {
                name: "x",
                value: x,
                domain: "curve domain",
            });
        }
        Ok(())
    }

    /// The channel at parameter `x`.
    pub fn kraus_at(&self, x: f64) -> Result<KrausChannel, ChannelError> {
        self.check_domain(x)?;
        Ok((self.kraus_fn)(x))
    }

    /// The Kraus derivatives at `x`: analytic when available, otherwise a
    /// central finite difference with step `1e-5`.
    pub fn kraus_dot_at(&self, x: f64) -> Result<Vec<ComplexMatrix>, ChannelError> {
        self.check_domain(x)?;
        if let Some(dot) = &self.dot_fn {
            return Ok(dot(x));
        }
        let h = FD_STEP.min((self.domain.1 - self.domain.0) / 4.0);
        let (lo, hi) = (x - h, x + h);
        self.check_domain(lo)?;
        self.check_domain(hi)?;
        let plus = (self.kraus_fn)(hi);
        let minus = (self.kraus_fn)(lo);
        if plus.kraus().len() != minus.kraus().len() {
            return Err(ChannelError::DimensionMismatch(
                "Kraus count changes across the finite-difference step".into(),
            ));
        }
        Ok(plus
            .kraus()
            .iter()
            .zip(minus.kraus())
            .map(|(p, m)| (p - m).scaled_re(1.0 / (2.0 * h)))
            .collect())
    }
}

/// A curve from explicit closures; derivatives fall back to finite
/// differences when `dot_fn` is `None`.
pub fn custom_curve(
    kraus_fn: impl Fn(f64) -> KrausChannel + Send + Sync + 'static,
    dot_fn: Option<Box<DotFn>>,
    domain: (f64, f64),
) -> ChannelCurve {
    ChannelCurve {
        kraus_fn: Arc::new(kraus_fn),
        dot_fn: dot_fn.map(Arc::from),
        domain,
    }
}

/// Amplitude-damping curve over `gamma` in `(0, 1)` with analytic
/// derivatives `dK_0 = -1/(2 sqrt(1-gamma)) |1><1|`,
/// `dK_1 = 1/(2 sqrt(gamma)) |0><1|`.
pub fn ad_curve() -> ChannelCurve {
    ChannelCurve {
        kraus_fn: Arc::new(|g| {
            crate::families::amplitude_damping(g).expect("gamma inside (0, 1)")
        }),
        dot_fn: Some(Arc::new(|g: f64| {
            let d0 = ComplexMatrix::from_real_diag(&[0.0, -0.5 / (1.0 - g).sqrt()]);
            let mut d1 = ComplexMatrix::zeros(2, 2);
            d1[(0, 1)] = c64(0.5 / g.sqrt(), 0.0);
            vec![d0, d1]
        })),
        domain: (0.0, 1.0),
    }
}

/// Pauli-noise curve `p(x) = base + x * direction` (direction sums to 0),
/// with Kraus `sqrt(p_j(x)) sigma_j` in fixed order and analytic
/// derivatives; the domain is clipped to keep every `p_j` positive.
pub fn pauli_curve(base: [f64; 4], direction: [f64; 4]) -> ChannelCurve {
    assert!(
        direction.iter().sum::<f64>().abs() < 1e-12,
        "direction must preserve normalization"
    );
    assert!((base.iter().sum::<f64>() - 1.0).abs() < 1e-12, "base must be a distribution");

    // Largest symmetric interval around 0 keeping all p_j > 0.
    let mut lo = f64::NEG_INFINITY;
    let mut hi = f64::INFINITY;
    for j in 0..4 {
        if direction[j] > 0.0 {
            lo = lo.max(-base[j] / direction[j]);
        } else if direction[j] < 0.0 {
            hi = hi.min(-base[j] / direction[j]);
        }
    }
    let sigmas = pauli_matrices();
    let weights = move |x: f64| -> [f64; 4] {
        [
            base[0] + x * direction[0],
            base[1] + x * direction[1],
            base[2] + x * direction[2],
            base[3] + x * direction[3],
        ]
    };
    let s2 = sigmas.clone();
    ChannelCurve {
        kraus_fn: Arc::new(move |x| {
            let p = weights(x);
            let kraus = p
                .iter()
                .zip(&sigmas)
                .map(|(&pj, s)| s.scaled_re(pj.max(0.0).sqrt()))
                .collect();
            KrausChannel::new(kraus).expect("Pauli mixture is CPTP")
        }),
        dot_fn: Some(Arc::new(move |x: f64| {
            let p = weights(x);
            p.iter()
                .zip(&direction)
                .zip(&s2)
                .map(|((&pj, &dj), s)| s.scaled_re(0.5 * dj / pj.sqrt()))
                .collect()
        })),
        domain: (lo, hi),
    }
}

/// Phase-gate curve `theta -> e^{i theta sigma_z} . e^{-i theta sigma_z}`
/// with derivative `i sigma_z U_theta`.
pub fn phase_curve() -> ChannelCurve {
    ChannelCurve {
        kraus_fn: Arc::new(phase_gate),
        dot_fn: Some(Arc::new(|theta: f64| {
            vec![ComplexMatrix::from_fn(2, 2, |i, j| {
                if i != j {
                    c64(0.0, 0.0)
                } else if i == 0 {
                    c64(0.0, 1.0) * c64(0.0, theta).exp()
                } else {
                    c64(0.0, -1.0) * c64(0.0, -theta).exp()
                }
            })]
        })),
        domain: (f64::NEG_INFINITY, f64::INFINITY),
    }
}

/// Curve of noisy phase gates `B_theta = U_theta o X_p` at fixed flip
/// probability `p`, parametrized by `theta`.
pub fn noisy_phase_b_curve(p: f64) -> ChannelCurve {
    let sigmas = pauli_matrices();
    let sx = sigmas[1].clone();
    let sz = |theta: f64| {
        ComplexMatrix::from_fn(2, 2, |i, j| {
            if i != j {
                c64(0.0, 0.0)
            } else if i == 0 {
                c64(0.0, 1.0) * c64(0.0, theta).exp()
            } else {
                c64(0.0, -1.0) * c64(0.0, -theta).exp()
            }
        })
    };
    let sx_k = sigmas[1].clone();
    ChannelCurve {
        kraus_fn: Arc::new(move |theta| {
            let u = phase_gate(theta).kraus()[0].clone();
            KrausChannel::new(vec![
                u.scaled_re((1.0 - p).sqrt()),
                (&u * &sx_k).scaled_re(p.sqrt()),
            ])
            .expect("bit-flipped phase gate is CPTP")
        }),
        dot_fn: Some(Arc::new(move |theta: f64| {
            let dz = sz(theta);
            vec![dz.scaled_re((1.0 - p).sqrt()), (&dz * &sx).scaled_re(p.sqrt())]
        })),
        domain: (f64::NEG_INFINITY, f64::INFINITY),
    }
}

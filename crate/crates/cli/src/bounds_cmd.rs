//! Analytic lower-bound curves on the replication Bures angle, as
//! functions of the rate variable `z = 1/(1+lambda)` (`M = (1+lambda)N`).

use bounds::{a_function, a_tilde};
use clap::Args;
use std::f64::consts::FRAC_PI_4;

use crate::output::{fmt_sig, Report};
use crate::{CliError, RunMeta};

#[derive(Args, Debug)]
pub struct BoundsArgs {
    /// Number of grid points on (0, 1].
    #[arg(long, default_value_t = 200)]
    points: usize,
}

pub fn run(args: &BoundsArgs, meta: &RunMeta) -> Result<(), CliError> {
    if args.points < 2 {
        return Err(CliError::BadFlags("--points must be at least 2".into()));
    }
    let config = format!("{args:?} seed={}", meta.seed);
    let mut report = Report::new(
        "bounds",
        &config,
        &["z", "A", "A_tilde", "linear", "pauli_mp_asymptote"],
    );
    for i in 1..=args.points {
        let z = i as f64 / args.points as f64;
        let lambda = (1.0 - z) / z;
        let a = a_function(z)?;
        let at = a_tilde(z)?;
        let linear = FRAC_PI_4 * (1.0 - z);
        let pauli = (-3.0 * lambda / 8.0).exp().acos();
        report.push(vec![
            fmt_sig(z),
            fmt_sig(a),
            fmt_sig(at),
            fmt_sig(linear),
            fmt_sig(pauli),
        ]);
    }
    report.write(meta.format, meta.output.as_deref())
}

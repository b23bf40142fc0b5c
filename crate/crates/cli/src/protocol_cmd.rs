//! Evaluation of a single cloning protocol over a parameter net.

use clap::Args;
use protocols::{
    ad_coherent_fidelity, ad_ep_fidelity, dummy_fidelity, optimize_estimator,
    pauli_ep_fidelity, pauli_mp_fidelity, phase_coherent_process, phase_estimation_exact,
    phase_mp_bound, su2_mp_bound, Estimator, OptimizeMode, ParameterNet, PauliEstimator,
    ProtocolResult,
};

use crate::output::{fmt_sig, Report};
use crate::{parse_interval, CliError, RunMeta};

#[derive(Args, Debug)]
pub struct ProtocolArgs {
    /// Protocol to evaluate.
    #[arg(long, value_parser = [
        "dummy", "ep", "coherent", "pauli-mp", "pauli-ep",
        "phase-mp", "su2-mp", "phase-estimation", "phase-coherent",
    ])]
    protocol: String,

    /// Channel family for net-based protocols.
    #[arg(long, value_parser = ["ad", "bitflip"], default_value = "ad")]
    channel: String,

    /// Input-call count N.
    #[arg(long, default_value_t = 1)]
    n: usize,

    /// Output count M.
    #[arg(long, default_value_t = 2)]
    m: usize,

    /// Parameter-net size.
    #[arg(long, default_value_t = 101)]
    net: usize,

    /// Parameter interval `lo:hi`.
    #[arg(long, default_value = "0:1")]
    interval: String,

    /// Optimize the estimator before evaluation (ep, coherent,
    /// pauli-ep with bit-flip nets).
    #[arg(long)]
    optimize: bool,

    /// Constant estimate (prepare parameter) overriding the natural
    /// estimator for ep/coherent/pauli protocols.
    #[arg(long)]
    q: Option<f64>,
}

pub fn run(args: &ProtocolArgs, meta: &RunMeta) -> Result<(), CliError> {
    let (lo, hi) = parse_interval(&args.interval)?;
    if args.net < 1 {
        return Err(CliError::BadFlags("--net must be at least 1".into()));
    }
    let scalar_net = process_sdp::uniform_grid(lo, hi, args.net);
    let n = args.n;
    // Phase estimation has no output count; everything else needs M >= N.
    let m = if args.protocol == "phase-estimation" {
        n
    } else {
        args.m
    };
    if n == 0 || m < n {
        return Err(CliError::BadFlags(format!(
            "need 1 <= N <= M, got N={n}, M={m}"
        )));
    }

    // Scalar estimator: constant --q, else the natural one per mode.
    let scalar_estimator = |mode: OptimizeMode| -> Result<Estimator, CliError> {
        let init = match (args.q, mode) {
            (Some(q), _) => Estimator::new(vec![q; n + 1]),
            (None, OptimizeMode::Coherent) => Estimator::natural_half_rate(n),
            (None, _) => Estimator::natural_frequency(n),
        };
        if args.optimize {
            Ok(optimize_estimator(mode, &scalar_net, n, m, &init, meta.seed)?)
        } else {
            Ok(init)
        }
    };
    let bit_flip_net = || -> Vec<[f64; 4]> {
        scalar_net.iter().map(|&p| [1.0 - p, p, 0.0, 0.0]).collect()
    };
    let require_bitflip = || -> Result<(), CliError> {
        if args.channel != "bitflip" {
            return Err(CliError::BadFlags(format!(
                "--protocol {} needs --channel bitflip (general Pauli nets are not flag-expressible)",
                args.protocol
            )));
        }
        Ok(())
    };

    let result: ProtocolResult = match args.protocol.as_str() {
        "dummy" => {
            let net = match args.channel.as_str() {
                "ad" => ParameterNet::AmplitudeDamping(scalar_net.clone()),
                _ => ParameterNet::Pauli(bit_flip_net()),
            };
            let d = dummy_fidelity(&net, n, m)?;
            ProtocolResult {
                n,
                m,
                worst_case_fidelity: d.fidelity,
                per_parameter_fidelities: vec![(d.parameter[0], d.fidelity)],
                estimator: None,
            }
        }
        "ep" => {
            require_ad(args)?;
            ad_ep_fidelity(&scalar_net, n, m, &scalar_estimator(OptimizeMode::Ep)?)?
        }
        "coherent" => {
            require_ad(args)?;
            ad_coherent_fidelity(&scalar_net, n, m, &scalar_estimator(OptimizeMode::Coherent)?)?
        }
        "pauli-mp" => {
            require_bitflip()?;
            let est = pauli_estimator(args, n)?;
            pauli_mp_fidelity(&bit_flip_net(), n, m, &est)?
        }
        "pauli-ep" => {
            require_bitflip()?;
            let est = if args.optimize {
                let init = scalar_init(args, n);
                let tuned =
                    optimize_estimator(OptimizeMode::Pauli, &scalar_net, n, m, &init, meta.seed)?;
                PauliEstimator::bit_flip(n, &tuned)?
            } else {
                pauli_estimator(args, n)?
            };
            pauli_ep_fidelity(&bit_flip_net(), n, m, &est)?
        }
        "phase-mp" => scalar_result(n, m, phase_mp_bound(n, m)),
        "su2-mp" => scalar_result(n, m, su2_mp_bound(n, m)),
        "phase-estimation" => scalar_result(n, n, phase_estimation_exact(n)),
        "phase-coherent" => phase_coherent_process(n, m)?,
        other => return Err(CliError::BadFlags(format!("unknown protocol `{other}`"))),
    };

    let config = format!("{args:?} seed={}", meta.seed);
    let mut report = Report::new("protocol", &config, &["parameter", "fidelity"]);
    for &(p, f) in &result.per_parameter_fidelities {
        report.push(vec![fmt_sig(p), fmt_sig(f)]);
    }
    report.extra = Some(serde_json::to_value(&result).map_err(|e| {
        CliError::Internal(format!("cannot serialize protocol result: {e}"))
    })?);
    report.write(meta.format, meta.output.as_deref())
}

fn require_ad(args: &ProtocolArgs) -> Result<(), CliError> {
    if args.channel != "ad" {
        return Err(CliError::BadFlags(format!(
            "--protocol {} is defined for --channel ad",
            args.protocol
        )));
    }
    Ok(())
}

fn scalar_init(args: &ProtocolArgs, n: usize) -> Estimator {
    match args.q {
        Some(q) => Estimator::new(vec![q; n + 1]),
        None => Estimator::natural_frequency(n),
    }
}

fn pauli_estimator(args: &ProtocolArgs, n: usize) -> Result<PauliEstimator, CliError> {
    Ok(PauliEstimator::bit_flip(n, &scalar_init(args, n))?)
}

fn scalar_result(n: usize, m: usize, value: f64) -> ProtocolResult {
    ProtocolResult {
        n,
        m,
        worst_case_fidelity: value,
        per_parameter_fidelities: vec![(n as f64, value)],
        estimator: None,
    }
}

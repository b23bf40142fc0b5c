//! Worst-case cloning SDP runner: solves over a channel net, dumps the
//! found process, and scores it on an evaluation grid.

use clap::Args;
use process_sdp::{
    evaluate_each, uniform_grid, worst_case_sdp, CloneOptions, ProcessKind, SolveStatus,
};
use serde_json::json;

use crate::output::{fmt_sig, Report};
use crate::table1::Family;
use crate::{parse_interval, CliError, RunMeta};

#[derive(Args, Debug)]
pub struct SdpArgs {
    /// Channel family of the net.
    #[arg(long, value_parser = ["ad", "bitflip"], default_value = "ad")]
    channel: String,

    /// Input-call count N.
    #[arg(long, default_value_t = 1)]
    n: usize,

    /// Output count M.
    #[arg(long, default_value_t = 2)]
    m: usize,

    /// Net size.
    #[arg(long, default_value_t = 21)]
    net: usize,

    /// Net interval `lo:hi`; defaults to the endpoint-free interval for
    /// amplitude damping and [0, 1] for bit flip.
    #[arg(long)]
    interval: Option<String>,

    /// Process class.
    #[arg(long, value_parser = ["parallel", "sequential", "noncausal"], default_value = "parallel")]
    kind: String,

    /// Restrict by positive partial transpose (measure-and-prepare
    /// bound).
    #[arg(long)]
    ppt: bool,

    /// Feasibility threshold to report against (optional).
    #[arg(long)]
    x: Option<f64>,

    /// Solver tolerance (relative residual).
    #[arg(long, default_value_t = 1e-5)]
    tol: f64,

    /// Solver iteration cap.
    #[arg(long, default_value_t = 60_000)]
    max_iters: usize,

    /// Evaluation-grid size on [0, 1].
    #[arg(long, default_value_t = 101)]
    eval_points: usize,
}

pub fn run(args: &SdpArgs, meta: &RunMeta) -> Result<(), CliError> {
    let family = Family::parse(&args.channel)?;
    if args.net < 1 {
        return Err(CliError::BadFlags("--net must be at least 1".into()));
    }
    let (lo, hi) = match &args.interval {
        Some(text) => parse_interval(text)?,
        None => match family {
            Family::Ad => (0.01, 0.96),
            Family::BitFlip => (0.0, 1.0),
        },
    };
    let kind = match args.kind.as_str() {
        "parallel" => ProcessKind::Parallel,
        "sequential" => ProcessKind::Sequential,
        _ => ProcessKind::NonCausal,
    };
    let net = family.net(lo, hi, args.net)?;
    let opts = CloneOptions {
        kind,
        ppt: args.ppt,
        tol: args.tol,
        max_iters: args.max_iters,
        ..Default::default()
    };
    let sol = worst_case_sdp(&net, args.n, args.m, &opts)?;

    let eval_grid = uniform_grid(0.0, 1.0, args.eval_points);
    let eval_channels = family.net(0.0, 1.0, args.eval_points)?;
    let eval = evaluate_each(&sol.process, &eval_channels, args.m)?;
    let eval_min = eval.iter().copied().fold(f64::INFINITY, f64::min);
    let eval_avg = eval.iter().sum::<f64>() / eval.len() as f64;

    let config = format!("{args:?} seed={}", meta.seed);
    let mut report = Report::new("sdp", &config, &["parameter", "fidelity"]);
    for (p, f) in eval_grid.iter().zip(&eval) {
        report.push(vec![fmt_sig(*p), fmt_sig(*f)]);
    }
    let process_json: serde_json::Value = serde_json::from_str(&sol.process.to_json())
        .map_err(|e| CliError::Internal(format!("process serialization: {e}")))?;
    report.extra = Some(json!({
        "t_star": sol.t_star,
        "objective": sol.objective,
        "status": sol.status,
        "iterations": sol.iterations,
        "primal_residual": sol.primal_residual,
        "dual_residual": sol.dual_residual,
        "feasible_at_x": args.x.map(|x| sol.t_star >= x - 1e-5),
        "net": uniform_grid(lo, hi, args.net),
        "per_channel": sol.per_channel,
        "eval_min": eval_min,
        "eval_avg": eval_avg,
        "process": process_json,
    }));
    report.summary = Some(format!(
        "t_star={} status={:?} eval_min={} eval_avg={}",
        fmt_sig(sol.t_star),
        sol.status,
        fmt_sig(eval_min),
        fmt_sig(eval_avg)
    ));
    report.write(meta.format, meta.output.as_deref())?;

    if sol.status != SolveStatus::Optimal {
        return Err(CliError::Solver(format!(
            "solver stopped with status {:?} after {} iterations (primal {:.2e}, dual {:.2e})",
            sol.status, sol.iterations, sol.primal_residual, sol.dual_residual
        )));
    }
    Ok(())
}

//! The 1->2 cloning feasibility table for amplitude-damping and
//! bit-flip channels.

use channels::{amplitude_damping, bit_flip, KrausChannel};
use clap::Args;
use process_sdp::{
    evaluate_process, uniform_grid, worst_case_sdp, CloneOptions, CloneSolution, SolveStatus,
};
use rayon::prelude::*;

use crate::output::{fmt_sig, Report};
use crate::{parse_interval, CliError, RunMeta};

#[derive(Args, Debug)]
pub struct Table1Args {
    /// Restrict to one channel family for a single custom row.
    #[arg(long, value_parser = ["ad", "bitflip"])]
    channel: Option<String>,

    /// Net size for a single custom row; without it the full default
    /// table is produced.
    #[arg(long)]
    net: Option<usize>,

    /// Net interval `lo:hi` for a custom row.
    #[arg(long)]
    interval: Option<String>,

    /// Feasibility thresholds for a custom row (repeatable); omitted
    /// means "report the maximized worst-case level".
    #[arg(long = "x")]
    thresholds: Vec<f64>,

    /// Restrict the process by positive partial transpose
    /// (measure-and-prepare bound) in a custom row.
    #[arg(long)]
    ppt: bool,

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

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Family {
    Ad,
    BitFlip,
}

impl Family {
    pub fn parse(name: &str) -> Result<Self, CliError> {
        match name {
            "ad" => Ok(Family::Ad),
            "bitflip" => Ok(Family::BitFlip),
            other => Err(CliError::BadFlags(format!("unknown channel `{other}`"))),
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Family::Ad => "ad",
            Family::BitFlip => "bitflip",
        }
    }

    pub fn channel(self, parameter: f64) -> Result<KrausChannel, CliError> {
        Ok(match self {
            Family::Ad => amplitude_damping(parameter)?,
            Family::BitFlip => bit_flip(parameter)?,
        })
    }

    pub fn net(self, lo: f64, hi: f64, count: usize) -> Result<Vec<KrausChannel>, CliError> {
        uniform_grid(lo, hi, count)
            .into_iter()
            .map(|p| self.channel(p))
            .collect()
    }
}

/// One solve shared by all thresholds of a table block.
struct Block {
    family: Family,
    ppt: bool,
    lo: f64,
    hi: f64,
    h: usize,
    /// Thresholds to report; `None` reports the maximized level.
    xs: Vec<Option<f64>>,
}

pub fn run(args: &Table1Args, meta: &RunMeta) -> Result<(), CliError> {
    let blocks = plan(args)?;
    let opts_base = CloneOptions {
        tol: args.tol,
        max_iters: args.max_iters,
        ..Default::default()
    };

    let solved: Vec<Result<CloneSolution, CliError>> = blocks
        .par_iter()
        .map(|b| {
            let net = b.family.net(b.lo, b.hi, b.h)?;
            let opts = CloneOptions {
                ppt: b.ppt,
                ..opts_base
            };
            Ok(worst_case_sdp(&net, 1, 2, &opts)?)
        })
        .collect();

    let config = format!("{args:?} seed={}", meta.seed);
    let mut report = Report::new(
        "table1",
        &config,
        &[
            "channel", "P", "interval", "H", "x", "soln", "F_CJ", "avg_F_CJ",
        ],
    );

    for (block, solved) in blocks.iter().zip(&solved) {
        let base = vec![
            block.family.label().to_string(),
            if block.ppt { "mp" } else { "all" }.to_string(),
            format!("{}..{}", block.lo, block.hi),
            block.h.to_string(),
        ];
        match solved {
            Err(e) => {
                for &x in &block.xs {
                    let mut row = base.clone();
                    row.extend([
                        x.map(fmt_sig).unwrap_or_else(|| "max".into()),
                        "error".into(),
                        "--".into(),
                        "--".into(),
                    ]);
                    report.push(row);
                    eprintln!("chanclone: table1 block failed: {}", e.message());
                }
            }
            Ok(sol) => {
                let converged = sol.status == SolveStatus::Optimal;
                // One evaluation per block, reused by its feasible rows.
                let eval = if converged {
                    let grid = block.family.net(0.0, 1.0, args.eval_points)?;
                    Some(evaluate_process(&sol.process, &grid, 2)?)
                } else {
                    None
                };
                for &x in &block.xs {
                    let mut row = base.clone();
                    let feasible = match x {
                        Some(x) => sol.t_star >= x - 1e-5,
                        None => true,
                    };
                    let soln = if !converged {
                        "error"
                    } else if feasible {
                        "yes"
                    } else {
                        "no"
                    };
                    let (fid, avg) = match (soln, eval) {
                        ("yes", Some((min, avg))) => (fmt_sig(min), fmt_sig(avg)),
                        _ => ("--".into(), "--".into()),
                    };
                    row.extend([
                        x.map(fmt_sig).unwrap_or_else(|| fmt_sig(sol.t_star)),
                        soln.to_string(),
                        fid,
                        avg,
                    ]);
                    report.push(row);
                }
            }
        }
    }

    report.write(meta.format, meta.output.as_deref())
}

fn plan(args: &Table1Args) -> Result<Vec<Block>, CliError> {
    if args.net.is_none() && args.channel.is_none() && args.interval.is_none() {
        // The default table: the four benchmark blocks, one solve each.
        return Ok(vec![
            Block {
                family: Family::Ad,
                ppt: false,
                lo: 0.0,
                hi: 1.0,
                h: 2,
                xs: vec![Some(1.0)],
            },
            Block {
                family: Family::Ad,
                ppt: false,
                lo: 0.01,
                hi: 0.96,
                h: 21,
                xs: vec![Some(0.92), Some(0.93), Some(0.94)],
            },
            Block {
                family: Family::Ad,
                ppt: true,
                lo: 0.05,
                hi: 0.966,
                h: 21,
                xs: vec![Some(0.92), Some(0.93)],
            },
            Block {
                family: Family::BitFlip,
                ppt: false,
                lo: 0.0,
                hi: 1.0,
                h: 21,
                xs: vec![Some(0.92), Some(0.93)],
            },
        ]);
    }

    let h = args.net.ok_or_else(|| {
        CliError::BadFlags("custom table rows need --net (with optional --channel/--interval/--x)".into())
    })?;
    if h < 1 {
        return Err(CliError::BadFlags("--net must be at least 1".into()));
    }
    let family = Family::parse(args.channel.as_deref().unwrap_or("ad"))?;
    let (lo, hi) = match &args.interval {
        Some(text) => parse_interval(text)?,
        None => (0.0, 1.0),
    };
    let xs = if args.thresholds.is_empty() {
        vec![None]
    } else {
        args.thresholds.iter().map(|&x| Some(x)).collect()
    };
    Ok(vec![Block {
        family,
        ppt: args.ppt,
        lo,
        hi,
        h,
        xs,
    }])
}

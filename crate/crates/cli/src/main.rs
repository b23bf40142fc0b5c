//! `chanclone`: command-line front end for the channel-cloning toolkit.
//!
//! Every subcommand emits machine-readable data (CSV or JSON) with a
//! provenance header, suitable for external plotting. Exit codes:
//! 0 success, 2 bad flags, 3 solver non-convergence, 4 internal error.

mod ad_clone;
mod bounds_cmd;
mod output;
mod protocol_cmd;
mod sdp_cmd;
mod table1;

use std::path::PathBuf;

use clap::{Parser, Subcommand};

use output::Format;

/// Errors that terminate a run, mapped onto the documented exit codes.
#[derive(Debug)]
pub enum CliError {
    /// Invalid flag combination (exit 2).
    BadFlags(String),
    /// A solve ended without convergence (exit 3).
    Solver(String),
    /// Internal invariant violation or I/O failure (exit 4).
    Internal(String),
}

impl CliError {
    fn exit_code(&self) -> i32 {
        match self {
            CliError::BadFlags(_) => 2,
            CliError::Solver(_) => 3,
            CliError::Internal(_) => 4,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::BadFlags(m) | CliError::Solver(m) | CliError::Internal(m) => m,
        }
    }
}

impl From<process_sdp::SdpError> for CliError {
    fn from(e: process_sdp::SdpError) -> Self {
        CliError::Internal(e.to_string())
    }
}

impl From<protocols::ProtocolError> for CliError {
    fn from(e: protocols::ProtocolError) -> Self {
        CliError::Internal(e.to_string())
    }
}

impl From<channels::ChannelError> for CliError {
    fn from(e: channels::ChannelError) -> Self {
        CliError::Internal(e.to_string())
    }
}

impl From<bounds::BoundError> for CliError {
    fn from(e: bounds::BoundError) -> Self {
        CliError::Internal(e.to_string())
    }
}

#[derive(Parser, Debug)]
#[command(
    name = "chanclone",
    version,
    about = "Optimal cloning of quantum channels: tables, bounds, protocols, and SDP searches"
)]
struct Cli {
    /// Output file; stdout when omitted.
    #[arg(long, global = true)]
    output: Option<PathBuf>,

    /// Output format.
    #[arg(long, global = true, value_enum, default_value = "csv")]
    format: Format,

    /// Seed for the stochastic estimator optimizers; fixed seed gives
    /// byte-identical output.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,

    /// Worker threads for independent net points and solves
    /// (0 = available parallelism); CHANCLONE_THREADS overrides.
    #[arg(long, global = true, default_value_t = 0)]
    threads: usize,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Reproduce the 1->2 cloning feasibility table (amplitude damping
    /// and bit flip).
    Table1(table1::Table1Args),
    /// Tabulate the analytic replication-error lower-bound curves.
    Bounds(bounds_cmd::BoundsArgs),
    /// Sweep M for the amplitude-damping cloning protocols (dummy,
    /// measure-and-prepare, coherent).
    AdClone(ad_clone::AdCloneArgs),
    /// Evaluate a single cloning protocol over a parameter net.
    Protocol(protocol_cmd::ProtocolArgs),
    /// Run the worst-case cloning SDP and dump the found process.
    Sdp(sdp_cmd::SdpArgs),
}

fn main() {
    let cli = Cli::parse();
    let threads = std::env::var("CHANCLONE_THREADS")
        .ok()
        .and_then(|v| v.parse::<usize>().ok())
        .unwrap_or(cli.threads);
    let mut pool = rayon::ThreadPoolBuilder::new();
    if threads > 0 {
        pool = pool.num_threads(threads);
    }
    let pool = match pool.build() {
        Ok(p) => p,
        Err(e) => {
            eprintln!("chanclone: cannot build thread pool: {e}");
            std::process::exit(4);
        }
    };

    let result = pool.install(|| run(&cli));
    if let Err(e) = result {
        eprintln!("chanclone: {}", e.message());
        std::process::exit(e.exit_code());
    }
}

fn run(cli: &Cli) -> Result<(), CliError> {
    let meta = RunMeta {
        format: cli.format,
        seed: cli.seed,
        output: cli.output.clone(),
    };
    match &cli.command {
        Command::Table1(args) => table1::run(args, &meta),
        Command::Bounds(args) => bounds_cmd::run(args, &meta),
        Command::AdClone(args) => ad_clone::run(args, &meta),
        Command::Protocol(args) => protocol_cmd::run(args, &meta),
        Command::Sdp(args) => sdp_cmd::run(args, &meta),
    }
}

/// Global flags shared by every subcommand.
pub struct RunMeta {
    pub format: Format,
    pub seed: u64,
    pub output: Option<PathBuf>,
}

/// Parses an `a:b` interval flag.
pub fn parse_interval(text: &str) -> Result<(f64, f64), CliError> {
    let parts: Vec<&str> = text.split(':').collect();
    if parts.len() != 2 {
        return Err(CliError::BadFlags(format!(
            "interval must be `lo:hi`, got `{text}`"
        )));
    }
    let lo: f64 = parts[0]
        .parse()
        .map_err(|_| CliError::BadFlags(format!("bad interval endpoint `{}`", parts[0])))?;
    let hi: f64 = parts[1]
        .parse()
        .map_err(|_| CliError::BadFlags(format!("bad interval endpoint `{}`", parts[1])))?;
    if !(lo.is_finite() && hi.is_finite() && lo < hi) {
        return Err(CliError::BadFlags(format!(
            "interval endpoints must satisfy lo < hi, got `{text}`"
        )));
    }
    Ok((lo, hi))
}

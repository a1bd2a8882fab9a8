use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::Context;
use clap::{Args, Parser, Subcommand};

mod run;

/// Exit status for malformed input or unsupported options.
const EXIT_CONFIG: u8 = 2;
/// Exit status when an iteration stops short of its tolerance.
const EXIT_NOT_CONVERGED: u8 = 3;

#[derive(Parser, Debug)]
#[command(
    name = "ivcollage",
    version,
    about = "Interval Volterra equations: forward solves and collage-based parameter recovery"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Picard iteration of the projected operator; writes solution.csv and report.json.
    Forward(ForwardArgs),
    /// Recover kernel parameters from a target; writes result.json.
    Inverse(InverseArgs),
    /// Recompute a benchmark recovery table; writes table.csv.
    Reproduce(ReproduceArgs),
}

#[derive(Args, Debug)]
struct Stop {
    /// Fixed number of Picard iterations.
    #[arg(long, conflicts_with = "eps")]
    m: Option<usize>,
    /// Stop once successive iterates are closer than this.
    #[arg(long)]
    eps: Option<f64>,
    /// Iteration cap in tolerance mode.
    #[arg(long, default_value_t = 200)]
    max_iter: usize,
}

#[derive(Args, Debug)]
struct ForwardArgs {
    /// Problem JSON.
    #[arg(long, required_unless_present = "example", conflicts_with = "example")]
    problem: Option<PathBuf>,
    /// Built-in benchmark (1 or 2) at its generating parameters.
    #[arg(long)]
    example: Option<u32>,
    /// Dyadic level k; q = 2^k + 1 nodes, projection order n = q².
    #[arg(long, default_value_t = 3)]
    level: u32,
    #[command(flatten)]
    stop: Stop,
    /// Points of the uniform grid used for sup distances.
    #[arg(long, default_value_t = 1025)]
    eval_grid: usize,
    /// Output directory.
    #[arg(long, default_value = "out")]
    out: PathBuf,
}

#[derive(Args, Debug)]
struct InverseArgs {
    /// Family JSON.
    #[arg(long, requires = "target", conflicts_with = "example")]
    family: Option<PathBuf>,
    /// Target CSV (`t,lower,upper`) on the dyadic grid of --level.
    #[arg(long)]
    target: Option<PathBuf>,
    /// Built-in benchmark; the target is generated with --m or --eps.
    #[arg(long, required_unless_present = "family")]
    example: Option<u32>,
    #[arg(long, default_value_t = 3)]
    level: u32,
    #[command(flatten)]
    stop: Stop,
    #[arg(long, default_value_t = 1025)]
    eval_grid: usize,
    #[arg(long, default_value = "out")]
    out: PathBuf,
}

#[derive(Args, Debug)]
struct ReproduceArgs {
    #[arg(long)]
    example: u32,
    /// Restrict to one row; needs --level as well.
    #[arg(long, requires = "level")]
    m: Option<usize>,
    #[arg(long, requires = "m")]
    level: Option<u32>,
    #[arg(long, default_value = "out")]
    out: PathBuf,
}

/// Failure classes that map to distinct exit codes.
#[derive(Debug)]
pub enum Failure {
    Config(anyhow::Error),
    NotConverged(String),
    Other(anyhow::Error),
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::Other(e)
    }
}

impl From<ivcollage::Error> for Failure {
    fn from(e: ivcollage::Error) -> Self {
        use ivcollage::Error as E;
        match e {
            E::Format(_) | E::Argument(_) | E::Inverted { .. } => Failure::Config(e.into()),
            other => Failure::Other(other.into()),
        }
    }
}

pub fn config_error(msg: impl Into<String>) -> Failure {
    Failure::Config(anyhow::anyhow!(msg.into()))
}

pub fn create_out_dir(dir: &Path) -> Result<(), Failure> {
    std::fs::create_dir_all(dir)
        .with_context(|| format!("creating {}", dir.display()))
        .map_err(Failure::Config)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Forward(a) => run::forward(a),
        Command::Inverse(a) => run::inverse(a),
        Command::Reproduce(a) => run::reproduce(a),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Config(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_CONFIG)
        }
        Err(Failure::NotConverged(msg)) => {
            eprintln!("not converged: {msg}");
            ExitCode::from(EXIT_NOT_CONVERGED)
        }
        Err(Failure::Other(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use galp_core::{SolverConfig, StartPolicy};

mod solve_cmd;
mod sweep;

/// Differential-barrier affine-scaling LP solver.
#[derive(Debug, Parser)]
#[command(name = "galp", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Solve one MPS file.
    Solve(SolveArgs),
    /// Solve every MPS file in a directory over a grid of r values.
    Bench(BenchArgs),
}

#[derive(Debug, Args)]
struct SolverFlags {
    /// Tolerance on the relative residual and the relative gap.
    #[arg(long, default_value_t = 1e-8)]
    eps: f64,
    /// Iteration cap.
    #[arg(long = "max-iter", default_value_t = 300)]
    max_iter: usize,
    /// Starting point.
    #[arg(long, value_enum, default_value_t = StartArg::Auto)]
    start: StartArg,
}

impl SolverFlags {
    fn config(&self, r: f64) -> SolverConfig {
        SolverConfig {
            r,
            epsilon: self.eps,
            max_iterations: self.max_iter,
            start: self.start.into(),
            ..SolverConfig::default()
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum StartArg {
    Auto,
    X1,
    X2,
}

impl From<StartArg> for StartPolicy {
    fn from(s: StartArg) -> Self {
        match s {
            StartArg::Auto => StartPolicy::Auto,
            StartArg::X1 => StartPolicy::X1,
            StartArg::X2 => StartPolicy::X2,
        }
    }
}

#[derive(Debug, Args)]
struct SolveArgs {
    path: PathBuf,
    /// Penalty exponent, 0 <= r < 1.
    #[arg(long, default_value_t = 0.2)]
    r: f64,
    #[command(flatten)]
    solver: SolverFlags,
    /// Write the per-iteration trace to this CSV file.
    #[arg(long)]
    trace: Option<PathBuf>,
    /// Print nothing; the exit code carries the status.
    #[arg(long)]
    quiet: bool,
}

#[derive(Debug, Args)]
struct BenchArgs {
    dir: PathBuf,
    /// Comma-separated r values.
    #[arg(
        long = "r-grid",
        value_delimiter = ',',
        default_value = "0,0.1,0.2,0.3,0.4,0.5,0.6,0.7"
    )]
    r_grid: Vec<f64>,
    #[command(flatten)]
    solver: SolverFlags,
    /// Write table.csv, summary.csv and timing.csv here instead of printing.
    #[arg(long = "out-dir")]
    out_dir: Option<PathBuf>,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let code = match cli.command {
        Command::Solve(args) => solve_cmd::run(&args),
        Command::Bench(args) => sweep::run(&args),
    };
    ExitCode::from(code)
}

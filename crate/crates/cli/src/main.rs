//! `bct`: entropy-rate estimation for discrete time series.
//!
//! Exit status: 0 success, 2 usage error, 3 data error, 4 resource/budget
//! error. The `BCT_WORKERS` environment variable sets the worker count.

mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use bct_core::ErrorKind;
use clap::{Parser, Subcommand};
use thiserror::Error;

use commands::{
    ConvergenceArgs, DumpTreeArgs, EstimateArgs, FixturesArgs, PosteriorArgs, PriorArgs, SimulateArgs,
};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{path}: {source}", path = .0.display(), source = .1)]
    Io(PathBuf, std::io::Error),
    #[error(transparent)]
    Core(#[from] bct_core::Error),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) | CliError::Io(..) => 2,
            CliError::Core(e) => match e.kind() {
                ErrorKind::Usage => 2,
                ErrorKind::Data => 3,
                ErrorKind::Resource => 4,
                ErrorKind::Internal => 1,
            },
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "bct", version, about = "Bayesian context-tree entropy-rate estimation")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run the selected estimators and print a comparison report.
    Estimate(EstimateArgs),
    /// Sample the entropy-rate posterior; write a summary and histogram.
    Posterior(PosteriorArgs),
    /// Sample the entropy-rate prior (no data); write a summary and histogram.
    Prior(PriorArgs),
    /// Generate a sequence from a chain file or fixture.
    Simulate(SimulateArgs),
    /// Estimator error against the true rate over a grid of lengths.
    Convergence(ConvergenceArgs),
    /// List fixtures, or regenerate their pinned files.
    Fixtures(FixturesArgs),
    /// Print the weighted count tree of a sequence.
    DumpTree(DumpTreeArgs),
}

fn configure_workers() -> Result<(), CliError> {
    if let Ok(v) = std::env::var("BCT_WORKERS") {
        let n: usize = v
            .parse()
            .ok()
            .filter(|&n| n > 0)
            .ok_or_else(|| CliError::Usage(format!("BCT_WORKERS must be a positive integer, got {v:?}")))?;
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Usage(e.to_string()))?;
    }
    Ok(())
}

fn run(cli: Cli) -> Result<(), CliError> {
    configure_workers()?;
    match &cli.command {
        Command::Estimate(a) => commands::cmd_estimate(a),
        Command::Posterior(a) => commands::cmd_posterior(a),
        Command::Prior(a) => commands::cmd_prior(a),
        Command::Simulate(a) => commands::cmd_simulate(a),
        Command::Convergence(a) => commands::cmd_convergence(a),
        Command::Fixtures(a) => commands::cmd_fixtures(a),
        Command::DumpTree(a) => commands::cmd_dump_tree(a),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

//! sievelab: sieve functions f = g ∗ 1, their short-interval integrals,
//! correlations and identity checks, from the command line.
//!
//! Exit codes are a stable contract: 0 success, 1 internal error,
//! 2 usage error, 3 validation error.

mod commands;
mod config;
mod plot;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;

use commands::Cmd;
use config::ConfigFile;

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Validation(String),
    Internal(anyhow::Error),
}

impl From<sievelab::Error> for CliError {
    fn from(e: sievelab::Error) -> Self {
        // every library error is a violated precondition on user input
        CliError::Validation(e.to_string())
    }
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Internal(_) => 1,
            CliError::Usage(_) => 2,
            CliError::Validation(_) => 3,
        }
    }

    fn message(&self) -> String {
        match self {
            CliError::Usage(m) => format!("usage error: {m}"),
            CliError::Validation(m) => format!("validation error: {m}"),
            CliError::Internal(e) => format!("error: {e}"),
        }
    }
}

#[derive(Parser, Debug)]
#[command(
    name = "sievelab",
    version,
    about = "Sieve functions f = g*1: exact short-interval integrals, correlations and identity checks"
)]
struct Cli {
    /// Flat key=value config file; command-line flags override it
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,

    #[command(subcommand)]
    command: Cmd,
}

fn run(cli: Cli) -> Result<(), CliError> {
    let cfg = match &cli.config {
        Some(path) => ConfigFile::load(path)?,
        None => ConfigFile::default(),
    };
    match cli.command {
        Cmd::Sieve(args) => commands::run_sieve(args, &cfg),
        Cmd::KernelsSelfcheck(args) => commands::run_selfcheck(args),
        Cmd::Integrals(args) => commands::run_integrals(args, &cfg),
        Cmd::Correlate(args) => commands::run_correlate(args, &cfg),
        Cmd::Verify(args) => commands::run_verify(args, &cfg),
        Cmd::Experiment(args) => commands::run_experiment(args, &cfg),
        Cmd::Report(args) => commands::run_report(args, &cfg),
    }
}

fn main() -> ExitCode {
    // clap itself exits 2 on unknown commands/flags
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{}", e.message());
            ExitCode::from(e.exit_code())
        }
    }
}

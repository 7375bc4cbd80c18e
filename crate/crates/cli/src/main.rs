//! `nshwave` — command-line front end for the wave-analysis library.
//!
//! A single JSON config file drives each run; the `command` key selects the
//! operation and the remaining sections supply the model, initial profile,
//! evaluation grid, and output destinations.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;

mod commands;
mod config;
mod expr;
mod io;

/// Failure modes, ordered by exit code.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    /// The config file is missing, malformed, or inconsistent. Exit code 2.
    #[error("config error: {0}")]
    Config(String),
    /// The requested computation could not be completed. Exit code 3.
    #[error("numerical error: {0}")]
    Numeric(String),
    /// The closed-form criterion and the direct scan reached opposite
    /// verdicts. Exit code 4.
    #[error("criterion disagreement: {0}")]
    Disagreement(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::Numeric(_) => 3,
            CliError::Disagreement(_) => 4,
        }
    }
}

#[derive(Parser)]
#[command(
    name = "nshwave",
    version,
    about = "Blow-up analysis, simulation, traveling waves, and stochastic \
             regularization for rotation-type wave systems",
    arg_required_else_help = true
)]
struct Cli {
    /// Path to a JSON config file.
    config: PathBuf,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match commands::run(&cli.config) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("nshwave: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

//! Batch command-line surface: configure the model and potential, run a
//! computation, emit machine-readable reports.

mod config;
mod report;

use clap::{Parser, Subcommand};
use config::{CommonArgs, OutputFormat, RunConfig};
use std::io::Write;
use std::process::ExitCode;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("config: {0}")]
    Config(String),
    #[error(transparent)]
    Core(#[from] diracsea::Error),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    /// 2 = configuration, 3 = series budget, 4 = quadrature, 1 = other.
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::Core(diracsea::Error::InvalidParameter(_)) => 2,
            CliError::Core(diracsea::Error::BudgetExceeded { .. }) => 3,
            CliError::Core(diracsea::Error::QuadratureNotConverged { .. }) => 4,
            _ => 1,
        }
    }
}

#[derive(Parser)]
#[command(
    name = "diracsea",
    version,
    about = "Vacuum energetics of the 1D massless Dirac box: exact spectra and \
             sea vs field-theory vacuum shifts"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Eigenvalue table: epsilon, eta, and the per-level shift
    Spectrum(CommonArgs),
    /// Sea (filled negative levels) vacuum-shift report
    Ht(CommonArgs),
    /// Field-theory vacuum-shift report
    Qft(CommonArgs),
    /// Juxtapose the sea and field-theory answers with agreement flags
    Compare(CommonArgs),
}

fn emit(cfg: &RunConfig, csv: String, json: String) -> Result<(), CliError> {
    let text = match cfg.format {
        OutputFormat::Csv => csv,
        OutputFormat::Json => json,
    };
    match &cfg.out {
        Some(path) => std::fs::write(path, text)?,
        None => std::io::stdout().write_all(text.as_bytes())?,
    }
    Ok(())
}

fn json_of<T: serde::Serialize>(value: &T) -> Result<String, CliError> {
    let mut s = serde_json::to_string_pretty(value)
        .map_err(|e| CliError::Config(format!("serialization: {e}")))?;
    s.push('\n');
    Ok(s)
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Spectrum(args) => {
            let cfg = RunConfig::resolve(&args)?;
            let rep = report::spectrum_report(&cfg)?;
            emit(&cfg, rep.to_csv(), json_of(&rep)?)
        }
        Command::Ht(args) => {
            let cfg = RunConfig::resolve(&args)?;
            let rep = report::ht_cli_report(&cfg)?;
            emit(&cfg, rep.to_csv(), json_of(&rep)?)
        }
        Command::Qft(args) => {
            let cfg = RunConfig::resolve(&args)?;
            let rep = report::qft_cli_report(&cfg)?;
            emit(&cfg, rep.to_csv(), json_of(&rep)?)
        }
        Command::Compare(args) => {
            let cfg = RunConfig::resolve(&args)?;
            let rep = report::compare_report(&cfg)?;
            emit(&cfg, rep.to_csv(), json_of(&rep)?)
        }
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

//! `qms`: command-line runs of the magic-square and steering computations.
//!
//! Exit codes: 0 success, 1 internal failure, 2 configuration error,
//! 3 size limit, 4 violated assumption.

mod commands;
mod config;
mod error;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use crate::commands::Context;
use crate::config::RunConfig;
use crate::error::CliError;
use crate::output::RunInfo;

const DEFAULT_TOL: f64 = 1e-7;
const DEFAULT_SAMPLES: usize = 100_000;

#[derive(Debug, Parser)]
#[command(name = "qms", version, about = "Magic-square locality tests and majorization steering criteria")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// TOML run configuration.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Output CSV path; stdout when omitted.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Bisection tolerance for threshold searches.
    #[arg(long, global = true)]
    tol: Option<f64>,

    /// Number of random samples.
    #[arg(long, global = true)]
    samples: Option<usize>,
}

#[derive(Debug, Clone, Copy, Subcommand)]
enum Command {
    /// CHSH value and locality of a quantum, hidden-variable or random scenario.
    Chsh,
    /// Parity constraints of the GHZ argument.
    Ghz,
    /// Locality decision with witness or certificate.
    BellTest,
    /// Uncertainty bound of an observable set.
    Bound,
    /// Steering criterion for a state and measurement pairs.
    Steer,
    /// Threshold of a state family.
    Scan,
    /// The benchmark suite of thresholds.
    Table1,
}

impl Command {
    fn name(self) -> &'static str {
        match self {
            Self::Chsh => "chsh",
            Self::Ghz => "ghz",
            Self::BellTest => "bell-test",
            Self::Bound => "bound",
            Self::Steer => "steer",
            Self::Scan => "scan",
            Self::Table1 => "table1",
        }
    }
}

fn run(cli: &Cli) -> Result<String, CliError> {
    let config = match &cli.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    let ctx = Context {
        seed: cli.seed.or(config.seed).unwrap_or(0),
        tol: cli.tol.or(config.tol).unwrap_or(DEFAULT_TOL),
        samples: cli.samples.or(config.samples).unwrap_or(DEFAULT_SAMPLES),
        config,
    };
    if !(ctx.tol > 0.0 && ctx.tol < 1.0) {
        return Err(CliError::Config(format!("tolerance {} outside (0, 1)", ctx.tol)));
    }
    let report = match cli.command {
        Command::Chsh => commands::chsh(&ctx)?,
        Command::Ghz => commands::ghz(&ctx)?,
        Command::BellTest => commands::bell_test(&ctx)?,
        Command::Bound => commands::bound(&ctx)?,
        Command::Steer => commands::steer(&ctx)?,
        Command::Scan => commands::scan(&ctx)?,
        Command::Table1 => commands::table(&ctx)?,
    };
    let info = RunInfo {
        command: cli.command.name(),
        seed: ctx.seed,
        tol: ctx.tol,
    };
    output::emit(cli.out.as_deref(), &(output::header(&info) + &report.csv))?;
    Ok(report.summary)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(summary) => {
            eprintln!("{summary}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("qms: {e}");
            e.exit_code()
        }
    }
}

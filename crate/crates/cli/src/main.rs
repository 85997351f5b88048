mod commands;
mod config;
mod error;
mod manifest;
mod noise;
mod svg;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use commands::{Context, Outcome};
use config::Config;
use error::CliError;

/// Higher Criticism and Innovated Higher Criticism for sparse signals in
/// correlated Gaussian noise.
#[derive(Debug, Parser)]
#[command(name = "ihc", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// INI config file; each subcommand reads its own section.
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,

    /// Base seed for simulate (overrides the config key).
    #[arg(long, global = true, value_name = "U64")]
    seed: Option<u64>,

    /// Worker threads; results do not depend on it.
    #[arg(long, global = true, value_name = "N")]
    jobs: Option<usize>,

    /// Also write an SVG plot (boundary and simulate).
    #[arg(long, global = true, value_name = "PATH")]
    svg: Option<PathBuf>,

    /// Significant digits in printed numbers (default 6).
    #[arg(long, global = true, value_name = "N")]
    precision: Option<usize>,

    /// Output file instead of stdout; a replay manifest is written next to it.
    #[arg(long, short, global = true, value_name = "PATH")]
    out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, Subcommand)]
enum Command {
    /// Detection boundary rows for a β grid.
    Boundary,
    /// HC or iHC on a dataset file.
    Detect,
    /// Monte Carlo experiment presets or custom sweeps.
    Simulate,
    /// Build a correlation matrix and print diagnostics.
    Matrix,
}

impl Command {
    fn name(self) -> &'static str {
        match self {
            Command::Boundary => "boundary",
            Command::Detect => "detect",
            Command::Simulate => "simulate",
            Command::Matrix => "matrix",
        }
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    let name = cli.command.name();
    if cli.seed.is_some() && !matches!(cli.command, Command::Simulate) {
        return Err(CliError::Usage(format!("--seed does not apply to {name}")));
    }
    if cli.svg.is_some() && !matches!(cli.command, Command::Boundary | Command::Simulate) {
        return Err(CliError::Usage(format!("--svg does not apply to {name}")));
    }
    if cli.jobs == Some(0) {
        return Err(CliError::Usage("--jobs must be at least 1".into()));
    }
    let config = Config::load(cli.config.as_deref())?;
    if let Some(recorded) = config.section("manifest").str("subcommand") {
        if recorded != name {
            return Err(CliError::Usage(format!(
                "manifest was written by `{recorded}`, not `{name}`"
            )));
        }
    }
    let ctx = Context {
        config,
        seed: cli.seed,
        precision: cli.precision,
        svg: cli.svg.is_some(),
    };
    let outcome: Outcome = ihc_core::exec::with_jobs(cli.jobs, || match cli.command {
        Command::Boundary => commands::boundary::run(&ctx),
        Command::Detect => commands::detect::run(&ctx),
        Command::Simulate => commands::simulate::run(&ctx),
        Command::Matrix => commands::matrix::run(&ctx),
    })?;

    match &cli.out {
        Some(path) => {
            std::fs::write(path, &outcome.body).map_err(|e| CliError::io(path, e))?;
            manifest::write(path, name, &outcome.resolved)?;
        }
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(&outcome.body)
                .and_then(|_| stdout.flush())
                .map_err(|e| CliError::io(std::path::Path::new("<stdout>"), e))?;
        }
    }
    if let (Some(path), Some(svg)) = (&cli.svg, &outcome.svg) {
        std::fs::write(path, svg).map_err(|e| CliError::io(path, e))?;
    }
    match outcome.failure {
        Some(e) => Err(e),
        None => Ok(()),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

//! `qwalk`: command-line experiments for discrete-time quantum walks.
//!
//! All angles are given in units of π: `--theta 0.25` is θ = π/4.

mod commands;
mod report;

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use report::Format;

#[derive(Debug, Parser)]
#[command(name = "qwalk", version, about = "Quantum-walk band topology and Majorana bound states")]
#[command(after_help = "Angles are in units of π (0.25 means π/4). Energies are reported in radians \
                        and, where noted, as E/π.")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    #[command(flatten)]
    global: GlobalArgs,
}

#[derive(Debug, Args)]
struct GlobalArgs {
    /// Output format.
    #[arg(long, value_enum, default_value = "json", global = true)]
    format: Format,

    /// Write to this file instead of standard output.
    #[arg(long, global = true)]
    output: Option<PathBuf>,

    /// Worker threads for independent sweep cells (results keep their order).
    #[arg(long, default_value_t = 1, global = true)]
    jobs: usize,

    /// Seed for randomized inputs.
    #[arg(long, default_value_t = 0, global = true)]
    seed: u64,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Bulk bands cos E = cosθ cos k and Bloch vectors over the Brillouin zone.
    Dispersion(commands::DispersionArgs),
    /// Winding number over a sweep of coin angles.
    Winding(commands::WindingArgs),
    /// Closed-form bound states at a single wall between two coin regions.
    BoundSingle(commands::BoundSingleArgs),
    /// Bound-state energies of finite wires with reflective ends, E(θ₂, N)/π.
    WireSpectrum(commands::WireSpectrumArgs),
    /// Time evolution of position distributions.
    Evolve(commands::EvolveArgs),
    /// Full spectrum of a coin profile with localized states flagged.
    Diagonalize(commands::DiagonalizeArgs),
}

/// Exit status by failure class.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("numerical failure: {0}")]
    Numeric(qwalk::Error),
    #[error("i/o error: {0}")]
    Io(#[from] io::Error),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Numeric(_) => 3,
            CliError::Io(_) => 1,
        }
    }
}

impl From<qwalk::Error> for CliError {
    fn from(e: qwalk::Error) -> Self {
        use qwalk::Error as E;
        match e {
            E::InvalidAngle(_) | E::InvalidParameter(_) | E::RingTooSmall { .. } => {
                CliError::Usage(e.to_string())
            }
            other => CliError::Numeric(other),
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct RunContext {
    pub jobs: usize,
    pub seed: u64,
}

impl RunContext {
    /// Runs `f` on a pool of `jobs` threads.
    pub fn install<R: Send>(&self, f: impl FnOnce() -> R + Send) -> Result<R, CliError> {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(self.jobs)
            .build()
            .map_err(|e| CliError::Usage(format!("cannot start {} worker threads: {e}", self.jobs)))?;
        Ok(pool.install(f))
    }
}

fn parameters(args: &impl Serialize) -> serde_json::Value {
    serde_json::to_value(args).unwrap_or(serde_json::Value::Null)
}

fn run(cli: Cli) -> Result<(), CliError> {
    if cli.global.jobs == 0 {
        return Err(CliError::Usage("--jobs must be at least 1".into()));
    }
    let ctx = RunContext { jobs: cli.global.jobs, seed: cli.global.seed };
    let report = match &cli.command {
        Command::Dispersion(a) => commands::dispersion(a, parameters(a), ctx)?,
        Command::Winding(a) => commands::winding(a, parameters(a), ctx)?,
        Command::BoundSingle(a) => commands::bound_single(a, parameters(a), ctx)?,
        Command::WireSpectrum(a) => commands::wire_spectrum(a, parameters(a), ctx)?,
        Command::Evolve(a) => commands::evolve(a, parameters(a), ctx)?,
        Command::Diagonalize(a) => commands::diagonalize(a, parameters(a), ctx)?,
    };
    let mut out: Box<dyn Write> = match &cli.global.output {
        Some(path) => Box::new(BufWriter::new(File::create(path)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    };
    report.write(cli.global.format, &mut out)?;
    out.flush()?;
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("qwalk: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

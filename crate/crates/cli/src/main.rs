//! `tripod-soc` command-line driver.
//!
//! Exit codes: 0 success, 1 failed check or runtime/I/O error, 2 bad
//! configuration or usage.

mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use commands::RunContext;
use config::RunConfig;
use tripod_soc::validation::DEFAULT_SEED;
use tripod_soc::Error;

#[derive(Parser)]
#[command(
    name = "tripod-soc",
    version,
    about = "Double-tripod spin-orbit coupling simulator"
)]
struct Cli {
    /// TOML run configuration.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory (created if missing).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Seed for randomly sampled positions.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Use the Rashba-form relabelling of the gauge fields.
    #[arg(long, global = true)]
    rashba: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Dressed-state spectrum at random positions against a dense eigensolver.
    Spectrum,
    /// Analytic and finite-difference gauge potentials.
    Gauge,
    /// Lower and upper bands of the reduced Hamiltonian.
    Bands,
    /// Wavepacket evolution (reduced, full or adiabatic sweep).
    Evolve,
    /// Run every acceptance criterion.
    Validate,
}

/// Marks errors caused by the user's input rather than the computation.
#[derive(Debug)]
struct ConfigError;

impl std::fmt::Display for ConfigError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str("configuration error")
    }
}

impl std::error::Error for ConfigError {}

fn is_config_error(err: &anyhow::Error) -> bool {
    err.downcast_ref::<ConfigError>().is_some()
        || err.chain().any(|e| {
            matches!(
                e.downcast_ref::<Error>(),
                Some(
                    Error::OrthogonalityViolation { .. }
                        | Error::DegenerateCoupling
                        | Error::InvalidKappa(_)
                        | Error::InvalidParameter { .. }
                        | Error::StepTooSmall { .. }
                        | Error::PotentialPresent
                        | Error::GridTooCoarse { .. }
                        | Error::UnstableStep { .. }
                        | Error::InvalidGrid(_)
                        | Error::PacketTooNarrow { .. }
                        | Error::PacketTouchesBoundary { .. }
                )
            )
        })
}

fn run(cli: Cli) -> anyhow::Result<bool> {
    let config = match &cli.config {
        Some(p) => RunConfig::load(p).map_err(|e| e.context(ConfigError))?,
        None => RunConfig::default(),
    };
    let ctx = RunContext {
        out: cli
            .out
            .or_else(|| config.out.clone())
            .unwrap_or_else(|| "results".into()),
        seed: cli.seed.or(config.seed).unwrap_or(DEFAULT_SEED),
        rashba: cli.rashba,
        config,
    };
    match cli.command {
        Command::Spectrum => commands::spectrum(&ctx),
        Command::Gauge => commands::gauge(&ctx),
        Command::Bands => commands::bands(&ctx),
        Command::Evolve => commands::evolve(&ctx),
        Command::Validate => commands::validate(&ctx),
    }
}

fn main() -> ExitCode {
    // clap exits with 2 on usage errors.
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(if is_config_error(&e) { 2 } else { 1 })
        }
    }
}

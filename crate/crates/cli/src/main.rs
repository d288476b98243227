//! `backaction` — quantum-jump simulation of probe scattering from lattice
//! bosons, with ensemble reconstruction of initial-state patterns.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

mod commands;
mod config;
mod experiment;
mod output;
mod svg;

use config::{ExperimentConfig, Overrides};

#[derive(Debug)]
pub enum CliError {
    /// Bad configuration or invalid physical parameters (exit 2).
    Config(String),
    /// Solver or trajectory failure (exit 3).
    Numerical(String),
    /// Some ensemble runs failed; outputs cover the rest (exit 4).
    PartialFailure(String),
    /// Filesystem trouble (exit 1).
    Io(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Io(_) => 1,
            CliError::Config(_) => 2,
            CliError::Numerical(_) => 3,
            CliError::PartialFailure(_) => 4,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Config(m) | CliError::Numerical(m) | CliError::PartialFailure(m) | CliError::Io(m) => m,
        }
    }
}

#[derive(Parser)]
#[command(
    name = "backaction",
    about = "Coherent probe scattering from lattice bosons under measurement backaction",
    version
)]
struct Cli {
    /// Experiment configuration file (TOML; flags below override it).
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Master seed for ensembles and the trajectory seed.
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Worker threads for ensembles (default: BACKACTION_WORKERS or 1).
    #[arg(long, global = true)]
    workers: Option<usize>,

    /// Output directory.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Output formats (csv, json, svg); repeat or comma-separate.
    #[arg(long, global = true, value_delimiter = ',')]
    format: Option<Vec<String>>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve the ground state and export its predicted scattering curve.
    GroundState,
    /// Run a single quantum-jump trajectory.
    Trajectory,
    /// Run an ensemble of trajectories and compare with the prediction.
    Ensemble,
    /// Export the scattering-equivalence class table.
    Classes,
    /// Measure how the reconstruction error scales with the event budget.
    ScalingStudy,
    /// Compare reconstructions for two ground states across dt values.
    EvolutionStudy,
}

fn run(cli: &Cli) -> Result<(), CliError> {
    let overrides = Overrides {
        seed: cli.seed,
        workers: cli.workers,
        out: cli.out.clone(),
        formats: cli.format.clone(),
    };
    let config = ExperimentConfig::load(cli.config.as_deref(), &overrides)?;
    match cli.command {
        Command::GroundState => commands::ground_state_cmd(&config),
        Command::Trajectory => commands::trajectory_cmd(&config),
        Command::Ensemble => commands::ensemble_cmd(&config),
        Command::Classes => commands::classes(&config),
        Command::ScalingStudy => commands::scaling_cmd(&config),
        Command::EvolutionStudy => commands::evolution_cmd(&config),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(error) => {
            eprintln!("error: {}", error.message());
            ExitCode::from(error.exit_code())
        }
    }
}

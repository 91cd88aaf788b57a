// Copyright 2026 qtailor Contributors
// SPDX-License-Identifier: Apache-2.0

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use qtailor_cli::{config, experiments, CliError};

#[derive(Parser)]
#[command(
    name = "qtailor",
    version,
    about = "Noise-geometry experiments: error walks, twirled fidelities, transfer matrices, filter functions"
)]
struct Cli {
    /// JSON experiment configuration
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory (overrides the config)
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Master seed (overrides the config)
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker thread count (0 = rayon default)
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Error-distance trajectories and random-walk scaling fits
    ErrorWalk,
    /// Bare vs randomized-compiled state-transfer fidelity over noise strengths
    FidelitySweep,
    /// Pauli transfer matrices of the noise channel in four conditions
    Ptm,
    /// Fundamental filter functions and error second moments
    FilterFunction,
    /// First-order-robust XX(π/2) pulse search
    PulseOpt,
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::ErrorWalk => "error-walk",
            Command::FidelitySweep => "fidelity-sweep",
            Command::Ptm => "ptm",
            Command::FilterFunction => "filter-function",
            Command::PulseOpt => "pulse-opt",
        }
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    if let Some(threads) = cli.threads {
        if threads > 0 {
            rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build_global()
                .map_err(|e| CliError::Config(format!("--threads: {e}")))?;
        }
    }
    let name = cli.command.name();
    let loaded = config::load_config(cli.config.as_deref())?;
    let resolved = config::resolve(loaded, name, cli.out, cli.seed)?;
    match cli.command {
        Command::ErrorWalk => experiments::run_error_walk(&resolved),
        Command::FidelitySweep => experiments::run_fidelity_sweep(&resolved),
        Command::Ptm => experiments::run_ptm(&resolved),
        Command::FilterFunction => experiments::run_filter_function(&resolved),
        Command::PulseOpt => experiments::run_pulse_opt(&resolved),
    }?;
    println!(
        "{name}: wrote artifacts to {}",
        resolved.output_dir.display()
    );
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(err.exit_code())
        }
    }
}

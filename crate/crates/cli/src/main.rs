//! `scqkit`: run the qubit design pipeline from a TOML config and write JSON
//! reports and CSV data.
//!
//! Exit codes: 0 success, 2 configuration or usage error, 3 numerical failure.

// `!(x > 0.0)` is the NaN-rejecting form used by every validator.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use config::RunConfig;

#[derive(Debug, Parser)]
#[command(name = "scqkit", version, about = "Superconducting qubit design and pulse-calibration pipeline")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// TOML run configuration.
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Output directory (overrides `output_dir`; default: current directory).
    #[arg(long, global = true, value_name = "DIR")]
    out: Option<PathBuf>,
    /// Seed recorded with the run (overrides `seed`).
    #[arg(long, global = true, value_name = "N")]
    seed: Option<u64>,
    /// Worker threads for parallel sweeps.
    #[arg(long, global = true, value_name = "N")]
    threads: Option<usize>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Levels, ω01, α, charge dispersion and wavefunctions.
    Spectrum,
    /// One- or two-parameter grid of spectra and coherence times.
    Sweep {
        /// Sweep axis NAME=MIN:MAX:POINTS (repeat for a second axis).
        #[arg(long = "axis", value_name = "AXIS")]
        axes: Vec<String>,
    },
    /// Maxwell capacitance matrix and reduced charging energy.
    Capmatrix,
    /// Per-channel relaxation and dephasing rates.
    Coherence,
    /// Alternating τ/Δζ pulse calibration.
    Calibrate,
    /// Calibrate, then repeat the gate and fit the decay.
    Benchmark {
        /// Number of gates (overrides `pulse.n_gates`).
        #[arg(long, value_name = "N")]
        gates: Option<usize>,
    },
    /// Calibrate, then optimize the DRAG coefficient.
    Drag,
}

/// Why a run stopped.
#[derive(Debug)]
pub enum Failure {
    Config(String),
    Numerical(String),
}

impl From<scqkit::Error> for Failure {
    fn from(e: scqkit::Error) -> Self {
        use scqkit::Error as E;
        match e {
            E::InvalidParameter(_) | E::ChannelMismatch { .. } | E::UnknownLabel(_) | E::Layout(_) => {
                Failure::Config(e.to_string())
            }
            _ => Failure::Numerical(e.to_string()),
        }
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    if let Some(n) = cli.threads {
        if n == 0 {
            return Err(Failure::Config("--threads must be at least 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Failure::Config(format!("thread pool: {e}")))?;
    }
    let path = cli.config.ok_or_else(|| Failure::Config("--config PATH is required".into()))?;
    let mut cfg = RunConfig::load(&path)?;
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    let out_dir = cli.out.or_else(|| cfg.output_dir.clone()).unwrap_or_else(|| PathBuf::from("."));
    // The echo records what was computed, not where it was written.
    cfg.output_dir = None;

    let outputs = match cli.command {
        Command::Spectrum => commands::spectrum(&cfg)?,
        Command::Sweep { axes } => {
            let axes = axes.iter().map(|a| config::parse_axis(a)).collect::<Result<Vec<_>, _>>()?;
            commands::sweep(&cfg, &axes)?
        }
        Command::Capmatrix => commands::capmatrix(&cfg)?,
        Command::Coherence => commands::coherence(&cfg)?,
        Command::Calibrate => commands::calibrate(&cfg)?,
        Command::Benchmark { gates } => commands::benchmark(&cfg, gates)?,
        Command::Drag => commands::drag(&cfg)?,
    };
    for path in outputs.write(&out_dir)? {
        println!("{}", path.display());
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Config(msg)) => {
            eprintln!("scqkit: configuration error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Numerical(msg)) => {
            eprintln!("scqkit: numerical failure: {msg}");
            ExitCode::from(3)
        }
    }
}

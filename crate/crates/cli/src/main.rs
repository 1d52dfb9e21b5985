//! `mimo-ee run --config <path>`: runs one experiment and writes its CSV.
//!
//! Exit status is 0 on success, 1 for configuration errors and 2 when the
//! run or the output fails.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use mimo_ee::experiment::{emit_all, parse_config, run_scenario, ExperimentConfig};
use mimo_ee::Error;

#[derive(Parser)]
#[command(
    name = "mimo-ee",
    version,
    about = "Energy-efficiency experiments for massive-MIMO power allocation"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the experiment described by a config file.
    Run {
        /// Flat `key = value` config file.
        #[arg(long)]
        config: PathBuf,
        /// Output CSV; overrides the `output` key.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Base seed; overrides the `seed` key.
        #[arg(long)]
        seed: Option<u64>,
        /// Trials per sweep point; overrides the `trials` key.
        #[arg(long)]
        trials: Option<usize>,
    },
}

const CONFIG_ERROR: u8 = 1;
const RUNTIME_ERROR: u8 = 2;

fn main() -> ExitCode {
    let Command::Run {
        config,
        out,
        seed,
        trials,
    } = Cli::parse().command;

    let cfg = match load(&config, out, seed, trials) {
        Ok(cfg) => cfg,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(CONFIG_ERROR);
        }
    };
    match run(&cfg) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_config_error() {
                CONFIG_ERROR
            } else {
                RUNTIME_ERROR
            })
        }
    }
}

fn load(
    path: &PathBuf,
    out: Option<PathBuf>,
    seed: Option<u64>,
    trials: Option<usize>,
) -> Result<ExperimentConfig, Error> {
    let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.clone(),
        source,
    })?;
    let mut cfg = parse_config(&text)?;
    if let Some(out) = out {
        cfg = cfg.with_output(out);
    }
    if let Some(seed) = seed {
        cfg = cfg.with_seed(seed);
    }
    if let Some(trials) = trials {
        cfg = cfg.with_trials(trials)?;
    }
    Ok(cfg)
}

fn run(cfg: &ExperimentConfig) -> Result<(), Error> {
    let result = run_scenario(cfg)?;
    for path in emit_all(&result, &cfg.output)? {
        println!("wrote {}", path.display());
    }
    for row in &result.rows {
        if row.summary.failures > 0 {
            eprintln!(
                "{} = {}: {} of {} trials failed",
                if cfg.scenario.sweeps_users() {
                    "K"
                } else {
                    "M"
                },
                row.sweep,
                row.summary.failures,
                row.trials
            );
        }
    }
    Ok(())
}

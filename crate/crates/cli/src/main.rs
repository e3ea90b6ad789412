use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Result;
use clap::{Parser, Subcommand};

mod commands;
mod settings;

use settings::Settings;

/// Exact betting-strategy codec, compressed oracles and finite-state
/// frequency experiments.
#[derive(Debug, Parser)]
#[command(name = "kgc", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, clap::Args)]
struct Run {
    /// JSON file with any of the flags below; flags given here win.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    #[command(flatten)]
    settings: Settings,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Embed input bits into a codeword the martingale cannot win on.
    Encode(Run),
    /// Recover input bits from a codeword.
    Decode(Run),
    /// Build a checkpointed compressed oracle and measure its use.
    Hybrid(Run),
    /// Compose the oracle with the codec and measure codeword use.
    Pipeline(Run),
    /// Transducer frequency statistics and convergence reports.
    Fs(Run),
    /// Check the martingale axioms on every word up to a depth.
    Validate(Run),
}

fn dispatch(command: Command) -> Result<bool> {
    let (name, run, exec): (&str, Run, fn(&Settings) -> Result<bool>) = match command {
        Command::Encode(r) => ("encode", r, commands::encode_cmd),
        Command::Decode(r) => ("decode", r, commands::decode_cmd),
        Command::Hybrid(r) => ("hybrid", r, commands::hybrid_cmd),
        Command::Pipeline(r) => ("pipeline", r, commands::pipeline_cmd),
        Command::Fs(r) => ("fs", r, commands::fs_cmd),
        Command::Validate(r) => ("validate", r, commands::validate_cmd),
    };
    let settings = match &run.config {
        Some(path) => run.settings.over(Settings::load(path, name)?),
        None => run.settings,
    };
    exec(&settings)
}

fn main() -> ExitCode {
    match dispatch(Cli::parse().command) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => {
            eprintln!("error: invariant check failed");
            ExitCode::from(1)
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

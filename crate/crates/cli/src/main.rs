//! `specint`: compute fields, tables and critical gaps for two close harmonics,
//! and run the acceptance suite.

mod commands;
mod config;
mod error;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use commands::{Method, ValidateLevel};
use config::{ExperimentConfig, RawConfig};
use error::CliError;

#[derive(Parser, Debug)]
#[command(
    name = "specint",
    version,
    about = "Spectral interference of two close harmonics in the STFT and synchrosqueezing",
    after_help = "Any config key can be overridden as --section.key=value, e.g. --model.delta=0.15.\n\
                  Run `specint keys` for the full list."
)]
struct Cli {
    /// Config file with `section.key = value` lines.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Named parameter set, applied before the config file.
    #[arg(long, global = true)]
    preset: Option<String>,
    /// Output directory (same as --output.dir=...).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// |V|, Re V, Im V, phase and amplitude-weighted phase over the grid.
    Stft,
    /// Ridge points, maxima counts, bifurcation times and predicted ellipses.
    Ridges,
    /// Zeros of V with their winding numbers.
    Zeros,
    /// Reassignment fields, Möbius arc circles and the attraction-bound audit.
    Reassign,
    /// Squeezed transform field and cross-sections at t_k^+ and t_k^-.
    Squeeze,
    /// Critical gap with an empirical bracket from maxima counting.
    Critical {
        #[arg(long, value_enum, default_value = "stft")]
        method: Method,
    },
    /// Run the acceptance suite.
    Validate {
        #[arg(long, value_enum, default_value = "fast")]
        level: ValidateLevel,
    },
    /// List config keys, defaults and presets.
    Keys,
}

fn load(cli: &Cli, overrides: &[String]) -> Result<ExperimentConfig, CliError> {
    let mut raw = match &cli.preset {
        Some(name) => config::preset(name)?,
        None => RawConfig::default(),
    };
    if let Some(path) = &cli.config {
        raw.overlay(RawConfig::load(path)?);
    }
    if let Some(dir) = &cli.out {
        raw.apply_overrides(&[format!("--output.dir={}", dir.display())])?;
    }
    raw.apply_overrides(overrides)?;
    ExperimentConfig::resolve(&raw)
}

fn run(cli: Cli, overrides: &[String]) -> Result<(), CliError> {
    let report = |files: Vec<PathBuf>| {
        for f in files {
            println!("wrote {}", f.display());
        }
    };
    match cli.command {
        Command::Keys => {
            for (key, default, doc) in config::KEYS {
                let default = if default.is_empty() {
                    "derived"
                } else {
                    default
                };
                println!("{key:<20} {default:<20} {doc}");
            }
            println!("\npresets (sigma = sqrt 2, xi0 = 1):");
            for (name, _) in config::PRESETS {
                println!("  {name}");
            }
            Ok(())
        }
        Command::Validate { level } => commands::cmd_validate(level),
        ref c => {
            let cfg = load(&cli, overrides)?;
            let files = match c {
                Command::Stft => commands::cmd_stft(&cfg)?,
                Command::Ridges => commands::cmd_ridges(&cfg)?,
                Command::Zeros => commands::cmd_zeros(&cfg)?,
                Command::Reassign => commands::cmd_reassign(&cfg)?,
                Command::Squeeze => commands::cmd_squeeze(&cfg)?,
                Command::Critical { method } => commands::cmd_critical(&cfg, *method)?,
                Command::Keys | Command::Validate { .. } => unreachable!("handled above"),
            };
            report(files);
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let (overrides, args) = config::split_overrides(std::env::args());
    let cli = Cli::parse_from(args);
    match run(cli, &overrides) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

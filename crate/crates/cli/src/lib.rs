//! Command-line front end of `rotor-pair`: configuration, output tables and the
//! `simulate`, `verify`, `analytic`, `periods` and `sweep` commands.

pub mod commands;
pub mod config;
pub mod error;
pub mod output;

use std::path::PathBuf;

use clap::{Parser, Subcommand};

pub use commands::{CommandOutput, Destination};
pub use config::{Format, RunConfig, Settings};
pub use error::{exit_code, CliError, CliResult};

#[derive(Debug, Parser)]
#[command(name = "rotor-pair", version, about = "Coupled so(n) rotors with state-dependent brackets")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// TOML run configuration (every key optional).
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Output file; sweep appends `.eps-<i>` before the extension.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
    /// Seed for the randomized checks of `verify`.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    #[arg(long, global = true, value_name = "csv|jsonl")]
    pub format: Option<Format>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// Integrate the configured pair and write the trajectory.
    Simulate,
    /// Run the algebra, invariant and closed-form checks.
    Verify,
    /// Compare the closed-form n = 3 solution with an integration.
    Analytic,
    /// Predict and detect the fast and slow periods.
    Periods,
    /// Simulate once per `[sweep] eps` value.
    Sweep,
}

impl Cli {
    /// Config file (or defaults) with the command-line overrides applied.
    pub fn settings(&self) -> CliResult<Settings> {
        let cfg = match &self.config {
            Some(path) => RunConfig::load(path)?,
            None => RunConfig::default(),
        };
        let mut s = cfg.resolve()?;
        if let Some(seed) = self.seed {
            s.seed = seed;
        }
        if let Some(format) = self.format {
            s.format = format;
        }
        Ok(s)
    }
}

/// Runs `command`; `env_dir` replaces the directory of every output file.
pub fn execute(command: Command, s: &Settings, output: Option<PathBuf>, env_dir: Option<PathBuf>) -> CliResult<CommandOutput> {
    let dest = Destination { path: output.or_else(|| s.path.clone()), format: s.format, env_dir };
    let out = match command {
        Command::Simulate => commands::simulate(s, &dest),
        Command::Verify => commands::verify(s, &dest),
        Command::Analytic => commands::analytic(s, &dest),
        Command::Periods => commands::periods(s, &dest),
        Command::Sweep => commands::sweep(s, &dest),
    }?;
    Ok(out)
}

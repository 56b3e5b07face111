//! Command-line front end for the weighted-least-squares toolkit.
//!
//! Three subcommands cover the workflow end to end: `fit` runs the full
//! diagnostic-plus-estimation pipeline on a CSV file, `simulate` reproduces
//! the built-in Monte Carlo comparison, and `crossval` scores both weighting
//! methods out of sample. Every error family maps to a stable exit code and
//! all randomness flows from the single `--seed` flag.

pub mod args;
pub mod commands;
pub mod config;
pub mod error;
pub mod io;

use args::{build_config, Cli, Command};
use error::Result;

/// Dispatches a parsed command line.
pub fn run(cli: Cli) -> Result<()> {
    match &cli.command {
        Command::Fit { data, run } => {
            let cfg = build_config(Some(data), run)?;
            commands::fit::cmd_fit(&data.input, &cfg)?;
        }
        Command::Simulate { sim, run } => {
            let cfg = build_config(None, run)?;
            commands::simulate::cmd_simulate(&sim.selection(), sim.replications, &cfg)?;
        }
        Command::Crossval { data, repeats, run } => {
            let cfg = build_config(Some(data), run)?;
            commands::crossval::cmd_crossval(&data.input, *repeats, &cfg)?;
        }
    }
    Ok(())
}

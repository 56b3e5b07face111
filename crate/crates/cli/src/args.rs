//! Command-line argument definitions and their translation to [`CliConfig`].

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::commands::simulate::CellSelection;
use crate::config::{CliConfig, ColumnRef};
use crate::error::Result;

/// Heteroscedastic linear regression with data-driven observation weights.
#[derive(Debug, Parser)]
#[command(name = "mvdwls", version, about, max_term_width = 100)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Fit both weighting methods to a CSV file and report diagnostics.
    Fit {
        #[command(flatten)]
        data: DataArgs,
        #[command(flatten)]
        run: CommonRunArgs,
    },
    /// Run the built-in Monte Carlo comparison and write tables and figures.
    Simulate {
        #[command(flatten)]
        sim: SimulateArgs,
        #[command(flatten)]
        run: CommonRunArgs,
    },
    /// Compare the two methods by repeated half/half cross-validation.
    Crossval {
        #[command(flatten)]
        data: DataArgs,
        /// Number of random 50/50 splits.
        #[arg(long, default_value_t = 100)]
        repeats: usize,
        #[command(flatten)]
        run: CommonRunArgs,
    },
}

/// Flags describing the input CSV and how to read it.
#[derive(Debug, Args)]
pub struct DataArgs {
    /// Path to a UTF-8 CSV file with a header row.
    #[arg(long, value_name = "FILE")]
    pub input: PathBuf,
    /// Response column, by header name or zero-based index (default: last column).
    #[arg(long, value_name = "COL")]
    pub response: Option<String>,
    /// Comma-separated feature columns, by name or index (default: all others).
    #[arg(long, value_name = "COLS", value_delimiter = ',')]
    pub features: Option<Vec<String>>,
    /// Z-score the features and the response before fitting.
    #[arg(long)]
    pub standardize: bool,
}

/// Flags shared by every subcommand.
#[derive(Debug, Args)]
pub struct CommonRunArgs {
    /// Seed for all randomness in this invocation.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Directory for output files (default: a fresh timestamped directory).
    #[arg(long, value_name = "DIR")]
    pub output_dir: Option<PathBuf>,
    /// TOML config file; its keys override the flags.
    #[arg(long, value_name = "FILE")]
    pub config: Option<PathBuf>,
}

/// Flags specific to `simulate`.
#[derive(Debug, Args)]
pub struct SimulateArgs {
    /// Scenario to run: 1, 2 or 3.
    #[arg(long, required_unless_present = "all", conflicts_with = "all")]
    pub scenario: Option<u8>,
    /// Run all three scenarios at n = 30, 60 and 90.
    #[arg(long)]
    pub all: bool,
    /// Sample size per replication (ignored with --all).
    #[arg(long, default_value_t = 90)]
    pub n: usize,
    /// Number of Monte Carlo replications per cell.
    #[arg(long, default_value_t = 100)]
    pub replications: usize,
}

impl SimulateArgs {
    pub fn selection(&self) -> CellSelection {
        if self.all {
            CellSelection::Grid
        } else {
            CellSelection::One {
                // clap guarantees the flag is present when --all is absent.
                scenario: self.scenario.expect("--scenario required without --all"),
                n: self.n,
            }
        }
    }
}

/// Builds the effective configuration: flags first, then the optional
/// config file on top.
pub fn build_config(data: Option<&DataArgs>, run: &CommonRunArgs) -> Result<CliConfig> {
    let mut cfg = CliConfig::default();
    if let Some(data) = data {
        cfg.response = data.response.as_deref().map(ColumnRef::parse);
        cfg.features = data
            .features
            .as_ref()
            .map(|cols| cols.iter().map(|c| ColumnRef::parse(c)).collect());
        cfg.standardize = data.standardize;
    }
    cfg.seed = run.seed;
    cfg.solver.optimizer_seed = run.seed;
    cfg.output_dir = run.output_dir.clone();
    if let Some(path) = &run.config {
        cfg.apply_file(path)?;
    }
    Ok(cfg)
}

//! Run configuration: flag values merged with an optional TOML file.
//!
//! Keys present in the file override the corresponding flags; anything the
//! file leaves out keeps its flag (or default) value.

use std::path::{Path, PathBuf};

use mvdwls::SolverConfig;

use crate::error::{CliError, Result};

/// A column referenced either by header name or by zero-based position.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ColumnRef {
    Name(String),
    Index(usize),
}

impl ColumnRef {
    /// Parses a flag value: all-digits means a zero-based index, anything
    /// else a header name.
    pub fn parse(raw: &str) -> Self {
        match raw.trim().parse::<usize>() {
            Ok(ix) => ColumnRef::Index(ix),
            Err(_) => ColumnRef::Name(raw.trim().to_owned()),
        }
    }

    /// Resolves the reference against a header row.
    pub fn resolve(&self, header: &[String]) -> Result<usize> {
        match self {
            ColumnRef::Index(ix) => {
                if *ix < header.len() {
                    Ok(*ix)
                } else {
                    Err(CliError::MissingColumn(format!("#{ix}")))
                }
            }
            ColumnRef::Name(name) => header
                .iter()
                .position(|h| h == name)
                .ok_or_else(|| CliError::MissingColumn(name.clone())),
        }
    }
}

/// Fully resolved configuration for one invocation.
#[derive(Debug, Clone)]
pub struct CliConfig {
    /// Response column; `None` means the last column of the file.
    pub response: Option<ColumnRef>,
    /// Feature columns; `None` means every non-response column.
    pub features: Option<Vec<ColumnRef>>,
    /// Z-score features and response before fitting.
    pub standardize: bool,
    /// Master seed for every random choice the command makes.
    pub seed: u64,
    /// Output directory; `None` means a timestamped one.
    pub output_dir: Option<PathBuf>,
    /// Solver settings passed to the estimators.
    pub solver: SolverConfig,
}

impl Default for CliConfig {
    fn default() -> Self {
        Self {
            response: None,
            features: None,
            standardize: false,
            seed: 0,
            output_dir: None,
            solver: SolverConfig::default(),
        }
    }
}

/// The subset of keys a configuration file may carry.
#[derive(Debug, Default, serde::Deserialize)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    response: Option<toml::Value>,
    features: Option<Vec<toml::Value>>,
    standardize: Option<bool>,
    seed: Option<u64>,
    output_dir: Option<PathBuf>,
    solver: Option<toml::Table>,
}

fn column_from_toml(v: &toml::Value) -> Result<ColumnRef> {
    match v {
        toml::Value::String(s) => Ok(ColumnRef::parse(s)),
        toml::Value::Integer(i) if *i >= 0 => Ok(ColumnRef::Index(*i as usize)),
        other => Err(CliError::Usage(format!(
            "config: column reference must be a name or nonnegative index, got {other}"
        ))),
    }
}

impl CliConfig {
    /// Applies a TOML configuration file on top of this configuration.
    ///
    /// The solver seed follows the run seed unless the file pins
    /// `solver.optimizer_seed` itself.
    pub fn apply_file(&mut self, path: &Path) -> Result<()> {
        let text = std::fs::read_to_string(path)
            .map_err(|_| CliError::FileNotFound(path.to_path_buf()))?;
        let file: FileConfig = toml::from_str(&text)
            .map_err(|e| CliError::Usage(format!("config file {}: {e}", path.display())))?;

        if let Some(v) = &file.response {
            self.response = Some(column_from_toml(v)?);
        }
        if let Some(list) = &file.features {
            let mut cols = Vec::with_capacity(list.len());
            for v in list {
                cols.push(column_from_toml(v)?);
            }
            self.features = Some(cols);
        }
        if let Some(s) = file.standardize {
            self.standardize = s;
        }
        if let Some(s) = file.seed {
            self.seed = s;
        }
        if let Some(dir) = file.output_dir {
            self.output_dir = Some(dir);
        }
        let solver_seed_pinned = file
            .solver
            .as_ref()
            .is_some_and(|t| t.contains_key("optimizer_seed"));
        if let Some(table) = file.solver {
            self.solver = table
                .try_into()
                .map_err(|e| CliError::Usage(format!("config file {}: {e}", path.display())))?;
        }
        if !solver_seed_pinned {
            self.solver.optimizer_seed = self.seed;
        }
        self.solver
            .validate()
            .map_err(|e| CliError::Usage(e.to_string()))?;
        Ok(())
    }
}

//! CSV ingestion and emission.
//!
//! Row numbers in errors count data rows from 1 (the header is row 0).
//! Numbers are written with Rust's shortest round-trip formatting, so a
//! dataset emitted with [`write_dataset_csv`] reloads bit-for-bit.

use std::path::Path;

use mvdwls::Dataset;

use crate::config::CliConfig;
use crate::error::{output_err, CliError, Result};

/// Mean and standard deviation removed from one column.
#[derive(Debug, Clone, serde::Serialize)]
pub struct ColumnScale {
    pub column: String,
    pub mean: f64,
    pub sd: f64,
}

/// The z-scoring applied before fitting, kept so predictions can be mapped
/// back to the original scale.
#[derive(Debug, Clone, serde::Serialize)]
pub struct Standardization {
    pub response: ColumnScale,
    pub features: Vec<ColumnScale>,
}

impl Standardization {
    /// Maps a prediction on the standardized scale back to original units.
    pub fn response_to_original(&self, standardized: f64) -> f64 {
        standardized * self.response.sd + self.response.mean
    }
}

/// A dataset read from disk, plus everything needed to report on it.
#[derive(Debug, Clone)]
pub struct LoadedData {
    pub data: Dataset,
    pub response_name: String,
    pub standardization: Option<Standardization>,
}

fn z_score(values: &mut [f64], column: &str) -> Result<ColumnScale> {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1.0);
    let sd = var.sqrt();
    if !(sd > 0.0) {
        return Err(CliError::Validation(format!(
            "column \"{column}\" is constant and cannot be standardized"
        )));
    }
    for v in values.iter_mut() {
        *v = (*v - mean) / sd;
    }
    Ok(ColumnScale {
        column: column.to_owned(),
        mean,
        sd,
    })
}

/// Reads a headered numeric CSV into a [`Dataset`].
///
/// The response defaults to the last column, features to every other
/// column in file order. Blank cells and short rows are rejected with
/// their row number; non-numeric cells with row and column.
pub fn load_csv(path: &Path, cfg: &CliConfig) -> Result<LoadedData> {
    let file = std::fs::File::open(path).map_err(|_| CliError::FileNotFound(path.to_path_buf()))?;
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(file);

    let header: Vec<String> = reader
        .headers()
        .map_err(|e| CliError::ParseError {
            row: 0,
            column: String::new(),
            message: e.to_string(),
        })?
        .iter()
        .map(|h| h.to_owned())
        .collect();
    if header.is_empty() {
        return Err(CliError::Validation("the CSV has no columns".into()));
    }

    let mut cells: Vec<Vec<f64>> = vec![Vec::new(); header.len()];
    for (ix, record) in reader.records().enumerate() {
        let row = ix + 1;
        let record = record.map_err(|e| CliError::ParseError {
            row,
            column: String::new(),
            message: e.to_string(),
        })?;
        for (j, name) in header.iter().enumerate() {
            let raw = record.get(j).unwrap_or("");
            if raw.is_empty() {
                return Err(CliError::ParseError {
                    row,
                    column: name.clone(),
                    message: "blank cell (missing value)".into(),
                });
            }
            let value: f64 = raw.parse().map_err(|_| CliError::NonNumericCell {
                row,
                column: name.clone(),
                value: raw.to_owned(),
            })?;
            if !value.is_finite() {
                return Err(CliError::NonNumericCell {
                    row,
                    column: name.clone(),
                    value: raw.to_owned(),
                });
            }
            cells[j].push(value);
        }
    }

    let response_ix = match &cfg.response {
        Some(col) => col.resolve(&header)?,
        None => header.len() - 1,
    };
    let feature_ixs: Vec<usize> = match &cfg.features {
        Some(cols) => {
            let mut ixs = Vec::with_capacity(cols.len());
            for col in cols {
                ixs.push(col.resolve(&header)?);
            }
            ixs
        }
        None => (0..header.len()).filter(|j| *j != response_ix).collect(),
    };
    if feature_ixs.is_empty() {
        return Err(CliError::Usage(
            "no feature columns remain after resolving the response".into(),
        ));
    }
    if feature_ixs.contains(&response_ix) {
        return Err(CliError::Usage(format!(
            "column \"{}\" cannot be both response and feature",
            header[response_ix]
        )));
    }
    let mut seen = std::collections::HashSet::new();
    for ix in &feature_ixs {
        if !seen.insert(*ix) {
            return Err(CliError::Usage(format!(
                "feature column \"{}\" listed twice",
                header[*ix]
            )));
        }
    }

    let mut y = cells[response_ix].clone();
    let mut columns: Vec<Vec<f64>> = feature_ixs.iter().map(|j| cells[*j].clone()).collect();
    let names: Vec<&str> = feature_ixs.iter().map(|j| header[*j].as_str()).collect();

    let standardization = if cfg.standardize {
        let response = z_score(&mut y, &header[response_ix])?;
        let mut features = Vec::with_capacity(columns.len());
        for (col, name) in columns.iter_mut().zip(&names) {
            features.push(z_score(col, name)?);
        }
        Some(Standardization { response, features })
    } else {
        None
    };

    let data = Dataset::from_columns(y, &columns, &names)
        .map_err(|e| CliError::Validation(e.to_string()))?;
    Ok(LoadedData {
        data,
        response_name: header[response_ix].clone(),
        standardization,
    })
}

/// Writes a dataset back out as a headered CSV, features first and the
/// response last (so a reload with defaults reconstructs the same split).
pub fn write_dataset_csv(data: &Dataset, response_name: &str, path: &Path) -> Result<()> {
    let mut out = String::new();
    let feature_names = data.feature_names();
    for name in &feature_names {
        out.push_str(name);
        out.push(',');
    }
    out.push_str(response_name);
    out.push('\n');
    for i in 0..data.n() {
        for j in 0..data.p() {
            out.push_str(&format!("{},", data.design()[(i, j + 1)]));
        }
        out.push_str(&format!("{}\n", data.y()[i]));
    }
    std::fs::write(path, out).map_err(|e| output_err(path, &e))
}

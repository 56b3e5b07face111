//! `crossval`: repeated half/half out-of-sample comparison on a CSV file.

use std::path::{Path, PathBuf};

use mvdwls::{crossval, write_cv_csv, CvReport};

use crate::commands::{resolve_output_dir, write_json};
use crate::config::CliConfig;
use crate::error::{CliError, Result};
use crate::io::load_csv;

/// The machine-readable cross-validation report (`cv.json`).
#[derive(Debug, serde::Serialize)]
pub struct CrossvalReport {
    pub schema_version: u32,
    pub command: String,
    pub input: String,
    pub seed: u64,
    pub report: CvReport,
}

/// Output location plus the report that was written.
#[derive(Debug)]
pub struct CrossvalOutcome {
    pub dir: PathBuf,
    pub files: Vec<PathBuf>,
    pub report: CvReport,
}

/// Loads the CSV, runs repeated 50/50 cross-validation of the two weighting
/// methods and writes `cv.csv` plus `cv.json`.
pub fn cmd_crossval(input: &Path, repeats: usize, cfg: &CliConfig) -> Result<CrossvalOutcome> {
    if repeats == 0 {
        return Err(CliError::Usage("repeats must be at least 1".into()));
    }
    let loaded = load_csv(input, cfg)?;
    let report =
        crossval(&loaded.data, repeats, cfg.seed, &cfg.solver).map_err(CliError::from_core)?;

    println!(
        "cross-validation over {} repeats ({} completed, {} skipped):",
        report.repeats_requested, report.completed, report.failures
    );
    println!(
        "  mean held-out SSE, single-feature weights: {:.6}",
        report.mean_sse_m1
    );
    println!(
        "  mean held-out SSE, combined weights:       {:.6}",
        report.mean_sse_m2
    );
    let winner = if report.mean_sse_m2 < report.mean_sse_m1 {
        "combined weights"
    } else if report.mean_sse_m1 < report.mean_sse_m2 {
        "single-feature weights"
    } else {
        "tie"
    };
    println!("  lower mean SSE: {winner}");

    let dir = resolve_output_dir(cfg.output_dir.as_deref())?;
    let csv_path = dir.join("cv.csv");
    write_cv_csv(&report, &csv_path).map_err(CliError::from_core)?;
    let json_path = dir.join("cv.json");
    write_json(
        &CrossvalReport {
            schema_version: 1,
            command: "crossval".into(),
            input: input.display().to_string(),
            seed: cfg.seed,
            report: report.clone(),
        },
        &json_path,
    )?;
    let files = vec![csv_path, json_path];
    for file in &files {
        println!("wrote {}", file.display());
    }

    Ok(CrossvalOutcome { dir, files, report })
}

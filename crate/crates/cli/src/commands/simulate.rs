//! `simulate`: the built-in Monte Carlo comparison of the two methods.

use std::path::PathBuf;

use mvdwls::{emit_artifacts, run_replications, ScenarioForm, SimReport, SimScenario};

use crate::commands::{resolve_output_dir, write_json};
use crate::config::CliConfig;
use crate::error::{CliError, Result};

/// Grid of sample sizes used by `--all`.
const GRID_SIZES: [usize; 3] = [30, 60, 90];

/// Which cells to run.
#[derive(Debug, Clone)]
pub enum CellSelection {
    /// One `(scenario, n)` cell.
    One { scenario: u8, n: usize },
    /// All three scenarios at n ∈ {30, 60, 90}.
    Grid,
}

/// The machine-readable simulation report (`simulate.json`).
#[derive(Debug, serde::Serialize)]
pub struct SimulateReport {
    pub schema_version: u32,
    pub command: String,
    pub seed: u64,
    pub replications: usize,
    pub cells: Vec<SimReport>,
}

/// Output location and per-cell reports.
#[derive(Debug)]
pub struct SimulateOutcome {
    pub dir: PathBuf,
    pub files: Vec<PathBuf>,
    pub reports: Vec<SimReport>,
}

fn form_of(scenario: u8) -> Result<ScenarioForm> {
    match scenario {
        1 => Ok(ScenarioForm::S1),
        2 => Ok(ScenarioForm::S2),
        3 => Ok(ScenarioForm::S3),
        other => Err(CliError::Usage(format!(
            "scenario must be 1, 2 or 3, got {other}"
        ))),
    }
}

/// Runs the requested cells and writes `table1_3.csv`, `table4.csv`,
/// `fig1.csv`, `fig1.svg` and `simulate.json`.
pub fn cmd_simulate(
    selection: &CellSelection,
    replications: usize,
    cfg: &CliConfig,
) -> Result<SimulateOutcome> {
    if replications == 0 {
        return Err(CliError::Usage(
            "replications must be at least 1".into(),
        ));
    }
    let cells: Vec<(ScenarioForm, usize)> = match selection {
        CellSelection::One { scenario, n } => vec![(form_of(*scenario)?, *n)],
        CellSelection::Grid => {
            let mut grid = Vec::new();
            for scenario in 1..=3u8 {
                for n in GRID_SIZES {
                    grid.push((form_of(scenario)?, n));
                }
            }
            grid
        }
    };

    let mut reports = Vec::with_capacity(cells.len());
    for (ix, (form, n)) in cells.iter().enumerate() {
        // Each grid cell gets its own deterministic seed stream.
        let cell_seed = cfg.seed.wrapping_add(ix as u64 * 0x9E37_79B9_7F4A_7C15);
        let scenario = SimScenario::new(*form, *n, replications, cell_seed)
            .map_err(CliError::from_core)?
            .with_solver(cfg.solver.clone());
        let report = run_replications(&scenario).map_err(CliError::from_core)?;
        println!(
            "scenario {:?}, n = {}: completed {}/{}, fallbacks {}, mean m̂ = {}, median k₂/k₁ = {}",
            form,
            n,
            report.completed,
            report.requested,
            report.fallbacks,
            report
                .mean_m_hat
                .map_or("n/a".into(), |v| format!("{v:.4}")),
            report
                .median_k_ratio
                .map_or("n/a".into(), |v| format!("{v:.4}")),
        );
        reports.push(report);
    }

    let dir = resolve_output_dir(cfg.output_dir.as_deref())?;
    let mut files = emit_artifacts(&reports, &dir).map_err(CliError::from_core)?;
    let json_path = dir.join("simulate.json");
    let report = SimulateReport {
        schema_version: 1,
        command: "simulate".into(),
        seed: cfg.seed,
        replications,
        cells: reports,
    };
    write_json(&report, &json_path)?;
    files.push(json_path);
    for file in &files {
        println!("wrote {}", file.display());
    }

    Ok(SimulateOutcome {
        dir,
        files,
        reports: report.cells,
    })
}

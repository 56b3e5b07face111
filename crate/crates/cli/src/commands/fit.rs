//! `fit`: heteroscedasticity diagnostics plus both weighted fits on a CSV.

use std::path::{Path, PathBuf};

use mvdwls::{
    mvd_wls_fit, ols_fit, rse, spearman, spearman_pvalue, uvd_wls_fit, white_test, write_fit_overlay_svg,
    Dataset, FitResult, MvdFit, TestResult,
};

use crate::commands::{fmt_vec, resolve_output_dir, write_json};
use crate::config::CliConfig;
use crate::error::{CliError, Result};
use crate::io::{load_csv, Standardization};

/// A hypothesis-test outcome in report form.
#[derive(Debug, Clone, serde::Serialize)]
pub struct TestSummary {
    pub statistic: f64,
    pub df: usize,
    pub p_value: f64,
    pub reject_at_05: bool,
}

impl From<&TestResult> for TestSummary {
    fn from(t: &TestResult) -> Self {
        Self {
            statistic: t.statistic,
            df: t.df,
            p_value: t.p_value,
            reject_at_05: t.reject_at_05,
        }
    }
}

/// Rank correlation of one feature with the absolute OLS residuals.
#[derive(Debug, Clone, serde::Serialize)]
pub struct SpearmanRow {
    pub feature: String,
    pub r: f64,
    pub p_value: f64,
    pub reject_at_05: bool,
}

/// One estimation method's results; `error` is set instead of the other
/// fields when the method could not run on this data.
#[derive(Debug, Clone, Default, serde::Serialize)]
pub struct MethodBlock {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub beta: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fallback: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub m: Option<f64>,
    /// Single-regressor method: the feature driving the weights.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub weight_feature: Option<String>,
    /// Combined method: the unit direction through the features.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k: Option<Vec<f64>>,
    /// `k₂/k₁` when there are exactly two features.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k_ratio: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rank_correlation: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mae: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rse: Option<f64>,
}

/// The machine-readable fit report (`fit.json`).
#[derive(Debug, Clone, serde::Serialize)]
pub struct FitReport {
    pub schema_version: u32,
    pub command: String,
    pub input: String,
    pub n: usize,
    pub response: String,
    pub features: Vec<String>,
    pub standardize: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub standardization: Option<Standardization>,
    pub seed: u64,
    pub white: TestSummary,
    /// True when the fits degraded to ordinary least squares: either the
    /// White test found no heteroscedasticity, or the combined method found
    /// no usable variance signal in the residual ranks.
    pub homoscedastic_fallback: bool,
    pub spearman: Vec<SpearmanRow>,
    pub ols: CoefficientBlock,
    pub m1: MethodBlock,
    pub m2: MethodBlock,
}

/// Plain coefficient vector.
#[derive(Debug, Clone, serde::Serialize)]
pub struct CoefficientBlock {
    pub beta: Vec<f64>,
}

/// Where the fit wrote its outputs, plus the report itself.
#[derive(Debug)]
pub struct FitOutcome {
    pub dir: PathBuf,
    pub files: Vec<PathBuf>,
    pub report: FitReport,
}

fn mean_abs(fit: &FitResult) -> f64 {
    fit.residuals.iter().map(|e| e.abs()).sum::<f64>() / fit.residuals.len() as f64
}

fn method_block(result: &MvdFit, data: &Dataset, single: bool) -> Result<MethodBlock> {
    let mut block = MethodBlock {
        beta: Some(result.fit.beta.iter().cloned().collect()),
        fallback: Some(result.fallback),
        mae: Some(mean_abs(&result.fit)),
        rse: Some(rse(&result.fit).map_err(CliError::from_core)?),
        ..MethodBlock::default()
    };
    if let Some(model) = &result.model {
        block.m = Some(model.m);
        block.rank_correlation = Some(model.combo.rs_abs());
        if single {
            let k = model.combo.k();
            let best = (0..k.len())
                .max_by(|a, b| k[*a].abs().partial_cmp(&k[*b].abs()).unwrap())
                .unwrap_or(0);
            block.weight_feature = Some(data.feature_names()[best].clone());
        } else {
            block.k = Some(model.combo.k().iter().cloned().collect());
            if data.p() == 2 {
                block.k_ratio = model.combo.component_ratio(1, 0);
            }
        }
    }
    Ok(block)
}

/// Runs diagnostics and both weighted fits, writes `fit.json` and
/// `fit_overlay.svg`, and prints a console summary.
pub fn cmd_fit(input: &Path, cfg: &CliConfig) -> Result<FitOutcome> {
    let loaded = load_csv(input, cfg)?;
    let data = &loaded.data;
    let ols = ols_fit(data).map_err(CliError::from_core)?;
    let white = white_test(data, &ols).map_err(CliError::from_core)?;

    let abs_resid: Vec<f64> = ols.residuals.iter().map(|e| e.abs()).collect();
    let mut rows = Vec::with_capacity(data.p());
    for (j, name) in data.feature_names().into_iter().enumerate() {
        let column: Vec<f64> = data.regressor(j).iter().cloned().collect();
        let r = spearman(&column, &abs_resid).map_err(CliError::from_core)?;
        let test = spearman_pvalue(r, data.n()).map_err(CliError::from_core)?;
        rows.push(SpearmanRow {
            feature: name,
            r,
            p_value: test.p_value,
            reject_at_05: test.reject_at_05,
        });
    }

    // When the White test finds no heteroscedasticity there is nothing for
    // the weighted methods to model: both report the OLS coefficients and
    // the fallback is flagged. Otherwise each method runs, and a failure of
    // one is recorded in its block while the other still reports.
    let (m1, m2, homoscedastic_fallback, fitted_m1, fitted_m2);
    if white.reject_at_05 {
        let m1_result = uvd_wls_fit(data, &cfg.solver);
        let m2_result = mvd_wls_fit(data, &cfg.solver);
        if let (Err(e1), Err(e2)) = (&m1_result, &m2_result) {
            return Err(CliError::Estimation(format!(
                "both methods failed: single-regressor: {e1}; combined: {e2}"
            )));
        }
        let block_of = |res: &mvdwls::Result<MvdFit>, single: bool| -> Result<MethodBlock> {
            match res {
                Ok(fit) => method_block(fit, data, single),
                Err(e) => Ok(MethodBlock {
                    error: Some(e.to_string()),
                    ..MethodBlock::default()
                }),
            }
        };
        m1 = block_of(&m1_result, true)?;
        m2 = block_of(&m2_result, false)?;
        homoscedastic_fallback = m2_result.as_ref().map(|f| f.fallback).unwrap_or(false);
        fitted_m1 = m1_result
            .map(|f| f.fit.fitted)
            .unwrap_or_else(|_| ols.fitted.clone());
        fitted_m2 = m2_result
            .map(|f| f.fit.fitted)
            .unwrap_or_else(|_| ols.fitted.clone());
    } else {
        let ols_block = MethodBlock {
            beta: Some(ols.beta.iter().cloned().collect()),
            fallback: Some(true),
            mae: Some(mean_abs(&ols)),
            rse: Some(rse(&ols).map_err(CliError::from_core)?),
            ..MethodBlock::default()
        };
        m1 = ols_block.clone();
        m2 = ols_block;
        homoscedastic_fallback = true;
        fitted_m1 = ols.fitted.clone();
        fitted_m2 = ols.fitted.clone();
    }

    let report = FitReport {
        schema_version: 1,
        command: "fit".into(),
        input: input.display().to_string(),
        n: data.n(),
        response: loaded.response_name.clone(),
        features: data.feature_names(),
        standardize: cfg.standardize,
        standardization: loaded.standardization.clone(),
        seed: cfg.seed,
        white: TestSummary::from(&white),
        homoscedastic_fallback,
        spearman: rows,
        ols: CoefficientBlock {
            beta: ols.beta.iter().cloned().collect(),
        },
        m1,
        m2,
    };

    let dir = resolve_output_dir(cfg.output_dir.as_deref())?;
    let json_path = dir.join("fit.json");
    write_json(&report, &json_path)?;
    let svg_path = dir.join("fit_overlay.svg");
    write_fit_overlay_svg(data.y(), &fitted_m1, &fitted_m2, &svg_path).map_err(CliError::from_core)?;

    print_summary(&report);
    println!("wrote {}", json_path.display());
    println!("wrote {}", svg_path.display());

    Ok(FitOutcome {
        dir,
        files: vec![json_path, svg_path],
        report,
    })
}

fn print_summary(report: &FitReport) {
    println!(
        "loaded {}: n = {}, response = {}, features = [{}]",
        report.input,
        report.n,
        report.response,
        report.features.join(", ")
    );
    let verdict = if report.white.reject_at_05 {
        "heteroscedasticity detected at α = 0.05"
    } else {
        "no heteroscedasticity detected at α = 0.05"
    };
    println!(
        "White test: statistic = {:.4} (df = {}), p = {:.4} — {}",
        report.white.statistic, report.white.df, report.white.p_value, verdict
    );
    println!("rank correlation of features with |OLS residuals|:");
    for row in &report.spearman {
        println!(
            "    {:<12} r_s = {:+.4}   p = {:.4}",
            row.feature, row.r, row.p_value
        );
    }
    if report.homoscedastic_fallback {
        println!("no usable variance signal; ordinary least squares coefficients:");
        println!("    β̂ = {}", fmt_vec(&report.ols.beta));
    }
    print_method("M1 (single-feature weights)", &report.m1);
    print_method("M2 (combined weights)", &report.m2);
}

fn print_method(label: &str, block: &MethodBlock) {
    if let Some(err) = &block.error {
        println!("{label}: unavailable — {err}");
        return;
    }
    let mut head = String::new();
    if let Some(f) = &block.weight_feature {
        head.push_str(&format!("feature {f}"));
    }
    if let Some(k) = &block.k {
        head.push_str(&format!("k = {}", fmt_vec(k)));
    }
    match block.m {
        Some(m) => head.push_str(&format!(", m̂ = {m:.4}")),
        None => head.push_str("ordinary least squares fallback"),
    }
    println!("{label}: {head}");
    if let Some(beta) = &block.beta {
        println!("    β̂ = {}", fmt_vec(beta));
    }
    if let (Some(mae), Some(rse)) = (block.mae, block.rse) {
        println!("    MAE = {mae:.4}   RSE = {rse:.4}");
    }
}

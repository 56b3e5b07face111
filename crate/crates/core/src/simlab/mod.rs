//! Simulation scenarios, replication harness and cross-validation.
//!
//! Three benchmark scenarios share the mean structure
//! `y = 10 + 15 x₁ + 5 x₂ + ε` with `x₁ ~ U(5, 15)`, `x₂ ~ Exp(1)` and a
//! scenario-specific error standard deviation:
//!
//! * `s1`: `0.1 (x₁ + 3 x₂)` — a combined index drives the noise,
//! * `s2`: `0.1 x₁` — a single regressor drives it,
//! * `s3`: `0.1 (x₁ + 3 x₂ + x₁ x₂)` — the index plus an interaction.

use nalgebra::DVector;
use rand_distr::{Distribution, Exp, Normal, Uniform};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::estimator::{mvd_wls_fit, uvd_wls_fit, MvdFit, SolverConfig};
use crate::linreg::Dataset;
use crate::metrics::{self, MetricsReport};

mod artifacts;
mod rng;

pub use artifacts::{emit_artifacts, write_cv_csv, write_fit_overlay_svg};

/// True coefficients shared by all scenarios, intercept first.
pub const BETA_TRUE: [f64; 3] = [10.0, 15.0, 5.0];

/// Which variance law generates the noise.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ScenarioForm {
    /// Standard deviation `0.1 (x₁ + 3 x₂)`.
    S1,
    /// Standard deviation `0.1 x₁`.
    S2,
    /// Standard deviation `0.1 (x₁ + 3 x₂ + x₁ x₂)`.
    S3,
}

impl ScenarioForm {
    /// Lower-case label used in artifacts and on the command line.
    pub fn label(self) -> &'static str {
        match self {
            ScenarioForm::S1 => "s1",
            ScenarioForm::S2 => "s2",
            ScenarioForm::S3 => "s3",
        }
    }

    /// Parses a label, case-insensitively.
    pub fn parse(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "s1" => Ok(ScenarioForm::S1),
            "s2" => Ok(ScenarioForm::S2),
            "s3" => Ok(ScenarioForm::S3),
            other => Err(Error::InvalidConfig {
                reason: format!("unknown scenario {other:?}, expected s1, s2 or s3"),
            }),
        }
    }

    /// Error standard deviation at a design point.
    pub fn noise_sd(self, x1: f64, x2: f64) -> f64 {
        match self {
            ScenarioForm::S1 => 0.1 * (x1 + 3.0 * x2),
            ScenarioForm::S2 => 0.1 * x1,
            ScenarioForm::S3 => 0.1 * (x1 + 3.0 * x2 + x1 * x2),
        }
    }
}

/// A fully specified simulation cell: scenario, sample size, replication
/// count and seed.
#[derive(Debug, Clone, PartialEq)]
pub struct SimScenario {
    pub form: ScenarioForm,
    pub n: usize,
    pub replications: usize,
    pub seed: u64,
    /// Solver template; the per-replicate direction-search seed is derived
    /// from `seed`, so the template's own seed is ignored.
    pub solver: SolverConfig,
}

impl SimScenario {
    pub fn new(form: ScenarioForm, n: usize, replications: usize, seed: u64) -> Result<Self> {
        if n < 10 {
            return Err(Error::InvalidConfig {
                reason: format!("scenario sample size {n} is below the minimum of 10"),
            });
        }
        if replications == 0 {
            return Err(Error::InvalidConfig {
                reason: "replication count must be at least 1".to_owned(),
            });
        }
        Ok(Self {
            form,
            n,
            replications,
            seed,
            solver: SolverConfig::default(),
        })
    }

    /// Replaces the solver template.
    pub fn with_solver(mut self, solver: SolverConfig) -> Self {
        self.solver = solver;
        self
    }

    /// True coefficient vector.
    pub fn beta_true(&self) -> DVector<f64> {
        DVector::from_row_slice(&BETA_TRUE)
    }

    /// Generates the dataset of one replicate. Draws depend only on
    /// `(seed, replicate)`, never on evaluation order.
    pub fn gen_scenario(&self, replicate: usize) -> Result<Dataset> {
        let mut r = rng::stream(self.seed, &[rng::PURPOSE_DATA, replicate as u64]);
        let ux = Uniform::new(5.0, 15.0).expect("valid range");
        let ex = Exp::new(1.0).expect("valid rate");
        let gauss = Normal::new(0.0, 1.0).expect("valid params");
        let n = self.n;
        let x1: Vec<f64> = (0..n).map(|_| ux.sample(&mut r)).collect();
        let x2: Vec<f64> = (0..n).map(|_| ex.sample(&mut r)).collect();
        let y: Vec<f64> = (0..n)
            .map(|i| {
                let mean = BETA_TRUE[0] + BETA_TRUE[1] * x1[i] + BETA_TRUE[2] * x2[i];
                mean + self.form.noise_sd(x1[i], x2[i]) * gauss.sample(&mut r)
            })
            .collect();
        Dataset::from_columns(y, &[x1, x2], &["x1", "x2"])
    }
}

/// Aggregated outcome of one simulation cell.
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct SimReport {
    /// Scenario label (`s1`, `s2`, `s3`).
    pub scenario: String,
    /// Observations per replicate.
    pub n: usize,
    /// Replications requested.
    pub requested: usize,
    /// Replications that produced both fits.
    pub completed: usize,
    /// Replications where either fit failed.
    pub failures: usize,
    /// Replications where the multivariate fit fell back to OLS.
    pub fallbacks: usize,
    /// Accuracy of the single-regressor baseline.
    pub m1: MetricsReport,
    /// Accuracy of the combined-index method.
    pub m2: MetricsReport,
    /// Direction component ratios `k₂ / k₁`, one per non-fallback replicate.
    pub k_ratios: Vec<f64>,
    /// Exponent estimates of the combined-index method.
    pub m_hats: Vec<f64>,
    /// Exponent estimates of the baseline.
    pub m_hats_m1: Vec<f64>,
    /// Median of `k_ratios` (absent if every replicate fell back).
    pub median_k_ratio: Option<f64>,
    /// Mean of `m_hats` (absent if every replicate fell back).
    pub mean_m_hat: Option<f64>,
}

struct RepOutcome {
    beta1: DVector<f64>,
    beta2: DVector<f64>,
    fitted1: DVector<f64>,
    fitted2: DVector<f64>,
    y: DVector<f64>,
    sse1: f64,
    sse2: f64,
    rse1: f64,
    rse2: f64,
    k_ratio: Option<f64>,
    m_hat2: Option<f64>,
    m_hat1: Option<f64>,
    fallback: bool,
}

/// Runs every replicate of a cell (in parallel) and aggregates accuracy.
///
/// A replicate counts as failed when either method returns an error; failed
/// replicates are excluded from both methods' summaries so the comparison
/// always uses identical data. At least one replicate must survive.
pub fn run_replications(scenario: &SimScenario) -> Result<SimReport> {
    scenario.solver.validate()?;
    let outcomes: Vec<Result<RepOutcome>> = (0..scenario.replications)
        .into_par_iter()
        .map(|rep| run_one(scenario, rep))
        .collect();

    let mut ok = Vec::with_capacity(outcomes.len());
    let mut first_err = None;
    for o in outcomes {
        match o {
            Ok(v) => ok.push(v),
            Err(e) => {
                if first_err.is_none() {
                    first_err = Some(e);
                }
            }
        }
    }
    if ok.is_empty() {
        return Err(first_err.unwrap_or(Error::EmptyReport));
    }
    let failures = scenario.replications - ok.len();

    let truth = scenario.beta_true();
    let betas1: Vec<DVector<f64>> = ok.iter().map(|o| o.beta1.clone()).collect();
    let betas2: Vec<DVector<f64>> = ok.iter().map(|o| o.beta2.clone()).collect();
    let fitted1: Vec<DVector<f64>> = ok.iter().map(|o| o.fitted1.clone()).collect();
    let fitted2: Vec<DVector<f64>> = ok.iter().map(|o| o.fitted2.clone()).collect();
    let ys: Vec<DVector<f64>> = ok.iter().map(|o| o.y.clone()).collect();
    let r = ok.len();
    let rf = r as f64;

    let m1 = MetricsReport {
        bias_abs: metrics::abs_bias(&betas1, &truth)?,
        mse: metrics::mse(&betas1, &truth)?,
        mae_y: metrics::mae(&fitted1, &ys)?,
        sse: ok.iter().map(|o| o.sse1).sum::<f64>() / rf,
        rse: ok.iter().map(|o| o.rse1).sum::<f64>() / rf,
        r,
        n: scenario.n,
    };
    let m2 = MetricsReport {
        bias_abs: metrics::abs_bias(&betas2, &truth)?,
        mse: metrics::mse(&betas2, &truth)?,
        mae_y: metrics::mae(&fitted2, &ys)?,
        sse: ok.iter().map(|o| o.sse2).sum::<f64>() / rf,
        rse: ok.iter().map(|o| o.rse2).sum::<f64>() / rf,
        r,
        n: scenario.n,
    };

    let k_ratios: Vec<f64> = ok.iter().filter_map(|o| o.k_ratio).collect();
    let m_hats: Vec<f64> = ok.iter().filter_map(|o| o.m_hat2).collect();
    let m_hats_m1: Vec<f64> = ok.iter().filter_map(|o| o.m_hat1).collect();
    let fallbacks = ok.iter().filter(|o| o.fallback).count();

    Ok(SimReport {
        scenario: scenario.form.label().to_owned(),
        n: scenario.n,
        requested: scenario.replications,
        completed: r,
        failures,
        fallbacks,
        m1,
        m2,
        median_k_ratio: median(&k_ratios),
        mean_m_hat: mean(&m_hats),
        k_ratios,
        m_hats,
        m_hats_m1,
    })
}

fn run_one(scenario: &SimScenario, rep: usize) -> Result<RepOutcome> {
    let data = scenario.gen_scenario(rep)?;
    let mut cfg = scenario.solver.clone();
    cfg.optimizer_seed = rng::mix(scenario.seed, &[rng::PURPOSE_OPTIMIZER, rep as u64]);
    let f1 = uvd_wls_fit(&data, &cfg)?;
    let f2 = mvd_wls_fit(&data, &cfg)?;
    Ok(summarize_pair(&data, &f1, &f2))
}

fn summarize_pair(data: &Dataset, f1: &MvdFit, f2: &MvdFit) -> RepOutcome {
    RepOutcome {
        beta1: f1.fit.beta.clone(),
        beta2: f2.fit.beta.clone(),
        fitted1: f1.fit.fitted.clone(),
        fitted2: f2.fit.fitted.clone(),
        y: data.y().clone(),
        sse1: f1.fit.sse(),
        sse2: f2.fit.sse(),
        rse1: (f1.fit.sse() / f1.fit.df_resid as f64).sqrt(),
        rse2: (f2.fit.sse() / f2.fit.df_resid as f64).sqrt(),
        k_ratio: f2
            .model
            .as_ref()
            .and_then(|m| m.combo.component_ratio(1, 0)),
        m_hat2: f2.model.as_ref().map(|m| m.m),
        m_hat1: f1.model.as_ref().map(|m| m.m),
        fallback: f2.fallback,
    }
}

/// One repeat of the half/half cross-validation comparison.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct CvPair {
    pub repeat: usize,
    pub sse_m1: f64,
    pub sse_m2: f64,
}

/// Repeated 50/50 cross-validation of the two methods.
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct CvReport {
    pub repeats_requested: usize,
    pub completed: usize,
    pub failures: usize,
    pub pairs: Vec<CvPair>,
    pub mean_sse_m1: f64,
    pub mean_sse_m2: f64,
}

/// Repeatedly shuffles the rows, fits both methods on one half and scores
/// squared prediction error on the other half.
///
/// The split of repeat `t` depends only on `(seed, t)`. Repeats where either
/// fit fails are skipped and counted; at least one must survive.
pub fn crossval(
    data: &Dataset,
    repeats: usize,
    seed: u64,
    solver: &SolverConfig,
) -> Result<CvReport> {
    solver.validate()?;
    if repeats == 0 {
        return Err(Error::InvalidConfig {
            reason: "cross-validation needs at least one repeat".to_owned(),
        });
    }
    let n = data.n();
    let p = data.p();
    // Each half must keep at least one residual degree of freedom.
    if n / 2 < p + 2 {
        return Err(Error::SplitTooSmall { n, p });
    }

    let outcomes: Vec<Result<CvPair>> = (0..repeats)
        .into_par_iter()
        .map(|t| run_split(data, t, seed, solver))
        .collect();

    let mut pairs = Vec::new();
    let mut first_err = None;
    for o in outcomes {
        match o {
            Ok(p) => pairs.push(p),
            Err(e) => {
                if first_err.is_none() {
                    first_err = Some(e);
                }
            }
        }
    }
    if pairs.is_empty() {
        return Err(first_err.unwrap_or(Error::EmptyReport));
    }
    let completed = pairs.len();
    let cf = completed as f64;
    Ok(CvReport {
        repeats_requested: repeats,
        completed,
        failures: repeats - completed,
        mean_sse_m1: pairs.iter().map(|p| p.sse_m1).sum::<f64>() / cf,
        mean_sse_m2: pairs.iter().map(|p| p.sse_m2).sum::<f64>() / cf,
        pairs,
    })
}

fn run_split(data: &Dataset, t: usize, seed: u64, solver: &SolverConfig) -> Result<CvPair> {
    use rand::seq::SliceRandom;
    let n = data.n();
    let mut r = rng::stream(seed, &[rng::PURPOSE_SPLIT, t as u64]);
    let mut perm: Vec<usize> = (0..n).collect();
    perm.shuffle(&mut r);
    let half = n / 2;
    let mut train: Vec<usize> = perm[..half].to_vec();
    let mut test: Vec<usize> = perm[half..].to_vec();
    train.sort_unstable();
    test.sort_unstable();

    let train_data = data.take_rows(&train)?;
    let test_data = data.take_rows(&test)?;

    let mut cfg = solver.clone();
    cfg.optimizer_seed = rng::mix(seed, &[rng::PURPOSE_OPTIMIZER, t as u64]);
    let f1 = uvd_wls_fit(&train_data, &cfg)?;
    let f2 = mvd_wls_fit(&train_data, &cfg)?;

    let pred1 = test_data.design() * &f1.fit.beta;
    let pred2 = test_data.design() * &f2.fit.beta;
    Ok(CvPair {
        repeat: t,
        sse_m1: metrics::sse(&pred1, test_data.y())?,
        sse_m2: metrics::sse(&pred2, test_data.y())?,
    })
}

fn median(v: &[f64]) -> Option<f64> {
    if v.is_empty() {
        return None;
    }
    let mut s = v.to_vec();
    s.sort_by(|a, b| a.partial_cmp(b).expect("finite"));
    let mid = s.len() / 2;
    Some(if s.len() % 2 == 1 {
        s[mid]
    } else {
        0.5 * (s[mid - 1] + s[mid])
    })
}

fn mean(v: &[f64]) -> Option<f64> {
    if v.is_empty() {
        None
    } else {
        Some(v.iter().sum::<f64>() / v.len() as f64)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scenario_labels_round_trip() {
        for form in [ScenarioForm::S1, ScenarioForm::S2, ScenarioForm::S3] {
            assert_eq!(ScenarioForm::parse(form.label()).unwrap(), form);
        }
        assert!(ScenarioForm::parse("s9").is_err());
    }

    #[test]
    fn scenario_validation() {
        assert!(SimScenario::new(ScenarioForm::S1, 5, 10, 0).is_err());
        assert!(SimScenario::new(ScenarioForm::S1, 30, 0, 0).is_err());
        assert!(SimScenario::new(ScenarioForm::S1, 30, 10, 0).is_ok());
    }

    #[test]
    fn generated_data_is_reproducible_and_in_range() {
        let s = SimScenario::new(ScenarioForm::S1, 60, 5, 99).unwrap();
        let a = s.gen_scenario(3).unwrap();
        let b = s.gen_scenario(3).unwrap();
        assert_eq!(a, b);
        let c = s.gen_scenario(4).unwrap();
        assert_ne!(a, c);
        for i in 0..60 {
            let x1 = a.regressor(0)[i];
            let x2 = a.regressor(1)[i];
            assert!((5.0..15.0).contains(&x1));
            assert!(x2 >= 0.0);
        }
    }

    #[test]
    fn replication_report_has_consistent_counts() {
        let s = SimScenario::new(ScenarioForm::S2, 30, 8, 12).unwrap();
        let rep = run_replications(&s).unwrap();
        assert_eq!(rep.requested, 8);
        assert_eq!(rep.completed + rep.failures, 8);
        assert_eq!(rep.m1.r, rep.completed);
        assert_eq!(rep.m1.bias_abs.len(), 3);
        assert_eq!(rep.m2.mse.len(), 3);
        assert!(rep.m2.mae_y > 0.0);
        assert_eq!(rep.m_hats.len() + rep.fallbacks, rep.completed);
    }

    #[test]
    fn replication_report_is_deterministic() {
        let s = SimScenario::new(ScenarioForm::S1, 30, 6, 5).unwrap();
        let a = run_replications(&s).unwrap();
        let b = run_replications(&s).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn crossval_is_deterministic_and_counts_add_up() {
        let s = SimScenario::new(ScenarioForm::S1, 40, 1, 7).unwrap();
        let data = s.gen_scenario(0).unwrap();
        let cfg = SolverConfig::default();
        let a = crossval(&data, 4, 11, &cfg).unwrap();
        let b = crossval(&data, 4, 11, &cfg).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.completed + a.failures, 4);
        assert!(a.mean_sse_m1 > 0.0);
        assert!(a.mean_sse_m2 > 0.0);
        // Different split seeds give different numbers.
        let c = crossval(&data, 4, 12, &cfg).unwrap();
        assert_ne!(a.pairs, c.pairs);
    }

    #[test]
    fn crossval_rejects_tiny_samples() {
        let s = SimScenario::new(ScenarioForm::S1, 60, 1, 7).unwrap();
        let data = s.gen_scenario(0).unwrap();
        let small = data.take_rows(&[0, 1, 2, 3, 4, 5, 6]).unwrap();
        let err = crossval(&small, 2, 1, &SolverConfig::default()).unwrap_err();
        assert!(matches!(err, Error::SplitTooSmall { n: 7, p: 2 }));
    }

    #[test]
    fn median_and_mean_helpers() {
        assert_eq!(median(&[]), None);
        assert_eq!(median(&[3.0, 1.0, 2.0]), Some(2.0));
        assert_eq!(median(&[4.0, 1.0, 2.0, 3.0]), Some(2.5));
        assert_eq!(mean(&[2.0, 4.0]), Some(3.0));
    }
}

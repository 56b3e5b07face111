//! Variance-structure estimation.
//!
//! The model is `y = X β + ε` with `Var(εᵢ) = σ² wᵢᵐ`, where the weight
//! base `wᵢ` is a positive linear combination of the regressors,
//! `wᵢ ∝ xᵢᵀ k`. Estimation proceeds in three stages: find the direction
//! `k` whose combined index is most rank-correlated with the absolute OLS
//! residuals, estimate the exponent `m` by profile maximum likelihood, and
//! refit by weighted least squares with weights `wᵢ⁻ᵐ`.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::linreg::{ols_fit, wls_fit, Dataset, FitResult};
use crate::rankcorr::spearman;

mod root;
mod search;

use root::{brent_root, scan_sign_changes, Bracket};

/// Residuals at or below this relative size are treated as exactly zero.
const ZERO_RESID_REL: f64 = 1e-10;
/// Step width of the coarse root scan over the exponent interval.
const SCAN_STEP: f64 = 0.25;
/// Absolute tolerance of the Brent refinement.
const ROOT_XTOL: f64 = 1e-8;
/// A solved exponent within this distance of the interval ends is flagged.
const BOUNDARY_MARGIN: f64 = 0.01;
/// Directions whose best rank correlation falls below this carry no usable
/// variance signal; the fit falls back to ordinary least squares.
const MIN_RANK_SIGNAL: f64 = 0.05;
/// Grid used by the single-regressor baseline exponent search.
const UVD_GRID_STEP: f64 = 0.05;
const UVD_GRID_MAX: f64 = 6.0;

/// Tuning knobs for the two search stages.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolverConfig {
    /// Lower end of the exponent search interval.
    pub m_min: f64,
    /// Upper end of the exponent search interval.
    pub m_max: f64,
    /// Convergence threshold for successive exponent iterates.
    pub epsilon: f64,
    /// Cap on outer fixed-point iterations of the exponent solve.
    pub max_outer_iters: usize,
    /// Seed for the direction search (the only randomized stage).
    pub optimizer_seed: u64,
    /// Direction-search population; `None` means `15 × p`.
    pub population: Option<usize>,
    /// Direction-search generations.
    pub generations: usize,
    /// Smallest combined-index value still considered strictly positive.
    pub w_floor: f64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            m_min: -8.0,
            m_max: 8.0,
            epsilon: 1e-6,
            max_outer_iters: 200,
            optimizer_seed: 0,
            population: None,
            generations: 200,
            w_floor: 1e-6,
        }
    }
}

impl SolverConfig {
    /// Checks every field for plausibility.
    pub fn validate(&self) -> Result<()> {
        let bad = |reason: &str| Error::InvalidConfig {
            reason: reason.to_owned(),
        };
        if !self.m_min.is_finite() || !self.m_max.is_finite() || self.m_min >= self.m_max {
            return Err(bad("exponent interval must be finite and non-empty"));
        }
        if !self.epsilon.is_finite() || self.epsilon <= 0.0 {
            return Err(bad("epsilon must be positive"));
        }
        if self.max_outer_iters == 0 {
            return Err(bad("max_outer_iters must be at least 1"));
        }
        if let Some(p) = self.population {
            if p < 5 {
                return Err(bad("population must be at least 5"));
            }
        }
        if self.generations == 0 {
            return Err(bad("generations must be at least 1"));
        }
        if !self.w_floor.is_finite() || self.w_floor <= 0.0 {
            return Err(bad("w_floor must be positive"));
        }
        Ok(())
    }

    fn population_for(&self, dim: usize) -> usize {
        self.population.unwrap_or(15 * dim.max(1)).max(5)
    }
}

/// A fitted weight direction: unit vector `k`, the rescaled combined index
/// `w = scale · X k` (minimum exactly one), and the rank-correlation
/// strength that selected it.
#[derive(Debug, Clone, PartialEq)]
pub struct CombinationWeights {
    k: DVector<f64>,
    scale: f64,
    rs_abs: f64,
    w: DVector<f64>,
}

impl CombinationWeights {
    /// Validates a direction against the regressor block and normalizes it.
    ///
    /// The sign of `k` is flipped if needed so the combined index is
    /// positive; the index is then rescaled so its minimum is one, which
    /// pins down the scale left free by the weight model.
    pub fn new(
        x_reg: &DMatrix<f64>,
        k: &DVector<f64>,
        rs_abs: f64,
        w_floor: f64,
    ) -> Result<Self> {
        if k.len() != x_reg.ncols() {
            return Err(Error::DimensionMismatch {
                context: "direction length vs regressor columns",
                expected: x_reg.ncols(),
                got: k.len(),
            });
        }
        if !(0.0..=1.0).contains(&rs_abs) {
            return Err(Error::InvalidConfig {
                reason: format!("rank correlation strength {rs_abs} outside [0, 1]"),
            });
        }
        let norm = k.norm();
        if norm <= 0.0 || !norm.is_finite() {
            return Err(Error::NoFeasibleDirection);
        }
        let mut unit = k / norm;
        let mut index = x_reg * &unit;
        if index.iter().all(|v| -*v > w_floor) {
            unit = -unit;
            index = -index;
        }
        if !index.iter().all(|v| *v > w_floor) {
            return Err(Error::NoFeasibleDirection);
        }
        let min = index.min();
        let max = index.max();
        if max - min <= 1e-12 * max.abs().max(1.0) {
            return Err(Error::AllWeightsEqual);
        }
        let scale = 1.0 / min;
        let w = index * scale;
        Ok(Self {
            k: unit,
            scale,
            rs_abs,
            w,
        })
    }

    /// Unit-norm direction through the regressors.
    pub fn k(&self) -> &DVector<f64> {
        &self.k
    }

    /// Multiplier applied to `X k` so the smallest weight is one.
    pub fn scale(&self) -> f64 {
        self.scale
    }

    /// Absolute Spearman correlation achieved by this direction.
    pub fn rs_abs(&self) -> f64 {
        self.rs_abs
    }

    /// Weight base per observation, minimum exactly one.
    pub fn w(&self) -> &DVector<f64> {
        &self.w
    }

    /// Ratio of two direction components, `k[num] / k[den]`.
    pub fn component_ratio(&self, num: usize, den: usize) -> Option<f64> {
        let d = *self.k.get(den)?;
        let n = *self.k.get(num)?;
        (d != 0.0).then(|| n / d)
    }
}

/// A complete variance description: weight base, exponent and scale, so
/// `Var(εᵢ) = sigma2 · wᵢᵐ`.
#[derive(Debug, Clone, PartialEq)]
pub struct VarianceModel {
    /// How the weight base is built from the regressors.
    pub combo: CombinationWeights,
    /// Estimated variance exponent.
    pub m: f64,
    /// Estimated base variance (maximum-likelihood scale).
    pub sigma2: f64,
}

impl VarianceModel {
    /// Per-observation error variances implied by the model.
    pub fn variances(&self) -> DVector<f64> {
        self.combo.w().map(|w| self.sigma2 * w.powf(self.m))
    }
}

/// Result of the exponent solve.
#[derive(Debug, Clone, PartialEq)]
pub struct ExponentSolve {
    /// The solved exponent.
    pub m: f64,
    /// Iterates of the outer loop, starting at the initial value 0.
    pub trace: Vec<f64>,
    /// Number of outer iterations performed.
    pub iterations: usize,
    /// Whether the solution landed essentially on an interval end.
    pub boundary: bool,
}

/// A heteroscedastic fit: coefficient estimates plus the variance model
/// that produced the observation weights.
#[derive(Debug, Clone, PartialEq)]
pub struct MvdFit {
    /// The variance structure; `None` when the fit fell back to OLS
    /// because no usable signal was found.
    pub model: Option<VarianceModel>,
    /// The final weighted (or fallback ordinary) least-squares fit.
    pub fit: FitResult,
    /// Log-likelihood of the fitted heteroscedastic model.
    pub loglik: f64,
    /// Outer iterations spent solving the exponent.
    pub iterations: usize,
    /// Exponent iterates, for diagnostics.
    pub m_trace: Vec<f64>,
    /// True when the fit degraded to ordinary least squares.
    pub fallback: bool,
    /// True when the exponent landed on the search-interval boundary.
    pub boundary: bool,
}

impl MvdFit {
    /// The solved exponent, if a variance model was fitted.
    pub fn m(&self) -> Option<f64> {
        self.model.as_ref().map(|v| v.m)
    }
}

/// The combined index `X k` (no validation beyond shape).
pub fn combine(x_reg: &DMatrix<f64>, k: &DVector<f64>) -> Result<DVector<f64>> {
    if k.len() != x_reg.ncols() {
        return Err(Error::DimensionMismatch {
            context: "direction length vs regressor columns",
            expected: x_reg.ncols(),
            got: k.len(),
        });
    }
    Ok(x_reg * k)
}

/// Score of a candidate direction: the absolute Spearman correlation
/// between the combined index and the absolute residuals, or zero when the
/// direction is infeasible (index not strictly positive after a sign flip)
/// or carries no variation.
pub fn combination_objective(
    x_reg: &DMatrix<f64>,
    abs_resid: &DVector<f64>,
    k: &DVector<f64>,
    w_floor: f64,
) -> Result<f64> {
    if abs_resid.len() != x_reg.nrows() {
        return Err(Error::DimensionMismatch {
            context: "residuals vs regressor rows",
            expected: x_reg.nrows(),
            got: abs_resid.len(),
        });
    }
    if abs_resid.iter().all(|v| *v == abs_resid[0]) {
        return Err(Error::ZeroRankVariance {
            context: "absolute residuals",
        });
    }
    let norm = k.norm();
    if norm <= 0.0 || !norm.is_finite() {
        return Ok(0.0);
    }
    let mut index = x_reg * (k / norm);
    if index.iter().all(|v| -*v > w_floor) {
        index = -index;
    }
    if !index.iter().all(|v| *v > w_floor) {
        return Ok(0.0);
    }
    let max = index.max();
    let min = index.min();
    if max - min <= 1e-12 * max.abs().max(1.0) {
        return Ok(0.0);
    }
    let rs = spearman(index.as_slice(), abs_resid.as_slice())?;
    Ok(rs.abs())
}

/// Searches for the direction whose combined index tracks the absolute
/// residuals most strongly in rank.
///
/// With one regressor the direction is trivially `(±1)`. Otherwise a seeded
/// differential-evolution search runs over the unit sphere, followed by a
/// simplex polish. If the search ends on an infeasible direction, the axis
/// directions and the equal-weights diagonal are tried before giving up
/// with [`Error::NoFeasibleDirection`].
pub fn optimize_combination(
    x_reg: &DMatrix<f64>,
    abs_resid: &DVector<f64>,
    cfg: &SolverConfig,
) -> Result<CombinationWeights> {
    cfg.validate()?;
    let p = x_reg.ncols();
    if p == 0 {
        return Err(Error::DimensionMismatch {
            context: "regressor columns",
            expected: 1,
            got: 0,
        });
    }
    if abs_resid.len() != x_reg.nrows() {
        return Err(Error::DimensionMismatch {
            context: "residuals vs regressor rows",
            expected: x_reg.nrows(),
            got: abs_resid.len(),
        });
    }
    if abs_resid.iter().all(|v| *v == abs_resid[0]) {
        return Err(Error::ZeroRankVariance {
            context: "absolute residuals",
        });
    }

    if p == 1 {
        let k = DVector::from_element(1, 1.0);
        let rs = combination_objective(x_reg, abs_resid, &k, cfg.w_floor)?;
        let col_feasible = x_reg.column(0).iter().all(|v| v.abs() > cfg.w_floor)
            && (x_reg.column(0).iter().all(|v| *v > 0.0)
                || x_reg.column(0).iter().all(|v| *v < 0.0));
        if !col_feasible {
            return Err(Error::NoFeasibleDirection);
        }
        return CombinationWeights::new(x_reg, &k, rs, cfg.w_floor);
    }

    let objective = |v: &[f64]| {
        let k = DVector::from_column_slice(v);
        combination_objective(x_reg, abs_resid, &k, cfg.w_floor).unwrap_or(0.0)
    };
    let (best, best_val) = search::maximize_direction(
        p,
        cfg.population_for(p),
        cfg.generations,
        cfg.optimizer_seed,
        objective,
    );

    let mut candidates: Vec<DVector<f64>> = vec![DVector::from_column_slice(&best)];
    for j in 0..p {
        let mut axis = DVector::zeros(p);
        axis[j] = 1.0;
        candidates.push(axis);
    }
    candidates.push(DVector::from_element(p, 1.0 / (p as f64).sqrt()));

    let mut best_choice: Option<(CombinationWeights, f64)> = None;
    for cand in &candidates {
        let val = combination_objective(x_reg, abs_resid, cand, cfg.w_floor)?;
        match CombinationWeights::new(x_reg, cand, val, cfg.w_floor) {
            Ok(cw) => {
                if best_choice.as_ref().map_or(true, |(_, v)| val > *v) {
                    best_choice = Some((cw, val));
                }
            }
            Err(Error::NoFeasibleDirection) | Err(Error::AllWeightsEqual) => continue,
            Err(e) => return Err(e),
        }
    }
    let _ = best_val;
    match best_choice {
        Some((cw, _)) => Ok(cw),
        None => Err(Error::NoFeasibleDirection),
    }
}

/// Gaussian log-likelihood of `y = X β + ε`, `Var(εᵢ) = sigma2 · wᵢᵐ`:
///
/// `-(n/2) ln 2π - (n/2) ln σ² - (m/2) Σ ln wᵢ - Σ rᵢ²/wᵢᵐ / (2σ²)`.
pub fn log_likelihood(
    data: &Dataset,
    w: &DVector<f64>,
    beta: &DVector<f64>,
    sigma2: f64,
    m: f64,
) -> Result<f64> {
    let n = data.n();
    check_weights(w, n)?;
    if beta.len() != data.p() + 1 {
        return Err(Error::DimensionMismatch {
            context: "coefficients vs design columns",
            expected: data.p() + 1,
            got: beta.len(),
        });
    }
    if !sigma2.is_finite() || sigma2 <= 0.0 {
        return Err(Error::NonPositiveVariance { value: sigma2 });
    }
    let resid = data.y() - data.design() * beta;
    let mut sum_lnw = 0.0;
    let mut quad = 0.0;
    for i in 0..n {
        let lw = w[i].ln();
        sum_lnw += lw;
        let scaled = resid[i] * resid[i] * (-m * lw).exp();
        if !scaled.is_finite() {
            return Err(Error::WeightOverflow {
                weight: w[i],
                exponent: m,
            });
        }
        quad += scaled;
    }
    let nf = n as f64;
    Ok(-0.5 * nf * (2.0 * std::f64::consts::PI).ln() - 0.5 * nf * sigma2.ln()
        - 0.5 * m * sum_lnw
        - 0.5 * quad / sigma2)
}

/// Coefficients maximizing the likelihood at a fixed exponent: the weighted
/// least-squares solution with weights `wᵢ⁻ᵐ`.
pub fn profile_beta(data: &Dataset, w: &DVector<f64>, m: f64) -> Result<DVector<f64>> {
    Ok(profile_fit(data, w, m)?.beta)
}

/// Maximum-likelihood variance scale at fixed `β` and `m`:
/// `σ̂² = (1/n) Σ rᵢ² / wᵢᵐ`.
pub fn profile_sigma2(
    data: &Dataset,
    w: &DVector<f64>,
    m: f64,
    beta: &DVector<f64>,
) -> Result<f64> {
    let n = data.n();
    check_weights(w, n)?;
    if beta.len() != data.p() + 1 {
        return Err(Error::DimensionMismatch {
            context: "coefficients vs design columns",
            expected: data.p() + 1,
            got: beta.len(),
        });
    }
    let resid = data.y() - data.design() * beta;
    let mut acc = 0.0;
    for i in 0..n {
        let v = resid[i] * resid[i] * (-m * w[i].ln()).exp();
        if !v.is_finite() {
            return Err(Error::WeightOverflow {
                weight: w[i],
                exponent: m,
            });
        }
        acc += v;
    }
    Ok(acc / n as f64)
}

/// Derivative-based estimating function for the exponent.
///
/// At each `m` the coefficients are re-profiled and the score
/// `Σ rᵢ² ln wᵢ / wᵢᵐ / Σ rᵢ² / wᵢᵐ − (1/n) Σ ln wᵢ` is returned; it is
/// proportional to the slope of the profile log-likelihood, so its root is
/// the profile maximum.
pub fn m_score(data: &Dataset, w: &DVector<f64>, m: f64) -> Result<f64> {
    let n = data.n();
    check_weights(w, n)?;
    require_unequal_weights(w)?;
    let fit = profile_fit(data, w, m)?;
    let resid = &fit.residuals;
    require_nonzero_residuals(resid, data.y())?;
    let lnw: Vec<f64> = w.iter().map(|v| v.ln()).collect();
    let log_r2: Vec<f64> = resid.iter().map(|r| 2.0 * r.abs().ln()).collect();
    let mean_lnw = lnw.iter().sum::<f64>() / n as f64;
    Ok(tilted_lnw_mean(&log_r2, &lnw, m) - mean_lnw)
}

/// Mean of `ln wᵢ` under the tilt `rᵢ² wᵢ⁻ᵐ`, computed in log space so huge
/// exponents cannot overflow.
fn tilted_lnw_mean(log_r2: &[f64], lnw: &[f64], m: f64) -> f64 {
    let mut smax = f64::NEG_INFINITY;
    for (lr2, lw) in log_r2.iter().zip(lnw) {
        let s = lr2 - m * lw;
        if s > smax {
            smax = s;
        }
    }
    let mut num = 0.0;
    let mut den = 0.0;
    for (lr2, lw) in log_r2.iter().zip(lnw) {
        let u = (lr2 - m * lw - smax).exp();
        num += u * lw;
        den += u;
    }
    num / den
}

/// Solves the likelihood equation for the exponent by the fixed-point
/// scheme: starting at `m = 0`, residuals are frozen at the current
/// iterate, the score equation in `m` is solved by a bracket scan plus
/// Brent refinement, and the loop repeats until successive iterates differ
/// by less than `cfg.epsilon`.
///
/// When several roots appear in the interval, the one with the highest
/// profile log-likelihood wins.
pub fn solve_m(data: &Dataset, w: &DVector<f64>, cfg: &SolverConfig) -> Result<ExponentSolve> {
    cfg.validate()?;
    let n = data.n();
    check_weights(w, n)?;
    require_unequal_weights(w)?;

    let lnw: Vec<f64> = w.iter().map(|v| v.ln()).collect();
    let mean_lnw = lnw.iter().sum::<f64>() / n as f64;

    let mut m_cur = 0.0;
    let mut trace = vec![m_cur];
    for iter in 1..=cfg.max_outer_iters {
        let fit = profile_fit(data, w, m_cur)?;
        require_nonzero_residuals(&fit.residuals, data.y())?;
        let log_r2: Vec<f64> = fit.residuals.iter().map(|r| 2.0 * r.abs().ln()).collect();
        let mut g = |m: f64| tilted_lnw_mean(&log_r2, &lnw, m) - mean_lnw;

        let brackets = scan_sign_changes(&mut g, cfg.m_min, cfg.m_max, SCAN_STEP);
        if brackets.is_empty() {
            return Err(Error::NoRootInInterval {
                lo: cfg.m_min,
                hi: cfg.m_max,
            });
        }
        let mut roots = Vec::with_capacity(brackets.len());
        for br in brackets {
            match br {
                Bracket::Exact(x) => roots.push(x),
                Bracket::Sign(a, b, fa, fb) => {
                    roots.push(brent_root(&mut g, a, b, fa, fb, ROOT_XTOL, 100))
                }
            }
        }
        let m_next = if roots.len() == 1 {
            roots[0]
        } else {
            let mut best = roots[0];
            let mut best_l = f64::NEG_INFINITY;
            for r in roots {
                if let Ok(l) = profile_loglik(data, w, r) {
                    if l > best_l {
                        best_l = l;
                        best = r;
                    }
                }
            }
            best
        };

        let delta = (m_next - m_cur).abs();
        m_cur = m_next;
        trace.push(m_cur);
        if delta < cfg.epsilon {
            let boundary = (m_cur - cfg.m_min).abs() <= BOUNDARY_MARGIN
                || (cfg.m_max - m_cur).abs() <= BOUNDARY_MARGIN;
            return Ok(ExponentSolve {
                m: m_cur,
                trace,
                iterations: iter,
                boundary,
            });
        }
    }
    Err(Error::DidNotConverge {
        max_iters: cfg.max_outer_iters,
        last_delta: (trace[trace.len() - 1] - trace[trace.len() - 2]).abs(),
    })
}

/// Average Fisher information per observation for the exponent,
/// `(1/n) Σ (ln wᵢ)² / 2`.
pub fn fisher_info(w: &DVector<f64>) -> Result<f64> {
    check_weights(w, w.len())?;
    if w.is_empty() {
        return Err(Error::TooFewObservations { min: 1, got: 0 });
    }
    let s: f64 = w.iter().map(|v| v.ln() * v.ln()).sum();
    Ok(s / (2.0 * w.len() as f64))
}

/// Full estimation pipeline with a multivariate weight base.
///
/// Steps: ordinary least squares, direction search on the absolute
/// residuals, exponent solve, final weighted fit. When the residuals carry
/// no rank signal (best correlation below 0.05) or no strictly positive
/// combination exists, the fit falls back to OLS with `model = None` and
/// `fallback = true`.
pub fn mvd_wls_fit(data: &Dataset, cfg: &SolverConfig) -> Result<MvdFit> {
    cfg.validate()?;
    if data.p() == 0 {
        return Err(Error::DimensionMismatch {
            context: "regressor columns",
            expected: 1,
            got: 0,
        });
    }
    let base = ols_fit(data)?;
    require_nonzero_residuals(&base.residuals, data.y())?;
    let abs_resid = base.residuals.map(f64::abs);
    let x_reg = data.regressors();

    let combo = match optimize_combination(&x_reg, &abs_resid, cfg) {
        Ok(c) => c,
        Err(Error::NoFeasibleDirection) | Err(Error::ZeroRankVariance { .. }) => {
            return ols_fallback(data, base);
        }
        Err(e) => return Err(e),
    };
    if combo.rs_abs() < MIN_RANK_SIGNAL {
        return ols_fallback(data, base);
    }

    let solved = solve_m(data, combo.w(), cfg)?;
    let omega = inverse_power_weights(combo.w(), solved.m)?;
    let fit = wls_fit(data, &omega)?;
    let sigma2 = profile_sigma2(data, combo.w(), solved.m, &fit.beta)?;
    if sigma2 <= 0.0 {
        return Err(Error::ZeroResiduals);
    }
    let loglik = log_likelihood(data, combo.w(), &fit.beta, sigma2, solved.m)?;
    Ok(MvdFit {
        model: Some(VarianceModel {
            combo,
            m: solved.m,
            sigma2,
        }),
        fit,
        loglik,
        iterations: solved.iterations,
        m_trace: solved.trace,
        fallback: false,
        boundary: solved.boundary,
    })
}

/// Single-regressor baseline: the weight base is the one regressor most
/// rank-correlated with the absolute residuals, and the exponent is chosen
/// from the grid `{0, 0.05, …, 6}` by profile log-likelihood.
///
/// Columns that are not strictly positive (or are constant) cannot serve as
/// a weight base and are skipped; if every column is unusable the error
/// reports the best-correlated offender.
pub fn uvd_wls_fit(data: &Dataset, cfg: &SolverConfig) -> Result<MvdFit> {
    cfg.validate()?;
    if data.p() == 0 {
        return Err(Error::DimensionMismatch {
            context: "regressor columns",
            expected: 1,
            got: 0,
        });
    }
    let base = ols_fit(data)?;
    require_nonzero_residuals(&base.residuals, data.y())?;
    let abs_resid = base.residuals.map(f64::abs);
    if abs_resid.iter().all(|v| *v == abs_resid[0]) {
        return ols_fallback(data, base);
    }

    // Rank all columns by |Spearman| against the absolute residuals.
    let mut ranked: Vec<(usize, f64)> = Vec::new();
    for j in 0..data.p() {
        let col = data.regressor(j);
        if col.iter().all(|v| *v == col[0]) {
            continue; // constant column: no rank signal, weights all equal
        }
        let rs = spearman(col.as_slice(), abs_resid.as_slice())?;
        ranked.push((j, rs.abs()));
    }
    if ranked.is_empty() {
        return Err(Error::NoFeasibleDirection);
    }
    ranked.sort_by(|a, b| b.1.partial_cmp(&a.1).expect("finite correlations"));

    let mut offender: Option<Error> = None;
    for (j, rs_abs) in ranked {
        let col = data.regressor(j);
        if let Some((row, value)) = col
            .iter()
            .enumerate()
            .find(|(_, v)| **v <= cfg.w_floor)
            .map(|(i, v)| (i, *v))
        {
            if offender.is_none() {
                offender = Some(Error::NonPositiveRegressor {
                    column: j,
                    row,
                    value,
                });
            }
            continue;
        }
        let mut k = DVector::zeros(data.p());
        k[j] = 1.0;
        let combo = CombinationWeights::new(&data.regressors(), &k, rs_abs, cfg.w_floor)?;

        // Grid search for the exponent; ties keep the smallest m.
        let mut best_m = 0.0;
        let mut best_l = f64::NEG_INFINITY;
        let steps = (UVD_GRID_MAX / UVD_GRID_STEP).round() as usize;
        for s in 0..=steps {
            let m = s as f64 * UVD_GRID_STEP;
            let l = match profile_loglik(data, combo.w(), m) {
                Ok(l) => l,
                Err(Error::ZeroResiduals) => return Err(Error::ZeroResiduals),
                Err(_) => continue,
            };
            if l > best_l {
                best_l = l;
                best_m = m;
            }
        }
        let omega = inverse_power_weights(combo.w(), best_m)?;
        let fit = wls_fit(data, &omega)?;
        let sigma2 = profile_sigma2(data, combo.w(), best_m, &fit.beta)?;
        if sigma2 <= 0.0 {
            return Err(Error::ZeroResiduals);
        }
        let loglik = log_likelihood(data, combo.w(), &fit.beta, sigma2, best_m)?;
        return Ok(MvdFit {
            model: Some(VarianceModel {
                combo,
                m: best_m,
                sigma2,
            }),
            fit,
            loglik,
            iterations: 1,
            m_trace: vec![best_m],
            fallback: false,
            boundary: best_m == UVD_GRID_MAX,
        });
    }
    Err(offender.unwrap_or(Error::NoFeasibleDirection))
}

/// OLS result wrapped as a degenerate heteroscedastic fit.
fn ols_fallback(data: &Dataset, base: FitResult) -> Result<MvdFit> {
    let n = data.n() as f64;
    let sigma2_mle = base.sse() / n;
    let loglik = if sigma2_mle > 0.0 {
        -0.5 * n * ((2.0 * std::f64::consts::PI).ln() + sigma2_mle.ln() + 1.0)
    } else {
        f64::INFINITY
    };
    Ok(MvdFit {
        model: None,
        fit: base,
        loglik,
        iterations: 0,
        m_trace: Vec::new(),
        fallback: true,
        boundary: false,
    })
}

/// `wᵢ⁻ᵐ` with overflow checking.
fn inverse_power_weights(w: &DVector<f64>, m: f64) -> Result<DVector<f64>> {
    let mut out = DVector::zeros(w.len());
    for i in 0..w.len() {
        let v = (-m * w[i].ln()).exp();
        if !v.is_finite() || v <= 0.0 {
            return Err(Error::WeightOverflow {
                weight: w[i],
                exponent: m,
            });
        }
        out[i] = v;
    }
    Ok(out)
}

/// Weighted fit at exponent `m` (weights `wᵢ⁻ᵐ`).
fn profile_fit(data: &Dataset, w: &DVector<f64>, m: f64) -> Result<FitResult> {
    check_weights(w, data.n())?;
    let omega = inverse_power_weights(w, m)?;
    wls_fit(data, &omega)
}

/// Profile log-likelihood `l*(m)`: β and σ² replaced by their maximizers.
pub fn profile_loglik(data: &Dataset, w: &DVector<f64>, m: f64) -> Result<f64> {
    let fit = profile_fit(data, w, m)?;
    let sigma2 = profile_sigma2(data, w, m, &fit.beta)?;
    if sigma2 <= 0.0 {
        return Err(Error::ZeroResiduals);
    }
    log_likelihood(data, w, &fit.beta, sigma2, m)
}

fn check_weights(w: &DVector<f64>, n: usize) -> Result<()> {
    if w.len() != n {
        return Err(Error::DimensionMismatch {
            context: "weight vector vs observations",
            expected: n,
            got: w.len(),
        });
    }
    for (i, v) in w.iter().enumerate() {
        if !v.is_finite() || *v <= 0.0 {
            return Err(Error::NonPositiveWeight {
                index: i,
                value: *v,
            });
        }
    }
    Ok(())
}

fn require_unequal_weights(w: &DVector<f64>) -> Result<()> {
    if w.iter().all(|v| *v == w[0]) {
        return Err(Error::AllWeightsEqual);
    }
    Ok(())
}

fn require_nonzero_residuals(resid: &DVector<f64>, y: &DVector<f64>) -> Result<()> {
    let sup_r = resid.iter().fold(0.0_f64, |a, r| a.max(r.abs()));
    let sup_y = y.iter().fold(0.0_f64, |a, v| a.max(v.abs()));
    if sup_r <= ZERO_RESID_REL * sup_y.max(1.0) {
        return Err(Error::ZeroResiduals);
    }
    Ok(())
}

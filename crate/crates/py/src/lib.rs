//! Python bindings for the heteroscedastic regression toolkit.
//!
//! The module mirrors the Rust API: build a [`Dataset`], run diagnostics
//! (`white_test`, `spearman`, `vif`), and fit either weighting method
//! (`uvd_wls_fit` for single-feature weights, `mvd_wls_fit` for combined
//! weights). All toolkit errors surface as `ValueError`.

use nalgebra::DVector;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

fn value_err(e: mvdwls::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn vec_of(v: &DVector<f64>) -> Vec<f64> {
    v.iter().copied().collect()
}

/// A regression dataset: response, features and an implicit intercept.
#[pyclass(frozen)]
pub struct Dataset {
    inner: mvdwls::Dataset,
}

#[pymethods]
impl Dataset {
    /// Builds a dataset from a response vector and feature columns.
    /// Feature names default to x1, x2, …
    #[new]
    #[pyo3(signature = (y, features, names=None))]
    fn new(y: Vec<f64>, features: Vec<Vec<f64>>, names: Option<Vec<String>>) -> PyResult<Self> {
        let names: Vec<String> = match names {
            Some(n) => n,
            None => (1..=features.len()).map(|j| format!("x{j}")).collect(),
        };
        let refs: Vec<&str> = names.iter().map(String::as_str).collect();
        let inner = mvdwls::Dataset::from_columns(y, &features, &refs).map_err(value_err)?;
        Ok(Self { inner })
    }

    /// Number of observations.
    #[getter]
    fn n(&self) -> usize {
        self.inner.n()
    }

    /// Number of features (excluding the intercept).
    #[getter]
    fn p(&self) -> usize {
        self.inner.p()
    }

    /// Feature names, in design order.
    #[getter]
    fn feature_names(&self) -> Vec<String> {
        self.inner.feature_names()
    }

    /// The response vector.
    #[getter]
    fn y(&self) -> Vec<f64> {
        vec_of(self.inner.y())
    }

    fn __repr__(&self) -> String {
        format!("Dataset(n={}, p={})", self.inner.n(), self.inner.p())
    }
}

/// Tuning knobs for the direction search and the exponent solve.
#[pyclass(from_py_object)]
#[derive(Clone)]
pub struct SolverConfig {
    inner: mvdwls::SolverConfig,
}

#[pymethods]
impl SolverConfig {
    #[new]
    #[pyo3(signature = (m_min=None, m_max=None, epsilon=None, max_outer_iters=None,
                        optimizer_seed=None, population=None, generations=None, w_floor=None))]
    #[allow(clippy::too_many_arguments)]
    fn new(
        m_min: Option<f64>,
        m_max: Option<f64>,
        epsilon: Option<f64>,
        max_outer_iters: Option<usize>,
        optimizer_seed: Option<u64>,
        population: Option<usize>,
        generations: Option<usize>,
        w_floor: Option<f64>,
    ) -> PyResult<Self> {
        let mut cfg = mvdwls::SolverConfig::default();
        if let Some(v) = m_min {
            cfg.m_min = v;
        }
        if let Some(v) = m_max {
            cfg.m_max = v;
        }
        if let Some(v) = epsilon {
            cfg.epsilon = v;
        }
        if let Some(v) = max_outer_iters {
            cfg.max_outer_iters = v;
        }
        if let Some(v) = optimizer_seed {
            cfg.optimizer_seed = v;
        }
        if population.is_some() {
            cfg.population = population;
        }
        if let Some(v) = generations {
            cfg.generations = v;
        }
        if let Some(v) = w_floor {
            cfg.w_floor = v;
        }
        cfg.validate().map_err(value_err)?;
        Ok(Self { inner: cfg })
    }

    #[getter]
    fn optimizer_seed(&self) -> u64 {
        self.inner.optimizer_seed
    }

    #[getter]
    fn m_min(&self) -> f64 {
        self.inner.m_min
    }

    #[getter]
    fn m_max(&self) -> f64 {
        self.inner.m_max
    }

    fn __repr__(&self) -> String {
        format!(
            "SolverConfig(m_min={}, m_max={}, optimizer_seed={})",
            self.inner.m_min, self.inner.m_max, self.inner.optimizer_seed
        )
    }
}

/// A (possibly weighted) least-squares fit.
#[pyclass(frozen)]
pub struct FitResult {
    inner: mvdwls::FitResult,
}

#[pymethods]
impl FitResult {
    /// Estimated coefficients, intercept first.
    #[getter]
    fn beta(&self) -> Vec<f64> {
        vec_of(&self.inner.beta)
    }

    /// In-sample predictions.
    #[getter]
    fn fitted(&self) -> Vec<f64> {
        vec_of(&self.inner.fitted)
    }

    /// Response minus predictions.
    #[getter]
    fn residuals(&self) -> Vec<f64> {
        vec_of(&self.inner.residuals)
    }

    /// Weighted residual mean square.
    #[getter]
    fn sigma2(&self) -> f64 {
        self.inner.sigma2
    }

    /// Residual degrees of freedom.
    #[getter]
    fn df_resid(&self) -> usize {
        self.inner.df_resid
    }

    fn __repr__(&self) -> String {
        format!("FitResult(beta={:?})", vec_of(&self.inner.beta))
    }
}

/// Outcome of a hypothesis test.
#[pyclass(frozen)]
pub struct TestResult {
    inner: mvdwls::TestResult,
}

#[pymethods]
impl TestResult {
    #[getter]
    fn statistic(&self) -> f64 {
        self.inner.statistic
    }

    #[getter]
    fn df(&self) -> usize {
        self.inner.df
    }

    #[getter]
    fn p_value(&self) -> f64 {
        self.inner.p_value
    }

    #[getter]
    fn reject_at_05(&self) -> bool {
        self.inner.reject_at_05
    }

    fn __repr__(&self) -> String {
        format!(
            "TestResult(statistic={:.4}, df={}, p_value={:.4})",
            self.inner.statistic, self.inner.df, self.inner.p_value
        )
    }
}

/// A heteroscedastic fit: final coefficients plus the fitted variance
/// structure (absent when the method fell back to ordinary least squares).
#[pyclass(frozen)]
pub struct HeteroFit {
    inner: mvdwls::MvdFit,
}

#[pymethods]
impl HeteroFit {
    /// Final coefficient estimates, intercept first.
    #[getter]
    fn beta(&self) -> Vec<f64> {
        vec_of(&self.inner.fit.beta)
    }

    /// In-sample predictions.
    #[getter]
    fn fitted(&self) -> Vec<f64> {
        vec_of(&self.inner.fit.fitted)
    }

    /// Residuals of the final weighted fit.
    #[getter]
    fn residuals(&self) -> Vec<f64> {
        vec_of(&self.inner.fit.residuals)
    }

    /// The fitted variance exponent, or None after an OLS fallback.
    #[getter]
    fn m(&self) -> Option<f64> {
        self.inner.m()
    }

    /// Unit direction through the features defining the weight base,
    /// or None after an OLS fallback.
    #[getter]
    fn k(&self) -> Option<Vec<f64>> {
        self.inner.model.as_ref().map(|m| vec_of(m.combo.k()))
    }

    /// Rank correlation between the combined index and |residuals|.
    #[getter]
    fn rank_correlation(&self) -> Option<f64> {
        self.inner.model.as_ref().map(|m| m.combo.rs_abs())
    }

    /// Log-likelihood of the fitted model.
    #[getter]
    fn loglik(&self) -> f64 {
        self.inner.loglik
    }

    /// True when the fit degraded to ordinary least squares.
    #[getter]
    fn fallback(&self) -> bool {
        self.inner.fallback
    }

    /// True when the exponent landed on the search-interval boundary.
    #[getter]
    fn boundary(&self) -> bool {
        self.inner.boundary
    }

    fn __repr__(&self) -> String {
        match self.inner.m() {
            Some(m) => format!("HeteroFit(m={m:.4}, beta={:?})", vec_of(&self.inner.fit.beta)),
            None => format!(
                "HeteroFit(fallback, beta={:?})",
                vec_of(&self.inner.fit.beta)
            ),
        }
    }
}

/// Ordinary least squares.
#[pyfunction]
fn ols_fit(data: &Dataset) -> PyResult<FitResult> {
    mvdwls::ols_fit(&data.inner)
        .map(|inner| FitResult { inner })
        .map_err(value_err)
}

/// Weighted least squares with explicit observation weights.
#[pyfunction]
fn wls_fit(data: &Dataset, weights: Vec<f64>) -> PyResult<FitResult> {
    let w = DVector::from_vec(weights);
    mvdwls::wls_fit(&data.inner, &w)
        .map(|inner| FitResult { inner })
        .map_err(value_err)
}

/// Average ranks (ties share their mean rank), 1-based.
#[pyfunction]
fn ranks(values: Vec<f64>) -> PyResult<Vec<f64>> {
    mvdwls::ranks(&values)
        .map(|r| r.as_slice().to_vec())
        .map_err(value_err)
}

/// Rank correlation of two samples.
#[pyfunction]
fn spearman(a: Vec<f64>, b: Vec<f64>) -> PyResult<f64> {
    mvdwls::spearman(&a, &b).map_err(value_err)
}

/// Significance of a rank correlation at sample size `n`
/// (t approximation with n − 2 degrees of freedom).
#[pyfunction]
fn spearman_pvalue(r: f64, n: usize) -> PyResult<TestResult> {
    mvdwls::spearman_pvalue(r, n)
        .map(|inner| TestResult { inner })
        .map_err(value_err)
}

/// Heteroscedasticity test from the auxiliary regression of squared
/// residuals on features, their squares and cross products.
#[pyfunction]
fn white_test(data: &Dataset, fit: &FitResult) -> PyResult<TestResult> {
    mvdwls::white_test(&data.inner, &fit.inner)
        .map(|inner| TestResult { inner })
        .map_err(value_err)
}

/// Variance inflation factors, one per feature.
#[pyfunction]
fn vif(data: &Dataset) -> PyResult<Vec<f64>> {
    mvdwls::vif(&data.inner).map_err(value_err)
}

/// Per-observation information carried by a weight vector about the
/// variance exponent: mean of (ln wᵢ)²/2.
#[pyfunction]
fn fisher_info(weights: Vec<f64>) -> PyResult<f64> {
    let w = DVector::from_vec(weights);
    mvdwls::fisher_info(&w).map_err(value_err)
}

/// Single-feature weighting: the weight base is the feature most
/// rank-correlated with the absolute residuals.
#[pyfunction]
#[pyo3(signature = (data, config=None))]
fn uvd_wls_fit(data: &Dataset, config: Option<SolverConfig>) -> PyResult<HeteroFit> {
    let cfg = config.map(|c| c.inner).unwrap_or_default();
    mvdwls::uvd_wls_fit(&data.inner, &cfg)
        .map(|inner| HeteroFit { inner })
        .map_err(value_err)
}

/// Combined weighting: the weight base is a fitted positive linear
/// combination of all features.
#[pyfunction]
#[pyo3(signature = (data, config=None))]
fn mvd_wls_fit(data: &Dataset, config: Option<SolverConfig>) -> PyResult<HeteroFit> {
    let cfg = config.map(|c| c.inner).unwrap_or_default();
    mvdwls::mvd_wls_fit(&data.inner, &cfg)
        .map(|inner| HeteroFit { inner })
        .map_err(value_err)
}

#[pymodule]
fn mvdwls_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Dataset>()?;
    m.add_class::<SolverConfig>()?;
    m.add_class::<FitResult>()?;
    m.add_class::<TestResult>()?;
    m.add_class::<HeteroFit>()?;
    m.add_function(wrap_pyfunction!(ols_fit, m)?)?;
    m.add_function(wrap_pyfunction!(wls_fit, m)?)?;
    m.add_function(wrap_pyfunction!(ranks, m)?)?;
    m.add_function(wrap_pyfunction!(spearman, m)?)?;
    m.add_function(wrap_pyfunction!(spearman_pvalue, m)?)?;
    m.add_function(wrap_pyfunction!(white_test, m)?)?;
    m.add_function(wrap_pyfunction!(vif, m)?)?;
    m.add_function(wrap_pyfunction!(fisher_info, m)?)?;
    m.add_function(wrap_pyfunction!(uvd_wls_fit, m)?)?;
    m.add_function(wrap_pyfunction!(mvd_wls_fit, m)?)?;
    Ok(())
}

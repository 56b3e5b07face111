//! Linear-model core: validated datasets, ordinary and weighted least squares.
//!
//! The design matrix always carries an explicit all-ones intercept in column
//! zero, so a model with `p` regressors estimates `p + 1` coefficients.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

mod diagnostics;

pub use diagnostics::{stepwise_select, vif, white_test};

/// Reciprocal-condition threshold below which a design is declared singular.
const RCOND_MIN: f64 = 1e-12;

/// A validated regression sample.
///
/// Invariants enforced at construction:
/// * every entry of the response and design is finite,
/// * column 0 of the design is identically one,
/// * there are at least two more rows than estimated coefficients, so the
///   residual degrees of freedom are always positive.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    y: DVector<f64>,
    x: DMatrix<f64>,
    names: Vec<String>,
}

impl Dataset {
    /// Builds a dataset from a response and a design matrix whose first
    /// column is the intercept. `names` labels all `p + 1` columns.
    pub fn new(y: DVector<f64>, x: DMatrix<f64>, names: Vec<String>) -> Result<Self> {
        let n = x.nrows();
        let cols = x.ncols();
        if cols == 0 {
            return Err(Error::DimensionMismatch {
                context: "design matrix columns",
                expected: 1,
                got: 0,
            });
        }
        if y.len() != n {
            return Err(Error::DimensionMismatch {
                context: "response length vs design rows",
                expected: n,
                got: y.len(),
            });
        }
        if names.len() != cols {
            return Err(Error::DimensionMismatch {
                context: "column names vs design columns",
                expected: cols,
                got: names.len(),
            });
        }
        if n < cols + 1 {
            return Err(Error::TooFewObservations {
                min: cols + 1,
                got: n,
            });
        }
        for (i, v) in y.iter().enumerate() {
            if !v.is_finite() {
                return Err(Error::NonFiniteInput {
                    context: "response",
                    index: i,
                    value: *v,
                });
            }
        }
        for (idx, v) in x.iter().enumerate() {
            if !v.is_finite() {
                return Err(Error::NonFiniteInput {
                    context: "design matrix",
                    index: idx,
                    value: *v,
                });
            }
        }
        for row in 0..n {
            let v = x[(row, 0)];
            if v != 1.0 {
                return Err(Error::MissingIntercept { row, value: v });
            }
        }
        Ok(Self { y, x, names })
    }

    /// Builds a dataset from raw columns, inserting the intercept. `columns`
    /// holds the `p` regressors; `names` labels them in the same order.
    pub fn from_columns(y: Vec<f64>, columns: &[Vec<f64>], names: &[&str]) -> Result<Self> {
        if names.len() != columns.len() {
            return Err(Error::DimensionMismatch {
                context: "regressor names vs columns",
                expected: columns.len(),
                got: names.len(),
            });
        }
        let n = y.len();
        for (j, col) in columns.iter().enumerate() {
            if col.len() != n {
                return Err(Error::DimensionMismatch {
                    context: "regressor column length vs response",
                    expected: n,
                    got: columns[j].len(),
                });
            }
        }
        let mut x = DMatrix::from_element(n, columns.len() + 1, 1.0);
        for (j, col) in columns.iter().enumerate() {
            for (i, v) in col.iter().enumerate() {
                x[(i, j + 1)] = *v;
            }
        }
        let mut all_names = Vec::with_capacity(columns.len() + 1);
        all_names.push("intercept".to_owned());
        all_names.extend(names.iter().map(|s| (*s).to_owned()));
        Self::new(DVector::from_vec(y), x, all_names)
    }

    /// Number of observations.
    pub fn n(&self) -> usize {
        self.x.nrows()
    }

    /// Number of regressors, excluding the intercept.
    pub fn p(&self) -> usize {
        self.x.ncols() - 1
    }

    /// Response vector.
    pub fn y(&self) -> &DVector<f64> {
        &self.y
    }

    /// Full design matrix including the intercept column.
    pub fn design(&self) -> &DMatrix<f64> {
        &self.x
    }

    /// The regressor block of the design (all columns except the intercept).
    pub fn regressors(&self) -> DMatrix<f64> {
        self.x.columns(1, self.p()).into_owned()
    }

    /// A single regressor column (0-based among the regressors).
    pub fn regressor(&self, j: usize) -> DVector<f64> {
        self.x.column(j + 1).into_owned()
    }

    /// Column labels, intercept first.
    pub fn names(&self) -> &[String] {
        &self.names
    }

    /// Labels of the regressors only.
    pub fn feature_names(&self) -> Vec<String> {
        self.names[1..].to_vec()
    }

    /// A new dataset keeping only the regressors listed in `keep`
    /// (0-based among the regressors, order preserved).
    pub fn select(&self, keep: &[usize]) -> Result<Self> {
        for &j in keep {
            if j >= self.p() {
                return Err(Error::DimensionMismatch {
                    context: "regressor index out of range",
                    expected: self.p(),
                    got: j,
                });
            }
        }
        let n = self.n();
        let mut x = DMatrix::from_element(n, keep.len() + 1, 1.0);
        let mut names = vec![self.names[0].clone()];
        for (slot, &j) in keep.iter().enumerate() {
            for i in 0..n {
                x[(i, slot + 1)] = self.x[(i, j + 1)];
            }
            names.push(self.names[j + 1].clone());
        }
        Self::new(self.y.clone(), x, names)
    }

    /// A new dataset keeping only the rows listed in `rows` (order preserved).
    pub fn take_rows(&self, rows: &[usize]) -> Result<Self> {
        for &i in rows {
            if i >= self.n() {
                return Err(Error::DimensionMismatch {
                    context: "row index out of range",
                    expected: self.n(),
                    got: i,
                });
            }
        }
        let mut x = DMatrix::zeros(rows.len(), self.x.ncols());
        let mut y = DVector::zeros(rows.len());
        for (slot, &i) in rows.iter().enumerate() {
            x.set_row(slot, &self.x.row(i));
            y[slot] = self.y[i];
        }
        Self::new(y, x, self.names.clone())
    }
}

/// Output of a least-squares fit.
#[derive(Debug, Clone, PartialEq)]
pub struct FitResult {
    /// Estimated coefficients, intercept first.
    pub beta: DVector<f64>,
    /// In-sample predictions `X β`.
    pub fitted: DVector<f64>,
    /// `y - fitted`.
    pub residuals: DVector<f64>,
    /// The observation weights the caller supplied (all ones for OLS).
    pub weights: DVector<f64>,
    /// Weighted residual mean square: `Σ ŵᵢ eᵢ² / df` with weights scaled
    /// to mean one, so rescaling all weights leaves it unchanged.
    pub sigma2: f64,
    /// Residual degrees of freedom `n - p - 1`.
    pub df_resid: usize,
}

impl FitResult {
    /// Residual sum of squares, unweighted.
    pub fn sse(&self) -> f64 {
        self.residuals.iter().map(|e| e * e).sum()
    }
}

/// Outcome of a significance test.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct TestResult {
    /// Value of the test statistic.
    pub statistic: f64,
    /// Degrees of freedom of the reference distribution.
    pub df: usize,
    /// Two-sided (or upper-tail, as appropriate) p-value in `[0, 1]`.
    pub p_value: f64,
    /// Whether the null is rejected at the 0.05 level.
    pub reject_at_05: bool,
}

/// Ordinary least squares; identical to [`wls_fit`] with unit weights.
pub fn ols_fit(data: &Dataset) -> Result<FitResult> {
    let ones = DVector::from_element(data.n(), 1.0);
    wls_fit(data, &ones)
}

/// Weighted least squares with strictly positive observation weights.
///
/// Weights are precision weights: larger means an observation counts more.
/// They are normalized to mean one internally, so `wls_fit(data, c * w)`
/// returns the same coefficients and `sigma2` for any `c > 0`. The weights
/// stored in the result are the caller's originals.
pub fn wls_fit(data: &Dataset, weights: &DVector<f64>) -> Result<FitResult> {
    let n = data.n();
    if weights.len() != n {
        return Err(Error::DimensionMismatch {
            context: "weight vector vs observations",
            expected: n,
            got: weights.len(),
        });
    }
    for (i, w) in weights.iter().enumerate() {
        if !w.is_finite() || *w <= 0.0 {
            return Err(Error::NonPositiveWeight {
                index: i,
                value: *w,
            });
        }
    }
    let mean_w = weights.sum() / n as f64;
    let w_norm = weights / mean_w;

    let mut xw = data.x.clone();
    let mut yw = data.y.clone();
    for i in 0..n {
        let s = w_norm[i].sqrt();
        xw.row_mut(i).scale_mut(s);
        yw[i] *= s;
    }

    let beta = solve_qr(xw, yw)?;
    let fitted = &data.x * &beta;
    let residuals = &data.y - &fitted;
    let df_resid = n - data.x.ncols();
    let wsse: f64 = (0..n).map(|i| w_norm[i] * residuals[i] * residuals[i]).sum();
    Ok(FitResult {
        beta,
        fitted,
        residuals,
        weights: weights.clone(),
        sigma2: wsse / df_resid as f64,
        df_resid,
    })
}

/// Solves `min ‖X β - y‖²` by column-pivoted QR, rejecting designs whose
/// triangular factor signals rank deficiency.
fn solve_qr(x: DMatrix<f64>, y: DVector<f64>) -> Result<DVector<f64>> {
    let ncols = x.ncols();
    let qr = x.col_piv_qr();
    let r = qr.r();
    let mut dmin = f64::INFINITY;
    let mut dmax = 0.0_f64;
    for j in 0..ncols {
        let d = r[(j, j)].abs();
        dmin = dmin.min(d);
        dmax = dmax.max(d);
    }
    let rcond = if dmax > 0.0 { dmin / dmax } else { 0.0 };
    if !rcond.is_finite() || rcond < RCOND_MIN {
        return Err(Error::SingularDesign { rcond });
    }
    // X P = Q R, so β = P · R⁻¹ (Qᵀ y) taken over the leading block.
    let mut qty = y;
    qr.q_tr_mul(&mut qty);
    let head = qty.rows(0, ncols).into_owned();
    let mut beta = r
        .solve_upper_triangular(&head)
        .ok_or(Error::SingularDesign { rcond })?;
    qr.p().inv_permute_rows(&mut beta);
    Ok(beta)
}

/// Least squares that survives collinearity by dropping dependent columns.
///
/// Columns are kept greedily in order (earlier columns win), a column being
/// dropped when its part orthogonal to the kept ones falls below `tol_rel`
/// of its own norm. Returns the kept column indices, the coefficients for
/// those columns, and the fitted values over all rows.
pub(crate) fn lstsq_drop_collinear(
    x: &DMatrix<f64>,
    y: &DVector<f64>,
    tol_rel: f64,
) -> Result<(Vec<usize>, DVector<f64>, DVector<f64>)> {
    let n = x.nrows();
    let mut kept: Vec<usize> = Vec::new();
    let mut basis: Vec<DVector<f64>> = Vec::new(); // orthonormal spans of kept columns
    for j in 0..x.ncols() {
        let col = x.column(j).into_owned();
        let norm0 = col.norm();
        if norm0 == 0.0 {
            continue;
        }
        let mut resid = col;
        for q in &basis {
            let proj = q.dot(&resid);
            resid -= q * proj;
        }
        // Re-orthogonalize once; plain Gram-Schmidt loses accuracy otherwise.
        for q in &basis {
            let proj = q.dot(&resid);
            resid -= q * proj;
        }
        let norm1 = resid.norm();
        if norm1 > tol_rel * norm0 {
            basis.push(resid / norm1);
            kept.push(j);
        }
    }
    if kept.is_empty() {
        return Err(Error::SingularDesign { rcond: 0.0 });
    }
    let mut xk = DMatrix::zeros(n, kept.len());
    for (slot, &j) in kept.iter().enumerate() {
        xk.set_column(slot, &x.column(j));
    }
    let beta = solve_qr(xk.clone(), y.clone())?;
    let fitted = &xk * &beta;
    Ok((kept, beta, fitted))
}

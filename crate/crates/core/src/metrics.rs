//! Accuracy summaries for repeated fits: coefficient bias and mean squared
//! error across replications, plus prediction-error measures.

use nalgebra::DVector;

use crate::error::{Error, Result};
use crate::linreg::FitResult;

/// Per-method accuracy summary over a batch of replicated fits.
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct MetricsReport {
    /// `|mean(β̂ⱼ) - βⱼ|` per coefficient, intercept first.
    pub bias_abs: Vec<f64>,
    /// `mean((β̂ⱼ - βⱼ)²)` per coefficient.
    pub mse: Vec<f64>,
    /// Mean absolute in-sample prediction error, pooled over replications.
    pub mae_y: f64,
    /// Mean residual sum of squares per replication.
    pub sse: f64,
    /// Mean residual standard error `√(SSE / df)` per replication.
    pub rse: f64,
    /// Number of replications aggregated.
    pub r: usize,
    /// Observations per replication.
    pub n: usize,
}

/// `|mean(estimate) - truth|` per coordinate.
pub fn abs_bias(estimates: &[DVector<f64>], truth: &DVector<f64>) -> Result<Vec<f64>> {
    check_batch(estimates, truth)?;
    let r = estimates.len() as f64;
    let dim = truth.len();
    let mut mean = vec![0.0; dim];
    for est in estimates {
        for j in 0..dim {
            mean[j] += est[j] / r;
        }
    }
    Ok((0..dim).map(|j| (mean[j] - truth[j]).abs()).collect())
}

/// Mean squared estimation error per coordinate.
pub fn mse(estimates: &[DVector<f64>], truth: &DVector<f64>) -> Result<Vec<f64>> {
    check_batch(estimates, truth)?;
    let r = estimates.len() as f64;
    let dim = truth.len();
    let mut out = vec![0.0; dim];
    for est in estimates {
        for j in 0..dim {
            let d = est[j] - truth[j];
            out[j] += d * d / r;
        }
    }
    Ok(out)
}

/// Mean absolute error between predictions and actual values, pooled over
/// every pair in the batch.
pub fn mae(predicted: &[DVector<f64>], actual: &[DVector<f64>]) -> Result<f64> {
    if predicted.len() != actual.len() {
        return Err(Error::DimensionMismatch {
            context: "prediction batches",
            expected: actual.len(),
            got: predicted.len(),
        });
    }
    if predicted.is_empty() {
        return Err(Error::TooFewObservations { min: 1, got: 0 });
    }
    let mut acc = 0.0;
    let mut count = 0usize;
    for (p, a) in predicted.iter().zip(actual) {
        if p.len() != a.len() {
            return Err(Error::DimensionMismatch {
                context: "prediction vector vs actual vector",
                expected: a.len(),
                got: p.len(),
            });
        }
        for i in 0..p.len() {
            acc += (p[i] - a[i]).abs();
            count += 1;
        }
    }
    Ok(acc / count as f64)
}

/// Sum of squared prediction errors for one vector pair.
pub fn sse(predicted: &DVector<f64>, actual: &DVector<f64>) -> Result<f64> {
    if predicted.len() != actual.len() {
        return Err(Error::DimensionMismatch {
            context: "prediction vector vs actual vector",
            expected: actual.len(),
            got: predicted.len(),
        });
    }
    if predicted.is_empty() {
        return Err(Error::TooFewObservations { min: 1, got: 0 });
    }
    Ok(predicted
        .iter()
        .zip(actual.iter())
        .map(|(p, a)| (p - a) * (p - a))
        .sum())
}

/// Residual standard error of a fit, `√(SSE / df)`.
pub fn rse(fit: &FitResult) -> Result<f64> {
    if fit.df_resid == 0 {
        return Err(Error::TooFewObservations { min: 1, got: 0 });
    }
    Ok((fit.sse() / fit.df_resid as f64).sqrt())
}

fn check_batch(estimates: &[DVector<f64>], truth: &DVector<f64>) -> Result<()> {
    if estimates.is_empty() {
        return Err(Error::TooFewObservations { min: 1, got: 0 });
    }
    for est in estimates {
        if est.len() != truth.len() {
            return Err(Error::DimensionMismatch {
                context: "estimate vector vs truth",
                expected: truth.len(),
                got: est.len(),
            });
        }
    }
    Ok(())
}

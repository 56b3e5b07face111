//! Model diagnostics: heteroscedasticity testing, collinearity measures,
//! and backward stepwise selection.

use nalgebra::{DMatrix, DVector};
use statrs::distribution::{ChiSquared, ContinuousCDF};

use super::{lstsq_drop_collinear, ols_fit, Dataset, FitResult, TestResult};
use crate::error::{Error, Result};

/// Relative tolerance used when dropping collinear auxiliary columns.
const AUX_DROP_TOL: f64 = 1e-10;

/// Squared-residual heteroscedasticity test.
///
/// Regresses the squared residuals of `fit` on the regressors, their
/// squares, and all pairwise products, then refers `n · R²` of that
/// auxiliary regression to a chi-squared distribution whose degrees of
/// freedom equal the number of auxiliary terms that survive a collinearity
/// screen. Duplicate auxiliary columns (for instance the square of a 0/1
/// indicator) are removed rather than allowed to break the regression.
pub fn white_test(data: &Dataset, fit: &FitResult) -> Result<TestResult> {
    let n = data.n();
    if fit.residuals.len() != n {
        return Err(Error::DimensionMismatch {
            context: "fit residuals vs dataset rows",
            expected: n,
            got: fit.residuals.len(),
        });
    }
    let p = data.p();
    let e2 = fit.residuals.map(|e| e * e);

    // Candidate auxiliary columns: x_j, x_j², x_j x_k (j < k).
    let mut candidates: Vec<DVector<f64>> = Vec::new();
    for j in 0..p {
        candidates.push(data.regressor(j));
    }
    for j in 0..p {
        let xj = data.regressor(j);
        candidates.push(xj.component_mul(&xj));
    }
    for j in 0..p {
        for k in (j + 1)..p {
            candidates.push(data.regressor(j).component_mul(&data.regressor(k)));
        }
    }
    // Drop exact duplicates early (cheap screen before the rank screen).
    let mut unique: Vec<DVector<f64>> = Vec::new();
    for c in candidates {
        if !unique.iter().any(|u| u == &c) {
            unique.push(c);
        }
    }
    if unique.is_empty() {
        return Err(Error::SingularDesign { rcond: 0.0 });
    }

    let mut aux = DMatrix::from_element(n, unique.len() + 1, 1.0);
    for (j, c) in unique.iter().enumerate() {
        aux.set_column(j + 1, c);
    }
    let (kept, _, fitted) = lstsq_drop_collinear(&aux, &e2, AUX_DROP_TOL)?;
    // Terms beyond the intercept that survived the screen.
    let df = kept.iter().filter(|&&j| j != 0).count();
    if df == 0 {
        return Err(Error::SingularDesign { rcond: 0.0 });
    }

    let mean = e2.sum() / n as f64;
    let sst: f64 = e2.iter().map(|v| (v - mean) * (v - mean)).sum();
    let sse: f64 = e2
        .iter()
        .zip(fitted.iter())
        .map(|(v, f)| (v - f) * (v - f))
        .sum();
    let r2 = if sst > 0.0 {
        (1.0 - sse / sst).clamp(0.0, 1.0)
    } else {
        // Squared residuals are constant: nothing to explain.
        0.0
    };
    let statistic = n as f64 * r2;
    let chi = ChiSquared::new(df as f64).expect("df >= 1");
    let p_value = (1.0 - chi.cdf(statistic)).clamp(0.0, 1.0);
    Ok(TestResult {
        statistic,
        df,
        p_value,
        reject_at_05: p_value < 0.05,
    })
}

/// Variance inflation factor of every regressor.
///
/// `vif[j] = 1 / (1 - R²_j)` where `R²_j` comes from regressing regressor
/// `j` on the others (with intercept). An exactly collinear or constant
/// column reports `+∞` rather than failing.
pub fn vif(data: &Dataset) -> Result<Vec<f64>> {
    let p = data.p();
    let n = data.n();
    if p < 2 {
        return Err(Error::TooFewObservations { min: 2, got: p });
    }
    let mut out = Vec::with_capacity(p);
    for j in 0..p {
        let target = data.regressor(j);
        let mean = target.sum() / n as f64;
        let sst: f64 = target.iter().map(|v| (v - mean) * (v - mean)).sum();
        if sst == 0.0 {
            out.push(f64::INFINITY);
            continue;
        }
        let mut others = DMatrix::from_element(n, p, 1.0);
        let mut slot = 1;
        for k in 0..p {
            if k != j {
                others.set_column(slot, &data.regressor(k));
                slot += 1;
            }
        }
        let (_, _, fitted) = lstsq_drop_collinear(&others, &target, AUX_DROP_TOL)?;
        let sse: f64 = target
            .iter()
            .zip(fitted.iter())
            .map(|(v, f)| (v - f) * (v - f))
            .sum();
        let r2 = (1.0 - sse / sst).clamp(0.0, 1.0);
        if 1.0 - r2 < 1e-12 {
            out.push(f64::INFINITY);
        } else {
            out.push(1.0 / (1.0 - r2));
        }
    }
    Ok(out)
}

/// Backward stepwise selection under AIC.
///
/// Starting from the full model, repeatedly removes the single regressor
/// whose removal lowers `AIC = n ln(SSE / n) + 2 (p + 1)` the most, stopping
/// when no removal improves it. Ties prefer the lowest column index. The
/// intercept is never a removal candidate.
pub fn stepwise_select(data: &Dataset) -> Result<Dataset> {
    let n = data.n() as f64;
    let aic = |d: &Dataset| -> Result<f64> {
        let fit = ols_fit(d)?;
        let sse = fit.sse();
        Ok(n * (sse / n).ln() + 2.0 * (d.p() as f64 + 1.0))
    };

    let mut current: Vec<usize> = (0..data.p()).collect();
    let mut current_aic = aic(data)?;
    while current.len() > 1 {
        let mut best: Option<(usize, f64)> = None;
        for drop_pos in 0..current.len() {
            let mut candidate = current.clone();
            candidate.remove(drop_pos);
            let cand_aic = aic(&data.select(&candidate)?)?;
            // Strict `<` keeps the earliest (lowest-index) candidate on ties.
            if best.map_or(true, |(_, a)| cand_aic < a) {
                best = Some((drop_pos, cand_aic));
            }
        }
        match best {
            Some((pos, a)) if a < current_aic => {
                current.remove(pos);
                current_aic = a;
            }
            _ => break,
        }
    }
    data.select(&current)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linreg::wls_fit;
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use rand_distr::{Distribution, Normal, Uniform};

    fn simulate(n: usize, hetero: bool, seed: u64) -> Dataset {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let ux = Uniform::new(5.0, 15.0).unwrap();
        let norm = Normal::new(0.0, 1.0).unwrap();
        let x1: Vec<f64> = (0..n).map(|_| ux.sample(&mut rng)).collect();
        let x2: Vec<f64> = (0..n).map(|_| ux.sample(&mut rng)).collect();
        let y: Vec<f64> = (0..n)
            .map(|i| {
                let sd = if hetero { 0.3 * x1[i] } else { 1.0 };
                1.0 + 2.0 * x1[i] - 0.5 * x2[i] + sd * norm.sample(&mut rng)
            })
            .collect();
        Dataset::from_columns(y, &[x1, x2], &["x1", "x2"]).unwrap()
    }

    #[test]
    fn white_test_flags_scale_heteroscedasticity() {
        let data = simulate(400, true, 7);
        let fit = ols_fit(&data).unwrap();
        let t = white_test(&data, &fit).unwrap();
        assert_eq!(t.df, 5);
        assert!(t.reject_at_05, "p = {}", t.p_value);
    }

    #[test]
    fn white_test_accepts_homoscedastic_data() {
        let data = simulate(400, false, 11);
        let fit = ols_fit(&data).unwrap();
        let t = white_test(&data, &fit).unwrap();
        assert!(t.p_value > 0.05, "p = {}", t.p_value);
    }

    #[test]
    fn white_test_handles_constant_squared_residuals() {
        // Paired rows: residuals are exactly ±c, so e² is constant.
        let x = vec![1.0, 1.0, 2.0, 2.0, 3.0, 3.0];
        let y = vec![1.5, 0.5, 2.5, 1.5, 3.5, 2.5]; // x + 1 ± 0.5
        let data = Dataset::from_columns(y, &[x], &["x"]).unwrap();
        let fit = ols_fit(&data).unwrap();
        let t = white_test(&data, &fit).unwrap();
        assert_eq!(t.statistic, 0.0);
        assert!((t.p_value - 1.0).abs() < 1e-12);
        assert!(!t.reject_at_05);
    }

    #[test]
    fn white_test_drops_duplicate_indicator_square() {
        // A 0/1 indicator equals its own square; df must not double-count it.
        let ind = vec![0.0, 1.0, 0.0, 1.0, 0.0, 1.0, 0.0, 1.0];
        let x = vec![1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0, 8.0];
        let y = vec![1.0, 3.1, 2.9, 5.2, 5.1, 7.0, 7.2, 9.1];
        let data = Dataset::from_columns(y, &[x, ind], &["x", "d"]).unwrap();
        let fit = ols_fit(&data).unwrap();
        let t = white_test(&data, &fit).unwrap();
        // Candidates: x, d, x², d² (= d, dropped), x·d → 4 survive.
        assert_eq!(t.df, 4);
    }

    #[test]
    fn vif_matches_two_regressor_closed_form() {
        // For p = 2, VIF₁ = VIF₂ = 1 / (1 - r²) with r the sample correlation.
        let data = simulate(200, false, 3);
        let x1 = data.regressor(0);
        let x2 = data.regressor(1);
        let n = data.n() as f64;
        let (m1, m2) = (x1.sum() / n, x2.sum() / n);
        let mut sxx = 0.0;
        let mut syy = 0.0;
        let mut sxy = 0.0;
        for i in 0..data.n() {
            sxx += (x1[i] - m1) * (x1[i] - m1);
            syy += (x2[i] - m2) * (x2[i] - m2);
            sxy += (x1[i] - m1) * (x2[i] - m2);
        }
        let r2 = sxy * sxy / (sxx * syy);
        let expect = 1.0 / (1.0 - r2);
        let v = vif(&data).unwrap();
        assert!((v[0] - expect).abs() < 1e-8);
        assert!((v[1] - expect).abs() < 1e-8);
        assert!(v.iter().all(|&x| x >= 1.0));
    }

    #[test]
    fn vif_reports_infinity_for_exact_collinearity() {
        let x1 = vec![1.0, 2.0, 3.0, 4.0, 5.0, 6.0];
        let x2: Vec<f64> = x1.iter().map(|v| 2.0 * v).collect();
        let x3 = vec![3.0, 1.0, 4.0, 1.0, 5.0, 9.0];
        let y = vec![1.0, 2.0, 2.5, 4.0, 5.5, 6.0];
        let data = Dataset::from_columns(y, &[x1, x2, x3], &["a", "b", "c"]).unwrap();
        let v = vif(&data).unwrap();
        assert!(v[0].is_infinite());
        assert!(v[1].is_infinite());
        assert!(v[2].is_finite());
    }

    #[test]
    fn stepwise_drops_pure_noise_regressor() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let norm = Normal::new(0.0, 1.0).unwrap();
        let n = 150;
        let x1: Vec<f64> = (0..n).map(|_| rng.random_range(0.0..10.0)).collect();
        let noise: Vec<f64> = (0..n).map(|_| norm.sample(&mut rng)).collect();
        let y: Vec<f64> = (0..n)
            .map(|i| 1.0 + 2.0 * x1[i] + 0.5 * norm.sample(&mut rng))
            .collect();
        let data = Dataset::from_columns(y, &[x1, noise], &["signal", "noise"]).unwrap();
        let kept = stepwise_select(&data).unwrap();
        assert_eq!(kept.p(), 1);
        assert_eq!(kept.names()[1], "signal");
    }

    #[test]
    fn stepwise_keeps_all_informative_regressors() {
        let data = simulate(200, false, 5);
        let kept = stepwise_select(&data).unwrap();
        assert_eq!(kept.p(), 2);
    }

    #[test]
    fn weighted_fit_keeps_caller_weights() {
        let data = simulate(50, true, 9);
        let w = DVector::from_fn(50, |i, _| 1.0 + i as f64);
        let fit = wls_fit(&data, &w).unwrap();
        assert_eq!(fit.weights, w);
    }
}

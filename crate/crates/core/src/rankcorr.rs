//! Ranks and Spearman rank correlation, with a t-approximation for
//! significance.

use statrs::distribution::{ContinuousCDF, StudentsT};

use crate::error::{Error, Result};
use crate::linreg::TestResult;

/// Ranks of a sample, averaged over ties (so their sum is always
/// `n (n + 1) / 2`).
#[derive(Debug, Clone, PartialEq)]
pub struct RankVector {
    ranks: Vec<f64>,
    has_ties: bool,
}

impl RankVector {
    /// Rank of each observation, in input order. Smallest value gets rank 1.
    pub fn as_slice(&self) -> &[f64] {
        &self.ranks
    }

    /// Whether any value occurred more than once.
    pub fn has_ties(&self) -> bool {
        self.has_ties
    }

    pub fn len(&self) -> usize {
        self.ranks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ranks.is_empty()
    }
}

/// Average ranks of `values`, ties sharing the mean of the positions they
/// occupy.
pub fn ranks(values: &[f64]) -> Result<RankVector> {
    let n = values.len();
    if n < 2 {
        return Err(Error::TooFewObservations { min: 2, got: n });
    }
    for (i, v) in values.iter().enumerate() {
        if !v.is_finite() {
            return Err(Error::NonFiniteInput {
                context: "rank input",
                index: i,
                value: *v,
            });
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| values[a].partial_cmp(&values[b]).expect("finite"));
    let mut out = vec![0.0; n];
    let mut has_ties = false;
    let mut i = 0;
    while i < n {
        let mut j = i;
        while j + 1 < n && values[order[j + 1]] == values[order[i]] {
            j += 1;
        }
        // Positions i..=j (0-based) hold ranks i+1..=j+1; ties share the mean.
        let avg = (i + j) as f64 / 2.0 + 1.0;
        for k in i..=j {
            out[order[k]] = avg;
        }
        if j > i {
            has_ties = true;
        }
        i = j + 1;
    }
    Ok(RankVector {
        ranks: out,
        has_ties,
    })
}

/// Spearman rank correlation of two samples.
///
/// Without ties this is the classical `1 - 6 Σ d² / (n (n² - 1))`; with ties
/// it falls back to the Pearson correlation of the rank vectors, which the
/// difference formula silently misstates.
pub fn spearman(a: &[f64], b: &[f64]) -> Result<f64> {
    let n = a.len();
    if n != b.len() {
        return Err(Error::DimensionMismatch {
            context: "spearman inputs",
            expected: n,
            got: b.len(),
        });
    }
    if n < 3 {
        return Err(Error::TooFewObservations { min: 3, got: n });
    }
    let ra = ranks(a)?;
    let rb = ranks(b)?;
    if constant(a) {
        return Err(Error::ZeroRankVariance {
            context: "first sample",
        });
    }
    if constant(b) {
        return Err(Error::ZeroRankVariance {
            context: "second sample",
        });
    }
    let rs = if !ra.has_ties() && !rb.has_ties() {
        let d2: f64 = ra
            .as_slice()
            .iter()
            .zip(rb.as_slice())
            .map(|(x, y)| (x - y) * (x - y))
            .sum();
        let nf = n as f64;
        1.0 - 6.0 * d2 / (nf * (nf * nf - 1.0))
    } else {
        pearson(ra.as_slice(), rb.as_slice())
    };
    Ok(rs.clamp(-1.0, 1.0))
}

/// Two-sided significance of a Spearman coefficient via the
/// `t = r √((n-2)/(1-r²))` approximation on `n - 2` degrees of freedom.
///
/// At `|r| = 1` the statistic degenerates; the p-value is reported as
/// exactly zero with an infinite statistic rather than failing.
pub fn spearman_pvalue(r: f64, n: usize) -> Result<TestResult> {
    if n < 4 {
        return Err(Error::TooFewObservations { min: 4, got: n });
    }
    if !r.is_finite() || r.abs() > 1.0 {
        return Err(Error::NonFiniteInput {
            context: "correlation coefficient",
            index: 0,
            value: r,
        });
    }
    let df = n - 2;
    if r.abs() == 1.0 {
        return Ok(TestResult {
            statistic: f64::INFINITY.copysign(r),
            df,
            p_value: 0.0,
            reject_at_05: true,
        });
    }
    let t = r * ((df as f64) / (1.0 - r * r)).sqrt();
    let dist = StudentsT::new(0.0, 1.0, df as f64).expect("df >= 2");
    let p = (2.0 * (1.0 - dist.cdf(t.abs()))).clamp(0.0, 1.0);
    Ok(TestResult {
        statistic: t,
        df,
        p_value: p,
        reject_at_05: p < 0.05,
    })
}

fn constant(v: &[f64]) -> bool {
    v.iter().all(|x| *x == v[0])
}

fn pearson(a: &[f64], b: &[f64]) -> f64 {
    let n = a.len() as f64;
    let ma = a.iter().sum::<f64>() / n;
    let mb = b.iter().sum::<f64>() / n;
    let mut saa = 0.0;
    let mut sbb = 0.0;
    let mut sab = 0.0;
    for (x, y) in a.iter().zip(b) {
        saa += (x - ma) * (x - ma);
        sbb += (y - mb) * (y - mb);
        sab += (x - ma) * (y - mb);
    }
    sab / (saa.sqrt() * sbb.sqrt())
}

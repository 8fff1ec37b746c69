//! Estimators, histograms and the geometric waiting-time model.

use serde::{Deserialize, Serialize};

use crate::analytics::special::chi_square_sf;
use crate::error::{Error, Result};

/// Binomial standard error `sqrt(p(1-p)/n)` of `k` successes in `n` trials.
pub fn binomial_stderr(k: u64, n: u64) -> f64 {
    if n == 0 {
        return 0.0;
    }
    let p = k as f64 / n as f64;
    (p * (1.0 - p) / n as f64).sqrt()
}

/// Sample mean and standard error of the mean.
pub fn mean_stderr(xs: &[f64]) -> Option<(f64, f64)> {
    let n = xs.len();
    if n == 0 {
        return None;
    }
    let mean = xs.iter().sum::<f64>() / n as f64;
    if n == 1 {
        return Some((mean, 0.0));
    }
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
    Some((mean, (var / n as f64).sqrt()))
}

pub fn median(xs: &[u64]) -> Option<f64> {
    if xs.is_empty() {
        return None;
    }
    let mut v = xs.to_vec();
    v.sort_unstable();
    let n = v.len();
    Some(if n % 2 == 1 {
        v[n / 2] as f64
    } else {
        (v[n / 2 - 1] + v[n / 2]) as f64 / 2.0
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct HistBin {
    /// Inclusive lower edge.
    pub start: u64,
    pub count: u64,
}

/// Counts of `xs` in bins `[k w, (k+1) w)`, dropping empty bins.
pub fn histogram(xs: &[u64], width: u64) -> Vec<HistBin> {
    let width = width.max(1);
    let mut counts = std::collections::BTreeMap::new();
    for &x in xs {
        *counts.entry(x / width * width).or_insert(0u64) += 1;
    }
    counts
        .into_iter()
        .map(|(start, count)| HistBin { start, count })
        .collect()
}

/// Waiting time `T` on `{1, 2, ...}` with success probability `p`, observed
/// through `min(T, cap)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GeometricModel {
    pub p: f64,
    pub cap: u64,
}

impl GeometricModel {
    /// Mean and variance of `min(T, cap)`.
    pub fn restricted_moments(&self) -> (f64, f64) {
        let c = self.cap as f64;
        if self.p >= 1.0 {
            return (1.0f64.min(c), 0.0);
        }
        if self.p <= 0.0 {
            return (c, 0.0);
        }
        // Work with D = cap - min(T, cap) = (cap - T)^+, which avoids
        // cancellation when the cap is far below the mean.
        // Two passes over Pr(T = t) = p r^(t-1) for t < cap; the variance is
        // centred to keep it accurate when it is tiny.
        let log_r = (-self.p).ln_1p();
        let terms = || {
            (1..self.cap)
                .map(move |t| {
                    (
                        (self.cap - t) as f64,
                        self.p * ((t - 1) as f64 * log_r).exp(),
                    )
                })
                .take_while(|&(_, prob)| prob * c * c >= 1e-300)
        };
        let e1: f64 = terms().map(|(d, prob)| d * prob).sum();
        let at_cap = ((self.cap - 1) as f64 * log_r).exp();
        let var = terms()
            .map(|(d, prob)| (d - e1).powi(2) * prob)
            .sum::<f64>()
            + e1 * e1 * at_cap;
        (c - e1, var)
    }
}

/// Chi-square goodness of fit of waiting times to a geometric law with the
/// maximum-likelihood rate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GofResult {
    pub p_hat: f64,
    pub chi2: f64,
    pub dof: u64,
    pub p_value: f64,
}

pub fn geometric_gof(samples: &[u64]) -> Result<GofResult> {
    let n = samples.len();
    if n < 50 {
        return Err(Error::OutOfRange(format!(
            "goodness of fit needs at least 50 samples, got {n}"
        )));
    }
    let mean = samples.iter().sum::<u64>() as f64 / n as f64;
    let p_hat = 1.0 / mean;
    let target = (n as f64 / 20.0).max(5.0);
    let mut sorted = samples.to_vec();
    sorted.sort_unstable();
    let count_below = |t: u64| sorted.partition_point(|&s| s < t) as f64;
    // Greedy bins [lo, hi) with expected count at least `target`.
    let surv = |t: u64| ((t - 1) as f64 * (-p_hat).ln_1p()).exp();
    let mut edges = vec![1u64];
    let mut lo = 1u64;
    loop {
        let mut hi = lo + 1;
        while n as f64 * (surv(lo) - surv(hi)) < target {
            hi += 1;
            if n as f64 * surv(hi) < target {
                break;
            }
        }
        if n as f64 * surv(hi) < target {
            break;
        }
        edges.push(hi);
        lo = hi;
    }
    let mut chi2 = 0.0;
    let mut bins = 0u64;
    for w in edges.windows(2) {
        let expected = n as f64 * (surv(w[0]) - surv(w[1]));
        let observed = count_below(w[1]) - count_below(w[0]);
        chi2 += (observed - expected).powi(2) / expected;
        bins += 1;
    }
    let last = *edges.last().expect("edges");
    let expected = n as f64 * surv(last);
    let observed = n as f64 - count_below(last);
    chi2 += (observed - expected).powi(2) / expected;
    bins += 1;
    if bins < 3 {
        return Err(Error::OutOfRange(
            "too few bins for a goodness-of-fit test".into(),
        ));
    }
    let dof = bins - 2;
    Ok(GofResult {
        p_hat,
        chi2,
        dof,
        p_value: chi_square_sf(chi2, dof as f64),
    })
}

/// Least-squares line `y = a + b x` with its coefficient of determination.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LineFit {
    pub intercept: f64,
    pub slope: f64,
    pub r_squared: f64,
}

pub fn fit_line(xs: &[f64], ys: &[f64]) -> Option<LineFit> {
    let n = xs.len();
    if n < 2 || ys.len() != n {
        return None;
    }
    let mx = xs.iter().sum::<f64>() / n as f64;
    let my = ys.iter().sum::<f64>() / n as f64;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let syy: f64 = ys.iter().map(|y| (y - my).powi(2)).sum();
    if sxx == 0.0 {
        return None;
    }
    let slope = sxy / sxx;
    let r_squared = if syy == 0.0 {
        1.0
    } else {
        sxy * sxy / (sxx * syy)
    };
    Some(LineFit {
        intercept: my - slope * mx,
        slope,
        r_squared,
    })
}

//! Sparse-error bounds and the recursive cluster decomposition.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

use super::closed_form::{check_prob, Bound};

/// Constants of the sparse-set bound for a linear eroder of radius `R`
/// with constant `m` at noise strength `p0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SparseBoundParams {
    pub r: u64,
    pub m: u64,
    pub p0: f64,
    /// Sparseness parameter `k = 2Rm`.
    pub k: u64,
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    /// Threshold below which `gamma > 0`, equal to `1 / p_tilde_c_inv`.
    pub p_tilde_c: f64,
    pub p_tilde_c_inv: u64,
    /// Finite-eroder constant, equal to `1 / a_inv`.
    pub a: f64,
    pub a_inv: u64,
}

pub fn sparse_params(r: u64, m: u64, p0: f64) -> Result<SparseBoundParams> {
    if r == 0 || m == 0 {
        return Err(Error::OutOfRange(
            "radius and eroder constant must be positive".into(),
        ));
    }
    check_prob(p0)?;
    let k = 2 * r * m;
    let c = 2 * k * (4 * k + 3);
    let alpha = c as f64 * p0.sqrt();
    let a_inv = (2 * r * m + 1) * (r * m + 1);
    Ok(SparseBoundParams {
        r,
        m,
        p0,
        k,
        alpha,
        beta: std::f64::consts::LN_2 / ((4 * k + 3) as f64).ln(),
        gamma: -alpha.ln(),
        p_tilde_c: 1.0 / (c * c) as f64,
        p_tilde_c_inv: c * c,
        a: 1.0 / a_inv as f64,
        a_inv,
    })
}

/// Probability that a site is still wrong at level `l`, bounded by `alpha^(l^beta)`.
pub fn cluster_level_bound(l: u64, params: &SparseBoundParams) -> Bound {
    Bound::new(params.alpha.powf((l as f64).powf(params.beta)))
}

/// Upper bound on the probability that a mirrored chain of `L` sites is not
/// clean after `t` steps, `(4R{t} + L) exp(-gamma floor({t}/m)^beta)` with
/// `{t} = min(t, floor(L / 2R))`.
pub fn survival_bound_finite(len: u64, t: u64, params: &SparseBoundParams) -> Bound {
    let t_eff = t.min(len / (2 * params.r));
    let levels = (t_eff / params.m) as f64;
    let raw =
        (4 * params.r * t_eff + len) as f64 * (-params.gamma * levels.powf(params.beta)).exp();
    Bound::new(raw)
}

/// Failure bound for decoding within `floor(L^kappa)` steps,
/// `(4R+1) L exp(-gamma floor(L^kappa / m)^beta)`. `L` is real so that very
/// long chains can be evaluated.
pub fn decode_failure_bound(len: f64, kappa: f64, params: &SparseBoundParams) -> Result<Bound> {
    if !(kappa > 0.0 && kappa < 1.0) {
        return Err(Error::OutOfRange(format!(
            "kappa must lie in (0, 1), got {kappa}"
        )));
    }
    let levels = (len.powf(kappa) / params.m as f64).floor();
    let raw = (4 * params.r + 1) as f64 * len * (-params.gamma * levels.powf(params.beta)).exp();
    Ok(Bound::new(raw))
}

/// Index from which `values` decreases strictly to the end. Errors when the
/// last step does not decrease.
pub fn strictly_decreasing_tail(values: &[f64]) -> Result<usize> {
    let n = values.len();
    if n < 2 || values[n - 1] >= values[n - 2] {
        return Err(Error::Invariant("sequence does not end decreasing".into()));
    }
    let mut start = n - 2;
    while start > 0 && values[start] < values[start - 1] {
        start -= 1;
    }
    Ok(start)
}

/// A set of error sites, sorted and without duplicates.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Cluster {
    pub level: u64,
    pub sites: Vec<i64>,
}

impl Cluster {
    /// `max - min` over the sites.
    pub fn diameter(&self) -> u64 {
        diameter(&self.sites)
    }

    /// Territory radius `k * max(diameter, 1)`.
    pub fn territory(&self, k: u64) -> (i64, i64) {
        territory(&self.sites, k)
    }
}

fn diameter(sites: &[i64]) -> u64 {
    match (sites.first(), sites.last()) {
        (Some(a), Some(b)) => (b - a) as u64,
        _ => 0,
    }
}

fn territory(sites: &[i64], k: u64) -> (i64, i64) {
    let d = diameter(sites).max(1) as i64;
    (
        sites[0] - k as i64 * d,
        sites[sites.len() - 1] + k as i64 * d,
    )
}

/// Number of elements of the sorted `ys` inside `[lo, hi]`.
fn count_in(ys: &[i64], lo: i64, hi: i64) -> usize {
    ys.partition_point(|&y| y <= hi) - ys.partition_point(|&y| y < lo)
}

/// Whether `ys[i..=j]` is independent in `ys`: its territory holds no other site.
fn independent_run(ys: &[i64], i: usize, j: usize, k: u64) -> bool {
    let (lo, hi) = territory(&ys[i..=j], k);
    count_in(ys, lo, hi) == j - i + 1
}

/// Pairwise-independent clusters covering an error set level by level.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClusterFamily {
    pub k: u64,
    pub clusters: Vec<Cluster>,
}

impl ClusterFamily {
    /// Sites not covered by any cluster of level at most `l`.
    pub fn uncovered_at(&self, x: &[i64], l: u64) -> Vec<i64> {
        let mut covered: Vec<i64> = self
            .clusters
            .iter()
            .filter(|c| c.level <= l)
            .flat_map(|c| c.sites.iter().copied())
            .collect();
        covered.sort_unstable();
        x.iter()
            .copied()
            .filter(|s| covered.binary_search(s).is_err())
            .collect()
    }

    pub fn max_level(&self) -> u64 {
        self.clusters.iter().map(|c| c.level).max().unwrap_or(0)
    }

    /// Every pair of clusters has one member whose territory misses the other.
    pub fn check_independence(&self) -> Result<()> {
        for (a, ca) in self.clusters.iter().enumerate() {
            for cb in &self.clusters[a + 1..] {
                let misses = |c: &Cluster, other: &Cluster| {
                    let (lo, hi) = c.territory(self.k);
                    other.sites.iter().all(|&s| s < lo || s > hi)
                };
                if !misses(ca, cb) && !misses(cb, ca) {
                    return Err(Error::Invariant(format!(
                        "clusters {:?} and {:?} are not independent",
                        ca.sites, cb.sites
                    )));
                }
            }
        }
        Ok(())
    }

    /// Brute-force completeness check: after removing levels `<= l`, no set of
    /// diameter at most `l` is independent in what remains.
    pub fn check_completeness(&self, x: &[i64]) -> Result<()> {
        let top = self.max_level();
        for l in 1..=top {
            let rest = self.uncovered_at(x, l);
            for i in 0..rest.len() {
                for j in i..rest.len() {
                    if (rest[j] - rest[i]) as u64 > l {
                        break;
                    }
                    if independent_run(&rest, i, j, self.k) {
                        return Err(Error::Invariant(format!(
                            "sites {:?} are independent after level {l}",
                            &rest[i..=j]
                        )));
                    }
                }
            }
        }
        if !self.uncovered_at(x, top).is_empty() {
            return Err(Error::Invariant(
                "decomposition leaves sites uncovered".into(),
            ));
        }
        Ok(())
    }
}

/// Recursive decomposition of an error set into independent clusters.
///
/// Level `l` collects every cluster of effective diameter `l` that is
/// independent once all lower levels are removed. A single site counts as
/// diameter 1, so isolated errors land on level 1.
pub fn sparse_decompose(x: &[i64], k: u64) -> Result<ClusterFamily> {
    if k == 0 {
        return Err(Error::OutOfRange(
            "sparseness parameter must be positive".into(),
        ));
    }
    let mut rest: Vec<i64> = x.to_vec();
    rest.sort_unstable();
    rest.dedup();
    let mut clusters = Vec::new();
    let mut l = 1u64;
    while !rest.is_empty() {
        let mut taken = vec![false; rest.len()];
        let mut j = 0;
        for i in 0..rest.len() {
            j = j.max(i);
            while j + 1 < rest.len() && ((rest[j + 1] - rest[i]) as u64) <= l {
                j += 1;
            }
            let span = (rest[j] - rest[i]) as u64;
            if span.max(1) != l || taken[i] {
                continue;
            }
            if independent_run(&rest, i, j, k) {
                clusters.push(Cluster {
                    level: l,
                    sites: rest[i..=j].to_vec(),
                });
                taken[i..=j].iter_mut().for_each(|t| *t = true);
            }
        }
        rest = rest
            .iter()
            .zip(&taken)
            .filter(|(_, &t)| !t)
            .map(|(&s, _)| s)
            .collect();
        l += 1;
    }
    Ok(ClusterFamily { k, clusters })
}

//! Parallel sweeps over (L, p0) grids.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::analytics::{check_prob, cluster_level_bound, sparse_decompose, sparse_params, Bound};
use crate::bits::ChainState;
use crate::error::{Error, Result};

use super::rng::trial_rng;
use super::sampling::{sample_bernoulli, sample_mirrored_bernoulli};
use super::stats::{binomial_stderr, histogram, mean_stderr, median, HistBin};
use super::trials::{
    decode_state, decode_stepper, run_ff_trial, FfMode, TmaxPolicy, TrialClass, DEFAULT_FF_CAP,
};

/// Grid, budget and seed of a sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub lengths: Vec<usize>,
    pub p0s: Vec<f64>,
    pub trials: u64,
    pub tmax: TmaxPolicy,
    pub seed: u64,
    /// Correction mode of first-flip runs.
    pub mode: FfMode,
    /// Step cap of first-flip runs.
    pub ff_cap: u64,
    /// Bin width of the `t_dec` histogram.
    pub hist_bin: u64,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            lengths: vec![100],
            p0s: vec![0.1],
            trials: 1000,
            tmax: TmaxPolicy::Unbounded,
            seed: 0,
            mode: FfMode::Tlv1d,
            ff_cap: DEFAULT_FF_CAP,
            hist_bin: 10,
        }
    }
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::OutOfRange("trials must be at least 1".into()));
        }
        if self.lengths.is_empty() || self.p0s.is_empty() {
            return Err(Error::OutOfRange("empty L or p0 grid".into()));
        }
        for &len in &self.lengths {
            if len < 2 || len % 2 == 1 {
                return Err(Error::InvalidLength {
                    len,
                    reason: "sweeps need an even length of at least 2",
                });
            }
        }
        for &p in &self.p0s {
            check_prob(p)?;
        }
        if self.hist_bin == 0 {
            return Err(Error::OutOfRange(
                "histogram bin width must be positive".into(),
            ));
        }
        if self.ff_cap == 0 {
            return Err(Error::OutOfRange("first-flip cap must be positive".into()));
        }
        self.tmax.validate()
    }

    /// Grid points in row-major order `(L, p0)`, with their point index.
    pub fn points(&self) -> impl Iterator<Item = (u64, usize, f64)> + '_ {
        self.lengths
            .iter()
            .flat_map(move |&l| self.p0s.iter().map(move |&p| (l, p)))
            .enumerate()
            .map(|(i, (l, p))| (i as u64, l, p))
    }
}

/// Per-point results of a sweep, in grid order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepStats<P> {
    pub points: Vec<P>,
}

/// Decoding statistics at one `(L, p0)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PdecPoint {
    pub len: usize,
    pub p0: f64,
    pub tmax: TmaxPolicy,
    /// Resolved step budget, `None` when unbounded.
    pub t_max: Option<u64>,
    pub trials: u64,
    pub failures: u64,
    pub flips: u64,
    pub cycles: u64,
    pub timeouts: u64,
    pub p_fail: f64,
    pub p_fail_stderr: f64,
    pub cycle_frac: f64,
    pub mean_tdec: Option<f64>,
    pub median_tdec: Option<f64>,
    pub tdec_hist: Vec<HistBin>,
}

impl PdecPoint {
    pub fn p_succ(&self) -> f64 {
        1.0 - self.p_fail
    }
}

/// Estimates the decoding failure probability at every grid point.
pub fn estimate_pdec(config: &ExperimentConfig) -> Result<SweepStats<PdecPoint>> {
    config.validate()?;
    let mut points = Vec::new();
    for (idx, len, p0) in config.points() {
        let t_max = config.tmax.resolve(len);
        let outcomes: Vec<_> = (0..config.trials)
            .into_par_iter()
            .map_init(
                || decode_stepper(len).expect("length validated"),
                |stepper, trial| {
                    let mut rng = trial_rng(config.seed, idx, trial);
                    let x = sample_bernoulli(len, p0, &mut rng);
                    decode_state(stepper, &x, t_max)
                },
            )
            .collect();
        let count = |c: TrialClass| outcomes.iter().filter(|o| o.class == c).count() as u64;
        let (flips, cycles, timeouts) = (
            count(TrialClass::LogicalFlip),
            count(TrialClass::ResidualCycle),
            count(TrialClass::TimedOut),
        );
        let failures = flips + cycles + timeouts;
        let tdec: Vec<u64> = outcomes.iter().filter_map(|o| o.t_dec).collect();
        let n = config.trials;
        points.push(PdecPoint {
            len,
            p0,
            tmax: config.tmax,
            t_max,
            trials: n,
            failures,
            flips,
            cycles,
            timeouts,
            p_fail: failures as f64 / n as f64,
            p_fail_stderr: binomial_stderr(failures, n),
            cycle_frac: cycles as f64 / n as f64,
            mean_tdec: (!tdec.is_empty())
                .then(|| tdec.iter().sum::<u64>() as f64 / tdec.len() as f64),
            median_tdec: median(&tdec),
            tdec_hist: histogram(&tdec, config.hist_bin),
        });
    }
    Ok(SweepStats { points })
}

/// Exact decoding failure probability by weighted enumeration of all
/// `2^L` initial states.
pub fn exhaustive_pdec(len: usize, p0: f64, tmax: TmaxPolicy) -> Result<f64> {
    if len > 24 {
        return Err(Error::InvalidLength {
            len,
            reason: "exhaustive enumeration is limited to 24 cells",
        });
    }
    check_prob(p0)?;
    tmax.validate()?;
    let mut stepper = decode_stepper(len)?;
    let t_max = tmax.resolve(len);
    let mut fails_by_weight = vec![0u64; len + 1];
    for v in 0..1u64 << len {
        let x = ChainState::from_bits(crate::bits::BitString::from_u64(len, v));
        if decode_state(&mut stepper, &x, t_max).is_failure() {
            fails_by_weight[v.count_ones() as usize] += 1;
        }
    }
    Ok(fails_by_weight
        .iter()
        .enumerate()
        .map(|(w, &c)| c as f64 * p0.powi(w as i32) * (1.0 - p0).powi((len - w) as i32))
        .sum())
}

/// First-flip statistics at one `(L, p0)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TffPoint {
    pub len: usize,
    pub p0: f64,
    pub mode: FfMode,
    pub cap: u64,
    pub trials: u64,
    /// Runs that hit the cap.
    pub censored: u64,
    pub censored_frac: f64,
    /// Mean and standard error of `T_ff` over runs that flipped.
    pub mean_tff: Option<f64>,
    pub mean_tff_stderr: Option<f64>,
    /// Mean and standard error of `min(T_ff, cap)` over all runs.
    pub restricted_mean: f64,
    pub restricted_stderr: f64,
    /// `T_ff` per trial, `None` when censored.
    pub samples: Vec<Option<u64>>,
}

/// Samples the first-flip time at every grid point.
pub fn estimate_tff(config: &ExperimentConfig) -> Result<SweepStats<TffPoint>> {
    config.validate()?;
    let mut points = Vec::new();
    for (idx, len, p0) in config.points() {
        let runs = (0..config.trials)
            .into_par_iter()
            .map(|trial| {
                let mut rng = trial_rng(config.seed, idx, trial);
                run_ff_trial(len, p0, config.mode, config.ff_cap, &mut rng)
            })
            .collect::<Result<Vec<_>>>()?;
        let samples: Vec<Option<u64>> = runs.iter().map(|r| r.t_ff).collect();
        let flipped: Vec<f64> = samples.iter().flatten().map(|&t| t as f64).collect();
        let restricted: Vec<f64> = runs.iter().map(|r| r.steps as f64).collect();
        let censored = (runs.len() - flipped.len()) as u64;
        let ms = mean_stderr(&flipped);
        let (restricted_mean, restricted_stderr) = mean_stderr(&restricted).expect("trials >= 1");
        points.push(TffPoint {
            len,
            p0,
            mode: config.mode,
            cap: config.ff_cap,
            trials: config.trials,
            censored,
            censored_frac: censored as f64 / config.trials as f64,
            mean_tff: ms.map(|m| m.0),
            mean_tff_stderr: ms.map(|m| m.1),
            restricted_mean,
            restricted_stderr,
            samples,
        });
    }
    Ok(SweepStats { points })
}

/// Mirrored windows fed to the sparse decomposition.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SparseConfig {
    /// Window sites are `1 - half_width ..= half_width`.
    pub half_width: usize,
    pub p0: f64,
    pub k: u64,
    pub windows: u64,
    pub max_level: u64,
    pub seed: u64,
}

/// Uncovered-site statistics at one decomposition level.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SparseLevelRow {
    pub level: u64,
    pub uncovered_sites: u64,
    /// Mean over windows of the fraction of window sites not covered by
    /// clusters of level at most `level`.
    pub fraction: f64,
    pub stderr: f64,
    pub bound: Bound,
}

/// Compares the empirical uncovered fraction per level with the
/// `alpha^(l^beta)` bound of a radius-4 eroder with `m = 1`.
pub fn validate_sparse_bound(config: &SparseConfig) -> Result<Vec<SparseLevelRow>> {
    if config.half_width < 1 {
        return Err(Error::OutOfRange("half width must be at least 1".into()));
    }
    if config.windows == 0 || config.max_level == 0 {
        return Err(Error::OutOfRange(
            "need at least one window and one level".into(),
        ));
    }
    let params = sparse_params(4, 1, config.p0)?;
    let sites = (2 * config.half_width) as f64;
    let per_window = (0..config.windows)
        .into_par_iter()
        .map(|w| {
            let mut rng = trial_rng(config.seed, 0, w);
            let x = sample_mirrored_bernoulli(config.half_width, config.p0, &mut rng);
            let family = sparse_decompose(&x, config.k)?;
            Ok((1..=config.max_level)
                .map(|l| family.uncovered_at(&x, l).len() as u64)
                .collect::<Vec<_>>())
        })
        .collect::<Result<Vec<_>>>()?;
    Ok((1..=config.max_level)
        .map(|l| {
            let col: Vec<u64> = per_window.iter().map(|row| row[(l - 1) as usize]).collect();
            let fracs: Vec<f64> = col.iter().map(|&c| c as f64 / sites).collect();
            let (fraction, stderr) = mean_stderr(&fracs).expect("windows >= 1");
            SparseLevelRow {
                level: l,
                uncovered_sites: col.iter().sum(),
                fraction,
                stderr,
                bound: cluster_level_bound(l, &params),
            }
        })
        .collect())
}

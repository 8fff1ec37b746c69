//! Closed-form probabilities for global majority voting and the light cone.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

use super::special::ln_reg_incomplete_beta;

/// Per-site noise strength and RNG seed of an experiment.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoiseParams {
    pub p0: f64,
    pub seed: u64,
}

impl NoiseParams {
    pub fn new(p0: f64, seed: u64) -> Result<Self> {
        check_prob(p0)?;
        Ok(Self { p0, seed })
    }
}

pub(crate) fn check_prob(p: f64) -> Result<()> {
    if (0.0..=1.0).contains(&p) {
        Ok(())
    } else {
        Err(Error::OutOfRange(format!("probability {p} outside [0, 1]")))
    }
}

/// Upper bound reported both as computed and clamped to `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Bound {
    pub raw: f64,
    pub clamped: f64,
}

impl Bound {
    pub fn new(raw: f64) -> Self {
        Self {
            raw,
            clamped: raw.clamp(0.0, 1.0),
        }
    }
}

/// Probability that a site is flipped after `t` rounds of independent
/// flips with probability `p0`.
pub fn flip_prob(p0: f64, t: u64) -> f64 {
    if t == 0 {
        return 0.0;
    }
    let base = 1.0 - 2.0 * p0;
    let decay = if base > 0.0 {
        (t as f64 * base.ln()).exp()
    } else {
        base.powf(t as f64)
    };
    0.5 * (1.0 - decay)
}

/// Evaluation route for [`logical_fail_prob_with`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum FailMethod {
    /// Log-space sum over the binomial tail.
    DirectSum,
    /// Regularized incomplete beta function.
    IncompleteBeta,
}

/// `ln C(n, k)` as a sum of exact ratio logarithms.
fn ln_choose(n: u64, k: u64) -> f64 {
    let k = k.min(n - k);
    (1..=k).map(|i| ((n - k + i) as f64 / i as f64).ln()).sum()
}

fn ln_binom_term(n: u64, k: u64, p: f64) -> f64 {
    ln_choose(n, k) + k as f64 * p.ln() + (n - k) as f64 * (-p).ln_1p()
}

fn log_sum_exp(terms: &[f64]) -> f64 {
    let m = terms.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if m == f64::NEG_INFINITY {
        return m;
    }
    m + terms.iter().map(|t| (t - m).exp()).sum::<f64>().ln()
}

/// Natural log of the probability that majority voting on `L` independent
/// cells, each wrong with probability `p`, decodes to the wrong value.
///
/// Odd `L` is the usual binomial tail. For even `L` a tie is resolved by a
/// fair coin, matching the global decoder's tie rule on an unbiased chain.
pub fn ln_logical_fail_prob_with(len: u64, p: f64, method: FailMethod) -> Result<f64> {
    if len == 0 {
        return Err(Error::InvalidLength {
            len: 0,
            reason: "majority needs at least one cell",
        });
    }
    check_prob(p)?;
    if p == 0.0 {
        return Ok(f64::NEG_INFINITY);
    }
    if p == 1.0 {
        return Ok(0.0);
    }
    let first = len / 2 + 1;
    let mut parts = Vec::new();
    match method {
        FailMethod::DirectSum => {
            let ratio = p.ln() - (-p).ln_1p();
            let mut t = ln_binom_term(len, first, p);
            for k in first..=len {
                parts.push(t);
                if k < len {
                    t += ((len - k) as f64).ln() - ((k + 1) as f64).ln() + ratio;
                }
            }
        }
        FailMethod::IncompleteBeta => {
            parts.push(ln_reg_incomplete_beta(
                p,
                first as f64,
                (len - first + 1) as f64,
            ));
        }
    }
    if len.is_multiple_of(2) {
        parts.push(ln_binom_term(len, len / 2, p) - std::f64::consts::LN_2);
    }
    Ok(log_sum_exp(&parts))
}

pub fn logical_fail_prob_with(len: u64, p: f64, method: FailMethod) -> Result<f64> {
    ln_logical_fail_prob_with(len, p, method).map(f64::exp)
}

/// Logical failure probability of one round of global majority voting.
pub fn logical_fail_prob(len: u64, p: f64) -> Result<f64> {
    logical_fail_prob_with(len, p, FailMethod::DirectSum)
}

/// Closed-form upper bound `(L+1)/2 C(L,(L+1)/2) p q^(L-1)` with
/// `q = sqrt(p(1-p))`, for odd `L` and `p <= 1/2`.
pub fn logical_fail_upper_bound(len: u64, p: f64) -> Result<f64> {
    if len.is_multiple_of(2) {
        return Err(Error::InvalidLength {
            len: len as usize,
            reason: "bound needs odd length",
        });
    }
    check_prob(p)?;
    if p == 0.0 {
        return Ok(0.0);
    }
    let h = len.div_ceil(2);
    let ln_q = 0.5 * (p.ln() + (-p).ln_1p());
    Ok(((h as f64).ln() + ln_choose(len, h) + p.ln() + (len - 1) as f64 * ln_q).exp())
}

/// Time scale on which stabilized global decoding forgets the logical state.
///
/// The survival probability decays as `exp(-t/T)`, so `T` approaches
/// `1/(2P)` for small failure probability `P`.
pub fn decay_time(len: u64, p0: f64) -> Result<f64> {
    let p = logical_fail_prob(len, p0)?;
    if p >= 0.5 {
        return Err(Error::OutOfRange(format!(
            "failure probability {p} is not below 1/2, so there is no decay time"
        )));
    }
    Ok(-1.0 / (-2.0 * p).ln_1p())
}

/// Probability that the logical state survives `t` rounds of noise each
/// followed by global majority decoding.
pub fn stabilized_survival(len: u64, p0: f64, t: u64) -> Result<f64> {
    let p = logical_fail_prob(len, p0)?;
    let base = 1.0 - 2.0 * p;
    Ok(0.5 * (1.0 + base.powf(t as f64)))
}

/// Light-cone upper bound on the success probability of any decoder with
/// interaction radius `D` on a chain of `L` sites.
pub fn lightcone_bound(len: u64, d: u64, p0: f64) -> Result<f64> {
    if !(0.0..=0.5).contains(&p0) {
        return Err(Error::OutOfRange(format!(
            "light-cone bound needs p0 in [0, 1/2], got {p0}"
        )));
    }
    if p0 == 0.0 {
        return Ok(1.0);
    }
    let w = (2 * d + 1) as f64;
    let ln_r = p0.ln() - (-p0).ln_1p();
    let inner = (w * ln_r).exp().ln_1p();
    Ok((-(len as f64) / w * inner).exp())
}

/// Growth of the decoder radius with chain length.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum ScalingRegime {
    /// `D` fixed.
    ConstD,
    /// `D ~ L^kappa`.
    PowerLaw(f64),
    /// `D ~ kappa ln L`.
    LogPower(f64),
}

/// Critical rate of the logarithmic-depth regime, `1/(1 + e^(1/kappa))`.
pub fn log_depth_critical_rate(kappa: f64) -> f64 {
    1.0 / (1.0 + (1.0 / kappa).exp())
}

/// `L -> infinity` limit of [`lightcone_bound`] in a scaling regime.
pub fn lightcone_scaling_limit(regime: ScalingRegime, p0: f64) -> Result<f64> {
    if !(0.0..=0.5).contains(&p0) {
        return Err(Error::OutOfRange(format!(
            "p0 must lie in [0, 1/2], got {p0}"
        )));
    }
    let need_kappa = |k: f64| {
        if k > 0.0 {
            Ok(k)
        } else {
            Err(Error::OutOfRange(format!(
                "kappa must be positive, got {k}"
            )))
        }
    };
    Ok(match regime {
        ScalingRegime::ConstD => {
            if p0 > 0.0 {
                0.0
            } else {
                1.0
            }
        }
        ScalingRegime::PowerLaw(k) => {
            let k = need_kappa(k)?;
            if p0 < 0.5 {
                1.0
            } else if k < 1.0 {
                0.0
            } else if k == 1.0 {
                0.5
            } else {
                1.0
            }
        }
        ScalingRegime::LogPower(k) => {
            let k = need_kappa(k)?;
            if p0 <= log_depth_critical_rate(k) {
                1.0
            } else {
                0.0
            }
        }
    })
}

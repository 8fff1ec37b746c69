//! Single decoding and first-flip trials.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rand_distr::{Binomial, Distribution};
use serde::{Deserialize, Serialize};

use crate::bits::ChainState;
use crate::ca::{classify_with, default_cap, RuleSet, Stepper, Terminal};
use crate::decoders::{boundary, global_majority_decode, majority};
use crate::error::{Error, Result};

use super::sampling::{fill_bernoulli, sample_bernoulli};

/// Step budget of a decoding trial as a function of chain length.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum TmaxPolicy {
    /// Run until the orbit is classified (up to [`default_cap`]).
    Unbounded,
    /// `floor(c L)`.
    Linear(f64),
    /// `floor(L^kappa)`, `0 < kappa <= 1`.
    Power(f64),
    Const(u64),
}

impl TmaxPolicy {
    /// Step budget for length `len`; `None` when unbounded.
    pub fn resolve(&self, len: usize) -> Option<u64> {
        match *self {
            TmaxPolicy::Unbounded => None,
            TmaxPolicy::Linear(c) => Some((c * len as f64).floor() as u64),
            TmaxPolicy::Power(k) => Some((len as f64).powf(k).floor() as u64),
            TmaxPolicy::Const(t) => Some(t),
        }
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            TmaxPolicy::Linear(c) if !(c > 0.0) => Err(Error::OutOfRange(format!(
                "linear factor {c} must be positive"
            ))),
            TmaxPolicy::Power(k) if !(k > 0.0 && k <= 1.0) => Err(Error::OutOfRange(format!(
                "power exponent {k} must lie in (0, 1]"
            ))),
            _ => Ok(()),
        }
    }
}

impl fmt::Display for TmaxPolicy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TmaxPolicy::Unbounded => write!(f, "unbounded"),
            TmaxPolicy::Linear(c) => write!(f, "linear:{c}"),
            TmaxPolicy::Power(k) => write!(f, "pow:{k}"),
            TmaxPolicy::Const(t) => write!(f, "const:{t}"),
        }
    }
}

impl FromStr for TmaxPolicy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || {
            Error::Parse(format!(
                "bad t_max policy {s:?}; expected unbounded, linear[:c], pow:k or const:T"
            ))
        };
        let (head, arg) = match s.split_once(':') {
            Some((h, a)) => (h, Some(a)),
            None => (s, None),
        };
        let p = match (head, arg) {
            ("unbounded", None) => TmaxPolicy::Unbounded,
            ("linear", None) => TmaxPolicy::Linear(1.0),
            ("linear", Some(a)) => TmaxPolicy::Linear(a.parse().map_err(|_| bad())?),
            ("pow", Some(a)) => TmaxPolicy::Power(a.parse().map_err(|_| bad())?),
            ("const", Some(a)) => TmaxPolicy::Const(a.parse().map_err(|_| bad())?),
            _ => return Err(bad()),
        };
        p.validate()?;
        Ok(p)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum TrialClass {
    DecodedClean,
    /// Reached the all-ones state.
    LogicalFlip,
    ResidualCycle,
    TimedOut,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TrialOutcome {
    pub class: TrialClass,
    /// Steps to the all-zero state, set only for [`TrialClass::DecodedClean`].
    pub t_dec: Option<u64>,
    /// Cycle period, set only for [`TrialClass::ResidualCycle`].
    pub period: Option<u64>,
}

impl TrialOutcome {
    pub fn is_failure(&self) -> bool {
        self.class != TrialClass::DecodedClean
    }
}

/// Decodes one initial state with TLV on a mirrored chain within `t_max`.
pub(crate) fn decode_state(
    stepper: &mut Stepper,
    x: &ChainState,
    t_max: Option<u64>,
) -> TrialOutcome {
    let cap = t_max.unwrap_or_else(|| default_cap(x.len()));
    if cap == 0 {
        return if x.is_zero() {
            TrialOutcome {
                class: TrialClass::DecodedClean,
                t_dec: Some(0),
                period: None,
            }
        } else if x.is_all_ones() {
            TrialOutcome {
                class: TrialClass::LogicalFlip,
                t_dec: None,
                period: None,
            }
        } else {
            TrialOutcome {
                class: TrialClass::TimedOut,
                t_dec: None,
                period: None,
            }
        };
    }
    let o = classify_with(stepper, x, cap);
    match o.terminal {
        Terminal::CleanZero => TrialOutcome {
            class: TrialClass::DecodedClean,
            t_dec: Some(o.steps_taken),
            period: None,
        },
        Terminal::CleanOne => TrialOutcome {
            class: TrialClass::LogicalFlip,
            t_dec: None,
            period: None,
        },
        Terminal::Cycle { period, .. } => TrialOutcome {
            class: TrialClass::ResidualCycle,
            t_dec: None,
            period: Some(period),
        },
        Terminal::Timeout => TrialOutcome {
            class: TrialClass::TimedOut,
            t_dec: None,
            period: None,
        },
    }
}

pub(crate) fn decode_stepper(len: usize) -> Result<Stepper> {
    Stepper::new(RuleSet::tlv_mirrored(), len)
}

/// Samples a Bernoulli state and decodes it with TLV on a mirrored chain.
pub fn run_decode_trial<R: Rng + ?Sized>(
    len: usize,
    p0: f64,
    t_max: TmaxPolicy,
    rng: &mut R,
) -> Result<TrialOutcome> {
    let mut stepper = decode_stepper(len)?;
    let x = sample_bernoulli(len, p0, rng);
    Ok(decode_state(&mut stepper, &x, t_max.resolve(len)))
}

/// Correction applied after each round of noise in a first-flip run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum FfMode {
    /// One TLV step per noise round.
    Tlv1d,
    /// Global majority decoding after every noise round.
    GlobalEachStep,
    NoCorrection,
}

impl fmt::Display for FfMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            FfMode::Tlv1d => "tlv1d",
            FfMode::GlobalEachStep => "global",
            FfMode::NoCorrection => "none",
        })
    }
}

impl FromStr for FfMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "tlv1d" | "tlv" => Ok(FfMode::Tlv1d),
            "global" => Ok(FfMode::GlobalEachStep),
            "none" => Ok(FfMode::NoCorrection),
            _ => Err(Error::Parse(format!(
                "bad correction mode {s:?}; expected tlv1d, global or none"
            ))),
        }
    }
}

/// Default step cap of a first-flip run.
pub const DEFAULT_FF_CAP: u64 = 10_000_000;

/// Result of a first-flip run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct FfOutcome {
    /// First step after which the majority is 1; `None` if the cap was hit.
    pub t_ff: Option<u64>,
    /// Steps simulated, `min(T_ff, cap)`.
    pub steps: u64,
}

/// Steps of noise plus correction from the clean chain until the majority
/// flips.
///
/// With global correction the chain is back to all-zero after every round
/// that does not flip, so each round is an independent trial that depends on
/// the noise only through its weight (and, on a tie, on its first cell). The
/// run samples exactly those two quantities per round.
pub fn run_ff_trial<R: Rng + ?Sized>(
    len: usize,
    p0: f64,
    mode: FfMode,
    cap: u64,
    rng: &mut R,
) -> Result<FfOutcome> {
    if mode != FfMode::GlobalEachStep {
        return run_ff_trial_full_state(len, p0, mode, cap, rng);
    }
    check_ff_args(len, p0)?;
    let weight = Binomial::new(len as u64, p0).map_err(|e| Error::OutOfRange(e.to_string()))?;
    let n = len as u64;
    for t in 1..=cap {
        let w = weight.sample(rng);
        if 2 * w > n || (2 * w == n && rng.random_bool(0.5)) {
            return Ok(FfOutcome {
                t_ff: Some(t),
                steps: t,
            });
        }
    }
    Ok(FfOutcome {
        t_ff: None,
        steps: cap,
    })
}

fn check_ff_args(len: usize, p0: f64) -> Result<()> {
    if len < 2 {
        return Err(Error::InvalidLength {
            len,
            reason: "chains need at least two cells",
        });
    }
    crate::analytics::NoiseParams::new(p0, 0).map(|_| ())
}

/// [`run_ff_trial`] with every mode simulated on the full chain state.
pub fn run_ff_trial_full_state<R: Rng + ?Sized>(
    len: usize,
    p0: f64,
    mode: FfMode,
    cap: u64,
    rng: &mut R,
) -> Result<FfOutcome> {
    check_ff_args(len, p0)?;
    let mut stepper = match mode {
        FfMode::Tlv1d => Some(decode_stepper(len)?),
        _ => None,
    };
    let mut x = ChainState::zeros(len);
    let mut e = ChainState::zeros(len);
    let mut scratch = ChainState::zeros(len);
    for t in 1..=cap {
        fill_bernoulli(&mut e.0, p0, rng);
        x.0.xor_assign(e.bits());
        match mode {
            FfMode::Tlv1d => stepper
                .as_mut()
                .expect("stepper")
                .advance(&mut x, &mut scratch),
            FfMode::GlobalEachStep => {
                let c = global_majority_decode(&boundary(&x));
                x.0.xor_assign(c.bits());
            }
            FfMode::NoCorrection => {}
        }
        if majority(&x) {
            return Ok(FfOutcome {
                t_ff: Some(t),
                steps: t,
            });
        }
    }
    Ok(FfOutcome {
        t_ff: None,
        steps: cap,
    })
}

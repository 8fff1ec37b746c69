//! Orbit classification, fixed points and eroder measurement.

use serde::{Deserialize, Serialize};

use crate::bits::ChainState;
use crate::error::{Error, Result};

use super::engine::{check_causality, Stepper};
use super::rules::{BoundaryMode, RuleFamily, RuleSet};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Terminal {
    CleanZero,
    CleanOne,
    Cycle { period: u64, entry: u64 },
    Timeout,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct EvolutionOutcome {
    pub terminal: Terminal,
    /// First time the homogeneous state was reached, the time at which the
    /// repeat was detected, or the cap.
    pub steps_taken: u64,
}

/// Default step cap for orbit classification of a chain of length `len`.
pub fn default_cap(len: usize) -> u64 {
    64 * len as u64 + 1024
}

/// Follows the orbit of `state` until it reaches a homogeneous fixed point
/// or a cycle, using Brent's power-of-two cycle detection.
pub fn classify_evolution(
    state: &ChainState,
    rules: &RuleSet,
    cap: u64,
) -> Result<EvolutionOutcome> {
    if cap == 0 {
        return Err(Error::OutOfRange("cap must be at least 1".into()));
    }
    check_causality(rules, cap)?;
    let mut stepper = Stepper::new(*rules, state.len())?;
    Ok(classify_with(&mut stepper, state, cap))
}

pub(crate) fn classify_with(
    stepper: &mut Stepper,
    state: &ChainState,
    cap: u64,
) -> EvolutionOutcome {
    let homogeneous = |x: &ChainState, t: u64| {
        if x.is_zero() {
            Some(EvolutionOutcome {
                terminal: Terminal::CleanZero,
                steps_taken: t,
            })
        } else if x.is_all_ones() {
            Some(EvolutionOutcome {
                terminal: Terminal::CleanOne,
                steps_taken: t,
            })
        } else {
            None
        }
    };
    if let Some(o) = homogeneous(state, 0) {
        return o;
    }
    let mut tortoise = state.clone();
    let mut hare = stepper.step(state);
    let mut scratch = ChainState::zeros(state.len());
    let (mut power, mut lam, mut t) = (1u64, 1u64, 1u64);
    loop {
        if let Some(o) = homogeneous(&hare, t) {
            return o;
        }
        if hare == tortoise {
            break;
        }
        if t >= cap {
            return EvolutionOutcome {
                terminal: Terminal::Timeout,
                steps_taken: t,
            };
        }
        if power == lam {
            tortoise.clone_from(&hare);
            power *= 2;
            lam = 0;
        }
        stepper.advance(&mut hare, &mut scratch);
        t += 1;
        lam += 1;
    }
    let mut a = state.clone();
    let mut b = state.clone();
    for _ in 0..lam {
        stepper.advance(&mut b, &mut scratch);
    }
    let mut mu = 0;
    while a != b {
        stepper.advance(&mut a, &mut scratch);
        stepper.advance(&mut b, &mut scratch);
        mu += 1;
    }
    EvolutionOutcome {
        terminal: Terminal::Cycle {
            period: lam,
            entry: mu,
        },
        steps_taken: t,
    }
}

/// Largest length searched exhaustively by [`enumerate_fixed_points`].
pub const EXHAUSTIVE_FIXED_POINT_LEN: usize = 24;

/// All states with `step(x) = x`.
///
/// Up to [`EXHAUSTIVE_FIXED_POINT_LEN`] cells every state is tried. Longer
/// chains are searched among the tilings of a 4-cell pattern, which is where
/// every fixed point of the short chains lives.
pub fn enumerate_fixed_points(len: usize, rules: &RuleSet) -> Result<Vec<ChainState>> {
    let mut stepper = Stepper::new(*rules, len)?;
    let mut out = Vec::new();
    let mut scratch = ChainState::zeros(len);
    let mut test = |x: ChainState, out: &mut Vec<ChainState>| {
        stepper.step_into(&x, &mut scratch);
        if scratch == x && !out.contains(&x) {
            out.push(x);
        }
    };
    if len <= EXHAUSTIVE_FIXED_POINT_LEN {
        for v in 0u64..(1u64 << len) {
            test(
                ChainState::from_bits(crate::bits::BitString::from_u64(len, v)),
                &mut out,
            );
        }
    } else {
        for p in 0u8..16 {
            let bits: Vec<bool> = (0..len).map(|j| p >> (j % 4) & 1 == 1).collect();
            test(ChainState::from_bools(&bits), &mut out);
        }
    }
    out.sort_by_key(|x| x.to_string());
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct EroderRow {
    /// Number of cells in the contiguous cluster.
    pub l: usize,
    /// Steps until the window is clean, maximised over both site parities.
    pub t_dec: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EroderTable {
    pub family: RuleFamily,
    /// Linear eroder constant: every cluster of `l` cells is erased in `m*l` steps.
    pub m: u64,
    pub rows: Vec<EroderRow>,
}

impl EroderTable {
    /// Checks `t_dec(l) <= floor(3l/4) + 1` and `t_dec(l) <= m*l` on every row.
    pub fn check_bounds(&self) -> Result<()> {
        for r in &self.rows {
            let tight = (3 * r.l / 4) as u64 + 1;
            let linear = self.m * r.l as u64;
            if r.t_dec > tight || r.t_dec > linear {
                return Err(Error::Invariant(format!(
                    "cluster of {} cells took {} steps (bounds {tight} and {linear})",
                    r.l, r.t_dec
                )));
            }
        }
        Ok(())
    }
}

/// Erasure time of contiguous clusters of `0..=l_max` cells on a zero
/// background of the infinite chain.
pub fn measure_eroder(family: RuleFamily, l_max: usize) -> Result<EroderTable> {
    let m = 1u64;
    let r = family.radius();
    let budget = m * l_max as u64;
    let padding = r * budget as usize + 2;
    let len = 2 * padding + l_max + 2;
    let rules = RuleSet::new(
        family,
        BoundaryMode::OpenWindow {
            padding,
            background: false,
        },
    )?;
    check_causality(&rules, budget)?;
    let mut stepper = Stepper::new(rules, len)?;
    let mut scratch = ChainState::zeros(len);
    let mut rows = Vec::with_capacity(l_max + 1);
    for l in 0..=l_max {
        let mut worst = 0;
        for shift in 0..2 {
            let ones: Vec<usize> = (padding + shift..padding + shift + l).collect();
            let mut x = ChainState::from_ones(len, &ones);
            let mut t = 0;
            while !x.is_zero() {
                if t == budget {
                    return Err(Error::Invariant(format!(
                        "cluster of {l} cells survived {budget} steps"
                    )));
                }
                stepper.advance(&mut x, &mut scratch);
                t += 1;
            }
            worst = worst.max(t);
        }
        rows.push(EroderRow { l, t_dec: worst });
    }
    Ok(EroderTable { family, m, rows })
}

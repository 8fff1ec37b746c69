//! Word-parallel synchronous update.

use crate::bits::{words_for, BitString, ChainState};
use crate::error::{Error, Result};

use super::rules::{resolve_cell, BoundaryMode, RuleFamily, RuleSet};

/// Bits at 0-based odd positions, i.e. sites with even 1-based index.
const EVEN_SITES: u64 = 0xAAAA_AAAA_AAAA_AAAA;

/// Reusable stepping kernel for one rule set and chain length.
#[derive(Debug, Clone)]
pub struct Stepper {
    rules: RuleSet,
    len: usize,
    views: Vec<Vec<u64>>,
}

impl Stepper {
    pub fn new(rules: RuleSet, len: usize) -> Result<Self> {
        rules.check_length(len)?;
        let n = words_for(len);
        Ok(Self {
            rules,
            len,
            views: vec![vec![0; n]; 6],
        })
    }

    pub fn rules(&self) -> &RuleSet {
        &self.rules
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// Fills `out[j] = x_{j+d}` with out-of-range cells resolved by the
    /// boundary mode.
    fn shifted(&self, x: &BitString, d: i64, out: &mut [u64]) {
        let w = x.words();
        let n = w.len();
        let len = self.len;
        if d > 0 {
            let s = d as u32;
            for k in 0..n {
                let hi = if k + 1 < n { w[k + 1] << (64 - s) } else { 0 };
                out[k] = (w[k] >> s) | hi;
            }
        } else {
            let s = (-d) as u32;
            for k in 0..n {
                let lo = if k > 0 { w[k - 1] >> (64 - s) } else { 0 };
                out[k] = (w[k] << s) | lo;
            }
        }
        if !len.is_multiple_of(64) {
            out[n - 1] &= (1u64 << (len % 64)) - 1;
        }
        let fix = |j: usize, out: &mut [u64]| {
            let v = match resolve_cell(j as i64 + d, len, self.rules.boundary()) {
                Ok(c) => x.get(c),
                Err(b) => b,
            };
            let m = 1u64 << (j % 64);
            if v {
                out[j / 64] |= m;
            } else {
                out[j / 64] &= !m;
            }
        };
        let a = d.unsigned_abs() as usize;
        if d > 0 {
            for j in len.saturating_sub(a)..len {
                fix(j, out);
            }
        } else {
            for j in 0..a.min(len) {
                fix(j, out);
            }
        }
    }

    /// Writes one synchronous update of `src` into `dst`.
    pub fn step_into(&mut self, src: &ChainState, dst: &mut ChainState) {
        assert_eq!(src.len(), self.len, "state length does not match stepper");
        if dst.len() != self.len {
            *dst = ChainState::zeros(self.len);
        }
        let mut views = std::mem::take(&mut self.views);
        let x = src.bits();
        match self.rules.family() {
            RuleFamily::Tlv => {
                for (v, d) in views.iter_mut().zip([-1i64, 2, 4, 1, -2, -4]) {
                    self.shifted(x, d, v);
                }
                let out = dst.0.words_mut();
                for k in 0..out.len() {
                    let (a, b, c) = (views[0][k], views[1][k], views[2][k]);
                    let even = (a & b) | (a & c) | (b & c);
                    let (a, b, c) = (views[3][k], views[4][k], views[5][k]);
                    let odd = (a & b) | (a & c) | (b & c);
                    out[k] = (even & EVEN_SITES) | (odd & !EVEN_SITES);
                }
            }
            RuleFamily::Gkl => {
                for (v, d) in views.iter_mut().zip([1i64, 3, -1, -3]) {
                    self.shifted(x, d, v);
                }
                let xw = x.words();
                let out = dst.0.words_mut();
                for k in 0..out.len() {
                    let c = xw[k];
                    out[k] = (c & (views[0][k] | views[1][k])) | (!c & views[2][k] & views[3][k]);
                }
            }
        }
        dst.0.clear_tail();
        self.views = views;
    }

    pub fn step(&mut self, src: &ChainState) -> ChainState {
        let mut dst = ChainState::zeros(self.len);
        self.step_into(src, &mut dst);
        dst
    }

    /// Advances `state` in place by one step, using `scratch` as the buffer.
    pub fn advance(&mut self, state: &mut ChainState, scratch: &mut ChainState) {
        self.step_into(state, scratch);
        std::mem::swap(state, scratch);
    }
}

/// One synchronous update of every cell.
pub fn step(state: &ChainState, rules: &RuleSet) -> Result<ChainState> {
    let mut s = Stepper::new(*rules, state.len())?;
    Ok(s.step(state))
}

/// Per-site reference update, evaluating the local rule cell by cell.
pub fn step_scalar(state: &ChainState, rules: &RuleSet) -> Result<ChainState> {
    rules.check_length(state.len())?;
    let bits: Vec<bool> = (0..state.len())
        .map(|j| rules.apply_at(state.bits(), j))
        .collect();
    Ok(ChainState::from_bools(&bits))
}

/// Checks the light-cone guarantee of an open window for `t` steps.
pub(crate) fn check_causality(rules: &RuleSet, t: u64) -> Result<()> {
    if let BoundaryMode::OpenWindow { padding, .. } = rules.boundary() {
        let needed = t.saturating_mul(rules.radius() as u64);
        if needed > padding as u64 {
            return Err(Error::CausalityViolation {
                steps: t,
                radius: rules.radius(),
                needed,
                padding,
            });
        }
    }
    Ok(())
}

/// `t`-fold composition of [`step`].
pub fn evolve(state: &ChainState, rules: &RuleSet, t: u64) -> Result<ChainState> {
    check_causality(rules, t)?;
    let mut s = Stepper::new(*rules, state.len())?;
    let mut x = state.clone();
    let mut scratch = ChainState::zeros(state.len());
    for _ in 0..t {
        s.advance(&mut x, &mut scratch);
    }
    Ok(x)
}

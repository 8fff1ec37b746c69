//! Local rules, rule sets and boundary resolution.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Parity of a site's 1-based index.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Parity {
    Odd,
    Even,
}

impl Parity {
    pub fn of_site(i: i64) -> Self {
        if i.rem_euclid(2) == 0 {
            Parity::Even
        } else {
            Parity::Odd
        }
    }

    /// Parity of the site stored at 0-based cell `j`.
    pub fn of_cell(j: usize) -> Self {
        if j % 2 == 1 {
            Parity::Even
        } else {
            Parity::Odd
        }
    }
}

#[inline]
pub fn maj3(a: bool, b: bool, c: bool) -> bool {
    (a & b) | (a & c) | (b & c)
}

/// Stretched two-line-voting rule. `window[4 + d]` holds `x_{i+d}` for
/// `d` in `-4..=4`.
#[inline]
pub fn tlv_local_rule(window: &[bool; 9], parity: Parity) -> bool {
    let x = |d: isize| window[(4 + d) as usize];
    match parity {
        Parity::Even => maj3(x(-1), x(2), x(4)),
        Parity::Odd => maj3(x(1), x(-2), x(-4)),
    }
}

/// GKL ("soldiers") rule. `window[3 + d]` holds `x_{i+d}` for `d` in
/// `-3..=3`; the centre cell selects the direction.
#[inline]
pub fn gkl_local_rule(window: &[bool; 7]) -> bool {
    let x = |d: isize| window[(3 + d) as usize];
    if x(0) {
        maj3(x(0), x(1), x(3))
    } else {
        maj3(x(0), x(-1), x(-3))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum RuleFamily {
    Tlv,
    Gkl,
}

impl RuleFamily {
    pub fn radius(self) -> usize {
        match self {
            RuleFamily::Tlv => 4,
            RuleFamily::Gkl => 3,
        }
    }

    pub fn is_self_dual(self) -> bool {
        matches!(self, RuleFamily::Tlv)
    }
}

/// How sites outside `1..=L` are read.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum BoundaryMode {
    /// Reflection about the outer edge of the first and last cell.
    Mirrored,
    Periodic,
    /// Finite window of an infinite chain. Cells outside read `background`;
    /// evolutions may run at most `padding / R` steps.
    OpenWindow {
        padding: usize,
        background: bool,
    },
}

/// Result of resolving a possibly out-of-range site index.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Resolved {
    /// 1-based site inside the chain.
    Site(usize),
    Background(bool),
}

/// Maps a 1-based site index onto the chain according to `mode`.
pub fn resolve_index(i: i64, len: usize, mode: BoundaryMode) -> Resolved {
    match resolve_cell(i - 1, len, mode) {
        Ok(j) => Resolved::Site(j + 1),
        Err(b) => Resolved::Background(b),
    }
}

/// 0-based variant of [`resolve_index`]: `Ok(cell)` or `Err(background)`.
#[inline]
pub(crate) fn resolve_cell(
    j: i64,
    len: usize,
    mode: BoundaryMode,
) -> std::result::Result<usize, bool> {
    let n = len as i64;
    match mode {
        BoundaryMode::Periodic => Ok(j.rem_euclid(n) as usize),
        BoundaryMode::Mirrored => {
            let mut j = j;
            loop {
                if j < 0 {
                    j = -1 - j;
                } else if j >= n {
                    j = 2 * n - 1 - j;
                } else {
                    return Ok(j as usize);
                }
            }
        }
        BoundaryMode::OpenWindow { background, .. } => {
            if (0..n).contains(&j) {
                Ok(j as usize)
            } else {
                Err(background)
            }
        }
    }
}

/// A rule family bound to a boundary mode.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RuleSet {
    family: RuleFamily,
    boundary: BoundaryMode,
}

impl RuleSet {
    pub fn new(family: RuleFamily, boundary: BoundaryMode) -> Result<Self> {
        if family == RuleFamily::Gkl && boundary == BoundaryMode::Mirrored {
            return Err(Error::UnsupportedBoundary(
                "GKL has no mirrored-boundary form",
            ));
        }
        Ok(Self { family, boundary })
    }

    pub fn tlv(boundary: BoundaryMode) -> Self {
        Self {
            family: RuleFamily::Tlv,
            boundary,
        }
    }

    pub fn tlv_mirrored() -> Self {
        Self::tlv(BoundaryMode::Mirrored)
    }

    pub fn gkl(boundary: BoundaryMode) -> Result<Self> {
        Self::new(RuleFamily::Gkl, boundary)
    }

    pub fn family(&self) -> RuleFamily {
        self.family
    }

    pub fn boundary(&self) -> BoundaryMode {
        self.boundary
    }

    pub fn radius(&self) -> usize {
        self.family.radius()
    }

    /// Checks that a chain of length `len` is compatible with this rule set.
    pub fn check_length(&self, len: usize) -> Result<()> {
        if len < 2 {
            return Err(Error::InvalidLength {
                len,
                reason: "chains need at least two cells",
            });
        }
        if self.family == RuleFamily::Tlv && len % 2 == 1 {
            match self.boundary {
                BoundaryMode::Mirrored => {
                    return Err(Error::InvalidLength {
                        len,
                        reason: "TLV with mirrored boundaries needs an even length",
                    })
                }
                BoundaryMode::Periodic => {
                    return Err(Error::InvalidLength {
                        len,
                        reason: "TLV with periodic boundaries needs an even length",
                    })
                }
                BoundaryMode::OpenWindow { .. } => {}
            }
        }
        Ok(())
    }

    /// Evaluates the rule at 0-based cell `j` by direct per-site lookup.
    pub fn apply_at(&self, state: &crate::bits::BitString, j: usize) -> bool {
        let len = state.len();
        let read = |d: i64| match resolve_cell(j as i64 + d, len, self.boundary) {
            Ok(c) => state.get(c),
            Err(b) => b,
        };
        match self.family {
            RuleFamily::Tlv => {
                let mut w = [false; 9];
                for (k, slot) in w.iter_mut().enumerate() {
                    *slot = read(k as i64 - 4);
                }
                tlv_local_rule(&w, Parity::of_cell(j))
            }
            RuleFamily::Gkl => {
                let mut w = [false; 7];
                for (k, slot) in w.iter_mut().enumerate() {
                    *slot = read(k as i64 - 3);
                }
                gkl_local_rule(&w)
            }
        }
    }
}

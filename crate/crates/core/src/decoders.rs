//! Syndromes, global majority voting and the syndrome-delta automaton.

use serde::{Deserialize, Serialize};

use crate::bits::{words_for, BitString, ChainState, CorrectionMask, Syndrome};
use crate::ca::{resolve_cell, BoundaryMode, RuleFamily, RuleSet};
use crate::error::{Error, Result};

/// Bits at 0-based odd positions, i.e. sites with even 1-based index.
const EVEN_SITES: u64 = 0xAAAA_AAAA_AAAA_AAAA;

/// Bond parities `s_j = x_j XOR x_{j+1}`.
pub fn boundary(x: &ChainState) -> Syndrome {
    boundary_bits(x.bits())
}

pub(crate) fn boundary_bits(x: &BitString) -> Syndrome {
    let len = x.len();
    if len < 2 {
        return Syndrome::zeros(0);
    }
    let w = x.words();
    let n = w.len();
    let words: Vec<u64> = (0..n)
        .map(|k| {
            let next = if k + 1 < n { w[k + 1] << 63 } else { 0 };
            w[k] ^ ((w[k] >> 1) | next)
        })
        .collect();
    Syndrome::from_bits(BitString::from_words(len - 1, words))
}

/// Majority of all cells; a tie (`|x| = L/2`) gives 0.
pub fn majority(x: &ChainState) -> bool {
    2 * x.count_ones() > x.len()
}

/// Inclusive prefix XOR of a bit string, word-parallel.
fn prefix_xor(bits: &BitString) -> BitString {
    let mut carry = 0u64;
    let words: Vec<u64> = bits
        .words()
        .iter()
        .map(|&w| {
            let mut p = w;
            p ^= p << 1;
            p ^= p << 2;
            p ^= p << 4;
            p ^= p << 8;
            p ^= p << 16;
            p ^= p << 32;
            let out = p ^ carry;
            carry = 0u64.wrapping_sub(out >> 63);
            out
        })
        .collect();
    BitString::from_words(bits.len(), words)
}

/// The preimage of `s` whose first cell is 0.
pub fn syndrome_preimage(s: &Syndrome) -> ChainState {
    let len = s.len() + 1;
    let w = s.words();
    let n = words_for(len);
    let shifted: Vec<u64> = (0..n)
        .map(|k| {
            let lo = w.get(k).copied().unwrap_or(0) << 1;
            let carry = if k > 0 {
                w.get(k - 1).copied().unwrap_or(0) >> 63
            } else {
                0
            };
            lo | carry
        })
        .collect();
    ChainState::from_bits(prefix_xor(&BitString::from_words(len, shifted)))
}

/// Global majority decoder: the lighter of the two preimages of `s`.
///
/// For even `L` a tie keeps the preimage whose first cell is 0.
pub fn global_majority_decode(s: &Syndrome) -> CorrectionMask {
    let y = syndrome_preimage(s);
    let len = y.len();
    if 2 * y.count_ones() > len {
        CorrectionMask::from_bits(y.complement().into_bits())
    } else {
        CorrectionMask::from_bits(y.into_bits())
    }
}

/// Flips every cell selected by `mask`.
pub fn apply(x: &ChainState, mask: &CorrectionMask) -> ChainState {
    x.corrected(mask)
}

/// One update expressed on syndromes: the flips `delta` and the resulting
/// syndrome `new_syndrome = boundary(delta) XOR s`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DecodeStep {
    pub delta: CorrectionMask,
    pub new_syndrome: Syndrome,
}

/// Syndromes padded with four bonds on either side, resolved by the boundary.
///
/// Bond `b` sits between cells `b` and `b + 1` and is stored at bit `b + 4`.
fn extended_syndrome(s: &Syndrome, mode: BoundaryMode) -> BitString {
    let len = s.len() + 1;
    let mut ext = BitString::zeros(len + 7);
    let prefix = syndrome_preimage(s);
    let cell = |j: i64| prefix.get(resolve_cell(j, len, mode).expect("closed boundary"));
    ext.or_at(4, s.bits());
    for b in (-4i64..0).chain(len as i64 - 1..len as i64 + 3) {
        ext.set((b + 4) as usize, cell(b) ^ cell(b + 1));
    }
    ext
}

/// One step of a self-dual rule computed from syndromes alone.
///
/// Each site's flip is the rule evaluated on the state relative to that
/// site, `x_k XOR x_i`, which is a running XOR of the syndromes between `k`
/// and `i`. Mirrored edges extend the syndrome by reflection with a zero
/// bond on the mirror itself.
pub fn syndrome_delta_step(s: &Syndrome, rules: &RuleSet) -> Result<DecodeStep> {
    if rules.family() != RuleFamily::Tlv {
        return Err(Error::UnsupportedBoundary(
            "syndrome-delta form needs a self-dual rule",
        ));
    }
    if matches!(rules.boundary(), BoundaryMode::OpenWindow { .. }) {
        return Err(Error::UnsupportedBoundary(
            "syndrome-delta form needs a closed chain",
        ));
    }
    let len = s.len() + 1;
    rules.check_length(len)?;
    let ext = extended_syndrome(s, rules.boundary());
    let n = words_for(len);
    let mut v = vec![vec![0u64; n]; 8];
    for (k, view) in v.iter_mut().enumerate() {
        ext.extract_into(k, len, view);
    }
    // v[k][j] = s_{j + k - 4}
    let at = |d: i64, k: usize| v[(d + 4) as usize][k];
    let mut delta = vec![0u64; n];
    for (k, out) in delta.iter_mut().enumerate() {
        let a = at(-1, k);
        let b = at(0, k) ^ at(1, k);
        let c = b ^ at(2, k) ^ at(3, k);
        let even = (a & b) | (a & c) | (b & c);
        let a = at(0, k);
        let b = at(-1, k) ^ at(-2, k);
        let c = b ^ at(-3, k) ^ at(-4, k);
        let odd = (a & b) | (a & c) | (b & c);
        *out = (even & EVEN_SITES) | (odd & !EVEN_SITES);
    }
    let delta = BitString::from_words(len, delta);
    let mut new_syndrome = boundary_bits(&delta);
    new_syndrome.0.xor_assign(s.bits());
    Ok(DecodeStep {
        delta: CorrectionMask::from_bits(delta),
        new_syndrome,
    })
}

/// Syndromes visible to one site of a D-local decoder.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SyndromeWindow {
    /// Index of the first bond in the slice.
    pub first_bond: usize,
    pub syndrome: Syndrome,
    /// Cell index of the site being decided.
    pub site: usize,
    /// Chain length.
    pub len: usize,
}

/// Runs a decoder whose output at site `i` sees only the bonds touching the
/// clipped neighbourhood `[i - D, i + D]`.
pub fn d_local_decode<F>(s: &Syndrome, d: usize, mut f: F) -> CorrectionMask
where
    F: FnMut(&SyndromeWindow) -> bool,
{
    let len = s.len() + 1;
    let bonds = s.len();
    let mut out = CorrectionMask::zeros(len);
    for i in 0..len {
        let lo = i.saturating_sub(d + 1);
        let hi = (i + d + 1).min(bonds);
        let window = SyndromeWindow {
            first_bond: lo,
            syndrome: Syndrome::from_bits(s.slice(lo, hi.saturating_sub(lo))),
            site: i,
            len,
        };
        if f(&window) {
            out.0.set(i, true);
        }
    }
    out
}

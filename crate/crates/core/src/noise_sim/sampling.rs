//! Bernoulli noise.

use rand::Rng;

use crate::bits::{BitString, ChainState};

/// Below this rate positions are drawn by geometric skipping.
const SKIP_BELOW: f64 = 0.25;

/// `L` independent cells, each 1 with probability `p0`.
pub fn sample_bernoulli<R: Rng + ?Sized>(len: usize, p0: f64, rng: &mut R) -> ChainState {
    let mut bits = BitString::zeros(len);
    fill_bernoulli(&mut bits, p0, rng);
    ChainState::from_bits(bits)
}

pub(crate) fn fill_bernoulli<R: Rng + ?Sized>(bits: &mut BitString, p0: f64, rng: &mut R) {
    let len = bits.len();
    let words = bits.words_mut();
    words.iter_mut().for_each(|w| *w = 0);
    if p0 <= 0.0 {
        return;
    }
    if p0 >= 1.0 {
        words.iter_mut().for_each(|w| *w = u64::MAX);
    } else if p0 == 0.5 {
        words.iter_mut().for_each(|w| *w = rng.random());
    } else if p0 < SKIP_BELOW {
        let log_q = (-p0).ln_1p();
        let mut pos = 0usize;
        loop {
            // 1 - u lies in (0, 1], so the log is finite.
            let u: f64 = 1.0 - rng.random::<f64>();
            let gap = (u.ln() / log_q).floor();
            if gap >= (len - pos) as f64 {
                break;
            }
            pos += gap as usize;
            words[pos / 64] |= 1 << (pos % 64);
            pos += 1;
            if pos >= len {
                break;
            }
        }
    } else {
        for i in 0..len {
            if rng.random::<f64>() < p0 {
                words[i / 64] |= 1 << (i % 64);
            }
        }
    }
    bits.clear_tail();
}

/// Error sites on the window `[1 - h, h]` with `x_i = x_{1-i}`: the right
/// half is sampled and mirrored. Returned sorted.
pub fn sample_mirrored_bernoulli<R: Rng + ?Sized>(
    half_width: usize,
    p0: f64,
    rng: &mut R,
) -> Vec<i64> {
    let right = sample_bernoulli(half_width, p0, rng);
    let mut sites = Vec::with_capacity(2 * right.count_ones());
    for j in right.ones_positions() {
        let i = j as i64 + 1;
        sites.push(i);
        sites.push(1 - i);
    }
    sites.sort_unstable();
    sites
}

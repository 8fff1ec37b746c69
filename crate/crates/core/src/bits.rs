//! Packed bit strings and the three domain types built on them.

use std::fmt;
use std::ops::Deref;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const WORD: usize = 64;

#[inline]
pub(crate) fn words_for(len: usize) -> usize {
    len.div_ceil(WORD)
}

#[inline]
fn tail_mask(len: usize) -> u64 {
    match len % WORD {
        0 => u64::MAX,
        r => (1u64 << r) - 1,
    }
}

/// Fixed-length bit string packed little-endian into `u64` words.
///
/// Bit `i` lives in word `i / 64` at position `i % 64`. Bits past `len` are
/// always zero.
#[derive(Clone, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub struct BitString {
    len: usize,
    words: Vec<u64>,
}

impl BitString {
    pub fn zeros(len: usize) -> Self {
        Self {
            len,
            words: vec![0; words_for(len)],
        }
    }

    pub fn ones(len: usize) -> Self {
        let mut b = Self {
            len,
            words: vec![u64::MAX; words_for(len)],
        };
        b.clear_tail();
        b
    }

    pub fn from_bools(bits: &[bool]) -> Self {
        let mut b = Self::zeros(bits.len());
        for (i, &v) in bits.iter().enumerate() {
            if v {
                b.words[i / WORD] |= 1 << (i % WORD);
            }
        }
        b
    }

    /// Builds a string with ones at the given positions.
    pub fn from_ones(len: usize, ones: &[usize]) -> Self {
        let mut b = Self::zeros(len);
        for &i in ones {
            b.set(i, true);
        }
        b
    }

    /// Builds a string from the low `len` bits of `value`.
    pub fn from_u64(len: usize, value: u64) -> Self {
        assert!(len <= WORD);
        let mut b = Self {
            len,
            words: vec![value; words_for(len)],
        };
        b.clear_tail();
        b
    }

    pub(crate) fn from_words(len: usize, mut words: Vec<u64>) -> Self {
        words.resize(words_for(len), 0);
        let mut b = Self { len, words };
        b.clear_tail();
        b
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.len
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    pub fn words(&self) -> &[u64] {
        &self.words
    }

    #[inline]
    pub(crate) fn words_mut(&mut self) -> &mut [u64] {
        &mut self.words
    }

    #[inline]
    pub(crate) fn clear_tail(&mut self) {
        if let Some(last) = self.words.last_mut() {
            *last &= tail_mask(self.len);
        }
    }

    #[inline]
    pub fn get(&self, i: usize) -> bool {
        assert!(i < self.len, "bit {i} out of range for length {}", self.len);
        (self.words[i / WORD] >> (i % WORD)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, i: usize, v: bool) {
        assert!(i < self.len, "bit {i} out of range for length {}", self.len);
        let m = 1u64 << (i % WORD);
        if v {
            self.words[i / WORD] |= m;
        } else {
            self.words[i / WORD] &= !m;
        }
    }

    #[inline]
    pub fn toggle(&mut self, i: usize) {
        assert!(i < self.len);
        self.words[i / WORD] ^= 1 << (i % WORD);
    }

    pub fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn is_all_ones(&self) -> bool {
        let n = self.words.len();
        if n == 0 {
            return true;
        }
        self.words[..n - 1].iter().all(|&w| w == u64::MAX)
            && self.words[n - 1] == tail_mask(self.len)
    }

    pub fn xor_assign(&mut self, other: &BitString) {
        assert_eq!(self.len, other.len, "xor of strings with different lengths");
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a ^= *b;
        }
    }

    pub fn xor(&self, other: &BitString) -> BitString {
        let mut out = self.clone();
        out.xor_assign(other);
        out
    }

    pub fn complement(&self) -> BitString {
        let mut out = self.clone();
        for w in &mut out.words {
            *w = !*w;
        }
        out.clear_tail();
        out
    }

    /// Positions of the set bits in increasing order.
    pub fn ones_positions(&self) -> Vec<usize> {
        let mut out = Vec::with_capacity(self.count_ones());
        for (wi, &w) in self.words.iter().enumerate() {
            let mut w = w;
            while w != 0 {
                let b = w.trailing_zeros() as usize;
                out.push(wi * WORD + b);
                w &= w - 1;
            }
        }
        out
    }

    pub fn iter(&self) -> impl Iterator<Item = bool> + '_ {
        (0..self.len).map(move |i| self.get(i))
    }

    pub fn to_bools(&self) -> Vec<bool> {
        self.iter().collect()
    }

    /// Copies `len` bits starting at bit `start` into `dst`, which must hold
    /// `words_for(len)` words. Bits of `dst` past `len` are cleared.
    pub(crate) fn extract_into(&self, start: usize, len: usize, dst: &mut [u64]) {
        debug_assert!(start + len <= self.len);
        let shift = start % WORD;
        let base = start / WORD;
        let n = words_for(len);
        for (k, d) in dst.iter_mut().enumerate().take(n) {
            let lo = self.words.get(base + k).copied().unwrap_or(0);
            *d = if shift == 0 {
                lo
            } else {
                let hi = self.words.get(base + k + 1).copied().unwrap_or(0);
                (lo >> shift) | (hi << (WORD - shift))
            };
        }
        if n > 0 {
            dst[n - 1] &= tail_mask(len);
        }
    }

    /// Returns bits `[start, start + len)` as a new string.
    pub fn slice(&self, start: usize, len: usize) -> BitString {
        assert!(start + len <= self.len, "slice out of range");
        let mut out = BitString::zeros(len);
        self.extract_into(start, len, &mut out.words);
        out
    }

    /// ORs `src` into this string starting at bit `start`.
    pub(crate) fn or_at(&mut self, start: usize, src: &BitString) {
        assert!(start + src.len <= self.len);
        let shift = start % WORD;
        let base = start / WORD;
        for (k, &w) in src.words.iter().enumerate() {
            self.words[base + k] |= w << shift;
            if shift != 0 && base + k + 1 < self.words.len() {
                self.words[base + k + 1] |= w >> (WORD - shift);
            }
        }
    }

    /// Writes `src` into this string starting at bit `start`.
    pub fn write_at(&mut self, start: usize, src: &BitString) {
        assert!(start + src.len <= self.len);
        let shift = start % WORD;
        let base = start / WORD;
        if shift == 0 {
            let n = src.words.len();
            for k in 0..n {
                let keep = if k + 1 == n { !tail_mask(src.len) } else { 0 };
                self.words[base + k] = (self.words[base + k] & keep) | src.words[k];
            }
            return;
        }
        for i in 0..src.len {
            self.set(start + i, src.get(i));
        }
    }
}

impl fmt::Display for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in self.iter() {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl fmt::Debug for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitString(\"{self}\")")
    }
}

impl FromStr for BitString {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bits = s
            .chars()
            .filter(|c| !c.is_whitespace() && *c != '_')
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                other => Err(Error::Parse(format!(
                    "unexpected character {other:?} in bit string"
                ))),
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self::from_bools(&bits))
    }
}

macro_rules! bit_newtype {
    ($(#[$meta:meta])* $name:ident) => {
        $(#[$meta])*
        #[derive(Clone, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
        #[serde(transparent)]
        pub struct $name(pub(crate) BitString);

        impl $name {
            pub fn zeros(len: usize) -> Self {
                Self(BitString::zeros(len))
            }

            pub fn ones(len: usize) -> Self {
                Self(BitString::ones(len))
            }

            pub fn from_bools(bits: &[bool]) -> Self {
                Self(BitString::from_bools(bits))
            }

            pub fn from_ones(len: usize, ones: &[usize]) -> Self {
                Self(BitString::from_ones(len, ones))
            }

            pub fn from_bits(bits: BitString) -> Self {
                Self(bits)
            }

            pub fn bits(&self) -> &BitString {
                &self.0
            }

            pub fn into_bits(self) -> BitString {
                self.0
            }

            pub fn xor(&self, other: &Self) -> Self {
                Self(self.0.xor(&other.0))
            }

            pub fn complement(&self) -> Self {
                Self(self.0.complement())
            }

            /// Copy with bit `i` toggled.
            pub fn with_toggled(&self, i: usize) -> Self {
                let mut b = self.0.clone();
                b.toggle(i);
                Self(b)
            }
        }

        impl Deref for $name {
            type Target = BitString;

            fn deref(&self) -> &BitString {
                &self.0
            }
        }

        impl From<BitString> for $name {
            fn from(b: BitString) -> Self {
                Self(b)
            }
        }

        impl FromStr for $name {
            type Err = Error;

            fn from_str(s: &str) -> Result<Self> {
                s.parse().map(Self)
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                fmt::Display::fmt(&self.0, f)
            }
        }

        impl fmt::Debug for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                write!(f, concat!(stringify!($name), "(\"{}\")"), self.0)
            }
        }
    };
}

bit_newtype!(
    /// Binary configuration of an `L`-cell chain. Cell `j` (0-based) is the
    /// site with 1-based index `j + 1`.
    ChainState
);

bit_newtype!(
    /// Bond parities `s_j = x_j XOR x_{j+1}` of a chain, length `L - 1`.
    Syndrome
);

bit_newtype!(
    /// Cells a decoder proposes to flip, length `L`.
    CorrectionMask
);

impl ChainState {
    /// Applies a correction in place of a copy.
    pub fn corrected(&self, c: &CorrectionMask) -> ChainState {
        ChainState(self.0.xor(&c.0))
    }

    pub fn xor_mask(&self, c: &CorrectionMask) -> ChainState {
        self.corrected(c)
    }
}

impl CorrectionMask {
    pub fn as_state(&self) -> ChainState {
        ChainState(self.0.clone())
    }
}

//! Per-trial random streams keyed by `(seed, point, trial)`.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Generator type used for every trial.
pub type TrialRng = ChaCha8Rng;

#[inline]
fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9E37_79B9_7F4A_7C15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Independent stream for one trial. The stream depends only on the key,
/// so trials can run in any order or on any thread.
pub fn trial_rng(seed: u64, point: u64, trial: u64) -> TrialRng {
    let mut state = seed;
    let a = splitmix64(&mut state);
    let mut state = a ^ point.wrapping_mul(0xD6E8_FEB8_6659_FD93);
    let b = splitmix64(&mut state);
    let mut state = b ^ trial.wrapping_mul(0xA076_1D64_78BD_642F);
    let mut key = [0u8; 32];
    for chunk in key.chunks_mut(8) {
        chunk.copy_from_slice(&splitmix64(&mut state).to_le_bytes());
    }
    ChaCha8Rng::from_seed(key)
}

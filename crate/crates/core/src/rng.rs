//! Counter-addressed uniform variates.
//!
//! Each slot draws exactly [`DRAWS_PER_SLOT`] variates, and the variate for
//! `(seed, t, draw)` sits at a fixed offset of the ChaCha8 keystream for
//! `seed`. The value therefore depends only on that triple, not on how many
//! other streams are running or in which order they were consumed.

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

pub const DRAWS_PER_SLOT: u64 = 2;
/// Draw index of the arrival variate within a slot.
pub const ARRIVAL_DRAW: u64 = 0;
/// Draw index of the capacity variate within a slot.
pub const CAPACITY_DRAW: u64 = 1;

#[derive(Debug, Clone)]
pub struct SlotRng {
    inner: ChaCha8Rng,
    // keystream position in 32-bit words
    word_pos: u128,
}

impl SlotRng {
    pub fn new(seed: u64) -> Self {
        Self {
            inner: ChaCha8Rng::seed_from_u64(seed),
            word_pos: 0,
        }
    }

    /// Uniform variate in `[0, 1)` for slot `t >= 1` and `draw < DRAWS_PER_SLOT`.
    pub fn uniform(&mut self, t: u64, draw: u64) -> f64 {
        debug_assert!(t >= 1 && draw < DRAWS_PER_SLOT);
        let pos = (u128::from(t - 1) * u128::from(DRAWS_PER_SLOT) + u128::from(draw)) * 2;
        if pos != self.word_pos {
            self.inner.set_word_pos(pos);
        }
        let bits = self.inner.next_u64();
        self.word_pos = pos + 2;
        (bits >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }
}

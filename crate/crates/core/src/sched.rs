//! Phase layout of the mesh-refining policy.
//!
//! Phase `l >= 1` lasts `T_l = 2^(l+2)` slots and uses the rate grid
//! `{k / d_l : k = 1..d_l}` with `d_l = ceil(C T_l^(1/2 - delta))`. Phase `l`
//! occupies slots `T_l^sum + 1 ..= T_l^sum + T_l`, where
//! `T_l^sum = sum_{i<l} T_i = 2^(l+2) - 8`.

use crate::error::{Error, Result};
use crate::float::guarded_ceil;

/// Largest phase index whose length fits in a `u64` with room for sums.
pub const MAX_PHASE: u32 = 60;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseSchedule {
    c: f64,
    delta: f64,
}

/// First phase whose grid is fine enough for a given slack.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StablePhase {
    /// `b = min{l : d_l >= gamma / eps}`
    pub phase: u32,
    /// `T_b^sum`, the number of slots before phase `b` starts.
    pub slots_before: u64,
    /// `2 (gamma / (eps C))^(2 / (1 - 2 delta))`, which `slots_before` stays below.
    pub slots_bound: f64,
}

impl PhaseSchedule {
    pub fn new(c: f64, delta: f64) -> Result<Self> {
        if !(c > 0.0 && c < 1.0) {
            return Err(Error::Domain {
                name: "C",
                value: c,
                range: "(0, 1)",
            });
        }
        if !(delta > 0.0 && delta < 0.5) {
            return Err(Error::Domain {
                name: "delta",
                value: delta,
                range: "(0, 1/2)",
            });
        }
        Ok(Self { c, delta })
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    /// `d_l = ceil(C T_l^(1/2 - delta))`, at least 1.
    pub fn grid_size(&self, l: u32) -> Result<usize> {
        let len = phase_length(l)? as f64;
        let d = guarded_ceil(self.c * libm::pow(len, 0.5 - self.delta));
        Ok((d as usize).max(1))
    }

    /// Smallest `l` with `d_l >= gamma / eps`.
    pub fn first_stable_phase(&self, epsilon: f64, gamma: f64) -> Result<StablePhase> {
        if !(epsilon > 0.0 && epsilon <= 1.0) {
            return Err(Error::Domain {
                name: "epsilon",
                value: epsilon,
                range: "(0, 1]",
            });
        }
        if !(gamma > 1.0 && gamma.is_finite()) {
            return Err(Error::Domain {
                name: "gamma",
                value: gamma,
                range: "(1, inf)",
            });
        }
        let target = gamma / epsilon;
        for l in 1..=MAX_PHASE {
            if self.grid_size(l)? as f64 >= target {
                return Ok(StablePhase {
                    phase: l,
                    slots_before: phase_start(l)?,
                    slots_bound: 2.0
                        * libm::pow(gamma / (epsilon * self.c), 2.0 / (1.0 - 2.0 * self.delta)),
                });
            }
        }
        Err(Error::Config(alloc::format!(
            "no phase up to {MAX_PHASE} reaches a grid of {target} levels"
        )))
    }
}

/// `T_l = 2^(l+2)` for `l` in `1..=60`.
pub fn phase_length(l: u32) -> Result<u64> {
    if l == 0 || l > MAX_PHASE {
        return Err(Error::Domain {
            name: "phase",
            value: f64::from(l),
            range: "1..=60",
        });
    }
    Ok(1u64 << (l + 2))
}

/// `T_l^sum = 2^(l+2) - 8`, the last slot of phase `l - 1` (0 for `l = 1`).
pub fn phase_start(l: u32) -> Result<u64> {
    Ok(phase_length(l)? - 8)
}

/// Phase `l = a(t)` holding slot `t >= 1`, and the position `u` in `1..=T_l` within it.
pub fn phase_of(t: u64) -> Result<(u32, u64)> {
    if t == 0 || t > phase_start(MAX_PHASE)? + phase_length(MAX_PHASE)? {
        return Err(Error::Domain {
            name: "t",
            value: t as f64,
            range: "1..=2^63-8",
        });
    }
    // smallest l with 2^(l+3) >= t + 8
    let m = t + 8;
    let bits = 64 - (m - 1).leading_zeros();
    let l = bits.saturating_sub(3).max(1);
    Ok((l, t - phase_start(l)?))
}

use alloc::vec::Vec;

use super::{argmax_first, ArmStats, Clock, RatePolicy};
use crate::error::{Error, Result};
use crate::float::guarded_ceil;

/// UCB1 over the rate grid `{1/d, ..., 1}`.
///
/// Slots `1..=d` play level `t` once each; afterwards level `k` has index
/// `mean_k + sqrt(2 ln t / N_k)` and the largest index is played, lowest level
/// on ties.
#[derive(Debug, Clone)]
pub struct Ucb1Policy {
    arms: Vec<ArmStats>,
    clock: Clock,
}

impl Ucb1Policy {
    pub fn new(levels: usize) -> Result<Self> {
        if levels == 0 {
            return Err(Error::Domain {
                name: "d",
                value: 0.0,
                range: "[1, inf)",
            });
        }
        Ok(Self {
            arms: alloc::vec![ArmStats::fresh(f64::INFINITY); levels],
            clock: Clock::default(),
        })
    }

    /// Grid `d = ceil(3 / eps)` for a known slack.
    pub fn known_eps(epsilon: f64) -> Result<Self> {
        if !(epsilon > 0.0 && epsilon <= 1.0) {
            return Err(Error::Domain {
                name: "epsilon",
                value: epsilon,
                range: "(0, 1]",
            });
        }
        Self::new(known_eps_levels(epsilon))
    }

    pub fn levels(&self) -> usize {
        self.arms.len()
    }

    pub fn arms(&self) -> &[ArmStats] {
        &self.arms
    }

    /// Pull counts `N_k(t)` at index `k - 1`.
    pub fn counts(&self) -> Vec<u64> {
        self.arms.iter().map(|a| a.n).collect()
    }
}

/// `ceil(3 / eps)`.
pub fn known_eps_levels(epsilon: f64) -> usize {
    guarded_ceil(3.0 / epsilon) as usize
}

impl RatePolicy for Ucb1Policy {
    fn choose(&mut self, t: u64) -> Result<f64> {
        self.clock.begin(t)?;
        let d = self.arms.len();
        let arm = if t as usize <= d {
            t as usize - 1
        } else {
            let log_t = 2.0 * libm::log(t as f64);
            for a in &mut self.arms {
                a.ucb = a.mean + libm::sqrt(log_t / a.n as f64);
            }
            argmax_first(self.arms.iter().map(|a| a.ucb))
        };
        self.clock.commit(t, arm);
        Ok((arm + 1) as f64 / d as f64)
    }

    fn observe(&mut self, t: u64, ack: bool, _arrival: f64) -> Result<()> {
        let arm = self.clock.finish(t)?;
        let rate = (arm + 1) as f64 / self.arms.len() as f64;
        self.arms[arm].record(if ack { rate } else { 0.0 });
        Ok(())
    }
}

//! Rate selection policies.
//!
//! Every policy follows the same per-slot protocol: [`RatePolicy::choose`] for
//! slot `t`, then exactly one [`RatePolicy::observe`] with the ACK bit and the
//! slot's arrival. Policies never see the queue length or the capacity.

mod baseline;
mod phased;
mod ucb1;

use alloc::boxed::Box;
use alloc::vec::Vec;

pub use baseline::{FixedRatePolicy, OracleGridPolicy};
pub use phased::PhasedUcbPolicy;
pub use ucb1::Ucb1Policy;

use crate::dists::Environment;
use crate::error::{Error, Result};
use crate::sched::PhaseSchedule;

pub trait RatePolicy {
    /// Rate for slot `t`; `t` must be one past the last slot chosen.
    fn choose(&mut self, t: u64) -> Result<f64>;

    /// Feedback for the slot just chosen.
    fn observe(&mut self, t: u64, ack: bool, arrival: f64) -> Result<()>;

    /// Statistics of a phase that the last `observe` closed, if any.
    fn take_completed_phase(&mut self) -> Option<PhaseRecord> {
        None
    }

    /// Statistics of the phase in progress, if it has started but not finished.
    fn open_phase(&self) -> Option<PhaseRecord> {
        None
    }
}

/// Learning state of one rate level.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ArmStats {
    /// Pulls so far.
    pub n: u64,
    /// Empirical mean service.
    pub mean: f64,
    /// Current index.
    pub ucb: f64,
    total: f64,
}

impl ArmStats {
    pub(crate) fn fresh(ucb: f64) -> Self {
        Self {
            n: 0,
            mean: 0.0,
            ucb,
            total: 0.0,
        }
    }

    pub(crate) fn record(&mut self, service: f64) {
        self.n += 1;
        self.total += service;
        self.mean = self.total / self.n as f64;
    }
}

/// Lowest index attaining the maximum.
pub(crate) fn argmax_first(values: impl Iterator<Item = f64>) -> usize {
    let mut best = 0;
    let mut best_value = f64::NEG_INFINITY;
    for (i, v) in values.enumerate() {
        if v > best_value {
            best = i;
            best_value = v;
        }
    }
    best
}

/// Per-phase arm usage of the phased policy.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseRecord {
    pub phase: u32,
    pub length: u64,
    pub levels: usize,
    /// Pulls of level `k` at index `k - 1`.
    pub counts: Vec<u64>,
}

/// Buildable description of a policy.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PolicySpec {
    FixedRate {
        rate: f64,
    },
    /// Always plays the best level of the `d`-grid, computed from the true `g`.
    OracleGrid {
        levels: usize,
    },
    /// UCB1 on the grid `ceil(3 / eps)`.
    Ucb1KnownEps {
        epsilon: f64,
    },
    /// UCB1 on an explicit `d`-grid.
    Ucb1 {
        levels: usize,
    },
    PhasedUcb {
        c: f64,
        delta: f64,
    },
}

impl PolicySpec {
    pub fn build(&self, env: &Environment) -> Result<Box<dyn RatePolicy + Send>> {
        Ok(match *self {
            Self::FixedRate { rate } => Box::new(FixedRatePolicy::new(rate)?),
            Self::OracleGrid { levels } => Box::new(OracleGridPolicy::new(env, levels)?),
            Self::Ucb1KnownEps { epsilon } => Box::new(Ucb1Policy::known_eps(epsilon)?),
            Self::Ucb1 { levels } => Box::new(Ucb1Policy::new(levels)?),
            Self::PhasedUcb { c, delta } => {
                Box::new(PhasedUcbPolicy::new(PhaseSchedule::new(c, delta)?))
            }
        })
    }

    pub fn name(&self) -> &'static str {
        match self {
            Self::FixedRate { .. } => "fixed-rate",
            Self::OracleGrid { .. } => "oracle-grid",
            Self::Ucb1KnownEps { .. } => "ucb1-known-eps",
            Self::Ucb1 { .. } => "ucb1",
            Self::PhasedUcb { .. } => "phased-ucb",
        }
    }
}

/// Shared slot bookkeeping: enforces the choose/observe alternation.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub(crate) struct Clock {
    last: u64,
    pending: Option<usize>,
}

impl Clock {
    pub(crate) fn begin(&self, t: u64) -> Result<()> {
        if self.pending.is_some() {
            return Err(Error::Contract(alloc::format!(
                "choose({t}) before observe({})",
                self.last
            )));
        }
        if t != self.last + 1 {
            return Err(Error::Contract(alloc::format!(
                "choose({t}) but the next slot is {}",
                self.last + 1
            )));
        }
        Ok(())
    }

    pub(crate) fn commit(&mut self, t: u64, arm: usize) {
        self.last = t;
        self.pending = Some(arm);
    }

    pub(crate) fn finish(&mut self, t: u64) -> Result<usize> {
        match self.pending {
            Some(arm) if t == self.last => {
                self.pending = None;
                Ok(arm)
            }
            Some(_) => Err(Error::Contract(alloc::format!(
                "observe({t}) but slot {} is pending",
                self.last
            ))),
            None => Err(Error::Contract(alloc::format!(
                "observe({t}) without choose"
            ))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn argmax_breaks_ties_low() {
        assert_eq!(argmax_first([1.0, 3.0, 3.0, 2.0].into_iter()), 1);
        assert_eq!(argmax_first([2.0; 4].into_iter()), 0);
    }

    #[test]
    fn clock_enforces_alternation() {
        let mut clock = Clock::default();
        assert!(clock.finish(1).is_err());
        assert!(clock.begin(2).is_err());
        clock.begin(1).unwrap();
        clock.commit(1, 0);
        assert!(clock.begin(2).is_err());
        assert!(clock.finish(2).is_err());
        assert_eq!(clock.finish(1).unwrap(), 0);
        clock.begin(2).unwrap();
    }

    proptest! {
        #[test]
        fn argmax_invariant_under_shift(
            values in proptest::collection::vec(-5.0..5.0f64, 1..40),
            shift in -3.0..3.0f64,
        ) {
            // shifts representable without rounding keep the order exact
            let shift = (shift * 8.0).round() / 8.0;
            let values: Vec<f64> = values.iter().map(|v| (v * 8.0).round() / 8.0).collect();
            prop_assert_eq!(
                argmax_first(values.iter().copied()),
                argmax_first(values.iter().map(|v| v + shift))
            );
        }
    }
}

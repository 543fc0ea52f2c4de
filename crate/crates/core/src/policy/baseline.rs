use super::{Clock, RatePolicy};
use crate::dists::Environment;
use crate::error::{check_unit, Error, Result};

/// Always plays the same rate.
#[derive(Debug, Clone)]
pub struct FixedRatePolicy {
    rate: f64,
    clock: Clock,
}

impl FixedRatePolicy {
    pub fn new(rate: f64) -> Result<Self> {
        Ok(Self {
            rate: check_unit("rate", rate)?,
            clock: Clock::default(),
        })
    }
}

impl RatePolicy for FixedRatePolicy {
    fn choose(&mut self, t: u64) -> Result<f64> {
        self.clock.begin(t)?;
        self.clock.commit(t, 0);
        Ok(self.rate)
    }

    fn observe(&mut self, t: u64, _ack: bool, _arrival: f64) -> Result<()> {
        self.clock.finish(t).map(|_| ())
    }
}

/// Plays `k*/d` where `k*` maximizes the true `g` over the `d`-grid.
#[derive(Debug, Clone)]
pub struct OracleGridPolicy {
    level: usize,
    levels: usize,
    clock: Clock,
}

impl OracleGridPolicy {
    pub fn new(env: &Environment, levels: usize) -> Result<Self> {
        if levels == 0 {
            return Err(Error::Domain {
                name: "d",
                value: 0.0,
                range: "[1, inf)",
            });
        }
        let (level, _) = env.best_grid_level(levels);
        Ok(Self {
            level,
            levels,
            clock: Clock::default(),
        })
    }

    pub fn rate(&self) -> f64 {
        self.level as f64 / self.levels as f64
    }
}

impl RatePolicy for OracleGridPolicy {
    fn choose(&mut self, t: u64) -> Result<f64> {
        self.clock.begin(t)?;
        self.clock.commit(t, self.level - 1);
        Ok(self.rate())
    }

    fn observe(&mut self, t: u64, _ack: bool, _arrival: f64) -> Result<()> {
        self.clock.finish(t).map(|_| ())
    }
}

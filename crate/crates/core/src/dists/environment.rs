use super::{ArrivalDistribution, CapacityDistribution, ConverseFamily};
use crate::error::{Error, Result};
use crate::float::guarded_ceil;

/// Description of an environment to build.
#[derive(Debug, Clone, PartialEq)]
pub enum EnvSpec {
    /// Worst-case family member `k` with Bernoulli(1/2) arrivals; `k = 0` is
    /// the unstabilizable Environment 0.
    Converse { epsilon: f64, k: usize },
    Custom {
        arrivals: ArrivalDistribution,
        capacity: CapacityDistribution,
    },
}

/// Arrival law, capacity law and the derived quantities `lambda`, `r*`, `g*`
/// and slack `g* - lambda`.
#[derive(Debug, Clone, PartialEq)]
pub struct Environment {
    pub arrivals: ArrivalDistribution,
    pub capacity: CapacityDistribution,
    pub lambda: f64,
    pub r_star: f64,
    pub g_star: f64,
    pub slack: f64,
}

impl Environment {
    pub fn new(arrivals: ArrivalDistribution, capacity: CapacityDistribution) -> Self {
        let lambda = arrivals.mean();
        let (r_star, g_star) = capacity.maximizer();
        let slack = match capacity {
            // keep the slack bit-exact for the constructed families
            CapacityDistribution::Converse(law) if lambda == 0.5 => law.epsilon,
            CapacityDistribution::TruncatedReciprocal { epsilon } if lambda == 0.5 => -epsilon,
            _ => g_star - lambda,
        };
        Self {
            arrivals,
            capacity,
            lambda,
            r_star,
            g_star,
            slack,
        }
    }

    pub fn is_stabilizable(&self) -> bool {
        self.slack > 0.0
    }

    /// `g(r)` for `r` in `[0, 1]`.
    pub fn g(&self, r: f64) -> Result<f64> {
        self.capacity.g(r)
    }

    /// Best level `k*` on the grid `{1/d, ..., 1}` and `g(k*/d)`, smallest `k` on ties.
    pub fn best_grid_level(&self, d: usize) -> (usize, f64) {
        let mut best = (1, self.capacity.g_unchecked(1.0 / d as f64));
        for k in 2..=d {
            let value = self.capacity.g_unchecked(k as f64 / d as f64);
            if value > best.1 {
                best = (k, value);
            }
        }
        best
    }

    /// Mesh `ceil(gamma / slack)` for which some grid level keeps a
    /// `(gamma - 1) / gamma` fraction of the slack.
    pub fn grid_for(&self, gamma: f64) -> Result<usize> {
        if !self.is_stabilizable() {
            return Err(Error::Config("environment has no positive slack".into()));
        }
        Ok(guarded_ceil(gamma / self.slack) as usize)
    }
}

/// Builds an environment and fills in its derived quantities.
pub fn make_environment(spec: &EnvSpec) -> Result<Environment> {
    match spec {
        EnvSpec::Converse { epsilon, k } => {
            let arrivals = ArrivalDistribution::bernoulli(0.5)?;
            let family = ConverseFamily::extended(*epsilon)?;
            let capacity = if *k == 0 {
                CapacityDistribution::truncated_reciprocal(*epsilon)?
            } else {
                CapacityDistribution::Converse(family.law(*k)?)
            };
            Ok(Environment::new(arrivals, capacity))
        }
        EnvSpec::Custom { arrivals, capacity } => {
            Ok(Environment::new(arrivals.clone(), capacity.clone()))
        }
    }
}

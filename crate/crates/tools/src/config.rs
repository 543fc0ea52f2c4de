//! Run configuration: a TOML document with a `schema` version.
//!
//! ```toml
//! schema = 1
//! horizon = 1000000
//! seeds = [1, 2, 3, 4, 5]
//! record_stride = 1000
//!
//! [environment]
//! family = "converse"
//! epsilon = "1/144"
//! k = 1
//!
//! [policy]
//! kind = "phased-ucb"
//! c = 0.04
//! delta = "1/6"
//! ```

use std::fmt;
use std::path::Path;

use rateq_core::dists::{
    make_environment, ArrivalDistribution, CapacityDistribution, EnvSpec, Environment,
};
use rateq_core::policy::PolicySpec;
use rateq_core::sim::SimConfig;
use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};

pub const SCHEMA: u32 = 1;

/// A number written either as a TOML number or as a `"p/q"` string.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Real {
    Number(f64),
    Text(String),
}

impl Real {
    pub fn value(&self) -> std::result::Result<f64, String> {
        match self {
            Self::Number(x) => Ok(*x),
            Self::Text(s) => parse_real(s),
        }
    }
}

impl From<f64> for Real {
    fn from(x: f64) -> Self {
        Self::Number(x)
    }
}

impl fmt::Display for Real {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Number(x) => write!(f, "{x}"),
            Self::Text(s) => f.write_str(s),
        }
    }
}

/// Parses `"0.25"` or `"1/144"`.
pub fn parse_real(s: &str) -> std::result::Result<f64, String> {
    let s = s.trim();
    let parse = |t: &str| {
        t.trim()
            .parse::<f64>()
            .map_err(|_| format!("`{s}` is not a number or fraction"))
    };
    let x = match s.split_once('/') {
        Some((n, d)) => parse(n)? / parse(d)?,
        None => parse(s)?,
    };
    if x.is_finite() {
        Ok(x)
    } else {
        Err(format!("`{s}` is not finite"))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    pub schema: u32,
    pub horizon: u64,
    pub seeds: Vec<u64>,
    #[serde(default = "default_stride")]
    pub record_stride: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub environment: Option<EnvironmentConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub policy: Option<PolicyConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepConfig>,
}

fn default_stride() -> u64 {
    1
}

fn default_k() -> usize {
    1
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "kebab-case", deny_unknown_fields)]
pub enum EnvironmentConfig {
    /// Member `k >= 1` of the worst-case family with Bernoulli(1/2) arrivals.
    Converse { epsilon: Real, k: usize },
    /// The unstabilizable base environment of the family.
    Env0 { epsilon: Real },
    Custom {
        arrivals: ArrivalConfig,
        capacity: CapacityConfig,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum ArrivalConfig {
    Bernoulli {
        lambda: Real,
    },
    /// `atoms = [[value, probability], ...]`
    Finite {
        atoms: Vec<(f64, f64)>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum CapacityConfig {
    Uniform,
    Point { value: Real },
    Finite { atoms: Vec<(f64, f64)> },
    TruncatedReciprocal { epsilon: Real },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum PolicyConfig {
    FixedRate {
        rate: Real,
    },
    /// `levels` defaults to `ceil(3 / slack)`.
    OracleGrid {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        levels: Option<usize>,
    },
    /// `epsilon` defaults to the environment's slack.
    Ucb1KnownEps {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        epsilon: Option<Real>,
    },
    Ucb1 {
        levels: usize,
    },
    PhasedUcb {
        c: Real,
        delta: Real,
    },
}

/// Grid of converse environments crossed with a list of policies.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub epsilons: Vec<Real>,
    #[serde(default = "default_k")]
    pub k: usize,
    pub policies: Vec<PolicyConfig>,
}

impl Config {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(CliError::io(path))?;
        let cfg: Self = toml::from_str(&text).map_err(|e| CliError::Config {
            path: path.to_owned(),
            message: e.to_string(),
        })?;
        cfg.validate().map_err(|message| CliError::Config {
            path: path.to_owned(),
            message,
        })?;
        Ok(cfg)
    }

    pub fn validate(&self) -> std::result::Result<(), String> {
        if self.schema != SCHEMA {
            return Err(format!(
                "unsupported schema {} (expected {SCHEMA})",
                self.schema
            ));
        }
        if self.horizon == 0 {
            return Err("horizon must be at least 1".into());
        }
        if self.record_stride == 0 {
            return Err("record_stride must be at least 1".into());
        }
        if self.seeds.is_empty() {
            return Err("seeds must not be empty".into());
        }
        if let Some(sweep) = &self.sweep {
            if sweep.epsilons.is_empty() {
                return Err("sweep.epsilons must not be empty".into());
            }
            if sweep.policies.is_empty() {
                return Err("sweep.policies must not be empty".into());
            }
        }
        Ok(())
    }

    pub fn sim_config(&self) -> Result<SimConfig> {
        Ok(SimConfig::new(self.horizon, self.record_stride)?)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }
}

fn real(x: &Real, what: &str) -> Result<f64> {
    x.value()
        .map_err(|m| CliError::Usage(format!("{what}: {m}")))
}

impl EnvironmentConfig {
    pub fn spec(&self) -> Result<EnvSpec> {
        Ok(match self {
            Self::Converse { epsilon, k } => {
                if *k == 0 {
                    return Err(CliError::Usage(
                        "environment.k must be at least 1; use family = \"env0\" for k = 0".into(),
                    ));
                }
                EnvSpec::Converse {
                    epsilon: real(epsilon, "environment.epsilon")?,
                    k: *k,
                }
            }
            Self::Env0 { epsilon } => EnvSpec::Converse {
                epsilon: real(epsilon, "environment.epsilon")?,
                k: 0,
            },
            Self::Custom { arrivals, capacity } => EnvSpec::Custom {
                arrivals: match arrivals {
                    ArrivalConfig::Bernoulli { lambda } => {
                        ArrivalDistribution::bernoulli(real(lambda, "arrivals.lambda")?)?
                    }
                    ArrivalConfig::Finite { atoms } => ArrivalDistribution::finite(atoms)?,
                },
                capacity: match capacity {
                    CapacityConfig::Uniform => CapacityDistribution::Uniform01,
                    CapacityConfig::Point { value } => {
                        CapacityDistribution::point_mass(real(value, "capacity.value")?)?
                    }
                    CapacityConfig::Finite { atoms } => CapacityDistribution::finite(atoms)?,
                    CapacityConfig::TruncatedReciprocal { epsilon } => {
                        CapacityDistribution::truncated_reciprocal(real(
                            epsilon,
                            "capacity.epsilon",
                        )?)?
                    }
                },
            },
        })
    }

    pub fn build(&self) -> Result<Environment> {
        Ok(make_environment(&self.spec()?)?)
    }

    pub fn describe(&self) -> String {
        match self {
            Self::Converse { epsilon, k } => format!("converse epsilon={epsilon} k={k}"),
            Self::Env0 { epsilon } => format!("env0 epsilon={epsilon}"),
            Self::Custom { .. } => "custom".into(),
        }
    }
}

impl PolicyConfig {
    pub fn name(&self) -> &'static str {
        match self {
            Self::FixedRate { .. } => "fixed-rate",
            Self::OracleGrid { .. } => "oracle-grid",
            Self::Ucb1KnownEps { .. } => "ucb1-known-eps",
            Self::Ucb1 { .. } => "ucb1",
            Self::PhasedUcb { .. } => "phased-ucb",
        }
    }

    /// Fills defaults that depend on the environment.
    pub fn resolve(&self, env: &Environment) -> Result<PolicySpec> {
        let needs_slack = || {
            if env.is_stabilizable() {
                Ok(env.slack)
            } else {
                Err(CliError::Usage(format!(
                    "policy {} needs a stabilizable environment to pick its grid (slack = {})",
                    self.name(),
                    env.slack
                )))
            }
        };
        Ok(match self {
            Self::FixedRate { rate } => PolicySpec::FixedRate {
                rate: real(rate, "policy.rate")?,
            },
            Self::OracleGrid { levels } => PolicySpec::OracleGrid {
                levels: match levels {
                    Some(d) => *d,
                    None => {
                        needs_slack()?;
                        env.grid_for(3.0)?
                    }
                },
            },
            Self::Ucb1KnownEps { epsilon } => PolicySpec::Ucb1KnownEps {
                epsilon: match epsilon {
                    Some(e) => real(e, "policy.epsilon")?,
                    None => needs_slack()?,
                },
            },
            Self::Ucb1 { levels } => PolicySpec::Ucb1 { levels: *levels },
            Self::PhasedUcb { c, delta } => PolicySpec::PhasedUcb {
                c: real(c, "policy.c")?,
                delta: real(delta, "policy.delta")?,
            },
        })
    }
}

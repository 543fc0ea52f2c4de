//! Capacity and arrival laws, the service curve `g`, and environments.
//!
//! All tail probabilities are closed-form per family. Nothing here is derived
//! from a tabulated or sampled CDF, so `g` is exact at atoms (a transmission at
//! exactly the capacity succeeds).

mod arrival;
mod capacity;
mod converse;
mod environment;
mod finite;
mod verify;

pub use arrival::ArrivalDistribution;
pub use capacity::CapacityDistribution;
pub use converse::{ConverseFamily, ConverseLaw, MIN_CONVERSE_EPSILON};
pub use environment::{make_environment, EnvSpec, Environment};
pub use finite::FiniteLaw;
pub use verify::{verify_env, Check, VerifyReport, DEFAULT_GRID_STEP};

//! Single-queue rate adaptation under binary ACK/NACK feedback.
//!
//! A transmitter picks a rate `V(t)` in `[0, 1]` every slot without seeing the
//! channel capacity `C(t)`; the transmission succeeds iff `V(t) <= C(t)`. This
//! crate holds the pure parts of that model:
//!
//! * [`dists`]: capacity and arrival laws, the service curve `g(r) = r P{C >= r}`,
//!   and the worst-case environment family with its geometric construction.
//! * [`queue`]: the slotted queue recursion.
//! * [`sched`]: phase bookkeeping for the mesh-refining UCB policy.
//! * [`policy`]: the policy contract plus phased UCB, fixed-grid UCB1 and baselines.
//! * [`sim`]: seeded simulation loop, trajectories and seed aggregation.
//! * [`bounds`]: closed-form queue-size bounds and inequality utilities.
//!
//! The crate is `no_std` and only needs `alloc`. File formats, the CLI and
//! parallel replication live in the `rateq` companion crate.
#![no_std]
#![deny(missing_debug_implementations)]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod bounds;
pub mod dists;
mod error;
mod float;
pub mod policy;
pub mod queue;
pub mod rng;
pub mod sched;
pub mod sim;

pub use error::{Error, Result};
pub use float::CompensatedSum;

//! Slotted queue dynamics: `Q(t+1) = [Q(t) + A(t) - V(t) 1{V(t) <= C(t)}]_+`.

use crate::error::{check_unit, Error, Result};

/// Result of one slot.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SlotOutcome {
    /// `V <= C`; equality is a success.
    pub ack: bool,
    /// `V` on success, 0 otherwise.
    pub served: f64,
    pub arrival: f64,
    pub q_next: f64,
}

/// Queue length at the start of slot `t` (1-based).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QueueState {
    pub q: f64,
    pub t: u64,
}

impl Default for QueueState {
    fn default() -> Self {
        Self { q: 0.0, t: 1 }
    }
}

impl QueueState {
    pub fn advance(&mut self, arrival: f64, rate: f64, capacity: f64) -> Result<SlotOutcome> {
        let outcome = step(self.q, arrival, rate, capacity)?;
        self.q = outcome.q_next;
        self.t += 1;
        Ok(outcome)
    }
}

/// One slot of the queue recursion.
pub fn step(q: f64, arrival: f64, rate: f64, capacity: f64) -> Result<SlotOutcome> {
    if !(q >= 0.0 && q.is_finite()) {
        return Err(Error::Domain {
            name: "queue",
            value: q,
            range: "[0, inf)",
        });
    }
    check_unit("arrival", arrival)?;
    check_unit("rate", rate)?;
    check_unit("capacity", capacity)?;
    let ack = rate <= capacity;
    Ok(SlotOutcome {
        ack,
        served: if ack { rate } else { 0.0 },
        arrival,
        q_next: apply_feedback(q, arrival, rate, ack),
    })
}

/// The recursion given the feedback bit instead of the capacity. Replaying a
/// recorded `(arrival, rate, ack)` sequence through this reproduces `Q` exactly.
#[inline]
pub fn apply_feedback(q: f64, arrival: f64, rate: f64, ack: bool) -> f64 {
    let served = if ack { rate } else { 0.0 };
    (q + arrival - served).max(0.0)
}

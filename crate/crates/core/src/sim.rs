//! Seeded slot-by-slot simulation and replication.

use alloc::format;
use alloc::vec::Vec;

use crate::dists::Environment;
use crate::error::{Error, Result};
use crate::float::CompensatedSum;
use crate::policy::{PhaseRecord, PolicySpec, RatePolicy};
use crate::queue::step;
use crate::rng::{SlotRng, ARRIVAL_DRAW, CAPACITY_DRAW};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SimConfig {
    pub horizon: u64,
    /// Keep every `record_stride`-th slot (and always slot `H`).
    pub record_stride: u64,
}

impl SimConfig {
    pub fn new(horizon: u64, record_stride: u64) -> Result<Self> {
        let cfg = Self {
            horizon,
            record_stride,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.horizon == 0 {
            return Err(Error::Config("horizon must be at least 1".into()));
        }
        if self.record_stride == 0 {
            return Err(Error::Config("record_stride must be at least 1".into()));
        }
        Ok(())
    }

    pub fn is_recorded(&self, t: u64) -> bool {
        t.is_multiple_of(self.record_stride) || t == self.horizon
    }

    /// Number of rows a trajectory keeps.
    pub fn recorded_len(&self) -> usize {
        let n = self.horizon / self.record_stride;
        (n + u64::from(!self.horizon.is_multiple_of(self.record_stride))) as usize
    }
}

/// One recorded slot. `q` is `Q(t)` and `q_next` is `Q(t+1)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SlotRecord {
    pub t: u64,
    pub rate: f64,
    pub ack: bool,
    pub arrival: f64,
    pub q: f64,
    pub q_next: f64,
    /// `(1/t) sum_{tau <= t} Q(tau)`.
    pub time_avg_q: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Summary {
    pub horizon: u64,
    pub time_avg_q: f64,
    /// Largest `Q(t)` for `t <= H`.
    pub max_q: f64,
    /// `Q(H + 1)`.
    pub final_q: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub seed: u64,
    pub records: Vec<SlotRecord>,
    /// Completed phases followed by the unfinished one at `H`, if any.
    pub phases: Vec<PhaseRecord>,
    pub summary: Summary,
}

impl Trajectory {
    /// Re-applies the queue recursion to every recorded row, and checks that
    /// rows for consecutive slots chain together.
    pub fn replay(&self) -> Result<()> {
        replay_rows(&self.records)
    }
}

pub fn replay_rows(rows: &[SlotRecord]) -> Result<()> {
    let mut prev: Option<&SlotRecord> = None;
    for row in rows {
        let q_next = crate::queue::apply_feedback(row.q, row.arrival, row.rate, row.ack);
        if q_next.to_bits() != row.q_next.to_bits() {
            return Err(Error::Invariant(format!(
                "slot {}: replayed Q(t+1) = {q_next:e}, recorded {:e}",
                row.t, row.q_next
            )));
        }
        if let Some(p) = prev {
            if row.t <= p.t {
                return Err(Error::Invariant(format!(
                    "slot {} follows slot {}",
                    row.t, p.t
                )));
            }
            if row.t == p.t + 1 && p.q_next.to_bits() != row.q.to_bits() {
                return Err(Error::Invariant(format!(
                    "slot {}: Q(t) = {:e} but previous row ended at {:e}",
                    row.t, row.q, p.q_next
                )));
            }
        }
        prev = Some(row);
    }
    Ok(())
}

/// Simulates slots `1..=H` of `policy` against `env`.
///
/// Per slot: arrival variate, capacity variate, `choose`, queue update, `observe`.
pub fn run(
    env: &Environment,
    policy: &mut dyn RatePolicy,
    cfg: &SimConfig,
    seed: u64,
) -> Result<Trajectory> {
    cfg.validate()?;
    let mut rng = SlotRng::new(seed);
    let mut records = Vec::with_capacity(cfg.recorded_len());
    let mut phases = Vec::new();
    let mut q = 0.0;
    let mut max_q: f64 = 0.0;
    let mut sum = CompensatedSum::new();
    for t in 1..=cfg.horizon {
        let arrival = env.arrivals.sample(rng.uniform(t, ARRIVAL_DRAW));
        let capacity = env.capacity.sample(rng.uniform(t, CAPACITY_DRAW));
        let rate = policy.choose(t)?;
        let out = step(q, arrival, rate, capacity)?;
        policy.observe(t, out.ack, arrival)?;
        if let Some(rec) = policy.take_completed_phase() {
            phases.push(rec);
        }
        if out.q_next > t as f64 {
            return Err(Error::Invariant(format!(
                "Q({}) = {:e} exceeds {t}",
                t + 1,
                out.q_next
            )));
        }
        sum.add(q);
        max_q = max_q.max(q);
        if cfg.is_recorded(t) {
            records.push(SlotRecord {
                t,
                rate,
                ack: out.ack,
                arrival,
                q,
                q_next: out.q_next,
                time_avg_q: sum.value() / t as f64,
            });
        }
        q = out.q_next;
    }
    if let Some(rec) = policy.open_phase() {
        phases.push(rec);
    }
    Ok(Trajectory {
        seed,
        records,
        phases,
        summary: Summary {
            horizon: cfg.horizon,
            time_avg_q: sum.value() / cfg.horizon as f64,
            max_q,
            final_q: q,
        },
    })
}

/// Builds a fresh policy for each seed and runs them in order.
pub fn replicate(
    env: &Environment,
    policy: &PolicySpec,
    cfg: &SimConfig,
    seeds: &[u64],
) -> Result<Vec<Trajectory>> {
    seeds
        .iter()
        .map(|&seed| {
            let mut p = policy.build(env)?;
            run(env, p.as_mut(), cfg, seed)
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct AggregatePoint {
    pub t: u64,
    pub mean: f64,
    /// Standard error of the seed mean; 0 with a single seed.
    pub se: f64,
    pub per_seed: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AggregateResult {
    pub seeds: Vec<u64>,
    pub points: Vec<AggregatePoint>,
    pub summaries: Vec<Summary>,
}

impl AggregateResult {
    pub fn last(&self) -> Option<&AggregatePoint> {
        self.points.last()
    }

    /// Point recorded at slot `t`, if any.
    pub fn at(&self, t: u64) -> Option<&AggregatePoint> {
        self.points
            .binary_search_by_key(&t, |p| p.t)
            .ok()
            .map(|i| &self.points[i])
    }
}

/// Mean and standard error of `x`.
pub fn mean_se(x: &[f64]) -> (f64, f64) {
    let n = x.len() as f64;
    let mean = x.iter().copied().collect::<CompensatedSum>().value() / n;
    if x.len() < 2 {
        return (mean, 0.0);
    }
    let ss = x
        .iter()
        .map(|v| (v - mean) * (v - mean))
        .collect::<CompensatedSum>()
        .value();
    (mean, libm::sqrt(ss / (n - 1.0) / n))
}

/// Seed mean and standard error of `time_avg_q(t)` at every recorded slot.
pub fn aggregate(trajectories: &[Trajectory]) -> Result<AggregateResult> {
    let first = trajectories
        .first()
        .ok_or_else(|| Error::Config("no trajectories to aggregate".into()))?;
    let rows = first.records.len();
    if trajectories.iter().any(|tr| {
        tr.records.len() != rows
            || tr
                .records
                .iter()
                .zip(&first.records)
                .any(|(a, b)| a.t != b.t)
    }) {
        return Err(Error::Config(
            "trajectories were recorded at different slots".into(),
        ));
    }
    let points = (0..rows)
        .map(|i| {
            let per_seed: Vec<f64> = trajectories
                .iter()
                .map(|tr| tr.records[i].time_avg_q)
                .collect();
            let (mean, se) = mean_se(&per_seed);
            AggregatePoint {
                t: first.records[i].t,
                mean,
                se,
                per_seed,
            }
        })
        .collect();
    Ok(AggregateResult {
        seeds: trajectories.iter().map(|tr| tr.seed).collect(),
        points,
        summaries: trajectories.iter().map(|tr| tr.summary).collect(),
    })
}

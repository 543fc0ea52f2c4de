//! UCB on a uniform rate mesh that refines phase by phase.
//!
//! Phase `l` runs for `T_l` slots on the levels `k = 1..d_l` (rate `k / d_l`).
//! All statistics restart at each phase boundary and every index starts at
//! `sqrt((7 - 2 delta) ln T_l / 4)`. Within the phase the index of level `k` is
//!
//! ```text
//! mean_k + sqrt((7 - 2 delta) ln T_l / (4 max(1, N_k)))
//! ```
//!
//! and the level with the largest index is played (lowest level on ties).
//! `ln T_l` is constant within a phase, so only the played level's index moves.

use alloc::vec::Vec;

use super::{argmax_first, ArmStats, Clock, PhaseRecord, RatePolicy};
use crate::error::Result;
use crate::sched::{phase_length, PhaseSchedule};

#[derive(Debug, Clone)]
pub struct PhasedUcbPolicy {
    sched: PhaseSchedule,
    phase: u32,
    phase_len: u64,
    // (7 - 2 delta) ln(T_l) / 4
    radius_sq: f64,
    arms: Vec<ArmStats>,
    u: u64,
    clock: Clock,
    completed: Option<PhaseRecord>,
}

impl PhasedUcbPolicy {
    pub fn new(sched: PhaseSchedule) -> Self {
        Self {
            sched,
            phase: 0,
            phase_len: 0,
            radius_sq: 0.0,
            arms: Vec::new(),
            u: 0,
            clock: Clock::default(),
            completed: None,
        }
    }

    pub fn schedule(&self) -> &PhaseSchedule {
        &self.sched
    }

    /// Current phase (0 before the first slot).
    pub fn phase(&self) -> u32 {
        self.phase
    }

    /// Position within the current phase, `1..=T_l` once started.
    pub fn slot_in_phase(&self) -> u64 {
        self.u
    }

    pub fn arms(&self) -> &[ArmStats] {
        &self.arms
    }

    fn start_phase(&mut self, l: u32) -> Result<()> {
        let len = phase_length(l)?;
        let d = self.sched.grid_size(l)?;
        self.phase = l;
        self.phase_len = len;
        self.radius_sq = (7.0 - 2.0 * self.sched.delta()) * libm::log(len as f64) / 4.0;
        let init = libm::sqrt(self.radius_sq);
        self.arms.clear();
        self.arms.resize(d, ArmStats::fresh(init));
        self.u = 0;
        Ok(())
    }

    fn record(&self) -> PhaseRecord {
        PhaseRecord {
            phase: self.phase,
            length: self.phase_len,
            levels: self.arms.len(),
            counts: self.arms.iter().map(|a| a.n).collect(),
        }
    }
}

impl RatePolicy for PhasedUcbPolicy {
    fn choose(&mut self, t: u64) -> Result<f64> {
        self.clock.begin(t)?;
        if self.phase == 0 || self.u == self.phase_len {
            self.start_phase(self.phase + 1)?;
        }
        self.u += 1;
        let arm = argmax_first(self.arms.iter().map(|a| a.ucb));
        self.clock.commit(t, arm);
        Ok((arm + 1) as f64 / self.arms.len() as f64)
    }

    fn observe(&mut self, t: u64, ack: bool, _arrival: f64) -> Result<()> {
        let arm = self.clock.finish(t)?;
        let d = self.arms.len() as f64;
        let service = if ack { (arm + 1) as f64 / d } else { 0.0 };
        let radius_sq = self.radius_sq;
        let stats = &mut self.arms[arm];
        stats.record(service);
        stats.ucb = stats.mean + libm::sqrt(radius_sq / (stats.n.max(1)) as f64);
        if self.u == self.phase_len {
            self.completed = Some(self.record());
        }
        Ok(())
    }

    fn take_completed_phase(&mut self) -> Option<PhaseRecord> {
        self.completed.take()
    }

    fn open_phase(&self) -> Option<PhaseRecord> {
        (self.phase > 0 && self.u < self.phase_len).then(|| self.record())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sched::phase_of;

    fn policy(c: f64, delta: f64) -> PhasedUcbPolicy {
        PhasedUcbPolicy::new(PhaseSchedule::new(c, delta).unwrap())
    }

    #[test]
    fn single_level_phase_plays_full_rate() {
        let mut p = policy(0.04, 1.0 / 6.0);
        for t in 1..=8 {
            assert_eq!(p.choose(t).unwrap(), 1.0);
            p.observe(t, t % 3 == 0, 0.0).unwrap();
        }
    }

    #[test]
    fn reset_indices_are_tied_and_lowest_level_wins() {
        // C = 0.5, delta = 1/6: d_l = ceil(0.5 * T_l^(1/3)); phase 4 has T = 64, d = 2;
        // phase 7 has T = 512, d = 4
        let mut p = policy(0.5, 1.0 / 6.0);
        let mut t = 1;
        while phase_of(t).unwrap().0 < 7 {
            p.choose(t).unwrap();
            p.observe(t, true, 0.0).unwrap();
            t += 1;
        }
        let rate = p.choose(t).unwrap();
        assert_eq!(p.phase(), 7);
        assert_eq!(p.arms().len(), 4);
        assert_eq!(rate, 0.25);
        let init = p.arms()[0].ucb;
        assert!(p
            .arms()
            .iter()
            .all(|a| a.n == 0 && a.mean == 0.0 && a.ucb == init));
        let expected = ((7.0 - 2.0 / 6.0) * (512f64).ln() / 4.0).sqrt();
        assert!((init - expected).abs() < 1e-12);
    }

    #[test]
    fn failed_pull_ties_with_fresh_level() {
        // C = 0.9: d_1 = ceil(0.9 * 8^(1/3)) = 2
        let mut p = policy(0.9, 1.0 / 6.0);
        assert_eq!(p.choose(1).unwrap(), 0.5);
        p.observe(1, false, 0.0).unwrap();
        let ucb1 = p.arms()[0].ucb;
        let ucb2 = p.arms()[1].ucb;
        assert!((ucb1 - 1.861_648_705_529_517).abs() < 1e-12, "{ucb1}");
        assert_eq!(ucb1, ucb2);
        assert_eq!(p.choose(2).unwrap(), 0.5);
    }

    #[test]
    fn index_after_one_success() {
        let mut p = policy(0.04, 1.0 / 6.0);
        p.choose(1).unwrap();
        p.observe(1, true, 0.0).unwrap();
        let ucb = p.arms()[0].ucb;
        assert!((ucb - 2.8616487055295171).abs() < 1e-12, "{ucb}");
    }

    #[test]
    fn radius_after_four_pulls() {
        // phase 2 (T = 16) with a single level: every pull goes to it
        let mut p = policy(0.04, 1.0 / 6.0);
        for t in 1..=12 {
            p.choose(t).unwrap();
            p.observe(t, false, 0.0).unwrap();
        }
        assert_eq!(p.phase(), 2);
        assert_eq!(p.arms()[0].n, 4);
        assert!((p.arms()[0].ucb - 1.074_823_381_273_985).abs() < 1e-12);
    }

    #[test]
    fn service_is_rate_times_ack() {
        let mut p = policy(0.9, 1.0 / 6.0);
        p.choose(1).unwrap();
        p.observe(1, true, 0.0).unwrap();
        assert_eq!(p.arms()[0].mean, 0.5);
    }

    #[test]
    fn counts_partition_each_phase() {
        let mut p = policy(0.5, 0.1);
        let mut records = Vec::new();
        for t in 1..=4000u64 {
            let rate = p.choose(t).unwrap();
            let d = p.arms().len() as f64;
            let k = (rate * d).round();
            assert!((k / d - rate).abs() < 1e-15 && k >= 1.0 && k <= d);
            p.observe(t, t % 3 != 0, 0.5).unwrap();
            let n: u64 = p.arms().iter().map(|a| a.n).sum();
            assert_eq!(n, p.slot_in_phase());
            if let Some(rec) = p.take_completed_phase() {
                records.push(rec);
            }
        }
        for rec in &records {
            assert_eq!(rec.counts.iter().sum::<u64>(), rec.length);
            assert_eq!(rec.length, phase_length(rec.phase).unwrap());
        }
        assert_eq!(records.len(), 8);
        let open = p.open_phase().unwrap();
        assert_eq!(open.phase, 9);
    }

    #[test]
    fn observe_before_choose_fails() {
        let mut p = policy(0.5, 0.1);
        assert!(p.observe(1, true, 0.0).is_err());
        p.choose(1).unwrap();
        assert!(p.choose(2).is_err());
    }
}

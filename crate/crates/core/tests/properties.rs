use proptest::prelude::*;
use rateq_core::bounds::check_path_power_bound;
use rateq_core::dists::{
    make_environment, verify_env, ArrivalDistribution, CapacityDistribution, ConverseFamily,
    EnvSpec, Environment,
};
use rateq_core::policy::PolicySpec;
use rateq_core::queue::step;
use rateq_core::sched::{phase_of, phase_start, PhaseSchedule};
use rateq_core::sim::{run, SimConfig};

fn capacity_laws() -> Vec<CapacityDistribution> {
    let mut laws = vec![
        CapacityDistribution::Uniform01,
        CapacityDistribution::point_mass(0.55).unwrap(),
        CapacityDistribution::finite(&[(0.2, 0.1), (0.4, 0.15), (0.8, 0.2), (1.0, 0.55)]).unwrap(),
        CapacityDistribution::truncated_reciprocal(1.0 / 16.0).unwrap(),
    ];
    for eps in [1.0 / 144.0, 1.0 / 300.0] {
        let fam = ConverseFamily::new(eps).unwrap();
        for k in 1..=fam.k_max() {
            laws.push(CapacityDistribution::Converse(fam.law(k).unwrap()));
        }
    }
    laws
}

proptest! {
    #[test]
    fn g_is_one_sided_lipschitz(law in proptest::sample::select(capacity_laws()),
                                a in 0.0f64..=1.0, b in 0.0f64..=1.0) {
        let (r2, r1) = if a <= b { (a, b) } else { (b, a) };
        prop_assert!(law.g(r1).unwrap() - law.g(r2).unwrap() <= r1 - r2 + 1e-12);
    }

    #[test]
    fn queue_grows_at_most_one_per_slot(q in 0.0f64..1e6, a in 0.0f64..=1.0,
                                        v in 0.0f64..=1.0, c in 0.0f64..=1.0) {
        let out = step(q, a, v, c).unwrap();
        prop_assert!(out.q_next >= 0.0);
        prop_assert!(out.q_next <= q + 1.0);
        prop_assert_eq!(out.ack, v <= c);
    }

    #[test]
    fn phase_of_inverts_phase_start(t in 1u64..(1u64 << 40)) {
        let (l, u) = phase_of(t).unwrap();
        prop_assert_eq!(phase_start(l).unwrap() + u, t);
    }
}

#[test]
fn converse_environments_verify() {
    for eps in [1.0 / 144.0, 1.0 / 300.0] {
        let fam = ConverseFamily::new(eps).unwrap();
        assert!(fam.check_claims().iter().all(|c| c.passed));
        for k in 1..=fam.k_max() {
            let env = make_environment(&EnvSpec::Converse { epsilon: eps, k }).unwrap();
            let report = verify_env(&env, 1e-4).unwrap();
            let failed: Vec<_> = report.checks.iter().filter(|c| !c.passed).collect();
            assert!(failed.is_empty(), "eps={eps} k={k}: {failed:?}");
        }
    }
    let env0 = make_environment(&EnvSpec::Converse {
        epsilon: 1.0 / 144.0,
        k: 0,
    })
    .unwrap();
    assert!(!env0.is_stabilizable());
}

#[test]
fn simulated_paths_satisfy_power_bound() {
    let env = Environment::new(
        ArrivalDistribution::bernoulli(0.38).unwrap(),
        CapacityDistribution::finite(&[(0.4, 0.1), (0.7, 0.3), (0.9, 0.6)]).unwrap(),
    );
    let cfg = SimConfig::new(5000, 1).unwrap();
    for (seed, spec) in [
        PolicySpec::FixedRate { rate: 0.95 },
        PolicySpec::Ucb1 { levels: 10 },
        PolicySpec::PhasedUcb {
            c: 0.5,
            delta: 1.0 / 6.0,
        },
    ]
    .iter()
    .enumerate()
    {
        let mut p = spec.build(&env).unwrap();
        let tr = run(&env, p.as_mut(), &cfg, seed as u64).unwrap();
        let path: Vec<f64> = tr.records.iter().map(|r| r.q).collect();
        for p in [2.0, 3.0] {
            assert!(check_path_power_bound(&path, p).unwrap());
        }
        tr.replay().unwrap();
    }
}

#[test]
fn stable_phase_precedes_bound() {
    for (c, delta) in [(0.04, 1.0 / 6.0), (0.5, 1.0 / 6.0), (1.0 - 1e-9, 0.1)] {
        let sched = PhaseSchedule::new(c, delta).unwrap();
        for eps in [0.25, 1.0 / 16.0, 1.0 / 144.0] {
            let b = sched.first_stable_phase(eps, 2.0).unwrap();
            assert!((b.slots_before as f64) <= b.slots_bound);
        }
    }
}

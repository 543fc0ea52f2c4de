use rateq_core::dists::{make_environment, CapacityDistribution, ConverseFamily, EnvSpec};
use rateq_core::rng::{SlotRng, CAPACITY_DRAW};

const SAMPLES: u64 = 1_000_000;
const PROBES: usize = 200;

fn max_cdf_gap(law: &CapacityDistribution, seed: u64) -> f64 {
    let mut rng = SlotRng::new(seed);
    let mut xs: Vec<f64> = (1..=SAMPLES)
        .map(|t| law.sample(rng.uniform(t, CAPACITY_DRAW)))
        .collect();
    xs.sort_by(f64::total_cmp);
    let mut probes: Vec<f64> = (0..PROBES)
        .map(|i| i as f64 / (PROBES - 1) as f64)
        .collect();
    probes.extend(law.breakpoints());
    probes
        .iter()
        .map(|&x| {
            let below = xs.partition_point(|&s| s <= x);
            (below as f64 / SAMPLES as f64 - law.cdf(x)).abs()
        })
        .fold(0.0, f64::max)
}

fn laws() -> Vec<(String, CapacityDistribution)> {
    let mut out = vec![
        ("uniform".to_string(), CapacityDistribution::Uniform01),
        (
            "point".to_string(),
            CapacityDistribution::point_mass(0.3).unwrap(),
        ),
        (
            "finite".to_string(),
            CapacityDistribution::finite(&[(0.4, 0.1), (0.7, 0.3), (0.9, 0.6)]).unwrap(),
        ),
        (
            "env0".to_string(),
            CapacityDistribution::truncated_reciprocal(1.0 / 144.0).unwrap(),
        ),
    ];
    let fam = ConverseFamily::new(1.0 / 144.0).unwrap();
    for k in 1..=fam.k_max() {
        out.push((
            format!("converse-{k}"),
            CapacityDistribution::Converse(fam.law(k).unwrap()),
        ));
    }
    out
}

#[test]
fn empirical_cdf_tracks_analytic_cdf() {
    for (i, (name, law)) in laws().into_iter().enumerate() {
        let gap = max_cdf_gap(&law, 1000 + i as u64);
        assert!(gap < 0.005, "{name}: max |F_n - F| = {gap}");
    }
}

#[test]
fn converse_atoms_have_their_mass() {
    let env = make_environment(&EnvSpec::Converse {
        epsilon: 1.0 / 144.0,
        k: 3,
    })
    .unwrap();
    let fam = ConverseFamily::new(1.0 / 144.0).unwrap();
    let (lo, hi) = fam.interval(3);
    let c = 0.5 - 1.0 / 144.0;
    let mut rng = SlotRng::new(77);
    let n = 400_000u64;
    let mut at_hi = 0u64;
    let mut at_one = 0u64;
    let mut inside = 0u64;
    for t in 1..=n {
        let x = env.capacity.sample(rng.uniform(t, CAPACITY_DRAW));
        if x == hi {
            at_hi += 1;
        } else if x == 1.0 {
            at_one += 1;
        } else if x > lo && x < hi {
            inside += 1;
        }
    }
    let n = n as f64;
    assert!((at_hi as f64 / n - (c / lo - c / hi)).abs() < 3e-3);
    assert!((at_one as f64 / n - c).abs() < 3e-3);
    assert_eq!(inside, 0);
}

//! Grid verification of an environment's service curve and CDF.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use super::{CapacityDistribution, ConverseFamily, Environment};
use crate::error::{Error, Result};

pub const DEFAULT_GRID_STEP: f64 = 1e-5;

const TOL: f64 = 1e-12;

/// One named check with its outcome.
#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    fn new(name: &'static str, passed: bool, detail: String) -> Self {
        Self {
            name,
            passed,
            detail,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerifyReport {
    pub checks: Vec<Check>,
    /// Largest `g` found on the probe set and where (smallest such rate).
    pub max_g: f64,
    pub argmax: f64,
    pub stabilizable: bool,
}

impl VerifyReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }
}

/// Probe points: the regular grid of the given step, every breakpoint of the
/// law, and the analytic maximizer; sorted and deduplicated.
pub(crate) fn probe_points(capacity: &CapacityDistribution, step: f64, extra: &[f64]) -> Vec<f64> {
    let n = libm::ceil(1.0 / step) as usize;
    let mut points: Vec<f64> = (0..=n).map(|i| (i as f64 * step).min(1.0)).collect();
    points.extend(
        capacity
            .breakpoints()
            .into_iter()
            .filter(|r| (0.0..=1.0).contains(r)),
    );
    points.extend(extra.iter().copied());
    points.sort_by(f64::total_cmp);
    points.dedup();
    points
}

/// Checks an environment on a grid of step `grid_step` in `(0, 1e-3]` plus atoms.
///
/// * one-sided Lipschitz: `g(r1) - g(r2) <= r1 - r2` for all probed `r2 <= r1`,
///   i.e. `g(r) - r` never rises above its running minimum;
/// * the CDF is nondecreasing from 0 to 1 and agrees with the tail;
/// * the probed maximum of `g` matches the analytic `g*`;
/// * for the worst-case family, the maximum is `1/2 + eps`, attained at `x_{k+1}`;
/// * for positive slack, the grids `ceil(gamma / eps)`, `gamma` in {2, 4},
///   keep a `(gamma - 1) / gamma` fraction of the slack.
pub fn verify_env(env: &Environment, grid_step: f64) -> Result<VerifyReport> {
    if !(grid_step > 0.0 && grid_step <= 1e-3) {
        return Err(Error::Domain {
            name: "grid_step",
            value: grid_step,
            range: "(0, 1e-3]",
        });
    }
    let cap = &env.capacity;
    let points = probe_points(cap, grid_step, &[env.r_star]);
    let mut checks = Vec::new();

    let tail_ok = cap.tail_total(0.0) == 1.0 && cap.tail_total(1.0 + 1e-9) == 0.0;
    checks.push(Check::new(
        "tail-boundary",
        tail_ok,
        format!(
            "tail(0) = {}, tail(1+) = {}",
            cap.tail_total(0.0),
            cap.tail_total(1.0 + 1e-9)
        ),
    ));

    let mut running_min = f64::INFINITY;
    let mut worst = f64::NEG_INFINITY;
    let mut worst_at = 0.0;
    let mut max_g = f64::NEG_INFINITY;
    let mut argmax = 0.0;
    let mut prev_cdf = 0.0;
    let mut prev_tail = 1.0;
    let mut cdf_ok = true;
    let mut tail_mono = true;
    let mut tail_cdf_ok = true;
    for &r in &points {
        let tail = cap.tail_total(r);
        let g = r * tail;
        let h = g - r;
        let excess = h - running_min;
        if excess > worst {
            worst = excess;
            worst_at = r;
        }
        running_min = running_min.min(h);
        if g > max_g {
            max_g = g;
            argmax = r;
        }
        let cdf = cap.cdf(r);
        if cdf < prev_cdf || !(0.0..=1.0).contains(&cdf) {
            cdf_ok = false;
        }
        if tail > prev_tail {
            tail_mono = false;
        }
        // P{C >= r} >= P{C > r} = 1 - F(r)
        if tail + TOL < 1.0 - cdf {
            tail_cdf_ok = false;
        }
        prev_cdf = cdf;
        prev_tail = tail;
    }
    cdf_ok &= cap.cdf(1.0) == 1.0;
    checks.push(Check::new(
        "one-sided-lipschitz",
        worst <= TOL,
        format!("max excess of g(r1)-g(r2)-(r1-r2) = {worst:e} at r1 = {worst_at}"),
    ));
    checks.push(Check::new(
        "cdf-monotone",
        cdf_ok && tail_mono,
        format!("{} probe points", points.len()),
    ));
    checks.push(Check::new(
        "tail-cdf-consistent",
        tail_cdf_ok,
        String::new(),
    ));
    checks.push(Check::new(
        "analytic-max",
        libm::fabs(max_g - env.g_star) <= TOL,
        format!(
            "probed max g = {max_g} at {argmax}, analytic g* = {}",
            env.g_star
        ),
    ));

    if let CapacityDistribution::Converse(law) = cap {
        let target = 0.5 + law.epsilon;
        checks.push(Check::new(
            "converse-argmax",
            argmax == law.hi && libm::fabs(max_g - target) <= TOL,
            format!(
                "argmax = {argmax}, x_(k+1) = {}, max g - (1/2 + eps) = {:e}",
                law.hi,
                max_g - target
            ),
        ));
    }

    if env.is_stabilizable() {
        for gamma in [2.0, 4.0] {
            let d = env.grid_for(gamma)?;
            let (k, g) = env.best_grid_level(d);
            let margin = g - env.lambda - (gamma - 1.0) / gamma * env.slack;
            checks.push(Check::new(
                if gamma == 2.0 {
                    "grid-existence-gamma2"
                } else {
                    "grid-existence-gamma4"
                },
                margin >= -TOL,
                format!("d = {d}, best level {k}, margin {margin:e}"),
            ));
        }
    }

    Ok(VerifyReport {
        checks,
        max_g,
        argmax,
        stabilizable: env.is_stabilizable(),
    })
}

impl ConverseFamily {
    /// Geometric claims on the breakpoints: `2 eps < |I_k| < 3 eps`,
    /// `[x_k, x_{k+1}] ⊂ [7/12, 1)`, `K >= 1/(36 eps)` and `K >= 5`.
    pub fn check_claims(&self) -> Vec<Check> {
        let eps = self.epsilon();
        let k_max = self.k_max();
        let widths: Vec<f64> = self.intervals().map(|(a, b)| b - a).collect();
        let min_w = widths.iter().copied().fold(f64::INFINITY, f64::min);
        let max_w = widths.iter().copied().fold(0.0, f64::max);
        let inside = self
            .intervals()
            .all(|(a, b)| a >= 7.0 / 12.0 && b < 1.0 && a < b);
        alloc::vec![
            Check::new(
                "interval-lower",
                min_w > 2.0 * eps,
                format!("min |I_k| = {min_w}, 2 eps = {}", 2.0 * eps),
            ),
            Check::new(
                "interval-upper",
                max_w < 3.0 * eps,
                format!("max |I_k| = {max_w}, 3 eps = {}", 3.0 * eps),
            ),
            Check::new(
                "containment",
                inside,
                format!("x_1 = {}, x_(K+1) = {}", self.x_k(1), self.x_k(k_max + 1)),
            ),
            Check::new(
                "k-vs-epsilon",
                k_max as f64 >= 1.0 / (36.0 * eps),
                format!("K = {k_max}, 1/(36 eps) = {}", 1.0 / (36.0 * eps)),
            ),
            Check::new("k-at-least-5", k_max >= 5, format!("K = {k_max}")),
        ]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dists::{make_environment, ArrivalDistribution, EnvSpec};

    #[test]
    fn converse_environment_passes() {
        let env = make_environment(&EnvSpec::Converse {
            epsilon: 1.0 / 144.0,
            k: 3,
        })
        .unwrap();
        let report = verify_env(&env, 1e-4).unwrap();
        assert!(report.all_passed(), "{report:?}");
        assert!(report.check("converse-argmax").is_some());
    }

    #[test]
    fn environment_zero_max_is_floor() {
        let eps = 1.0 / 144.0;
        let env = make_environment(&EnvSpec::Converse { epsilon: eps, k: 0 }).unwrap();
        let report = verify_env(&env, 1e-4).unwrap();
        assert!(report.check("one-sided-lipschitz").unwrap().passed);
        assert!((report.max_g - (0.5 - eps)).abs() < 1e-12);
        assert!(!report.stabilizable);
        assert!(report.all_passed());
    }

    #[test]
    fn point_mass_downward_jump_is_allowed() {
        let env = Environment::new(
            ArrivalDistribution::bernoulli(0.2).unwrap(),
            CapacityDistribution::point_mass(0.5).unwrap(),
        );
        let report = verify_env(&env, 1e-4).unwrap();
        assert!(report.check("one-sided-lipschitz").unwrap().passed);
        assert!(report.all_passed(), "{report:?}");
    }

    #[test]
    fn grid_step_is_validated() {
        let env = make_environment(&EnvSpec::Converse {
            epsilon: 1.0 / 144.0,
            k: 1,
        })
        .unwrap();
        assert!(verify_env(&env, 0.0).is_err());
        assert!(verify_env(&env, 0.01).is_err());
    }

    #[test]
    fn claims_hold_at_1_144() {
        let fam = ConverseFamily::new(1.0 / 144.0).unwrap();
        for check in fam.check_claims() {
            assert!(check.passed, "{check:?}");
        }
    }

    #[test]
    fn extended_family_fails_k_bound() {
        let fam = ConverseFamily::extended(1.0 / 16.0).unwrap();
        let claims = fam.check_claims();
        assert!(
            !claims
                .iter()
                .find(|c| c.name == "k-at-least-5")
                .unwrap()
                .passed
        );
    }
}

//! Closed-form bounds on the time-average queue, and the inequality
//! utilities behind them. All logarithms are natural.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::dists::ConverseFamily;
use crate::error::{Error, Result};
use crate::float::CompensatedSum;

fn domain(name: &'static str, value: f64, range: &'static str) -> Error {
    Error::Domain { name, value, range }
}

fn check_epsilon(epsilon: f64) -> Result<()> {
    if epsilon > 0.0 && epsilon <= 1.0 {
        Ok(())
    } else {
        Err(domain("epsilon", epsilon, "(0, 1]"))
    }
}

fn check_delta(delta: f64) -> Result<()> {
    if delta > 0.0 && delta < 0.5 {
        Ok(())
    } else {
        Err(domain("delta", delta, "(0, 1/2)"))
    }
}

fn check_small_epsilon(epsilon: f64) -> Result<()> {
    if epsilon > 0.0 && epsilon <= 1.0 / 144.0 {
        Ok(())
    } else {
        Err(domain("epsilon", epsilon, "(0, 1/144]"))
    }
}

/// Parameters of the phased algorithm's finite-horizon bound.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhasedBoundParams {
    pub epsilon: f64,
    pub c: f64,
    pub delta: f64,
    pub gamma: f64,
    /// Hölder exponent in `(1, 2)`; `p` is its conjugate.
    pub q: f64,
}

impl PhasedBoundParams {
    pub fn validate(&self) -> Result<()> {
        check_epsilon(self.epsilon)?;
        check_delta(self.delta)?;
        if !(self.c > 0.0 && self.c < 1.0) {
            return Err(domain("C", self.c, "(0, 1)"));
        }
        if !(self.gamma > 1.0 && self.gamma.is_finite()) {
            return Err(domain("gamma", self.gamma, "(1, inf)"));
        }
        if !(self.q > 1.0 && self.q < 2.0) {
            return Err(domain("q", self.q, "(1, 2)"));
        }
        Ok(())
    }

    /// Conjugate exponent, `1/p + 1/q = 1`.
    pub fn p(&self) -> f64 {
        self.q / (self.q - 1.0)
    }

    /// The three `H`-free terms.
    fn constant_terms(&self) -> [f64; 3] {
        let Self {
            epsilon,
            c,
            delta,
            gamma,
            ..
        } = *self;
        let p = self.p();
        let s = 2.0 / (1.0 - 2.0 * delta);
        [
            65.0 * libm::exp2(2.0 / (p - 1.0)) * gamma / ((gamma - 1.0) * epsilon),
            (libm::exp2((p + 1.0) / (p - 1.0)) + 2.0) * libm::pow(gamma, s)
                / (libm::pow(epsilon, s) * libm::pow(c, s)),
            1.0,
        ]
    }

    /// The two `H`-dependent terms.
    fn horizon_terms(&self, horizon: f64) -> [f64; 2] {
        let Self {
            epsilon,
            c,
            delta,
            gamma,
            q,
        } = *self;
        let log = libm::log(2.0 * horizon);
        let common =
            libm::pow(gamma, 2.0 * q) * libm::pow(7.0 - 2.0 * delta, q) * libm::pow(log, q + 2.0)
                / (libm::pow(gamma - 1.0, 2.0 * q)
                    * libm::pow(epsilon, 2.0 * q)
                    * (1.0 - q / 2.0)
                    * (1.0 - q / 2.0));
        [
            libm::exp2(2.5 * q - delta * q + 3.0)
                * libm::pow(c, q)
                * common
                * libm::pow(horizon, 1.0 - q / 2.0 - delta * q),
            libm::exp2(2.0 * q + 3.0) * common * libm::pow(horizon, 1.0 - q),
        ]
    }

    /// All five terms of the finite-horizon bound at `H`.
    pub fn terms(&self, horizon: u64) -> Result<[f64; 5]> {
        self.validate()?;
        if horizon == 0 {
            return Err(domain("H", 0.0, "[1, inf)"));
        }
        let [a, b, c] = self.constant_terms();
        let [d, e] = self.horizon_terms(horizon as f64);
        Ok([a, b, c, d, e])
    }
}

/// Finite-horizon bound on `(1/H) sum E[Q(t)]` for the phased algorithm.
pub fn phased_finite_bound(horizon: u64, params: &PhasedBoundParams) -> Result<f64> {
    Ok(params
        .terms(horizon)?
        .iter()
        .copied()
        .collect::<CompensatedSum>()
        .value())
}

/// Value of [`phased_finite_bound`] as `H -> inf` when the `H` terms vanish
/// (`q > 1 / (1/2 + delta)`).
pub fn phased_finite_asymptote(params: &PhasedBoundParams) -> Result<f64> {
    params.validate()?;
    Ok(params
        .constant_terms()
        .iter()
        .copied()
        .collect::<CompensatedSum>()
        .value())
}

/// Long-run bound of the phased algorithm, `65 * 2^((2 - 4 delta) / (1 + 2 delta)) / eps`.
pub fn phased_limit(delta: f64, epsilon: f64) -> Result<f64> {
    check_delta(delta)?;
    check_epsilon(epsilon)?;
    Ok(65.0 * libm::exp2((2.0 - 4.0 * delta) / (1.0 + 2.0 * delta)) / epsilon)
}

/// Finite-horizon bound of the phased algorithm tuned to `C = 0.04`, `delta = 1/6`:
/// `1 + 267/eps + 16846843/eps^3 + 2675 ln^3.5(1/eps) / eps^3`.
pub fn tuned_bound(epsilon: f64) -> Result<f64> {
    check_epsilon(epsilon)?;
    let e3 = epsilon * epsilon * epsilon;
    let terms = [
        1.0,
        267.0 / epsilon,
        16_846_843.0 / e3,
        2675.0 * libm::pow(libm::log(1.0 / epsilon), 3.5) / e3,
    ];
    Ok(terms.iter().copied().collect::<CompensatedSum>().value())
}

/// Long-run bound at the same tuning, `130 / eps`.
pub fn tuned_limit(epsilon: f64) -> Result<f64> {
    check_epsilon(epsilon)?;
    Ok(130.0 / epsilon)
}

/// UCB1 with known slack: `1767 ln(1/eps) / eps^2` for `eps <= e^-3`, else
/// `12378 / eps^2`. At `eps = e^-3` exactly, the larger of the two.
pub fn known_eps_bound(epsilon: f64) -> Result<f64> {
    check_epsilon(epsilon)?;
    let e2 = epsilon * epsilon;
    let small = 1767.0 * libm::log(1.0 / epsilon) / e2;
    let large = 12378.0 / e2;
    let knee = libm::exp(-3.0);
    Ok(if epsilon < knee {
        small
    } else if epsilon > knee {
        large
    } else {
        small.max(large)
    })
}

/// Lower bound `6e-7 / eps^2` valid for `eps <= 1/144`.
pub fn lower_bound(epsilon: f64) -> Result<f64> {
    check_small_epsilon(epsilon)?;
    Ok(6e-7 / (epsilon * epsilon))
}

/// `ceil((1 / (160 sqrt(7) eps^1.5))^2 + 1) = ceil(1 / (179200 eps^3) + 1)`.
pub fn converse_horizon(epsilon: f64) -> Result<u64> {
    check_small_epsilon(epsilon)?;
    let x = 1.0 / (179_200.0 * epsilon * epsilon * epsilon) + 1.0;
    Ok(libm::ceil(x) as u64)
}

/// Expected pulls of an arm with gap `Delta` after `H` slots of UCB1:
/// `8 ln H / Delta^2 + 1 + pi^2/3`.
pub fn ucb1_pull_bound(gap: f64, horizon: f64) -> Result<f64> {
    if !(gap > 0.0 && gap <= 1.0) {
        return Err(domain("gap", gap, "(0, 1]"));
    }
    if !(horizon >= 2.0 && horizon.is_finite()) {
        return Err(domain("H", horizon, "[2, inf)"));
    }
    Ok(8.0 * libm::log(horizon) / (gap * gap) + 1.0 + PI * PI / 3.0)
}

fn xlogy(x: f64, y: f64) -> f64 {
    if x == 0.0 {
        0.0
    } else {
        x * libm::log(y)
    }
}

/// `D(Ber(a) || Ber(b))`.
pub fn kl_bernoulli(a: f64, b: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&a) {
        return Err(domain("a", a, "[0, 1]"));
    }
    if !(b > 0.0 && b < 1.0) {
        return Err(domain("b", b, "(0, 1)"));
    }
    Ok((xlogy(a, a / b) + xlogy(1.0 - a, (1.0 - a) / (1.0 - b))).max(0.0))
}

/// `(a - b)^2 / (b (1 - b))`, an upper bound on [`kl_bernoulli`].
pub fn kl_chi2_bound(a: f64, b: f64) -> Result<f64> {
    kl_bernoulli(a, b)?;
    Ok((a - b) * (a - b) / (b * (1.0 - b)))
}

/// KL divergence per pull of the rate `x_{k+1}` between the alternative `k`
/// and the base environment: `kl(c / x_{k+1}, c / x_k)` with `c = 1/2 - eps`.
pub fn converse_pull_kl(family: &ConverseFamily, k: usize) -> Result<f64> {
    if k == 0 || k > family.k_max() {
        return Err(domain("k", k as f64, "1..=K"));
    }
    let c = 0.5 - family.epsilon();
    kl_bernoulli(c / family.x_k(k + 1), c / family.x_k(k))
}

/// `56 eps^2`, the bound on [`converse_pull_kl`].
pub fn converse_pull_kl_bound(epsilon: f64) -> f64 {
    56.0 * epsilon * epsilon
}

/// `(sum x^p)^(1/p) <= 2^((p-1)/(2p)) (sum x)^((p+1)/(2p))` for a nonnegative
/// path from 0 with increments at most 1.
pub fn check_path_power_bound(path: &[f64], p: f64) -> Result<bool> {
    if !(p >= 2.0 && p.is_finite()) {
        return Err(domain("p", p, "[2, inf)"));
    }
    match path.first() {
        Some(0.0) => {}
        Some(&x) => return Err(domain("path[0]", x, "{0}")),
        None => return Err(Error::Config("empty path".into())),
    }
    for w in path.windows(2) {
        if libm::fabs(w[1] - w[0]) > 1.0 + 1e-9 {
            return Err(domain("path increment", w[1] - w[0], "[-1, 1]"));
        }
    }
    if let Some(&x) = path.iter().find(|&&x| !(x >= 0.0 && x.is_finite())) {
        return Err(domain("path entry", x, "[0, inf)"));
    }
    let sum_p = path
        .iter()
        .map(|&x| libm::pow(x, p))
        .collect::<CompensatedSum>()
        .value();
    let sum = path.iter().copied().collect::<CompensatedSum>().value();
    let lhs = libm::pow(sum_p, 1.0 / p);
    let rhs = libm::exp2((p - 1.0) / (2.0 * p)) * libm::pow(sum, (p + 1.0) / (2.0 * p));
    Ok(lhs <= rhs + 1e-9)
}

/// One evaluated bound, with the parameter range it is proved on.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundReport {
    pub name: &'static str,
    pub parameters: Vec<(&'static str, f64)>,
    pub value: f64,
    pub validity: &'static str,
}

/// Every slack-only bound that is defined at `eps`.
pub fn bound_table(epsilon: f64) -> Result<Vec<BoundReport>> {
    check_epsilon(epsilon)?;
    let eps = vec![("epsilon", epsilon)];
    let mut out = vec![
        BoundReport {
            name: "phased_limit",
            parameters: vec![("delta", 1.0 / 6.0), ("epsilon", epsilon)],
            value: phased_limit(1.0 / 6.0, epsilon)?,
            validity: "delta in (0, 1/2), eps in (0, 1]",
        },
        BoundReport {
            name: "tuned_bound",
            parameters: eps.clone(),
            value: tuned_bound(epsilon)?,
            validity: "C = 0.04, delta = 1/6, eps in (0, 1]",
        },
        BoundReport {
            name: "tuned_limit",
            parameters: eps.clone(),
            value: tuned_limit(epsilon)?,
            validity: "C = 0.04, delta = 1/6, eps in (0, 1]",
        },
        BoundReport {
            name: "known_eps",
            parameters: eps.clone(),
            value: known_eps_bound(epsilon)?,
            validity: "d = ceil(3/eps), eps in (0, 1]",
        },
    ];
    if epsilon <= 1.0 / 144.0 {
        out.push(BoundReport {
            name: "lower_bound",
            parameters: eps.clone(),
            value: lower_bound(epsilon)?,
            validity: "eps in (0, 1/144]",
        });
        out.push(BoundReport {
            name: "converse_horizon",
            parameters: eps,
            value: converse_horizon(epsilon)? as f64,
            validity: "eps in (0, 1/144]",
        });
    }
    Ok(out)
}

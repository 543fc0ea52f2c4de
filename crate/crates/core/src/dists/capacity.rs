use alloc::vec::Vec;

use super::converse::ConverseLaw;
use super::finite::FiniteLaw;
use crate::error::{check_unit, Error, Result};

/// Law of the per-slot channel capacity `C(t)`, supported in `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub enum CapacityDistribution {
    PointMass(f64),
    Uniform01,
    FiniteSupport(FiniteLaw),
    /// Environment 0: `F(x) = 1 - (1/2 - eps) / x` on `(1/2 - eps, 1)` with an
    /// atom of mass `1/2 - eps` at 1. No rate stabilizes Bernoulli(1/2) traffic.
    TruncatedReciprocal {
        epsilon: f64,
    },
    /// Environment `k >= 1` of the worst-case family.
    Converse(ConverseLaw),
}

impl CapacityDistribution {
    pub fn point_mass(c: f64) -> Result<Self> {
        Ok(Self::PointMass(check_unit("capacity", c)?))
    }

    pub fn finite(points: &[(f64, f64)]) -> Result<Self> {
        Ok(Self::FiniteSupport(FiniteLaw::new(points)?))
    }

    pub fn truncated_reciprocal(epsilon: f64) -> Result<Self> {
        if !(epsilon > 0.0 && epsilon < 0.5) {
            return Err(Error::Domain {
                name: "epsilon",
                value: epsilon,
                range: "(0, 1/2)",
            });
        }
        Ok(Self::TruncatedReciprocal { epsilon })
    }

    /// `P{C >= r}` for `r` in `[0, 1]`.
    pub fn tail(&self, r: f64) -> Result<f64> {
        check_unit("rate", r)?;
        Ok(self.tail_total(r))
    }

    /// `P{C >= r}` extended to the whole real line.
    pub fn tail_total(&self, r: f64) -> f64 {
        match self {
            Self::PointMass(c) => {
                if r <= *c {
                    1.0
                } else {
                    0.0
                }
            }
            Self::Uniform01 => (1.0 - r).clamp(0.0, 1.0),
            Self::FiniteSupport(law) => law.tail(r),
            Self::TruncatedReciprocal { epsilon } => {
                let c = 0.5 - epsilon;
                if r <= c {
                    1.0
                } else if r <= 1.0 {
                    c / r
                } else {
                    0.0
                }
            }
            Self::Converse(law) => law.tail(r),
        }
    }

    /// Expected service `g(r) = r P{C >= r}` when always attempting rate `r`.
    pub fn g(&self, r: f64) -> Result<f64> {
        Ok(r * self.tail(r)?)
    }

    pub(crate) fn g_unchecked(&self, r: f64) -> f64 {
        r * self.tail_total(r)
    }

    /// `F(x) = P{C <= x}`, right-continuous, defined on the whole real line.
    pub fn cdf(&self, x: f64) -> f64 {
        match self {
            Self::PointMass(c) => {
                if x >= *c {
                    1.0
                } else {
                    0.0
                }
            }
            Self::Uniform01 => x.clamp(0.0, 1.0),
            Self::FiniteSupport(law) => law.cdf(x),
            Self::TruncatedReciprocal { epsilon } => {
                let c = 0.5 - epsilon;
                if x <= c {
                    0.0
                } else if x < 1.0 {
                    1.0 - c / x
                } else {
                    1.0
                }
            }
            Self::Converse(law) => law.cdf(x),
        }
    }

    /// Generalized inverse `inf{x : F(x) >= u}` of a uniform variate `u` in `[0, 1)`,
    /// with the infimum taken over the support.
    pub fn sample(&self, u: f64) -> f64 {
        match self {
            Self::PointMass(c) => *c,
            Self::Uniform01 => u,
            Self::FiniteSupport(law) => law.quantile(u),
            Self::TruncatedReciprocal { epsilon } => {
                let c = 0.5 - epsilon;
                if u < 1.0 - c {
                    (c / (1.0 - u)).min(1.0)
                } else {
                    1.0
                }
            }
            Self::Converse(law) => law.quantile(u),
        }
    }

    /// Points where `F` or `g` is not smooth: atoms and kinks.
    pub fn breakpoints(&self) -> Vec<f64> {
        match self {
            Self::PointMass(c) => alloc::vec![*c],
            Self::Uniform01 => Vec::new(),
            Self::FiniteSupport(law) => law.values().to_vec(),
            Self::TruncatedReciprocal { epsilon } => alloc::vec![0.5 - epsilon, 1.0],
            Self::Converse(law) => alloc::vec![0.5 - law.epsilon, law.lo, law.hi, 1.0],
        }
    }

    /// Analytic maximizer of `g` and its value. Ties go to the smallest rate.
    pub fn maximizer(&self) -> (f64, f64) {
        match self {
            Self::PointMass(c) => (*c, *c),
            Self::Uniform01 => (0.5, 0.25),
            Self::FiniteSupport(law) => {
                // g increases between atoms, so it peaks at one of them
                let mut best = (0.0, 0.0);
                for &v in law.values() {
                    let value = v * law.tail(v);
                    if value > best.1 {
                        best = (v, value);
                    }
                }
                best
            }
            Self::TruncatedReciprocal { epsilon } => (0.5 - epsilon, 0.5 - epsilon),
            Self::Converse(law) => (law.hi, 0.5 + law.epsilon),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dists::ConverseFamily;

    #[test]
    fn tail_examples() {
        let pm = CapacityDistribution::point_mass(0.6).unwrap();
        assert_eq!(pm.tail(0.6).unwrap(), 1.0);
        assert_eq!(pm.tail(0.61).unwrap(), 0.0);
        assert_eq!(CapacityDistribution::Uniform01.tail(0.25).unwrap(), 0.75);
        assert!(pm.tail(1.5).is_err());
        assert!(pm.tail(-0.1).is_err());
    }

    #[test]
    fn g_examples() {
        let u = CapacityDistribution::Uniform01;
        assert_eq!(u.g(0.0).unwrap(), 0.0);
        assert_eq!(u.g(0.5).unwrap(), 0.25);
        let eps = 1.0 / 144.0;
        let fam = ConverseFamily::new(eps).unwrap();
        for k in 1..=fam.k_max() {
            let law = CapacityDistribution::Converse(fam.law(k).unwrap());
            let top = law.g(fam.x_k(k + 1)).unwrap();
            assert!((top - (0.5 + eps)).abs() < 1e-14, "k={k}: {top}");
            assert_eq!(law.g(0.0).unwrap(), 0.0);
        }
    }

    #[test]
    fn sample_examples() {
        let pm = CapacityDistribution::point_mass(0.6).unwrap();
        assert_eq!(pm.sample(0.123), 0.6);
        let eps = 1.0 / 144.0;
        let env0 = CapacityDistribution::truncated_reciprocal(eps).unwrap();
        assert_eq!(env0.sample(0.0), 0.5 - eps);
        assert_eq!(env0.sample(0.999999), 1.0);
        let fam = ConverseFamily::new(eps).unwrap();
        let conv = CapacityDistribution::Converse(fam.law(1).unwrap());
        assert_eq!(conv.sample(0.999999), 1.0);
    }

    #[test]
    fn env0_g_is_flat_above_floor() {
        let eps = 1.0 / 144.0;
        let env0 = CapacityDistribution::truncated_reciprocal(eps).unwrap();
        for r in [0.5, 0.6, 0.75, 0.9, 1.0] {
            assert!((env0.g(r).unwrap() - (0.5 - eps)).abs() < 1e-15);
        }
        assert_eq!(env0.g(0.25).unwrap(), 0.25);
    }

    #[test]
    fn finite_maximizer_is_an_atom() {
        let law = CapacityDistribution::finite(&[(0.4, 0.1), (0.7, 0.3), (0.9, 0.6)]).unwrap();
        let (r, g) = law.maximizer();
        assert_eq!(r, 0.7);
        assert!((g - 0.63).abs() < 1e-15);
    }
}

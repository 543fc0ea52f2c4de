use super::finite::FiniteLaw;
use crate::error::{check_unit, Result};

/// Law of the per-slot arrivals `A(t)`, supported in `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub enum ArrivalDistribution {
    Bernoulli { lambda: f64, law: FiniteLaw },
    FiniteSupport(FiniteLaw),
}

impl ArrivalDistribution {
    pub fn bernoulli(lambda: f64) -> Result<Self> {
        check_unit("lambda", lambda)?;
        let law = FiniteLaw::new(&[(0.0, 1.0 - lambda), (1.0, lambda)])?;
        Ok(Self::Bernoulli { lambda, law })
    }

    pub fn finite(points: &[(f64, f64)]) -> Result<Self> {
        Ok(Self::FiniteSupport(FiniteLaw::new(points)?))
    }

    pub fn mean(&self) -> f64 {
        match self {
            Self::Bernoulli { lambda, .. } => *lambda,
            Self::FiniteSupport(law) => law.mean(),
        }
    }

    /// Generalized inverse CDF of a uniform variate `u` in `[0, 1)`.
    pub fn sample(&self, u: f64) -> f64 {
        match self {
            Self::Bernoulli { law, .. } | Self::FiniteSupport(law) => law.quantile(u),
        }
    }

    pub fn cdf(&self, x: f64) -> f64 {
        match self {
            Self::Bernoulli { law, .. } | Self::FiniteSupport(law) => law.cdf(x),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bernoulli_mean_and_sampling() {
        let a = ArrivalDistribution::bernoulli(0.2).unwrap();
        assert_eq!(a.mean(), 0.2);
        assert_eq!(a.sample(0.0), 0.0);
        assert_eq!(a.sample(0.8), 0.0);
        assert_eq!(a.sample(0.80001), 1.0);
    }

    #[test]
    fn degenerate_bernoulli_never_misfires() {
        let always = ArrivalDistribution::bernoulli(1.0).unwrap();
        assert_eq!(always.sample(0.0), 1.0);
        let never = ArrivalDistribution::bernoulli(0.0).unwrap();
        assert_eq!(never.sample(0.999), 0.0);
    }

    #[test]
    fn finite_mean_is_analytic() {
        let a = ArrivalDistribution::finite(&[(0.1, 0.25), (0.5, 0.5), (0.9, 0.25)]).unwrap();
        assert!((a.mean() - 0.5).abs() < 1e-12);
    }
}

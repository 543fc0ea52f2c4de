//! The worst-case environment family.
//!
//! Fix a slack `eps`. The breakpoints start at `x_1 = 7/12` and grow
//! geometrically by `(1/2 + eps) / (1/2 - eps)`; `K` is the first index with
//! `x_{K+1} >= 2/3`. Environment `k` moves the capacity mass that a plain
//! `(1/2 - eps) / x` tail would spread over `(x_k, x_{k+1}]` onto the single
//! point `x_{k+1}`, which lifts `g` there to exactly `1/2 + eps`.

use alloc::vec::Vec;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive};

use crate::error::{Error, Result};

/// Smallest slack the exact construction accepts.
pub const MIN_CONVERSE_EPSILON: f64 = 1e-4;

const MAX_PROVED_EPSILON: f64 = 1.0 / 144.0;

/// Breakpoints `x_1..x_{K+1}` of the worst-case family for one slack value.
#[derive(Debug, Clone, PartialEq)]
pub struct ConverseFamily {
    epsilon: f64,
    x: Vec<f64>,
}

impl ConverseFamily {
    /// Builds the family for `eps` in `(0, 1/144]`, the range on which all of
    /// its geometric claims hold.
    pub fn new(epsilon: f64) -> Result<Self> {
        if !(epsilon > 0.0 && epsilon <= MAX_PROVED_EPSILON) {
            return Err(Error::Domain {
                name: "epsilon",
                value: epsilon,
                range: "(0, 1/144]",
            });
        }
        Self::extended(epsilon)
    }

    /// Exact construction from a rational slack `numer / denom`.
    pub fn from_ratio(numer: u64, denom: u64) -> Result<Self> {
        let (n, d) = (u128::from(numer), u128::from(denom));
        if d == 0 || n == 0 || 144 * n > d {
            return Err(Error::Domain {
                name: "epsilon",
                value: numer as f64 / denom as f64,
                range: "(0, 1/144]",
            });
        }
        if 10_000 * n < d {
            return Err(Error::Domain {
                name: "epsilon",
                value: numer as f64 / denom as f64,
                range: "[1e-4, 1/144]",
            });
        }
        let eps = BigRational::new(BigInt::from(numer), BigInt::from(denom));
        Self::construct(numer as f64 / denom as f64, eps)
    }

    /// Builds the family for any slack where the construction still yields
    /// valid capacity laws, i.e. `[x_k, x_{k+1}] ⊂ [7/12, 1)` for every `k <= K`.
    ///
    /// Above `1/144` the breakpoints and laws stay well defined but the
    /// bounds `K >= 5` and `K >= 1/(36 eps)` may fail. Simulation uses this to
    /// run the family at desk-scale slacks such as `1/16`.
    pub fn extended(epsilon: f64) -> Result<Self> {
        if !(MIN_CONVERSE_EPSILON..0.5).contains(&epsilon) {
            return Err(Error::Domain {
                name: "epsilon",
                value: epsilon,
                range: "[1e-4, 1/2)",
            });
        }
        let eps = BigRational::from_float(epsilon).ok_or(Error::Domain {
            name: "epsilon",
            value: epsilon,
            range: "finite",
        })?;
        let family = Self::construct(epsilon, eps)?;
        if family.x_k(family.k_max() + 1) >= 1.0 {
            return Err(Error::Config(alloc::format!(
                "epsilon = {epsilon} pushes x_(K+1) to 1 or beyond; the laws are not valid"
            )));
        }
        Ok(family)
    }

    fn construct(epsilon: f64, eps: BigRational) -> Result<Self> {
        let half = BigRational::new(BigInt::one(), BigInt::from(2));
        let ratio = (&half + &eps) / (&half - &eps);
        let two_thirds = BigRational::new(BigInt::from(2), BigInt::from(3));
        let mut current = BigRational::new(BigInt::from(7), BigInt::from(12));
        let mut x = alloc::vec![to_f64(&current)?];
        while current < two_thirds {
            current = &current * &ratio;
            x.push(to_f64(&current)?);
        }
        Ok(Self { epsilon, x })
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    /// `K = min{k : x_{k+1} >= 2/3}`.
    pub fn k_max(&self) -> usize {
        self.x.len() - 1
    }

    /// Breakpoint `x_k`, 1-based, `k` in `1..=K+1`.
    pub fn x_k(&self, k: usize) -> f64 {
        self.x[k - 1]
    }

    /// All breakpoints `x_1..x_{K+1}`.
    pub fn breakpoints(&self) -> &[f64] {
        &self.x
    }

    /// Interval `I_k = (x_k, x_{k+1}]` for `k` in `1..=K`.
    pub fn interval(&self, k: usize) -> (f64, f64) {
        (self.x[k - 1], self.x[k])
    }

    pub fn intervals(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.x.windows(2).map(|w| (w[0], w[1]))
    }

    /// Capacity law of environment `k` in `1..=K`.
    pub fn law(&self, k: usize) -> Result<ConverseLaw> {
        if k == 0 || k > self.k_max() {
            return Err(Error::Config(alloc::format!(
                "environment index {k} outside 1..={}",
                self.k_max()
            )));
        }
        let (lo, hi) = self.interval(k);
        Ok(ConverseLaw {
            epsilon: self.epsilon,
            k,
            lo,
            hi,
        })
    }
}

fn to_f64(x: &BigRational) -> Result<f64> {
    x.to_f64()
        .ok_or_else(|| Error::Config("breakpoint not representable as f64".into()))
}

/// Capacity law of one environment of the family (`k >= 1`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConverseLaw {
    pub epsilon: f64,
    pub k: usize,
    /// `x_k`
    pub lo: f64,
    /// `x_{k+1}`
    pub hi: f64,
}

impl ConverseLaw {
    fn floor(&self) -> f64 {
        0.5 - self.epsilon
    }

    pub(crate) fn tail(&self, r: f64) -> f64 {
        let c = self.floor();
        if r <= c {
            1.0
        } else if r <= self.lo {
            c / r
        } else if r <= self.hi {
            c / self.lo
        } else if r <= 1.0 {
            c / r
        } else {
            0.0
        }
    }

    pub(crate) fn cdf(&self, x: f64) -> f64 {
        let c = self.floor();
        if x < c {
            0.0
        } else if x < self.lo {
            1.0 - c / x
        } else if x < self.hi {
            1.0 - c / self.lo
        } else if x < 1.0 {
            1.0 - c / x
        } else {
            1.0
        }
    }

    pub(crate) fn quantile(&self, u: f64) -> f64 {
        let c = self.floor();
        if u <= 1.0 - c / self.lo {
            c / (1.0 - u)
        } else if u <= 1.0 - c / self.hi {
            self.hi
        } else if u < 1.0 - c {
            (c / (1.0 - u)).clamp(self.hi, 1.0)
        } else {
            1.0
        }
    }
}

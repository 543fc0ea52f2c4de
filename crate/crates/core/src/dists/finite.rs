use alloc::vec::Vec;

use crate::error::{check_unit, Error, Result};

/// A law with finitely many atoms in `[0, 1]`.
///
/// Atoms are stored sorted by value with zero-mass atoms dropped and
/// duplicates merged, together with prefix and suffix sums of the masses.
#[derive(Debug, Clone, PartialEq)]
pub struct FiniteLaw {
    values: Vec<f64>,
    probs: Vec<f64>,
    // prefix[i] = P{X <= values[i]}
    prefix: Vec<f64>,
    // suffix[i] = P{X >= values[i]}
    suffix: Vec<f64>,
}

impl FiniteLaw {
    pub fn new(points: &[(f64, f64)]) -> Result<Self> {
        let mut atoms = Vec::with_capacity(points.len());
        let mut total = 0.0;
        for &(value, prob) in points {
            check_unit("support point", value)?;
            if !(prob >= 0.0 && prob.is_finite()) {
                return Err(Error::Domain {
                    name: "probability",
                    value: prob,
                    range: "[0, inf)",
                });
            }
            total += prob;
            if prob > 0.0 {
                atoms.push((value, prob));
            }
        }
        if libm::fabs(total - 1.0) > 1e-12 {
            return Err(Error::Domain {
                name: "total probability",
                value: total,
                range: "1 +/- 1e-12",
            });
        }
        atoms.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut values: Vec<f64> = Vec::with_capacity(atoms.len());
        let mut probs: Vec<f64> = Vec::with_capacity(atoms.len());
        for (v, p) in atoms {
            match values.last() {
                Some(&last) if last == v => *probs.last_mut().unwrap() += p,
                _ => {
                    values.push(v);
                    probs.push(p);
                }
            }
        }
        let mut prefix = Vec::with_capacity(probs.len());
        let mut acc = 0.0;
        for &p in &probs {
            acc += p;
            prefix.push(acc);
        }
        let mut suffix = alloc::vec![0.0; probs.len()];
        let mut acc = 0.0;
        for i in (0..probs.len()).rev() {
            acc += probs[i];
            suffix[i] = acc;
        }
        // total mass is 1 up to rounding; pin the ends
        if let Some(last) = prefix.last_mut() {
            *last = 1.0;
        }
        if let Some(first) = suffix.first_mut() {
            *first = 1.0;
        }
        Ok(Self {
            values,
            probs,
            prefix,
            suffix,
        })
    }

    pub fn atoms(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.values.iter().copied().zip(self.probs.iter().copied())
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn mean(&self) -> f64 {
        self.atoms().map(|(v, p)| v * p).sum()
    }

    /// `P{X >= r}` for any real `r`.
    pub fn tail(&self, r: f64) -> f64 {
        let i = self.values.partition_point(|&v| v < r);
        self.suffix.get(i).copied().unwrap_or(0.0)
    }

    /// `P{X <= x}` for any real `x`.
    pub fn cdf(&self, x: f64) -> f64 {
        let i = self.values.partition_point(|&v| v <= x);
        if i == 0 {
            0.0
        } else {
            self.prefix[i - 1]
        }
    }

    /// Smallest atom whose cumulative mass reaches `u`.
    pub fn quantile(&self, u: f64) -> f64 {
        let i = self.prefix.partition_point(|&c| c < u);
        self.values[i.min(self.values.len() - 1)]
    }
}

/// Neumaier-compensated running sum.
///
/// Long simulations add millions of queue lengths of very different
/// magnitudes; the compensation term keeps the error at O(1) ulp.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct CompensatedSum {
    sum: f64,
    carry: f64,
}

impl CompensatedSum {
    pub const fn new() -> Self {
        Self {
            sum: 0.0,
            carry: 0.0,
        }
    }

    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if libm::fabs(self.sum) >= libm::fabs(x) {
            self.carry += (self.sum - t) + x;
        } else {
            self.carry += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.carry
    }
}

impl core::iter::FromIterator<f64> for CompensatedSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut acc = Self::new();
        for x in iter {
            acc.add(x);
        }
        acc
    }
}

/// `ceil(x)` with a small downward guard so that values like `8.000000000000002`
/// produced by fractional powers do not jump to the next integer.
pub(crate) fn guarded_ceil(x: f64) -> f64 {
    libm::ceil(x - 1e-9)
}

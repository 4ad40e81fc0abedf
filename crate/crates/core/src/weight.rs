use std::fmt;

use crate::error::{Error, Result};

/// A weight `[k1, k2]` of a Hilbert modular form.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct WeightPair {
    pub k1: i64,
    pub k2: i64,
}

impl WeightPair {
    pub fn new(k1: i64, k2: i64) -> Self {
        WeightPair { k1, k2 }
    }

    /// `(k1 - k2)/2`, the exponent in the unit identity and in the passage
    /// between element- and ideal-indexed coefficients.
    pub fn half_difference(&self) -> Result<i64> {
        if (self.k1 - self.k2).rem_euclid(2) != 0 {
            return Err(Error::OddWeightDifference { k1: self.k1, k2: self.k2 });
        }
        Ok((self.k1 - self.k2) / 2)
    }

    pub fn add(&self, o: &WeightPair) -> WeightPair {
        WeightPair::new(self.k1 + o.k1, self.k2 + o.k2)
    }

    pub fn sub(&self, o: &WeightPair) -> WeightPair {
        WeightPair::new(self.k1 - o.k1, self.k2 - o.k2)
    }

    pub fn scale(&self, n: i64) -> WeightPair {
        WeightPair::new(self.k1 * n, self.k2 * n)
    }
}

impl fmt::Display for WeightPair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{},{}]", self.k1, self.k2)
    }
}

impl fmt::Debug for WeightPair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

use std::cmp::Ordering;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, ToPrimitive, Zero};

use super::coeff::CoeffElement;
use crate::error::{Error, Result};
use crate::Rational;

/// A closed interval `[lo, hi]` with rational endpoints. Operations round
/// outward by construction since the endpoints are exact.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Interval {
    pub lo: Rational,
    pub hi: Rational,
}

fn ten_pow(k: u32) -> BigInt {
    num_traits::pow(BigInt::from(10), k as usize)
}

impl Interval {
    pub fn point(q: Rational) -> Self {
        Interval { lo: q.clone(), hi: q }
    }

    /// Enclosure of `√n` for a nonnegative integer `n` with width `10^-digits`.
    pub fn sqrt_int(n: &BigInt, digits: u32) -> Self {
        assert!(!n.is_negative(), "square root of a negative integer");
        let scale = ten_pow(digits);
        let s = (n * &scale * &scale).sqrt();
        let lo = Rational::new(s.clone(), scale.clone());
        let hi = if &s * &s == n * &scale * &scale { lo.clone() } else { Rational::new(s + 1, scale) };
        Interval { lo, hi }
    }

    /// Enclosure of the square root of a nonnegative interval.
    pub fn sqrt(&self, digits: u32) -> Self {
        let scale = ten_pow(2 * digits);
        let root = ten_pow(digits);
        let lo_int = (&self.lo * Rational::from_integer(scale.clone())).floor().to_integer();
        let hi_int = (&self.hi * Rational::from_integer(scale)).ceil().to_integer();
        let lo_s = if lo_int.is_positive() { lo_int.sqrt() } else { BigInt::zero() };
        let hi_s = hi_int.sqrt();
        let hi_s = if &hi_s * &hi_s == hi_int { hi_s } else { hi_s + 1 };
        Interval { lo: Rational::new(lo_s, root.clone()), hi: Rational::new(hi_s, root) }
    }

    pub fn add(&self, o: &Interval) -> Interval {
        Interval { lo: &self.lo + &o.lo, hi: &self.hi + &o.hi }
    }

    pub fn neg(&self) -> Interval {
        Interval { lo: -self.hi.clone(), hi: -self.lo.clone() }
    }

    pub fn sub(&self, o: &Interval) -> Interval {
        self.add(&o.neg())
    }

    pub fn scale(&self, q: &Rational) -> Interval {
        let a = &self.lo * q;
        let b = &self.hi * q;
        if a <= b {
            Interval { lo: a, hi: b }
        } else {
            Interval { lo: b, hi: a }
        }
    }

    pub fn width(&self) -> Rational {
        &self.hi - &self.lo
    }

    /// Sign of every point in the interval, if uniform.
    pub fn sign(&self) -> Option<Ordering> {
        let z = Rational::zero();
        if self.lo > z {
            Some(Ordering::Greater)
        } else if self.hi < z {
            Some(Ordering::Less)
        } else if self.lo == z && self.hi == z {
            Some(Ordering::Equal)
        } else {
            None
        }
    }

    pub fn midpoint_f64(&self) -> f64 {
        ((&self.lo + &self.hi) / Rational::from_integer(2.into())).to_f64().unwrap_or(f64::NAN)
    }
}

/// Enclosure of the real value of `x` under the embedding sending `√r_i` to
/// `sign_i` times its principal root. Fails when `x` has a nonzero
/// coordinate on a basis element that is imaginary under the embedding.
pub fn real_enclosure(x: &CoeffElement, signs: usize, digits: u32) -> Result<Interval> {
    let rads = x.field().radicands().to_vec();
    let mut acc = Interval::point(Rational::zero());
    for (mask, c) in x.coords().iter().enumerate() {
        if c.is_zero() {
            continue;
        }
        let mut negs = 0;
        let mut sign = 1i64;
        let mut prod = BigInt::from(1);
        for (i, &r) in rads.iter().enumerate() {
            if mask >> i & 1 == 1 {
                if r < 0 {
                    negs += 1;
                }
                if signs >> i & 1 == 1 {
                    sign = -sign;
                }
                prod *= BigInt::from(r.abs());
            }
        }
        if negs % 2 == 1 {
            return Err(Error::Validation {
                invariant: "real element".into(),
                msg: format!("{x} has an imaginary component"),
            });
        }
        if (negs / 2).is_odd() {
            sign = -sign;
        }
        let root = Interval::sqrt_int(&prod, digits);
        acc = acc.add(&root.scale(&(c * Rational::from_integer(sign.into()))));
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arithmetic::CoeffField;

    #[test]
    fn sqrt_two_enclosure() {
        let i = Interval::sqrt_int(&BigInt::from(2), 25);
        assert!(&i.lo * &i.lo <= Rational::from_integer(2.into()));
        assert!(&i.hi * &i.hi >= Rational::from_integer(2.into()));
        assert!(i.width() < Rational::new(1.into(), ten_pow(24)));
    }

    #[test]
    fn real_value_of_sqrt57() {
        let h = CoeffField::new(vec![5, -3, -19]).unwrap();
        let r = h.sqrt_of(57).unwrap();
        let i = real_enclosure(&r, 0, 30).unwrap();
        assert!((i.midpoint_f64() - 57f64.sqrt()).abs() < 1e-12);
        // Flipping √-3 negates √57 = -√-3·√-19.
        let j = real_enclosure(&r, 0b010, 30).unwrap();
        assert!((j.midpoint_f64() + 57f64.sqrt()).abs() < 1e-12);
        assert!(real_enclosure(&h.basis(0b010), 0, 10).is_err());
    }
}

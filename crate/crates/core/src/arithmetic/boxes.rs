use std::cmp::Ordering;
use std::fmt;

use num_traits::Zero;

use super::base::{BaseField, FieldElement};
use crate::error::{Error, Result};
use crate::Rational;

/// A box `α₁ < b1, α₂ < b2` in the two real embeddings. The bounds are real
/// numbers of the base field, read through embedding 1, so that scaling by
/// embedding values of field elements stays exact. Rational bounds are the
/// common case.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct TruncationBound {
    b1: FieldElement,
    b2: FieldElement,
}

impl TruncationBound {
    pub fn from_elements(b1: FieldElement, b2: FieldElement) -> Result<Self> {
        if b1.sign_at(1) != Ordering::Greater || b2.sign_at(1) != Ordering::Greater {
            return Err(Error::Validation {
                invariant: "positive bound".into(),
                msg: format!("bounds ({b1}, {b2}) must be positive"),
            });
        }
        Ok(TruncationBound { b1, b2 })
    }

    pub fn rational(field: &BaseField, b1: Rational, b2: Rational) -> Result<Self> {
        Self::from_elements(field.element(b1, Rational::zero()), field.element(b2, Rational::zero()))
    }

    pub fn integers(field: &BaseField, b1: i64, b2: i64) -> Result<Self> {
        Self::from_elements(field.integer(b1), field.integer(b2))
    }

    /// The bound family `b(n) = (n·δ₂·s, n·δ₁·s)` built from the canonical
    /// different generator δ. Over Q(√5) with δ = (5+√5)/2 this is
    /// `((5n - n√5)/2, (5n + n√5)/2)`.
    pub fn b_n(field: &BaseField, n: i64) -> Result<Self> {
        let delta = field.different_gen();
        let scaled = delta.scale(&Rational::from_integer(n.into()));
        Self::from_elements(scaled.conj(), scaled)
    }

    pub fn b1(&self) -> &FieldElement {
        &self.b1
    }

    pub fn b2(&self) -> &FieldElement {
        &self.b2
    }

    pub fn approx(&self) -> (f64, f64) {
        (self.b1.approx(1), self.b2.approx(1))
    }

    /// Whether a totally positive `α` satisfies `α₁ < b1` and `α₂ < b2`.
    pub fn contains(&self, alpha: &FieldElement) -> bool {
        (alpha - &self.b1).sign_at(1) == Ordering::Less
            && (&alpha.conj() - &self.b2).sign_at(1) == Ordering::Less
    }

    /// Componentwise `self ≤ other`.
    pub fn le(&self, other: &TruncationBound) -> bool {
        (&other.b1 - &self.b1).sign_at(1) != Ordering::Less
            && (&other.b2 - &self.b2).sign_at(1) != Ordering::Less
    }

    /// The bound `(b1·s₁, b2·s₂)` for a totally positive `s`.
    pub fn scale_by(&self, s: &FieldElement) -> TruncationBound {
        TruncationBound { b1: &self.b1 * s, b2: &self.b2 * &s.conj() }
    }

    /// The bound `(b1·s1, b2·s2)` with both factors read through
    /// embedding 1.
    pub fn scale_each(&self, s1: &FieldElement, s2: &FieldElement) -> TruncationBound {
        TruncationBound { b1: &self.b1 * s1, b2: &self.b2 * s2 }
    }

    /// Componentwise minimum.
    pub fn min(&self, other: &TruncationBound) -> TruncationBound {
        let pick = |a: &FieldElement, b: &FieldElement| {
            if (a - b).sign_at(1) == Ordering::Greater {
                b.clone()
            } else {
                a.clone()
            }
        };
        TruncationBound { b1: pick(&self.b1, &other.b1), b2: pick(&self.b2, &other.b2) }
    }

    /// Componentwise maximum.
    pub fn max(&self, other: &TruncationBound) -> TruncationBound {
        let pick = |a: &FieldElement, b: &FieldElement| {
            if (a - b).sign_at(1) == Ordering::Less {
                b.clone()
            } else {
                a.clone()
            }
        };
        TruncationBound { b1: pick(&self.b1, &other.b1), b2: pick(&self.b2, &other.b2) }
    }
}

impl fmt::Display for TruncationBound {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let show = |e: &FieldElement| {
            if e.is_rational() {
                format!("{}", e.x())
            } else {
                format!("[{e}]")
            }
        };
        write!(f, "({}, {})", show(&self.b1), show(&self.b2))
    }
}

impl fmt::Debug for TruncationBound {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl BaseField {
    /// Totally positive integers with `α₁ < b1` and `α₂ < b2`, ordered by
    /// trace and then by the `√d` coordinate. Zero is not included.
    pub fn enumerate_box(&self, bound: &TruncationBound) -> Vec<FieldElement> {
        let (f1, f2) = bound.approx();
        let r = (self.d() as f64).sqrt();
        let one_mod_four = self.d().rem_euclid(4) == 1;
        // Half coordinates (a, b): α = (a + b√d)/2, so a = α₁ + α₂ and
        // b√d = α₁ - α₂. Float ranges are padded; the exact test decides.
        let a_max = (f1 + f2).ceil() as i64 + 1;
        let b_min = (-f2 / r).floor() as i64 - 1;
        let b_max = (f1 / r).ceil() as i64 + 1;
        let mut out = Vec::new();
        for a in 1..=a_max {
            for b in b_min..=b_max {
                if one_mod_four {
                    if (a - b).rem_euclid(2) != 0 {
                        continue;
                    }
                } else if a % 2 != 0 || b % 2 != 0 {
                    continue;
                }
                let alpha = self.from_half(a, b);
                if alpha.is_totally_positive() && bound.contains(&alpha) {
                    out.push(alpha);
                }
            }
        }
        out.sort_by(BaseField::index_cmp);
        out
    }
}

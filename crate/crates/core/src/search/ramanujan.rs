//! The Ramanujan bound `|c(p)| ≤ 2N(p)^{(k0-1)/2}` at every archimedean
//! place, decided exactly with rational interval enclosures.

use std::cmp::Ordering;

use num_bigint::BigInt;
use num_traits::ToPrimitive;

use crate::arithmetic::interval::{real_enclosure, Interval};
use crate::arithmetic::{CoeffElement, PrincipalIdeal};
use crate::error::Result;
use crate::hecke::NewformRecord;
use crate::weight::WeightPair;
use crate::Rational;

/// Required width of the final enclosures.
pub const ENCLOSURE_WIDTH: f64 = 1e-20;

#[derive(Clone, Debug)]
pub struct RamanujanRow {
    pub prime: PrincipalIdeal,
    pub divides_level: bool,
    /// Pass or fail at `∞1` and `∞2`: all embeddings of the coefficient
    /// field extending the place must satisfy the bound.
    pub passes: [bool; 2],
    /// Largest `|c(p)|` over the embeddings above each place.
    pub abs_value: [f64; 2],
    pub bound: f64,
    /// Widest enclosure of `4N^{k0-1} - |c(p)|²` used in the decision.
    pub width: f64,
}

impl RamanujanRow {
    pub fn margins(&self) -> [f64; 2] {
        [self.bound - self.abs_value[0], self.bound - self.abs_value[1]]
    }
}

/// `(2N^{(k0-1)/2})² = 4N^{k0-1}` with `k0 = max(k1, k2)`.
pub fn ramanujan_bound_squared(norm: u64, weight: WeightPair) -> BigInt {
    let k0 = weight.k1.max(weight.k2);
    BigInt::from(4) * num_traits::pow(BigInt::from(norm), (k0 - 1).max(0) as usize)
}

/// Checks every listed prime of norm at most `norm_bound`.
pub fn ramanujan_check(record: &NewformRecord, norm_bound: u64) -> Result<Vec<RamanujanRow>> {
    let k = &record.coeff_field;
    let root_d = k.sqrt_of(record.field.d());
    let mut rows = Vec::new();
    for (p, c) in &record.eigenvalues {
        if p.is_unit_ideal() || p.norm() > norm_bound {
            continue;
        }
        let b2 = Rational::from_integer(ramanujan_bound_squared(p.norm(), record.weight));
        let bound = b2.to_f64().unwrap_or(f64::INFINITY).sqrt();
        let abs2 = c * &c.complex_conjugate();
        let mut passes = [true, true];
        let mut abs_value = [0f64, 0f64];
        let mut width = 0f64;
        for signs in 0..k.degree() {
            let places: Vec<usize> = match &root_d {
                Some(r) => {
                    let s = real_enclosure(r, signs, 10)?.sign().expect("nonzero radical");
                    vec![if s == Ordering::Greater { 0 } else { 1 }]
                }
                None => vec![0, 1],
            };
            let (gap, w) = decide(&abs2, &b2, signs)?;
            let mag = real_enclosure(&abs2, signs, 30)?.sqrt(20).midpoint_f64();
            width = width.max(w);
            for i in places {
                passes[i] &= gap != Ordering::Less;
                abs_value[i] = abs_value[i].max(mag);
            }
        }
        rows.push(RamanujanRow {
            prime: p.clone(),
            divides_level: record.field.divides(p, &record.level),
            passes,
            abs_value,
            bound,
            width,
        });
    }
    Ok(rows)
}

/// Sign of `b² - |c|²` under one embedding, refining until decided and
/// narrower than the required width. Embeddings are injective, so a
/// nonzero difference is eventually separated from zero.
fn decide(abs2: &CoeffElement, b2: &Rational, signs: usize) -> Result<(Ordering, f64)> {
    if (abs2 - &abs2.field().from_rational(b2.clone())).is_zero() {
        return Ok((Ordering::Equal, 0.0));
    }
    let limit = Rational::new(1.into(), num_traits::pow(BigInt::from(10), 20));
    let mut digits = 30;
    loop {
        let e = Interval::point(b2.clone()).sub(&real_enclosure(abs2, signs, digits)?);
        let w = e.width();
        if let Some(s) = e.sign() {
            if w < limit {
                return Ok((s, w.to_f64().unwrap_or(0.0)));
            }
        }
        digits += 30;
    }
}

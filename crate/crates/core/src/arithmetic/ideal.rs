use std::cmp::Ordering;
use std::fmt;

use num_traits::{Signed, ToPrimitive};

use super::base::{BaseField, FieldElement};
use crate::error::{Error, Result};

/// A nonzero integral ideal, stored through its canonical totally positive
/// generator.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct PrincipalIdeal {
    gen: FieldElement,
    norm: u64,
}

impl PrincipalIdeal {
    pub fn gen(&self) -> &FieldElement {
        &self.gen
    }

    pub fn norm(&self) -> u64 {
        self.norm
    }

    pub fn is_unit_ideal(&self) -> bool {
        self.norm == 1
    }
}

impl Ord for PrincipalIdeal {
    fn cmp(&self, other: &Self) -> Ordering {
        self.norm
            .cmp(&other.norm)
            .then_with(|| BaseField::index_cmp(&self.gen, &other.gen))
    }
}

impl PartialOrd for PrincipalIdeal {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for PrincipalIdeal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({})", self.gen)
    }
}

impl fmt::Debug for PrincipalIdeal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}) [N={}]", self.gen, self.norm)
    }
}

pub(crate) fn factor_u64(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut p = 2u64;
    while p * p <= n {
        if n.is_multiple_of(p) {
            let mut e = 0;
            while n.is_multiple_of(p) {
                n /= p;
                e += 1;
            }
            out.push((p, e));
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

pub(crate) fn is_prime_u64(n: u64) -> bool {
    n >= 2 && factor_u64(n) == vec![(n, 1)]
}

fn pow_mod(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut acc = 1u128;
    let mut base = (b % m) as u128;
    let m128 = m as u128;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * base % m128;
        }
        base = base * base % m128;
        e >>= 1;
    }
    b = acc as u64;
    b
}

/// Legendre symbol (a/p) for an odd prime p, as -1, 0 or 1.
pub(crate) fn legendre(a: i64, p: u64) -> i32 {
    let r = a.rem_euclid(p as i64) as u64;
    if r == 0 {
        return 0;
    }
    if pow_mod(r, (p - 1) / 2, p) == 1 {
        1
    } else {
        -1
    }
}

/// How a rational prime decomposes in the base field.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Splitting {
    Split,
    Inert,
    Ramified,
}

impl BaseField {
    /// The ideal generated by a nonzero integral element.
    pub fn ideal(&self, e: &FieldElement) -> Result<PrincipalIdeal> {
        if e.is_zero() {
            return Err(Error::ZeroElement);
        }
        if !e.is_integral() {
            return Err(Error::NotIntegral(e.to_string()));
        }
        let gen = self.canonical_tp_generator(e)?;
        let norm = gen
            .norm()
            .abs()
            .to_integer()
            .to_u64()
            .ok_or(Error::TooLarge { norm: u64::MAX, limit: u64::MAX })?;
        Ok(PrincipalIdeal { gen, norm })
    }

    pub fn unit_ideal(&self) -> PrincipalIdeal {
        PrincipalIdeal { gen: self.one(), norm: 1 }
    }

    pub fn splitting(&self, p: u64) -> Splitting {
        let disc = self.discriminant();
        if disc.rem_euclid(p as i64) == 0 {
            return Splitting::Ramified;
        }
        if p == 2 {
            // Here d ≡ 1 (mod 4); 2 splits iff d ≡ 1 (mod 8).
            return if self.d().rem_euclid(8) == 1 { Splitting::Split } else { Splitting::Inert };
        }
        if legendre(disc, p) == 1 {
            Splitting::Split
        } else {
            Splitting::Inert
        }
    }

    /// An integral element of norm ±p, for p split or ramified.
    fn element_of_norm(&self, p: u64) -> FieldElement {
        let d = self.d() as i128;
        let p = p as i128;
        let one_mod_four = self.d().rem_euclid(4) == 1;
        for b in 0i128.. {
            for sign in [1i128, -1] {
                if one_mod_four {
                    let t = d * b * b + sign * 4 * p;
                    if let Some(a) = super::base::exact_sqrt(t) {
                        if (a - b).rem_euclid(2) == 0 {
                            return self.from_half(a as i64, b as i64);
                        }
                    }
                } else {
                    let t = d * b * b + sign * p;
                    if let Some(a) = super::base::exact_sqrt(t) {
                        return self.from_half(2 * a as i64, 2 * b as i64);
                    }
                }
            }
        }
        unreachable!("narrow class number one guarantees a generator")
    }

    /// Prime ideals above the rational prime p, in canonical order.
    pub fn primes_above(&self, p: u64) -> Result<Vec<PrincipalIdeal>> {
        if !is_prime_u64(p) {
            return Err(Error::NotPrime(p.to_string()));
        }
        let mut out = match self.splitting(p) {
            Splitting::Inert => vec![self.ideal(&self.integer(p as i64))?],
            Splitting::Ramified => vec![self.ideal(&self.element_of_norm(p))?],
            Splitting::Split => {
                let pi = self.element_of_norm(p);
                vec![self.ideal(&pi)?, self.ideal(&pi.conj())?]
            }
        };
        out.sort();
        Ok(out)
    }

    /// All prime ideals of norm at most `norm_bound`, in canonical order.
    pub fn primes_up_to(&self, norm_bound: u64) -> Vec<PrincipalIdeal> {
        let mut out = Vec::new();
        for p in 2..=norm_bound {
            if !is_prime_u64(p) {
                continue;
            }
            for q in self.primes_above(p).expect("p is prime") {
                if q.norm <= norm_bound {
                    out.push(q);
                }
            }
        }
        out.sort();
        out
    }

    /// Whether `a` divides `b`.
    pub fn divides(&self, a: &PrincipalIdeal, b: &PrincipalIdeal) -> bool {
        if !b.norm.is_multiple_of(a.norm) {
            return false;
        }
        b.gen.checked_div(&a.gen).map(|q| q.is_integral()).unwrap_or(false)
    }

    pub fn mul_ideals(&self, a: &PrincipalIdeal, b: &PrincipalIdeal) -> PrincipalIdeal {
        self.ideal(&(&a.gen * &b.gen)).expect("product of nonzero integral elements")
    }

    /// `b / a` when `a` divides `b`.
    pub fn quotient(&self, b: &PrincipalIdeal, a: &PrincipalIdeal) -> Option<PrincipalIdeal> {
        if !self.divides(a, b) {
            return None;
        }
        let q = b.gen.checked_div(&a.gen)?;
        self.ideal(&q).ok()
    }

    pub fn is_prime_ideal(&self, a: &PrincipalIdeal) -> bool {
        let f = self.factor(a);
        f.len() == 1 && f[0].1 == 1
    }

    /// Prime factorization, primes in canonical order.
    pub fn factor(&self, a: &PrincipalIdeal) -> Vec<(PrincipalIdeal, u32)> {
        let mut out = Vec::new();
        let mut rest = a.clone();
        for (p, _) in factor_u64(a.norm) {
            for q in self.primes_above(p).expect("prime") {
                let mut e = 0;
                while let Some(r) = self.quotient(&rest, &q) {
                    rest = r;
                    e += 1;
                }
                if e > 0 {
                    out.push((q, e));
                }
            }
        }
        debug_assert!(rest.is_unit_ideal());
        out.sort();
        out
    }

    pub fn coprime(&self, a: &PrincipalIdeal, b: &PrincipalIdeal) -> bool {
        let fa = self.factor(a);
        fa.iter().all(|(p, _)| !self.divides(p, b))
    }

    pub fn is_squarefree(&self, a: &PrincipalIdeal) -> bool {
        self.factor(a).iter().all(|(_, e)| *e == 1)
    }

    /// All ideal divisors of `a`, sorted canonically.
    pub fn divisors(&self, a: &PrincipalIdeal) -> Vec<PrincipalIdeal> {
        let mut out = vec![self.unit_ideal()];
        for (p, e) in self.factor(a) {
            let mut next = Vec::with_capacity(out.len() * (e as usize + 1));
            for m in &out {
                let mut cur = m.clone();
                next.push(cur.clone());
                for _ in 0..e {
                    cur = self.mul_ideals(&cur, &p);
                    next.push(cur.clone());
                }
            }
            out = next;
        }
        out.sort();
        out
    }

    /// The ideal `p^e`.
    pub fn ideal_pow(&self, p: &PrincipalIdeal, e: u32) -> PrincipalIdeal {
        let mut acc = self.unit_ideal();
        for _ in 0..e {
            acc = self.mul_ideals(&acc, p);
        }
        acc
    }

    /// Valuation of `a` at the prime `p`.
    pub fn valuation(&self, p: &PrincipalIdeal, a: &PrincipalIdeal) -> u32 {
        let mut rest = a.clone();
        let mut e = 0;
        while let Some(r) = self.quotient(&rest, p) {
            rest = r;
            e += 1;
        }
        e
    }
}

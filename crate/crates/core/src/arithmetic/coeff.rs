use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::base::{is_squarefree, FieldElement};
use crate::error::{Error, Result};
use crate::Rational;

/// A multiquadratic field `Q(√r_1, ..., √r_k)` with basis the `2^k` products
/// `b_S = ∏_{i∈S} √r_i`, indexed by bitmask `S`.
#[derive(PartialEq, Eq, Hash)]
pub struct CoeffField {
    radicands: Vec<i64>,
}

pub type CoeffFieldRef = Arc<CoeffField>;

fn rat(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

fn squarefree_part(mut n: i128) -> (i128, i128) {
    // Returns (s, m) with n = s²·m, m squarefree.
    let sign = if n < 0 { -1 } else { 1 };
    n = n.abs();
    let mut s = 1i128;
    let mut m = 1i128;
    let mut p = 2i128;
    while p * p <= n {
        while n % (p * p) == 0 {
            n /= p * p;
            s *= p;
        }
        if n % p == 0 {
            n /= p;
            m *= p;
        }
        p += 1;
    }
    (s, sign * m * n)
}

impl CoeffField {
    /// Builds the field; radicands must be squarefree, different from 0 and
    /// 1, and multiplicatively independent modulo squares.
    pub fn new(radicands: Vec<i64>) -> Result<CoeffFieldRef> {
        for &r in &radicands {
            if r == 0 || r == 1 || !is_squarefree(r) {
                return Err(Error::InvalidCoeffField(format!("bad radicand {r}")));
            }
        }
        if radicands.len() > 8 {
            return Err(Error::InvalidCoeffField("at most 8 radicands supported".into()));
        }
        for mask in 1u32..(1 << radicands.len()) {
            let prod: i128 = (0..radicands.len())
                .filter(|i| mask >> i & 1 == 1)
                .map(|i| radicands[i] as i128)
                .product();
            if squarefree_part(prod).1 == 1 {
                return Err(Error::InvalidCoeffField(format!(
                    "radicands {radicands:?} are dependent modulo squares"
                )));
            }
        }
        Ok(Arc::new(CoeffField { radicands }))
    }

    pub fn rationals() -> CoeffFieldRef {
        Arc::new(CoeffField { radicands: Vec::new() })
    }

    pub fn radicands(&self) -> &[i64] {
        &self.radicands
    }

    pub fn degree(&self) -> usize {
        1 << self.radicands.len()
    }

    /// `b_S · b_T = coeff · b_{S△T}` with `coeff = ∏_{i∈S∩T} r_i`.
    fn basis_product(&self, s: usize, t: usize) -> i64 {
        let both = s & t;
        (0..self.radicands.len()).filter(|i| both >> i & 1 == 1).map(|i| self.radicands[i]).product()
    }

    pub fn zero(self: &Arc<Self>) -> CoeffElement {
        CoeffElement { field: self.clone(), coords: vec![Rational::zero(); self.degree()] }
    }

    pub fn one(self: &Arc<Self>) -> CoeffElement {
        self.from_rational(Rational::one())
    }

    pub fn from_int(self: &Arc<Self>, n: i64) -> CoeffElement {
        self.from_rational(rat(n))
    }

    pub fn from_rational(self: &Arc<Self>, q: Rational) -> CoeffElement {
        let mut z = self.zero();
        z.coords[0] = q;
        z
    }

    /// The basis element `b_S`.
    pub fn basis(self: &Arc<Self>, mask: usize) -> CoeffElement {
        let mut z = self.zero();
        z.coords[mask] = Rational::one();
        z
    }

    pub fn element(self: &Arc<Self>, coords: Vec<Rational>) -> Result<CoeffElement> {
        if coords.len() != self.degree() {
            return Err(Error::InvalidCoeffField(format!(
                "expected {} coordinates, got {}",
                self.degree(),
                coords.len()
            )));
        }
        Ok(CoeffElement { field: self.clone(), coords })
    }

    /// Human-readable label of a basis element, e.g. `√5·√-3`.
    pub fn label(&self, mask: usize) -> String {
        if mask == 0 {
            return "1".into();
        }
        (0..self.radicands.len())
            .filter(|i| mask >> i & 1 == 1)
            .map(|i| format!("√{}", self.radicands[i]))
            .collect::<Vec<_>>()
            .join("·")
    }

    /// Finds `S` and a rational `c` with `b_S = c·√target` up to sign,
    /// returning `√target` expressed in the basis, where `√target` is the
    /// principal root (positive, or `i·√|target|`).
    pub fn sqrt_of(self: &Arc<Self>, target: i64) -> Option<CoeffElement> {
        if target == 0 {
            return Some(self.zero());
        }
        let (s0, m0) = squarefree_part(target as i128);
        if m0 == 1 {
            return Some(self.from_int(s0 as i64));
        }
        for mask in 1..self.degree() {
            let prod: i128 = (0..self.radicands.len())
                .filter(|i| mask >> i & 1 == 1)
                .map(|i| self.radicands[i] as i128)
                .product();
            let (s1, m1) = squarefree_part(prod);
            if m1 != m0 {
                continue;
            }
            // b_S = ∏ √r_i (principal roots) = i^{#neg} √|prod|.
            // √target = i^{[target<0]} s0 √|m0|, √|prod| = s1 √|m0|.
            let negs = (0..self.radicands.len())
                .filter(|i| mask >> i & 1 == 1 && self.radicands[*i] < 0)
                .count() as i64;
            let want = if target < 0 { 1 } else { 0 };
            // b_S = i^{negs} s1 √|m0| and √target = i^{want} s0 √|m0|, so
            // √target = i^{want-negs} (s0/s1) b_S, with want-negs even here.
            let k = (want - negs).rem_euclid(4);
            debug_assert!(k % 2 == 0);
            let sign = if k == 0 { 1 } else { -1 };
            let c = Rational::new(BigInt::from(sign * s0), BigInt::from(s1));
            let mut z = self.zero();
            z.coords[mask] = c;
            return Some(z);
        }
        None
    }

    /// Image of a base field element, using `√d` from this field.
    pub fn from_base(self: &Arc<Self>, e: &FieldElement) -> Result<CoeffElement> {
        let mut out = self.from_rational(e.x().clone());
        if !e.y().is_zero() {
            let r = self.sqrt_of(e.d()).ok_or_else(|| {
                Error::FieldMismatch(format!("coefficient field lacks √{}", e.d()))
            })?;
            out = &out + &r.scale(e.y());
        }
        Ok(out)
    }

    /// Whether every basis element of `other` lives in `self`.
    pub fn contains(self: &Arc<Self>, other: &CoeffField) -> bool {
        other.radicands.iter().all(|&r| self.sqrt_of(r).is_some())
    }

    /// Re-expresses an element of a subfield in this field.
    pub fn embed(self: &Arc<Self>, x: &CoeffElement) -> Result<CoeffElement> {
        if Arc::ptr_eq(self, &x.field) || **self == *x.field {
            return Ok(CoeffElement { field: self.clone(), coords: x.coords.clone() });
        }
        let radicals: Vec<CoeffElement> = x
            .field
            .radicands
            .iter()
            .map(|&r| {
                self.sqrt_of(r).ok_or_else(|| {
                    Error::FieldMismatch(format!("√{r} is not in Q({:?})", self.radicands))
                })
            })
            .collect::<Result<_>>()?;
        let mut out = self.zero();
        for (mask, c) in x.coords.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let mut b = self.one();
            for (i, rad) in radicals.iter().enumerate() {
                if mask >> i & 1 == 1 {
                    b = &b * rad;
                }
            }
            out = &out + &b.scale(c);
        }
        Ok(out)
    }

    /// Smallest field generated by both, keeping `a`'s radicands first.
    pub fn compositum(a: &CoeffFieldRef, b: &CoeffFieldRef) -> Result<CoeffFieldRef> {
        if a.contains(b) {
            return Ok(a.clone());
        }
        let mut rads = a.radicands.clone();
        for &r in &b.radicands {
            let cur = CoeffField::new(rads.clone())?;
            if cur.sqrt_of(r).is_none() {
                rads.push(r);
            }
        }
        CoeffField::new(rads)
    }
}

impl fmt::Debug for CoeffField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Q")?;
        if !self.radicands.is_empty() {
            let rs: Vec<String> = self.radicands.iter().map(|r| format!("√{r}")).collect();
            write!(f, "({})", rs.join(", "))?;
        }
        Ok(())
    }
}

/// An element of a [`CoeffField`], with rational coordinates on the radical
/// product basis.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct CoeffElement {
    field: CoeffFieldRef,
    coords: Vec<Rational>,
}

impl CoeffElement {
    pub fn field(&self) -> &CoeffFieldRef {
        &self.field
    }

    pub fn coords(&self) -> &[Rational] {
        &self.coords
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(|c| c.is_zero())
    }

    pub fn is_one(&self) -> bool {
        self.coords[0].is_one() && self.coords[1..].iter().all(|c| c.is_zero())
    }

    pub fn is_rational(&self) -> bool {
        self.coords[1..].iter().all(|c| c.is_zero())
    }

    pub fn scale(&self, q: &Rational) -> CoeffElement {
        CoeffElement { field: self.field.clone(), coords: self.coords.iter().map(|c| c * q).collect() }
    }

    /// The automorphism `√r_i ↦ -√r_i` for each `i` in `flip`.
    pub fn conjugate(&self, flip: usize) -> CoeffElement {
        let coords = self
            .coords
            .iter()
            .enumerate()
            .map(|(m, c)| if (m & flip).count_ones() % 2 == 1 { -c.clone() } else { c.clone() })
            .collect();
        CoeffElement { field: self.field.clone(), coords }
    }

    /// Complex conjugation for the principal-root embedding: flips the
    /// radicals with negative radicand.
    pub fn complex_conjugate(&self) -> CoeffElement {
        let flip = (0..self.field.radicands.len())
            .filter(|&i| self.field.radicands[i] < 0)
            .fold(0, |acc, i| acc | 1 << i);
        self.conjugate(flip)
    }

    pub fn inv(&self) -> Result<CoeffElement> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        // Multiply by conjugates one radical at a time; each step removes a
        // radical from the support of the running norm.
        let mut num = self.field.one();
        let mut den = self.clone();
        for i in 0..self.field.radicands.len() {
            let c = den.conjugate(1 << i);
            num = &num * &c;
            den = &den * &c;
        }
        debug_assert!(den.is_rational());
        let q = den.coords[0].clone();
        Ok(num.scale(&(Rational::one() / q)))
    }

    pub fn checked_div(&self, other: &CoeffElement) -> Result<CoeffElement> {
        Ok(self * &other.inv()?)
    }

    pub fn pow(&self, e: i64) -> Result<CoeffElement> {
        let mut b = if e < 0 { self.inv()? } else { self.clone() };
        let mut acc = self.field.one();
        let mut k = e.unsigned_abs();
        while k > 0 {
            if k & 1 == 1 {
                acc = &acc * &b;
            }
            b = &b * &b;
            k >>= 1;
        }
        Ok(acc)
    }

    /// Complex value under the embedding sending `√r_i` to `signs_i` times
    /// its principal root. Diagnostics and cross-checks only.
    /// A square root in the same field, if one exists, by descent along
    /// the last radicand: `(c + d√r)² = a + b√r` forces
    /// `c² = (a ± √(a² - rb²))/2` in the subfield.
    pub fn sqrt(&self) -> Option<CoeffElement> {
        let k = &self.field;
        let n = k.radicands.len();
        if n == 0 {
            let q = &self.coords[0];
            if q.is_negative() {
                return None;
            }
            let (p, d) = (q.numer().sqrt(), q.denom().sqrt());
            let root = Rational::new(p, d);
            return (&root * &root == *q).then(|| k.from_rational(root));
        }
        let r = k.radicands[n - 1];
        let sub = Arc::new(CoeffField { radicands: k.radicands[..n - 1].to_vec() });
        let half = self.coords.len() / 2;
        let a = CoeffElement { field: sub.clone(), coords: self.coords[..half].to_vec() };
        let b = CoeffElement { field: sub.clone(), coords: self.coords[half..].to_vec() };
        let lift = |c: &CoeffElement, d: &CoeffElement| {
            let mut coords = c.coords.clone();
            coords.extend(d.coords.iter().cloned());
            CoeffElement { field: k.clone(), coords }
        };
        let mut tries: Vec<(CoeffElement, CoeffElement)> = Vec::new();
        if b.is_zero() {
            if let Some(c) = a.sqrt() {
                tries.push((c, sub.zero()));
            }
            if let Some(d) = a.scale(&Rational::new(1.into(), r.into())).sqrt() {
                tries.push((sub.zero(), d));
            }
        } else {
            let norm = &(&a * &a) - &(&b * &b).scale(&Rational::from_integer(r.into()));
            if let Some(s) = norm.sqrt() {
                let half_q = Rational::new(1.into(), 2.into());
                for t in [&a + &s, &a - &s] {
                    if let Some(c) = t.scale(&half_q).sqrt() {
                        if !c.is_zero() {
                            let d = b.checked_div(&c.scale(&Rational::from_integer(2.into()))).ok()?;
                            tries.push((c, d));
                        }
                    }
                }
            }
        }
        tries.into_iter().map(|(c, d)| lift(&c, &d)).find(|y| &(y * y) == self)
    }

    pub fn to_complex(&self, signs: usize) -> Complex64 {
        let mut z = Complex64::new(0.0, 0.0);
        for (mask, c) in self.coords.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let mut b = Complex64::new(c.to_f64().unwrap_or(f64::NAN), 0.0);
            for (i, &r) in self.field.radicands.iter().enumerate() {
                if mask >> i & 1 == 1 {
                    let root = if r > 0 {
                        Complex64::new((r as f64).sqrt(), 0.0)
                    } else {
                        Complex64::new(0.0, (-r as f64).sqrt())
                    };
                    b *= if signs >> i & 1 == 1 { -root } else { root };
                }
            }
            z += b;
        }
        z
    }

    fn check_same(&self, other: &CoeffElement) {
        assert!(
            Arc::ptr_eq(&self.field, &other.field) || *self.field == *other.field,
            "mixing elements of {:?} and {:?}",
            self.field,
            other.field
        );
    }
}

impl fmt::Display for CoeffElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        for (mask, c) in self.coords.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let label = self.field.label(mask);
            let term = if mask == 0 {
                format!("{c}")
            } else if c.is_one() {
                label
            } else if *c == -Rational::one() {
                format!("-{label}")
            } else {
                format!("{c}*{label}")
            };
            parts.push(term);
        }
        if parts.is_empty() {
            return write!(f, "0");
        }
        let mut out = parts[0].clone();
        for p in &parts[1..] {
            if let Some(rest) = p.strip_prefix('-') {
                out.push_str(" - ");
                out.push_str(rest);
            } else {
                out.push_str(" + ");
                out.push_str(p);
            }
        }
        write!(f, "{out}")
    }
}

impl fmt::Debug for CoeffElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl<'a> Add<&'a CoeffElement> for &'a CoeffElement {
    type Output = CoeffElement;
    fn add(self, o: &CoeffElement) -> CoeffElement {
        self.check_same(o);
        let coords = self.coords.iter().zip(&o.coords).map(|(a, b)| a + b).collect();
        CoeffElement { field: self.field.clone(), coords }
    }
}

impl<'a> Sub<&'a CoeffElement> for &'a CoeffElement {
    type Output = CoeffElement;
    fn sub(self, o: &CoeffElement) -> CoeffElement {
        self.check_same(o);
        let coords = self.coords.iter().zip(&o.coords).map(|(a, b)| a - b).collect();
        CoeffElement { field: self.field.clone(), coords }
    }
}

impl<'a> Mul<&'a CoeffElement> for &'a CoeffElement {
    type Output = CoeffElement;
    fn mul(self, o: &CoeffElement) -> CoeffElement {
        self.check_same(o);
        let n = self.coords.len();
        if n == 1 {
            return CoeffElement { field: self.field.clone(), coords: vec![&self.coords[0] * &o.coords[0]] };
        }
        let mut out = vec![Rational::zero(); n];
        for (s, a) in self.coords.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (t, b) in o.coords.iter().enumerate() {
                if b.is_zero() {
                    continue;
                }
                let k = self.field.basis_product(s, t);
                out[s ^ t] += a * b * rat(k);
            }
        }
        CoeffElement { field: self.field.clone(), coords: out }
    }
}

impl Neg for &CoeffElement {
    type Output = CoeffElement;
    fn neg(self) -> CoeffElement {
        CoeffElement { field: self.field.clone(), coords: self.coords.iter().map(|c| -c.clone()).collect() }
    }
}

impl Add for CoeffElement {
    type Output = CoeffElement;
    fn add(self, o: CoeffElement) -> CoeffElement {
        &self + &o
    }
}
impl Sub for CoeffElement {
    type Output = CoeffElement;
    fn sub(self, o: CoeffElement) -> CoeffElement {
        &self - &o
    }
}
impl Mul for CoeffElement {
    type Output = CoeffElement;
    fn mul(self, o: CoeffElement) -> CoeffElement {
        &self * &o
    }
}
impl Neg for CoeffElement {
    type Output = CoeffElement;
    fn neg(self) -> CoeffElement {
        -&self
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn q(n: i64, d: i64) -> Rational {
        Rational::new(BigInt::from(n), BigInt::from(d))
    }

    fn q_sqrt_m3() -> CoeffFieldRef {
        CoeffField::new(vec![-3]).unwrap()
    }

    #[test]
    fn defining_relation() {
        let k = q_sqrt_m3();
        let r = k.basis(1);
        assert_eq!(&r * &r, k.from_int(-3));
    }

    #[test]
    fn sixth_root_of_unity_norm() {
        let k = q_sqrt_m3();
        let a = k.element(vec![q(1, 2), q(1, 2)]).unwrap();
        let b = k.element(vec![q(1, 2), q(-1, 2)]).unwrap();
        assert!((&a * &b).is_one());
    }

    #[test]
    fn inverse_example() {
        let k = q_sqrt_m3();
        let a = k.element(vec![q(-4, 1), q(4, 1)]).unwrap();
        let inv = a.inv().unwrap();
        assert_eq!(inv, k.element(vec![q(-1, 16), q(-1, 16)]).unwrap());
        assert!((&a * &inv).is_one());
        assert_eq!(k.zero().inv(), Err(Error::DivisionByZero));
    }

    #[test]
    fn dependent_radicands_rejected() {
        assert!(CoeffField::new(vec![5, -3, -15]).is_err());
        assert!(CoeffField::new(vec![4]).is_err());
        assert!(CoeffField::new(vec![5, -3, -19]).is_ok());
    }

    #[test]
    fn square_roots_inside_product_basis() {
        let h = CoeffField::new(vec![5, -3, -19]).unwrap();
        // Oracle: the square of the returned element must be the target,
        // and its principal-root value must match the float square root.
        for t in [5i64, -3, -19, 57, -15, -95, 285, 20, -12] {
            let r = h.sqrt_of(t).unwrap();
            assert_eq!(&r * &r, h.from_int(t), "√{t}");
            let z = r.to_complex(0);
            let want = if t > 0 {
                Complex64::new((t as f64).sqrt(), 0.0)
            } else {
                Complex64::new(0.0, (-t as f64).sqrt())
            };
            assert!((z - want).norm() < 1e-9, "√{t}: {z} vs {want}");
        }
        assert!(h.sqrt_of(2).is_none());
    }

    #[test]
    fn embedding_preserves_arithmetic() {
        let small = q_sqrt_m3();
        let big = CoeffField::new(vec![5, -3, -19]).unwrap();
        let a = small.element(vec![q(1, 2), q(3, 7)]).unwrap();
        let b = small.element(vec![q(-2, 1), q(1, 5)]).unwrap();
        let ea = big.embed(&a).unwrap();
        let eb = big.embed(&b).unwrap();
        assert_eq!(big.embed(&(&a * &b)).unwrap(), &ea * &eb);
        assert!(small.embed(&big.basis(1)).is_err());
    }

    #[test]
    fn compositum_contains_both() {
        let a = CoeffField::new(vec![-3]).unwrap();
        let b = CoeffField::new(vec![5, -15]).unwrap();
        let c = CoeffField::compositum(&a, &b).unwrap();
        assert_eq!(c.degree(), 4);
        assert!(c.contains(&a) && c.contains(&b));
    }

    fn arb_elem(field: CoeffFieldRef) -> impl Strategy<Value = CoeffElement> {
        proptest::collection::vec((-20i64..20, 1i64..6), field.degree()).prop_map(move |v| {
            field.element(v.into_iter().map(|(n, d)| q(n, d)).collect()).unwrap()
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]
        #[test]
        fn field_axioms(
            a in arb_elem(CoeffField::new(vec![5, -3, -19]).unwrap()),
            b in arb_elem(CoeffField::new(vec![5, -3, -19]).unwrap()),
            c in arb_elem(CoeffField::new(vec![5, -3, -19]).unwrap()),
        ) {
            prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
            prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
            prop_assert_eq!(&a * &b, &b * &a);
            if !a.is_zero() {
                prop_assert!((&a * &a.inv().unwrap()).is_one());
            }
        }
    }
}

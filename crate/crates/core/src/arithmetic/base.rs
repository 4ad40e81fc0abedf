use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::Rational;

/// An element `x + y·√d` of a real quadratic field. The radicand travels with
/// the element so that arithmetic can be written with operators.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct FieldElement {
    d: i64,
    x: Rational,
    y: Rational,
}

fn rat(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Sign of the real number `x + y·√d` (with `√d > 0`), decided exactly.
pub(crate) fn sign_of(x: &Rational, y: &Rational, d: i64) -> Ordering {
    let sx = x.cmp(&Rational::zero());
    let sy = y.cmp(&Rational::zero());
    if sy == Ordering::Equal {
        return sx;
    }
    if sx == Ordering::Equal || sx == sy {
        return sy;
    }
    // Opposite signs: compare magnitudes via x^2 against d*y^2.
    let lhs = x * x;
    let rhs = y * y * rat(d);
    match lhs.cmp(&rhs) {
        Ordering::Greater => sx,
        Ordering::Less => sy,
        Ordering::Equal => Ordering::Equal,
    }
}

impl FieldElement {
    pub fn new(d: i64, x: Rational, y: Rational) -> Self {
        FieldElement { d, x, y }
    }

    pub fn from_int(d: i64, n: i64) -> Self {
        FieldElement::new(d, rat(n), Rational::zero())
    }

    pub fn from_rational(d: i64, q: Rational) -> Self {
        FieldElement::new(d, q, Rational::zero())
    }

    /// The element `(a + b·√d)/2`.
    pub fn from_half(d: i64, a: i64, b: i64) -> Self {
        FieldElement::new(
            d,
            Rational::new(BigInt::from(a), BigInt::from(2)),
            Rational::new(BigInt::from(b), BigInt::from(2)),
        )
    }

    pub fn d(&self) -> i64 {
        self.d
    }
    pub fn x(&self) -> &Rational {
        &self.x
    }
    pub fn y(&self) -> &Rational {
        &self.y
    }

    pub fn zero(d: i64) -> Self {
        FieldElement::from_int(d, 0)
    }

    pub fn one(d: i64) -> Self {
        FieldElement::from_int(d, 1)
    }

    pub fn is_zero(&self) -> bool {
        self.x.is_zero() && self.y.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.x.is_one() && self.y.is_zero()
    }

    pub fn is_rational(&self) -> bool {
        self.y.is_zero()
    }

    pub fn conj(&self) -> Self {
        FieldElement::new(self.d, self.x.clone(), -self.y.clone())
    }

    pub fn norm(&self) -> Rational {
        &self.x * &self.x - &self.y * &self.y * rat(self.d)
    }

    pub fn trace(&self) -> Rational {
        &self.x * rat(2)
    }

    /// Exact sign of the image under embedding `i` (1 sends `√d` to the
    /// positive root, 2 to the negative one).
    pub fn sign_at(&self, embedding: usize) -> Ordering {
        match embedding {
            1 => sign_of(&self.x, &self.y, self.d),
            2 => sign_of(&self.x, &-self.y.clone(), self.d),
            _ => panic!("real quadratic fields have two embeddings, got {embedding}"),
        }
    }

    pub fn is_totally_positive(&self) -> bool {
        self.sign_at(1) == Ordering::Greater && self.sign_at(2) == Ordering::Greater
    }

    /// Floating point image under embedding `i`. Diagnostics only.
    pub fn approx(&self, embedding: usize) -> f64 {
        let x = self.x.to_f64().unwrap_or(f64::NAN);
        let y = self.y.to_f64().unwrap_or(f64::NAN);
        let r = (self.d as f64).sqrt();
        match embedding {
            1 => x + y * r,
            2 => x - y * r,
            _ => panic!("real quadratic fields have two embeddings, got {embedding}"),
        }
    }

    pub fn inv(&self) -> Option<Self> {
        if self.is_zero() {
            return None;
        }
        let n = self.norm();
        let c = self.conj();
        Some(FieldElement::new(self.d, c.x / &n, c.y / &n))
    }

    pub fn checked_div(&self, other: &Self) -> Option<Self> {
        other.inv().map(|i| self * &i)
    }

    pub fn pow(&self, e: i64) -> Option<Self> {
        let base = if e < 0 { self.inv()? } else { self.clone() };
        let mut acc = FieldElement::one(self.d);
        let mut b = base;
        let mut k = e.unsigned_abs();
        while k > 0 {
            if k & 1 == 1 {
                acc = &acc * &b;
            }
            b = &b * &b;
            k >>= 1;
        }
        Some(acc)
    }

    pub fn scale(&self, q: &Rational) -> Self {
        FieldElement::new(self.d, &self.x * q, &self.y * q)
    }

    /// Coordinates `(a, b)` with `self = (a + b√d)/2`, if both are integers.
    pub fn half_coords(&self) -> Option<(i64, i64)> {
        let a = &self.x * rat(2);
        let b = &self.y * rat(2);
        if !a.is_integer() || !b.is_integer() {
            return None;
        }
        Some((a.to_integer().to_i64()?, b.to_integer().to_i64()?))
    }

    /// Membership in the ring of integers.
    pub fn is_integral(&self) -> bool {
        let a = &self.x * rat(2);
        let b = &self.y * rat(2);
        if !a.is_integer() || !b.is_integer() {
            return false;
        }
        let (a, b) = (a.to_integer(), b.to_integer());
        if self.d.rem_euclid(4) == 1 {
            (&a - &b).is_even()
        } else {
            a.is_even() && b.is_even()
        }
    }

    fn check_same(&self, other: &Self) {
        assert_eq!(self.d, other.d, "mixing elements of Q(√{}) and Q(√{})", self.d, other.d);
    }
}

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some((a, b)) = self.half_coords() {
            if a % 2 != 0 || b % 2 != 0 {
                return match b {
                    0 => write!(f, "{a}/2"),
                    1 => write!(f, "({a}+√{})/2", self.d),
                    -1 => write!(f, "({a}-√{})/2", self.d),
                    b if b > 0 => write!(f, "({a}+{b}√{})/2", self.d),
                    b => write!(f, "({a}-{}√{})/2", -b, self.d),
                };
            }
        }
        if self.y.is_zero() {
            return write!(f, "{}", self.x);
        }
        let ys = if self.y.is_one() {
            String::new()
        } else if self.y == -Rational::one() {
            "-".to_string()
        } else {
            format!("{}", self.y)
        };
        if self.x.is_zero() {
            write!(f, "{ys}√{}", self.d)
        } else if self.y.is_positive() {
            write!(f, "{}+{ys}√{}", self.x, self.d)
        } else {
            write!(f, "{}{ys}√{}", self.x, self.d)
        }
    }
}

impl fmt::Debug for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl<'a> Add<&'a FieldElement> for &'a FieldElement {
    type Output = FieldElement;
    fn add(self, o: &FieldElement) -> FieldElement {
        self.check_same(o);
        FieldElement::new(self.d, &self.x + &o.x, &self.y + &o.y)
    }
}

impl<'a> Sub<&'a FieldElement> for &'a FieldElement {
    type Output = FieldElement;
    fn sub(self, o: &FieldElement) -> FieldElement {
        self.check_same(o);
        FieldElement::new(self.d, &self.x - &o.x, &self.y - &o.y)
    }
}

impl<'a> Mul<&'a FieldElement> for &'a FieldElement {
    type Output = FieldElement;
    fn mul(self, o: &FieldElement) -> FieldElement {
        self.check_same(o);
        let d = rat(self.d);
        FieldElement::new(
            self.d,
            &self.x * &o.x + &self.y * &o.y * d,
            &self.x * &o.y + &self.y * &o.x,
        )
    }
}

impl Neg for &FieldElement {
    type Output = FieldElement;
    fn neg(self) -> FieldElement {
        FieldElement::new(self.d, -self.x.clone(), -self.y.clone())
    }
}

impl Add for FieldElement {
    type Output = FieldElement;
    fn add(self, o: FieldElement) -> FieldElement {
        &self + &o
    }
}
impl Sub for FieldElement {
    type Output = FieldElement;
    fn sub(self, o: FieldElement) -> FieldElement {
        &self - &o
    }
}
impl Mul for FieldElement {
    type Output = FieldElement;
    fn mul(self, o: FieldElement) -> FieldElement {
        &self * &o
    }
}
impl Neg for FieldElement {
    type Output = FieldElement;
    fn neg(self) -> FieldElement {
        -&self
    }
}

struct Inner {
    d: i64,
    fundamental_unit: FieldElement,
    tp_unit: FieldElement,
    different_gen: FieldElement,
}

/// A real quadratic field `Q(√d)` of narrow class number one, with its unit
/// data and a totally positive generator of the different.
#[derive(Clone)]
pub struct BaseField(Arc<Inner>);

impl PartialEq for BaseField {
    fn eq(&self, other: &Self) -> bool {
        self.0.d == other.0.d
    }
}
impl Eq for BaseField {}

impl fmt::Debug for BaseField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Q(√{})", self.0.d)
    }
}

pub(crate) fn is_squarefree(n: i64) -> bool {
    let mut m = n.unsigned_abs();
    let mut p = 2u64;
    while p * p <= m {
        if m.is_multiple_of(p * p) {
            return false;
        }
        if m.is_multiple_of(p) {
            m /= p;
        }
        p += 1;
    }
    true
}

fn isqrt_u128(n: u128) -> u128 {
    if n < 2 {
        return n;
    }
    let mut x = (n as f64).sqrt() as u128;
    while x * x > n {
        x -= 1;
    }
    while (x + 1) * (x + 1) <= n {
        x += 1;
    }
    x
}

pub(crate) fn exact_sqrt(n: i128) -> Option<i128> {
    if n < 0 {
        return None;
    }
    let r = isqrt_u128(n as u128) as i128;
    (r * r == n).then_some(r)
}

impl BaseField {
    /// Builds `Q(√d)`, computing the fundamental unit by search. Fails unless
    /// the fundamental unit has norm -1, which narrow class number one forces.
    pub fn new(d: i64) -> Result<Self> {
        if d <= 1 || !is_squarefree(d) {
            return Err(Error::InvalidField(format!("{d} is not a squarefree integer > 1")));
        }
        let eps = Self::search_fundamental_unit(d)?;
        let different = if d.rem_euclid(4) == 1 {
            FieldElement::new(d, Rational::zero(), Rational::one())
        } else {
            FieldElement::new(d, Rational::zero(), rat(2))
        };
        Self::with_generators(d, eps, different)
    }

    /// Builds the field from user-supplied generators, validating only their
    /// claimed norms and signs.
    pub fn with_generators(
        d: i64,
        fundamental_unit: FieldElement,
        different_gen: FieldElement,
    ) -> Result<Self> {
        if d <= 1 || !is_squarefree(d) {
            return Err(Error::InvalidField(format!("{d} is not a squarefree integer > 1")));
        }
        if fundamental_unit.d() != d || different_gen.d() != d {
            return Err(Error::InvalidField("generator radicand mismatch".into()));
        }
        if !fundamental_unit.is_integral() || fundamental_unit.norm().abs() != Rational::one() {
            return Err(Error::InvalidField(format!("{fundamental_unit} is not a unit")));
        }
        if fundamental_unit.norm() != -Rational::one() {
            return Err(Error::InvalidField(format!(
                "fundamental unit {fundamental_unit} has norm +1; narrow class number is not one"
            )));
        }
        let mut eps = fundamental_unit;
        if eps.sign_at(1) == Ordering::Less {
            eps = -eps;
        }
        if eps.approx(1) < 1.0 {
            eps = eps.inv().expect("unit");
            if eps.sign_at(1) == Ordering::Less {
                eps = -eps;
            }
        }
        let tp_unit = &eps * &eps;
        let disc = if d.rem_euclid(4) == 1 { d } else { 4 * d };
        if !different_gen.is_integral() || different_gen.norm().abs() != rat(disc) {
            return Err(Error::InvalidField(format!(
                "{different_gen} does not have norm ±{disc}"
            )));
        }
        let inner = Inner { d, fundamental_unit: eps, tp_unit, different_gen: different_gen.clone() };
        let field = BaseField(Arc::new(inner));
        let delta = field.canonical_tp_generator(&different_gen)?;
        Ok(BaseField(Arc::new(Inner {
            d,
            fundamental_unit: field.0.fundamental_unit.clone(),
            tp_unit: field.0.tp_unit.clone(),
            different_gen: delta,
        })))
    }

    fn search_fundamental_unit(d: i64) -> Result<FieldElement> {
        let one_mod_four = d.rem_euclid(4) == 1;
        for b in 1..2_000_000i128 {
            let db2 = (d as i128) * b * b;
            let targets: [i128; 2] = if one_mod_four { [db2 - 4, db2 + 4] } else { [db2 - 1, db2 + 1] };
            for t in targets {
                if let Some(a) = exact_sqrt(t) {
                    if a == 0 {
                        continue;
                    }
                    let e = if one_mod_four {
                        FieldElement::from_half(d, a as i64, b as i64)
                    } else {
                        FieldElement::new(d, rat(a as i64), rat(b as i64))
                    };
                    return Ok(e);
                }
            }
        }
        Err(Error::InvalidField(format!("no fundamental unit found for d = {d}")))
    }

    pub fn d(&self) -> i64 {
        self.0.d
    }

    pub fn discriminant(&self) -> i64 {
        if self.0.d.rem_euclid(4) == 1 {
            self.0.d
        } else {
            4 * self.0.d
        }
    }

    /// The fundamental unit `ε > 1` (norm -1).
    pub fn fundamental_unit(&self) -> &FieldElement {
        &self.0.fundamental_unit
    }

    /// `ε²`, the generator of the totally positive units.
    pub fn tp_fundamental_unit(&self) -> &FieldElement {
        &self.0.tp_unit
    }

    /// Canonical totally positive generator of the different.
    pub fn different_gen(&self) -> &FieldElement {
        &self.0.different_gen
    }

    pub fn element(&self, x: Rational, y: Rational) -> FieldElement {
        FieldElement::new(self.0.d, x, y)
    }

    pub fn from_half(&self, a: i64, b: i64) -> FieldElement {
        FieldElement::from_half(self.0.d, a, b)
    }

    pub fn integer(&self, n: i64) -> FieldElement {
        FieldElement::from_int(self.0.d, n)
    }

    pub fn zero(&self) -> FieldElement {
        FieldElement::zero(self.0.d)
    }

    pub fn one(&self) -> FieldElement {
        FieldElement::one(self.0.d)
    }

    pub fn sqrt_d(&self) -> FieldElement {
        FieldElement::new(self.0.d, Rational::zero(), Rational::one())
    }

    /// Whether `u` is a unit of the ring of integers.
    pub fn is_unit(&self, u: &FieldElement) -> bool {
        u.is_integral() && u.norm().abs().is_one()
    }

    /// The unique totally positive associate `μ` of `e` with
    /// `1 <= μ₁/μ₂ < u₁/u₂`, `u` the totally positive fundamental unit.
    pub fn canonical_tp_generator(&self, e: &FieldElement) -> Result<FieldElement> {
        if e.is_zero() {
            return Err(Error::ZeroElement);
        }
        let eps = &self.0.fundamental_unit;
        let mut mu = if e.sign_at(1) == Ordering::Greater { e.clone() } else { -e };
        if mu.sign_at(2) != Ordering::Greater {
            // eps has signs (+, -), so this fixes the second embedding.
            mu = &mu * eps;
        }
        debug_assert!(mu.is_totally_positive());
        let u = &self.0.tp_unit;
        let u_inv = u.inv().expect("unit");
        // Jump close to the fundamental domain using a float estimate of the
        // log ratio, then settle with exact comparisons.
        let ratio = (mu.approx(1) / mu.approx(2)).ln();
        let step = (u.approx(1) / u.approx(2)).ln();
        if ratio.is_finite() && step > 0.0 {
            let k = (ratio / step).floor() as i64;
            if k.abs() > 1 {
                let shift = u.pow(-k + k.signum()).expect("unit");
                mu = &mu * &shift;
            }
        }
        loop {
            if mu.y() < &Rational::zero() {
                mu = &mu * u;
                continue;
            }
            let down = &mu * &u_inv;
            if down.y() >= &Rational::zero() {
                mu = down;
                continue;
            }
            return Ok(mu);
        }
    }

    /// Total order used for canonical indices: trace, then the `√d`
    /// coordinate (equivalently the first embedding at fixed trace).
    pub fn index_cmp(a: &FieldElement, b: &FieldElement) -> Ordering {
        a.x().cmp(b.x()).then_with(|| a.y().cmp(b.y()))
    }
}

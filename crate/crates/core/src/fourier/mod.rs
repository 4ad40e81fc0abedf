//! Truncated formal Fourier expansions indexed by totally positive integers
//! inside a box, with ring operations and the unit/ideal normalizations.

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, OnceLock};

use crate::arithmetic::{BaseField, CoeffElement, CoeffFieldRef, FieldElement, PrincipalIdeal};
use crate::error::{Error, Result};
use crate::exec::{map_range, Exec};
use crate::ray_class::RayCharacter;

pub use crate::arithmetic::TruncationBound;
pub use crate::weight::WeightPair;

/// The ordered index set of a box, shared between all series on it.
pub struct BoxIndex {
    field: BaseField,
    bound: TruncationBound,
    elems: Vec<FieldElement>,
    half: Vec<(i64, i64)>,
    pos: HashMap<(i64, i64), usize>,
    /// `pairs[γ]` lists `(β, δ)` with `β + δ = γ`, both nonzero box indices.
    pairs: OnceLock<Vec<Vec<(u32, u32)>>>,
    /// Start offsets of the groups of equal trace.
    levels: Vec<usize>,
}

impl fmt::Debug for BoxIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BoxIndex({:?}, {}, {} indices)", self.field, self.bound, self.elems.len())
    }
}

impl BoxIndex {
    pub fn new(field: &BaseField, bound: &TruncationBound) -> Arc<BoxIndex> {
        let elems = field.enumerate_box(bound);
        let half: Vec<(i64, i64)> = elems.iter().map(|e| e.half_coords().expect("integral")).collect();
        let pos = half.iter().enumerate().map(|(i, &h)| (h, i)).collect();
        let mut levels = Vec::new();
        for (i, h) in half.iter().enumerate() {
            if i == 0 || half[i - 1].0 != h.0 {
                levels.push(i);
            }
        }
        levels.push(elems.len());
        Arc::new(BoxIndex { field: field.clone(), bound: bound.clone(), elems, half, pos, pairs: OnceLock::new(), levels })
    }

    pub fn field(&self) -> &BaseField {
        &self.field
    }

    pub fn bound(&self) -> &TruncationBound {
        &self.bound
    }

    pub fn elements(&self) -> &[FieldElement] {
        &self.elems
    }

    pub fn len(&self) -> usize {
        self.elems.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elems.is_empty()
    }

    /// Position of `α` in the index, if it is a box index.
    pub fn position(&self, alpha: &FieldElement) -> Option<usize> {
        let h = alpha.half_coords()?;
        self.pos.get(&h).copied()
    }

    fn pairs(&self) -> &Vec<Vec<(u32, u32)>> {
        self.pairs.get_or_init(|| {
            let n = self.elems.len();
            let mut pairs = vec![Vec::new(); n];
            for i in 0..n {
                let (a, b) = self.half[i];
                for j in 0..n {
                    let (c, d) = self.half[j];
                    if let Some(&k) = self.pos.get(&(a + c, b + d)) {
                        pairs[k].push((i as u32, j as u32));
                    }
                }
            }
            pairs
        })
    }

    pub fn same_as(&self, other: &BoxIndex) -> bool {
        self.field == other.field && self.bound == other.bound
    }
}

/// A truncated Fourier expansion `c_0 + Σ_α c_α q^α` over the indices of a
/// box, with weight and character metadata.
#[derive(Clone)]
pub struct TruncatedSeries {
    index: Arc<BoxIndex>,
    coeff_field: CoeffFieldRef,
    weight: WeightPair,
    character: Option<RayCharacter>,
    constant: CoeffElement,
    coeffs: Vec<CoeffElement>,
}

impl PartialEq for TruncatedSeries {
    fn eq(&self, other: &Self) -> bool {
        self.index.same_as(&other.index)
            && self.constant == other.constant
            && self.coeffs == other.coeffs
            && self.weight == other.weight
            && same_character(&self.character, &other.character)
    }
}

impl fmt::Debug for TruncatedSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "TruncatedSeries(weight {}, bound {}, const {}", self.weight, self.index.bound, self.constant)?;
        for (e, c) in self.index.elems.iter().zip(&self.coeffs).take(6) {
            write!(f, ", [{e}] {c}")?;
        }
        if self.coeffs.len() > 6 {
            write!(f, ", ...")?;
        }
        write!(f, ")")
    }
}

/// Character metadata equality, reading `None` as the trivial character.
pub fn same_character(a: &Option<RayCharacter>, b: &Option<RayCharacter>) -> bool {
    match (a, b) {
        (None, None) => true,
        (Some(x), Some(y)) => x == y,
        (Some(x), None) | (None, Some(x)) => x.primitive().map(|p| p.is_trivial()).unwrap_or(false),
    }
}

/// Product of character metadata.
pub fn combine_characters(a: &Option<RayCharacter>, b: &Option<RayCharacter>) -> Result<Option<RayCharacter>> {
    match (a, b) {
        (None, x) | (x, None) => Ok(x.clone()),
        (Some(x), Some(y)) => {
            if x.modulus() == y.modulus() {
                return Ok(Some(x.mul(y)?));
            }
            let (px, py) = (x.primitive()?, y.primitive()?);
            if px.is_trivial() {
                return Ok(Some(y.clone()));
            }
            if py.is_trivial() {
                return Ok(Some(x.clone()));
            }
            if px.modulus() == py.modulus() {
                return Ok(Some(px.mul(&py)?));
            }
            Err(Error::MetadataMismatch(format!(
                "cannot multiply characters modulo {} and {}",
                x.modulus(),
                y.modulus()
            )))
        }
    }
}

fn invert_character(a: &Option<RayCharacter>) -> Option<RayCharacter> {
    a.as_ref().map(|c| c.inverse())
}

impl TruncatedSeries {
    pub fn zero(
        index: &Arc<BoxIndex>,
        coeff_field: &CoeffFieldRef,
        weight: WeightPair,
        character: Option<RayCharacter>,
    ) -> Self {
        TruncatedSeries {
            index: index.clone(),
            coeff_field: coeff_field.clone(),
            weight,
            character,
            constant: coeff_field.zero(),
            coeffs: vec![coeff_field.zero(); index.len()],
        }
    }

    /// The series with constant term `value` and no other terms.
    pub fn constant_series(
        index: &Arc<BoxIndex>,
        value: CoeffElement,
        weight: WeightPair,
        character: Option<RayCharacter>,
    ) -> Self {
        let mut s = TruncatedSeries::zero(index, value.field(), weight, character);
        s.constant = value;
        s
    }

    pub fn from_parts(
        index: &Arc<BoxIndex>,
        coeff_field: &CoeffFieldRef,
        weight: WeightPair,
        character: Option<RayCharacter>,
        constant: CoeffElement,
        coeffs: Vec<CoeffElement>,
    ) -> Result<Self> {
        if coeffs.len() != index.len() {
            return Err(Error::Validation {
                invariant: "series length".into(),
                msg: format!("{} coefficients for {} box indices", coeffs.len(), index.len()),
            });
        }
        let coeff_field = coeff_field.clone();
        let fix = |c: CoeffElement| -> Result<CoeffElement> { coeff_field.embed(&c) };
        let constant = fix(constant)?;
        let coeffs = coeffs.into_iter().map(fix).collect::<Result<Vec<_>>>()?;
        Ok(TruncatedSeries { index: index.clone(), coeff_field, weight, character, constant, coeffs })
    }

    /// Builds a series from a sparse map of coefficients; every key must be
    /// a box index.
    pub fn from_map(
        index: &Arc<BoxIndex>,
        coeff_field: &CoeffFieldRef,
        weight: WeightPair,
        character: Option<RayCharacter>,
        constant: CoeffElement,
        terms: &[(FieldElement, CoeffElement)],
    ) -> Result<Self> {
        let mut s = TruncatedSeries::zero(index, coeff_field, weight, character);
        s.constant = coeff_field.embed(&constant)?;
        for (alpha, c) in terms {
            let i = index.position(alpha).ok_or_else(|| Error::OutOfBox(alpha.to_string()))?;
            s.coeffs[i] = coeff_field.embed(c)?;
        }
        Ok(s)
    }

    pub fn index(&self) -> &Arc<BoxIndex> {
        &self.index
    }

    pub fn field(&self) -> &BaseField {
        &self.index.field
    }

    pub fn bound(&self) -> &TruncationBound {
        &self.index.bound
    }

    pub fn coeff_field(&self) -> &CoeffFieldRef {
        &self.coeff_field
    }

    pub fn weight(&self) -> WeightPair {
        self.weight
    }

    pub fn character(&self) -> Option<&RayCharacter> {
        self.character.as_ref()
    }

    pub fn constant(&self) -> &CoeffElement {
        &self.constant
    }

    pub fn coeffs(&self) -> &[CoeffElement] {
        &self.coeffs
    }

    /// `c_α`; zero for totally positive `α` outside the support, `None` when
    /// `α` is not a box index.
    pub fn coeff(&self, alpha: &FieldElement) -> Option<&CoeffElement> {
        if alpha.is_zero() {
            return Some(&self.constant);
        }
        self.index.position(alpha).map(|i| &self.coeffs[i])
    }

    pub fn is_zero(&self) -> bool {
        self.constant.is_zero() && self.coeffs.iter().all(|c| c.is_zero())
    }

    /// Replaces the metadata without touching coefficients.
    pub fn with_metadata(mut self, weight: WeightPair, character: Option<RayCharacter>) -> Self {
        self.weight = weight;
        self.character = character;
        self
    }

    /// Re-expresses coefficients in a larger coefficient field.
    pub fn embed_coeffs(&self, field: &CoeffFieldRef) -> Result<Self> {
        let mut s = self.clone();
        s.coeff_field = field.clone();
        s.constant = field.embed(&self.constant)?;
        s.coeffs = self.coeffs.iter().map(|c| field.embed(c)).collect::<Result<_>>()?;
        Ok(s)
    }

    /// Applies a map to every coefficient, for Galois actions.
    pub fn map_coeffs(&self, f: impl Fn(&CoeffElement) -> CoeffElement) -> Self {
        let mut s = self.clone();
        s.constant = f(&self.constant);
        s.coeffs = self.coeffs.iter().map(f).collect();
        s
    }

    /// Coefficients as one vector, constant first.
    pub fn to_vector(&self) -> Vec<CoeffElement> {
        let mut v = Vec::with_capacity(self.coeffs.len() + 1);
        v.push(self.constant.clone());
        v.extend(self.coeffs.iter().cloned());
        v
    }

    fn check_compatible(&self, other: &TruncatedSeries) -> Result<()> {
        if !self.index.same_as(&other.index) {
            return Err(Error::MetadataMismatch(format!(
                "bounds {} and {} differ",
                self.index.bound, other.index.bound
            )));
        }
        if *self.coeff_field != *other.coeff_field {
            return Err(Error::FieldMismatch(format!("{:?} vs {:?}", self.coeff_field, other.coeff_field)));
        }
        Ok(())
    }

    fn check_same_metadata(&self, other: &TruncatedSeries) -> Result<()> {
        if self.weight != other.weight || !same_character(&self.character, &other.character) {
            return Err(Error::MetadataMismatch(format!(
                "weight {} vs {}, or characters differ",
                self.weight, other.weight
            )));
        }
        Ok(())
    }

    pub fn add(&self, other: &TruncatedSeries) -> Result<TruncatedSeries> {
        self.check_compatible(other)?;
        self.check_same_metadata(other)?;
        let mut s = self.clone();
        s.constant = &self.constant + &other.constant;
        s.coeffs = self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a + b).collect();
        Ok(s)
    }

    pub fn sub(&self, other: &TruncatedSeries) -> Result<TruncatedSeries> {
        self.add(&other.scalar_mul(&self.coeff_field.from_int(-1))?)
    }

    pub fn scalar_mul(&self, c: &CoeffElement) -> Result<TruncatedSeries> {
        let c = self.coeff_field.embed(c)?;
        let mut s = self.clone();
        s.constant = &c * &self.constant;
        s.coeffs = self.coeffs.iter().map(|x| &c * x).collect();
        Ok(s)
    }

    pub fn mul(&self, other: &TruncatedSeries) -> Result<TruncatedSeries> {
        self.mul_with(other, Exec::default())
    }

    /// Product within the common box. Each output coefficient is an
    /// independent exact sum, so the parallel path is bit-identical.
    pub fn mul_with(&self, other: &TruncatedSeries, exec: Exec) -> Result<TruncatedSeries> {
        self.check_compatible(other)?;
        let character = combine_characters(&self.character, &other.character)?;
        let pairs = self.index.pairs();
        let (a, b) = (&self.coeffs, &other.coeffs);
        let (a0, b0) = (&self.constant, &other.constant);
        let coeffs = map_range(exec, self.coeffs.len(), |k| {
            let mut acc = &(a0 * &b[k]) + &(&a[k] * b0);
            for &(i, j) in &pairs[k] {
                let (x, y) = (&a[i as usize], &b[j as usize]);
                if !x.is_zero() && !y.is_zero() {
                    acc = &acc + &(x * y);
                }
            }
            acc
        });
        Ok(TruncatedSeries {
            index: self.index.clone(),
            coeff_field: self.coeff_field.clone(),
            weight: self.weight.add(&other.weight),
            character,
            constant: a0 * b0,
            coeffs,
        })
    }

    /// `self^d` by repeated squaring.
    pub fn pow(&self, d: u32, exec: Exec) -> Result<TruncatedSeries> {
        let mut acc = TruncatedSeries::constant_series(&self.index, self.coeff_field.one(), WeightPair::new(0, 0), None);
        let mut base = self.clone();
        let mut k = d;
        while k > 0 {
            if k & 1 == 1 {
                acc = acc.mul_with(&base, exec)?;
            }
            k >>= 1;
            if k > 0 {
                base = base.mul_with(&base, exec)?;
            }
        }
        Ok(acc)
    }

    pub fn divide(&self, e: &TruncatedSeries) -> Result<TruncatedSeries> {
        self.divide_with(e, Exec::default())
    }

    /// The unique `f` with `f·e = self` on the box, solved level by level in
    /// the trace; indices of equal trace are independent.
    pub fn divide_with(&self, e: &TruncatedSeries, exec: Exec) -> Result<TruncatedSeries> {
        self.check_compatible(e)?;
        if e.constant.is_zero() {
            return Err(Error::NonInvertibleConstant);
        }
        let inv0 = e.constant.inv()?;
        let f0 = &self.constant * &inv0;
        let pairs = self.index.pairs();
        let mut f: Vec<CoeffElement> = Vec::with_capacity(self.coeffs.len());
        for w in self.index.levels.windows(2) {
            let (start, end) = (w[0], w[1]);
            let done = &f;
            let level = map_range(exec, end - start, |off| {
                let k = start + off;
                let mut acc = &self.coeffs[k] - &(&f0 * &e.coeffs[k]);
                for &(i, j) in &pairs[k] {
                    let (x, y) = (&done[i as usize], &e.coeffs[j as usize]);
                    if !x.is_zero() && !y.is_zero() {
                        acc = &acc - &(x * y);
                    }
                }
                &acc * &inv0
            });
            f.extend(level);
        }
        let character = combine_characters(&self.character, &invert_character(&e.character))?;
        Ok(TruncatedSeries {
            index: self.index.clone(),
            coeff_field: self.coeff_field.clone(),
            weight: self.weight.sub(&e.weight),
            character,
            constant: f0,
            coeffs: f,
        })
    }

    /// Restriction to a smaller box, constant term kept.
    pub fn truncate(&self, bound: &TruncationBound) -> Result<TruncatedSeries> {
        self.truncate_to(&BoxIndex::new(&self.index.field, bound))
    }

    /// Restriction onto a given (smaller) index.
    pub fn truncate_to(&self, index: &Arc<BoxIndex>) -> Result<TruncatedSeries> {
        if !index.bound.le(&self.index.bound) {
            return Err(Error::BoundTooLarge {
                requested: index.bound.to_string(),
                available: self.index.bound.to_string(),
            });
        }
        let coeffs = index
            .elems
            .iter()
            .map(|a| self.coeffs[self.index.position(a).expect("smaller box")].clone())
            .collect();
        Ok(TruncatedSeries {
            index: index.clone(),
            coeff_field: self.coeff_field.clone(),
            weight: self.weight,
            character: self.character.clone(),
            constant: self.constant.clone(),
            coeffs,
        })
    }

    /// `η₂^{(k2-k1)/2}` as a coefficient.
    fn unit_factor(&self, eta: &FieldElement) -> Result<CoeffElement> {
        let e = -self.weight.half_difference()?;
        let v = eta.conj().pow(e).expect("unit");
        self.coeff_field.from_base(&v)
    }

    /// Moves coefficients along a totally positive unit:
    /// `c'_{ηα} = η₂^{(k2-k1)/2}·c_α` whenever `α` and `ηα` are both box
    /// indices. Other slots keep their coefficients.
    pub fn unit_translate(&self, eta: &FieldElement) -> Result<TruncatedSeries> {
        let field = &self.index.field;
        if !field.is_unit(eta) || !eta.is_totally_positive() {
            return Err(Error::NotAUnit(eta.to_string()));
        }
        let factor = self.unit_factor(eta)?;
        let eta_inv = eta.inv().expect("unit");
        let mut s = self.clone();
        for (k, gamma) in self.index.elems.iter().enumerate() {
            let alpha = gamma * &eta_inv;
            if let Some(i) = self.index.position(&alpha) {
                s.coeffs[k] = &factor * &self.coeffs[i];
            }
        }
        Ok(s)
    }

    /// `c(a) = c_α·α₂^{(k1-k2)/2}` for a generator `α` of `a` in the box,
    /// trying unit translates of the canonical generator in the order
    /// `u^0, u^1, u^-1, u^2, ...`.
    pub fn ideal_coefficient(&self, a: &PrincipalIdeal) -> Result<CoeffElement> {
        let e = self.weight.half_difference()?;
        let u = self.index.field.tp_fundamental_unit();
        let u_inv = u.inv().expect("unit");
        let mut up = a.gen().clone();
        let mut down = a.gen().clone();
        for step in 0..64 {
            let tries: Vec<&FieldElement> = if step == 0 { vec![&up] } else { vec![&up, &down] };
            for alpha in tries {
                if let Some(i) = self.index.position(alpha) {
                    let scale = self.coeff_field.from_base(&alpha.conj().pow(e).expect("nonzero"))?;
                    return Ok(&self.coeffs[i] * &scale);
                }
            }
            up = &up * u;
            down = &down * &u_inv;
        }
        Err(Error::OutOfBox(a.to_string()))
    }
}

#[cfg(test)]
mod tests;

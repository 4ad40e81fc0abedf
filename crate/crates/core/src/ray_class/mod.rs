//! Narrow ray class groups of the base field, their characters, and the
//! compatibility between a character and a weight.

mod snf;

use std::collections::VecDeque;
use std::fmt;
use std::sync::{Arc, OnceLock};

use num_integer::Integer;
use num_rational::Ratio;
use num_traits::{One, Zero};

use crate::arithmetic::{BaseField, CoeffElement, CoeffField, CoeffFieldRef, FieldElement, PrincipalIdeal, ResidueRing};
use crate::error::{Error, Result};
use crate::weight::WeightPair;
use crate::Rational;

/// A modulus `n·∞1^a·∞2^b`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Modulus {
    pub finite: PrincipalIdeal,
    pub infinite: [bool; 2],
}

impl Modulus {
    pub fn new(finite: PrincipalIdeal, infinite: [bool; 2]) -> Self {
        Modulus { finite, infinite }
    }

    /// `n·∞1∞2`.
    pub fn totally_odd(finite: PrincipalIdeal) -> Self {
        Modulus { finite, infinite: [true, true] }
    }

    fn mask(&self) -> usize {
        usize::from(self.infinite[0]) | usize::from(self.infinite[1]) << 1
    }

    pub fn divides(&self, field: &BaseField, other: &Modulus) -> bool {
        (self.mask() & !other.mask()) == 0 && field.divides(&self.finite, &other.finite)
    }
}

impl fmt::Display for Modulus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.finite)?;
        if self.infinite[0] || self.infinite[1] {
            write!(f, "·")?;
        }
        if self.infinite[0] {
            write!(f, "∞1")?;
        }
        if self.infinite[1] {
            write!(f, "∞2")?;
        }
        Ok(())
    }
}

impl fmt::Debug for Modulus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

/// A root of unity `exp(2πi·t)` stored as the fraction `t ∈ [0, 1)`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub struct RootOfUnity(Ratio<i64>);

impl RootOfUnity {
    pub fn one() -> Self {
        RootOfUnity(Ratio::zero())
    }

    pub fn from_fraction(num: i64, den: i64) -> Self {
        let r = Ratio::new(num.rem_euclid(den), den);
        RootOfUnity(r)
    }

    pub fn fraction(&self) -> Ratio<i64> {
        self.0
    }

    pub fn order(&self) -> u64 {
        *self.0.denom() as u64
    }

    pub fn is_one(&self) -> bool {
        self.0.is_zero()
    }

    pub fn mul(&self, o: &RootOfUnity) -> RootOfUnity {
        let s = self.0 + o.0;
        RootOfUnity(s - s.floor())
    }

    pub fn pow(&self, k: i64) -> RootOfUnity {
        let s = self.0 * Ratio::from_integer(k);
        RootOfUnity(s - s.floor())
    }

    pub fn inv(&self) -> RootOfUnity {
        self.pow(-1)
    }

    /// The smallest multiquadratic field holding this value.
    pub fn natural_field(&self) -> Result<CoeffFieldRef> {
        match self.order() {
            1 | 2 => Ok(CoeffField::rationals()),
            3 | 6 => CoeffField::new(vec![-3]),
            4 => CoeffField::new(vec![-1]),
            n => Err(Error::UnsupportedOrder(n)),
        }
    }

    /// The value as an element of `field`, with `ζ₆ = (1+√-3)/2` and
    /// `ζ₄ = √-1` (principal roots).
    pub fn to_coeff(&self, field: &CoeffFieldRef) -> Result<CoeffElement> {
        let n = self.order() as i64;
        let k = *self.0.numer();
        let half = Rational::new(1.into(), 2.into());
        let need = |t: i64| {
            field
                .sqrt_of(t)
                .ok_or_else(|| Error::FieldMismatch(format!("coefficient field lacks √{t}")))
        };
        Ok(match (n, k) {
            (1, _) => field.one(),
            (2, _) => field.from_int(-1),
            (4, 1) => need(-1)?,
            (4, _) => -need(-1)?,
            (3 | 6, _) => {
                // exp(2πi k/n) = cos + i·sin with cos ∈ {±1/2}, sin ∈ {±√3/2}.
                let six = k * (6 / n);
                let (re, im) = match six {
                    1 => (1, 1),
                    2 => (-1, 1),
                    4 => (-1, -1),
                    5 => (1, -1),
                    _ => unreachable!(),
                };
                let r = need(-3)?;
                &field.from_rational(&half * Rational::from_integer(re.into()))
                    + &r.scale(&(&half * Rational::from_integer(im.into())))
            }
            (n, _) => return Err(Error::UnsupportedOrder(n as u64)),
        })
    }

    /// Recognizes a root of unity of order in {1,2,3,4,6}.
    pub fn from_coeff(x: &CoeffElement) -> Option<RootOfUnity> {
        for n in [1i64, 2, 3, 4, 6] {
            for k in 0..n {
                if k.gcd(&n) != 1 && !(n == 1 && k == 0) {
                    continue;
                }
                let r = RootOfUnity::from_fraction(k, n);
                if let Ok(v) = r.to_coeff(x.field()) {
                    if &v == x {
                        return Some(r);
                    }
                }
            }
        }
        None
    }
}

/// A generator of a ray class group: a residue with sign data and its order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RayClassGenerator {
    pub residue: FieldElement,
    /// `true` marks a negative sign at the corresponding infinite place.
    pub signs: [bool; 2],
    pub order: u64,
}

const NONE: u32 = u32::MAX;

/// The narrow ray class group of a modulus, realized explicitly as a
/// quotient of `(O_F/n)^× × {±1}^S` by the image of the global units.
pub struct RayClassGroup {
    field: BaseField,
    modulus: Modulus,
    ring: ResidueRing,
    a_class: Vec<u32>,
    class_rep: Vec<usize>,
    dlogs: Vec<Vec<u64>>,
    structure: Vec<u64>,
    generators: Vec<RayClassGenerator>,
}

impl fmt::Debug for RayClassGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "RayClassGroup({}, {:?})", self.modulus, self.structure)
    }
}

fn sign_bits(e: &FieldElement) -> usize {
    use std::cmp::Ordering::Less;
    usize::from(e.sign_at(1) == Less) | usize::from(e.sign_at(2) == Less) << 1
}

impl RayClassGroup {
    pub fn new(field: &BaseField, modulus: &Modulus) -> Result<Arc<Self>> {
        let ring = ResidueRing::new(field, &modulus.finite)?;
        let mask = modulus.mask();
        let size = ring.size();
        let mul_a = |i: usize, j: usize| ring.mul(i >> 2, j >> 2) * 4 + ((i ^ j) & 3);
        let unit_a = |e: &FieldElement| ring.reduce(e).expect("unit") * 4 + (sign_bits(e) & mask);
        let one_a = ring.one() * 4;

        // Image H of the global units.
        let h_gens = [unit_a(&field.integer(-1)), unit_a(field.fundamental_unit())];
        let mut in_h = vec![false; size * 4];
        let mut h = vec![one_a];
        in_h[one_a] = true;
        let mut i = 0;
        while i < h.len() {
            for g in h_gens {
                let t = mul_a(h[i], g);
                if !in_h[t] {
                    in_h[t] = true;
                    h.push(t);
                }
            }
            i += 1;
        }

        // Cosets of H, numbered by their smallest element.
        let mut a_class = vec![NONE; size * 4];
        let mut class_rep = Vec::new();
        for res in ring.units() {
            for bits in 0..4 {
                if bits & !mask != 0 {
                    continue;
                }
                let a = res * 4 + bits;
                if a_class[a] != NONE {
                    continue;
                }
                let id = class_rep.len() as u32;
                class_rep.push(a);
                for &x in &h {
                    a_class[mul_a(a, x)] = id;
                }
            }
        }
        let n_cls = class_rep.len();
        let identity = a_class[one_a] as usize;
        let cls_mul = |a: usize, b: usize| a_class[mul_a(class_rep[a], class_rep[b])] as usize;

        // Greedy generating set in class order.
        let mut gens: Vec<usize> = Vec::new();
        let mut in_sub = vec![false; n_cls];
        in_sub[identity] = true;
        for c in 0..n_cls {
            if in_sub[c] {
                continue;
            }
            gens.push(c);
            let mut sub = vec![identity];
            in_sub.iter_mut().for_each(|x| *x = false);
            in_sub[identity] = true;
            let mut k = 0;
            while k < sub.len() {
                for &g in &gens {
                    let t = cls_mul(sub[k], g);
                    if !in_sub[t] {
                        in_sub[t] = true;
                        sub.push(t);
                    }
                }
                k += 1;
            }
        }

        // Exponent vectors by breadth-first search; every non-tree edge of
        // the Cayley graph is a relation.
        let r = gens.len();
        let mut vecs: Vec<Option<Vec<i128>>> = vec![None; n_cls];
        vecs[identity] = Some(vec![0; r]);
        let mut queue = VecDeque::from([identity]);
        let mut relations = Vec::new();
        while let Some(e) = queue.pop_front() {
            let v = vecs[e].clone().expect("visited");
            for (gi, &g) in gens.iter().enumerate() {
                let t = cls_mul(e, g);
                let mut w = v.clone();
                w[gi] += 1;
                match &vecs[t] {
                    None => {
                        vecs[t] = Some(w);
                        queue.push_back(t);
                    }
                    Some(u) => {
                        let rel: Vec<i128> = w.iter().zip(u).map(|(a, b)| a - b).collect();
                        if rel.iter().any(|&x| x != 0) {
                            relations.push(rel);
                        }
                    }
                }
            }
        }

        let (structure, dlogs, generators) = if r == 0 {
            (Vec::new(), vec![Vec::new(); n_cls], Vec::new())
        } else {
            let s = snf::smith(relations, r);
            let keep: Vec<usize> = (0..r).filter(|&j| s.diag.get(j).copied().unwrap_or(0) != 1).collect();
            let structure: Vec<u64> = keep.iter().map(|&j| s.diag[j] as u64).collect();
            assert!(structure.iter().all(|&d| d > 0), "ray class group must be finite");
            let dlogs: Vec<Vec<u64>> = vecs
                .iter()
                .map(|x| {
                    let x = x.as_ref().expect("all classes reached");
                    keep.iter()
                        .zip(&structure)
                        .map(|(&j, &d)| {
                            let y: i128 = (0..r).map(|i| x[i] * s.v[i][j]).sum();
                            y.rem_euclid(d as i128) as u64
                        })
                        .collect()
                })
                .collect();
            let cls_pow = |c: usize, e: i128| {
                let e = e.rem_euclid(n_cls as i128);
                let mut acc = identity;
                for _ in 0..e {
                    acc = cls_mul(acc, c);
                }
                acc
            };
            let generators: Vec<RayClassGenerator> = keep
                .iter()
                .zip(&structure)
                .map(|(&j, &d)| {
                    let mut c = identity;
                    for (i, &g) in gens.iter().enumerate() {
                        c = cls_mul(c, cls_pow(g, s.v_inv[j][i]));
                    }
                    let a = class_rep[c];
                    RayClassGenerator {
                        residue: ring.element(a >> 2),
                        signs: [a & 1 == 1, a & 2 == 2],
                        order: d,
                    }
                })
                .collect();
            (structure, dlogs, generators)
        };

        Ok(Arc::new(RayClassGroup {
            field: field.clone(),
            modulus: modulus.clone(),
            ring,
            a_class,
            class_rep,
            dlogs,
            structure,
            generators,
        }))
    }

    pub fn field(&self) -> &BaseField {
        &self.field
    }

    pub fn modulus(&self) -> &Modulus {
        &self.modulus
    }

    /// Invariant factors of the group.
    pub fn structure(&self) -> &[u64] {
        &self.structure
    }

    pub fn order(&self) -> u64 {
        self.class_rep.len() as u64
    }

    pub fn generators(&self) -> &[RayClassGenerator] {
        &self.generators
    }

    /// Class of an integral element prime to the modulus, with the given
    /// signs at the infinite places.
    pub fn class_with_signs(&self, e: &FieldElement, signs: [bool; 2]) -> Result<usize> {
        let res = self.ring.reduce(e)?;
        if !self.ring.is_unit(res) {
            return Err(Error::NotCoprime { ideal: format!("({e})"), modulus: self.modulus.to_string() });
        }
        let bits = (usize::from(signs[0]) | usize::from(signs[1]) << 1) & self.modulus.mask();
        Ok(self.a_class[res * 4 + bits] as usize)
    }

    pub fn ring(&self) -> &ResidueRing {
        &self.ring
    }

    /// Class of a unit residue index with totally positive signs.
    pub fn class_of_residue(&self, res: usize) -> Option<usize> {
        let c = self.a_class[res * 4];
        (c != NONE).then_some(c as usize)
    }

    /// Class of an element using its own signs.
    pub fn class_of_element(&self, e: &FieldElement) -> Result<usize> {
        let b = sign_bits(e);
        self.class_with_signs(e, [b & 1 == 1, b & 2 == 2])
    }

    /// Class of an ideal, via its totally positive generator.
    pub fn class_of_ideal(&self, a: &PrincipalIdeal) -> Result<usize> {
        self.class_with_signs(a.gen(), [false, false])
    }

    /// Coordinates of a class on the invariant-factor generators.
    pub fn dlog(&self, class: usize) -> &[u64] {
        &self.dlogs[class]
    }

    fn residues_reducing_to(&self, other: &ResidueRing) -> Vec<Option<usize>> {
        // For each residue of `other`, some unit residue of self lying over it.
        let mut out = vec![None; other.size()];
        for res in self.ring.units() {
            let r = other.reduce(&self.ring.element(res)).expect("integral");
            if out[r].is_none() {
                out[r] = Some(res);
            }
        }
        out
    }
}

/// Filters for [`enumerate_characters`].
#[derive(Clone, Debug, Default)]
pub struct CharacterConstraints {
    pub order: Option<u64>,
    pub totally_odd: bool,
    pub conductor_divides: Option<Modulus>,
}

#[derive(Clone)]
struct Primitive {
    conductor: Modulus,
    group: Arc<RayClassGroup>,
    exps: Vec<u64>,
}

/// A character of a ray class group, stored by its exponents on the
/// invariant-factor generators: `χ(g_j) = exp(2πi·e_j/d_j)`.
#[derive(Clone)]
pub struct RayCharacter {
    group: Arc<RayClassGroup>,
    exps: Vec<u64>,
    primitive: Arc<OnceLock<std::result::Result<Primitive, Error>>>,
}

const SUPPORTED_ORDERS: [u64; 5] = [1, 2, 3, 4, 6];

impl RayCharacter {
    pub fn new(group: Arc<RayClassGroup>, exps: Vec<u64>) -> Result<Self> {
        if exps.len() != group.structure.len() || exps.iter().zip(&group.structure).any(|(e, d)| e >= d) {
            return Err(Error::Validation {
                invariant: "character exponents".into(),
                msg: format!("{exps:?} do not fit structure {:?}", group.structure),
            });
        }
        let chi = RayCharacter { group, exps, primitive: Arc::new(OnceLock::new()) };
        let order = chi.order();
        if !SUPPORTED_ORDERS.contains(&order) {
            return Err(Error::UnsupportedOrder(order));
        }
        Ok(chi)
    }

    pub fn trivial(group: Arc<RayClassGroup>) -> Self {
        let n = group.structure.len();
        RayCharacter { group, exps: vec![0; n], primitive: Arc::new(OnceLock::new()) }
    }

    pub fn group(&self) -> &Arc<RayClassGroup> {
        &self.group
    }

    pub fn field(&self) -> &BaseField {
        &self.group.field
    }

    pub fn modulus(&self) -> &Modulus {
        &self.group.modulus
    }

    pub fn exponents(&self) -> &[u64] {
        &self.exps
    }

    pub fn order(&self) -> u64 {
        self.exps
            .iter()
            .zip(&self.group.structure)
            .map(|(&e, &d)| d / e.gcd(&d))
            .fold(1, |acc, x| acc.lcm(&x))
    }

    pub fn is_trivial(&self) -> bool {
        self.exps.iter().all(|&e| e == 0)
    }

    pub fn value_at_class(&self, class: usize) -> RootOfUnity {
        let y = self.group.dlog(class);
        let mut t = Ratio::<i64>::zero();
        for ((&e, &d), &yj) in self.exps.iter().zip(&self.group.structure).zip(y) {
            t += Ratio::new((e * yj % d) as i64, d as i64);
        }
        RootOfUnity(t - t.floor())
    }

    /// Values on the group's generators, as roots of unity.
    pub fn values_on_generators(&self) -> Vec<RootOfUnity> {
        self.exps
            .iter()
            .zip(&self.group.structure)
            .map(|(&e, &d)| RootOfUnity::from_fraction(e as i64, d as i64))
            .collect()
    }

    /// The smallest multiquadratic field containing the values.
    pub fn natural_field(&self) -> CoeffFieldRef {
        RootOfUnity::from_fraction(1, self.order() as i64)
            .natural_field()
            .expect("orders are validated at construction")
    }

    /// `χ(a)` as a root of unity; `a` must be prime to the conductor.
    pub fn evaluate_root(&self, a: &PrincipalIdeal) -> Result<RootOfUnity> {
        match self.group.class_of_ideal(a) {
            Ok(c) => Ok(self.value_at_class(c)),
            Err(Error::NotCoprime { .. }) => {
                let p = self.primitive_data()?;
                match p.group.class_of_ideal(a) {
                    Ok(c) => Ok(value_from(&p.group, &p.exps, c)),
                    Err(Error::NotCoprime { .. }) => Err(Error::NotCoprime {
                        ideal: a.to_string(),
                        modulus: p.conductor.to_string(),
                    }),
                    Err(e) => Err(e),
                }
            }
            Err(e) => Err(e),
        }
    }

    /// `χ(a)` in the character's natural coefficient field.
    pub fn evaluate(&self, a: &PrincipalIdeal) -> Result<CoeffElement> {
        self.evaluate_root(a)?.to_coeff(&self.natural_field())
    }

    /// `χ(a)` in a given coefficient field.
    pub fn evaluate_in(&self, a: &PrincipalIdeal, field: &CoeffFieldRef) -> Result<CoeffElement> {
        self.evaluate_root(a)?.to_coeff(field)
    }

    /// `χ(a)`, extended by zero on ideals sharing a prime with the conductor.
    pub fn evaluate_or_zero(&self, a: &PrincipalIdeal, field: &CoeffFieldRef) -> Result<CoeffElement> {
        match self.evaluate_root(a) {
            Ok(r) => r.to_coeff(field),
            Err(Error::NotCoprime { .. }) => Ok(field.zero()),
            Err(e) => Err(e),
        }
    }

    pub fn mul(&self, other: &RayCharacter) -> Result<RayCharacter> {
        if !Arc::ptr_eq(&self.group, &other.group) && self.group.modulus != other.group.modulus {
            return Err(Error::MetadataMismatch(format!(
                "characters of different moduli {} and {}",
                self.group.modulus, other.group.modulus
            )));
        }
        let exps = self
            .exps
            .iter()
            .zip(&other.exps)
            .zip(&self.group.structure)
            .map(|((a, b), d)| (a + b) % d)
            .collect();
        RayCharacter::new(self.group.clone(), exps)
    }

    pub fn pow(&self, k: i64) -> RayCharacter {
        let exps = self
            .exps
            .iter()
            .zip(&self.group.structure)
            .map(|(&e, &d)| ((e as i128 * k as i128).rem_euclid(d as i128)) as u64)
            .collect();
        RayCharacter { group: self.group.clone(), exps, primitive: Arc::new(OnceLock::new()) }
    }

    pub fn inverse(&self) -> RayCharacter {
        self.pow(-1)
    }

    /// Nontrivial on both sign components.
    pub fn is_totally_odd(&self) -> bool {
        if self.group.modulus.mask() != 3 {
            return false;
        }
        let one = self.group.field.one();
        [[true, false], [false, true]].iter().all(|&s| {
            let c = self.group.class_with_signs(&one, s).expect("1 is a unit");
            !self.value_at_class(c).is_one()
        })
    }

    /// Whether `χ(u) = sgn(u₁)^{k1}·sgn(u₂)^{k2}` on `u ∈ {-1, ε}`, where
    /// `χ(u)` is the value on the class of `u` with trivial signs.
    pub fn check_weight_compatibility(&self, k: &WeightPair) -> bool {
        use std::cmp::Ordering::Less;
        let field = &self.group.field;
        [field.integer(-1), field.fundamental_unit().clone()].iter().all(|u| {
            let c = self.group.class_with_signs(u, [false, false]).expect("units are coprime");
            let lhs = self.value_at_class(c);
            let neg = (u.sign_at(1) == Less && k.k1.rem_euclid(2) == 1)
                != (u.sign_at(2) == Less && k.k2.rem_euclid(2) == 1);
            let rhs = if neg { RootOfUnity::from_fraction(1, 2) } else { RootOfUnity::one() };
            lhs == rhs
        })
    }

    fn primitive_data(&self) -> Result<&Primitive> {
        self.primitive
            .get_or_init(|| compute_primitive(self))
            .as_ref()
            .map_err(|e| e.clone())
    }

    pub fn conductor(&self) -> Result<Modulus> {
        Ok(self.primitive_data()?.conductor.clone())
    }

    /// The primitive character inducing this one.
    pub fn primitive(&self) -> Result<RayCharacter> {
        let p = self.primitive_data()?;
        let chi = RayCharacter { group: p.group.clone(), exps: p.exps.clone(), primitive: Arc::new(OnceLock::new()) };
        let _ = chi.primitive.set(Ok(p.clone()));
        Ok(chi)
    }

    /// The unique character of `group` with the prescribed values on the
    /// classes of the given elements and signs.
    pub fn from_values(
        group: Arc<RayClassGroup>,
        values: &[(FieldElement, [bool; 2], RootOfUnity)],
    ) -> Result<RayCharacter> {
        let mut found = Vec::new();
        for chi in all_exponents(&group.structure) {
            let cand = RayCharacter { group: group.clone(), exps: chi, primitive: Arc::new(OnceLock::new()) };
            let mut ok = true;
            for (e, s, v) in values {
                let c = group.class_with_signs(e, *s)?;
                if cand.value_at_class(c) != *v {
                    ok = false;
                    break;
                }
            }
            if ok {
                found.push(cand);
            }
        }
        match found.len() {
            1 => {
                let chi = found.pop().expect("one");
                RayCharacter::new(chi.group, chi.exps)
            }
            n => Err(Error::Validation {
                invariant: "character determined by values".into(),
                msg: format!("{n} characters of {} match the given values", group.modulus),
            }),
        }
    }
}

fn value_from(group: &RayClassGroup, exps: &[u64], class: usize) -> RootOfUnity {
    let y = group.dlog(class);
    let mut t = Ratio::<i64>::zero();
    for ((&e, &d), &yj) in exps.iter().zip(&group.structure).zip(y) {
        t += Ratio::new((e * yj % d) as i64, d as i64);
    }
    RootOfUnity(t - t.floor())
}

fn all_exponents(structure: &[u64]) -> Vec<Vec<u64>> {
    let mut out = vec![Vec::new()];
    for &d in structure {
        let mut next = Vec::with_capacity(out.len() * d as usize);
        for v in &out {
            for e in 0..d {
                let mut w = v.clone();
                w.push(e);
                next.push(w);
            }
        }
        out = next;
    }
    out
}

fn compute_primitive(chi: &RayCharacter) -> Result<Primitive> {
    let g = &chi.group;
    let field = &g.field;
    let full_mask = g.modulus.mask();
    let mut candidates: Vec<Modulus> = Vec::new();
    for m in field.divisors(&g.modulus.finite) {
        for s in 0..4usize {
            if s & !full_mask != 0 {
                continue;
            }
            candidates.push(Modulus::new(m.clone(), [s & 1 == 1, s & 2 == 2]));
        }
    }
    candidates.sort_by_key(|m| (m.finite.clone(), m.mask().count_ones()));
    let one = field.one();
    for cand in candidates {
        let ring_m = ResidueRing::new(field, &cand.finite)?;
        let one_m = ring_m.reduce(&one)?;
        let mut trivial = true;
        'outer: for res in g.ring.units() {
            if ring_m.reduce(&g.ring.element(res))? != one_m {
                continue;
            }
            for bits in 0..4usize {
                if bits & !full_mask != 0 || bits & cand.mask() != 0 {
                    continue;
                }
                let c = g.a_class[res * 4 + bits] as usize;
                if !chi.value_at_class(c).is_one() {
                    trivial = false;
                    break 'outer;
                }
            }
        }
        if !trivial {
            continue;
        }
        if cand == g.modulus {
            return Ok(Primitive { conductor: cand, group: g.clone(), exps: chi.exps.clone() });
        }
        let pg = RayClassGroup::new(field, &cand)?;
        let lifts = g.residues_reducing_to(&pg.ring);
        let mut exps = Vec::new();
        for gen in &pg.generators {
            let r = pg.ring.reduce(&gen.residue)?;
            let x = lifts[r].expect("CRT lift exists");
            let bits = usize::from(gen.signs[0]) | usize::from(gen.signs[1]) << 1;
            let v = chi.value_at_class(g.a_class[x * 4 + bits] as usize);
            let e = v.0 * Ratio::from_integer(gen.order as i64);
            debug_assert!(e.is_integer());
            exps.push(e.to_integer() as u64);
        }
        return Ok(Primitive { conductor: cand, group: pg, exps });
    }
    unreachable!("the full modulus always qualifies")
}

impl PartialEq for RayCharacter {
    fn eq(&self, other: &Self) -> bool {
        match (self.primitive_data(), other.primitive_data()) {
            (Ok(a), Ok(b)) => a.conductor == b.conductor && a.exps == b.exps,
            _ => false,
        }
    }
}

impl fmt::Debug for RayCharacter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "RayCharacter(mod {}, exps {:?}, structure {:?})", self.group.modulus, self.exps, self.group.structure)
    }
}

/// All characters of `group` meeting the constraints, in lexicographic
/// order of exponent vectors.
pub fn enumerate_characters(
    group: &Arc<RayClassGroup>,
    constraints: &CharacterConstraints,
) -> Result<Vec<RayCharacter>> {
    let mut out = Vec::new();
    for exps in all_exponents(&group.structure) {
        let chi = RayCharacter { group: group.clone(), exps, primitive: Arc::new(OnceLock::new()) };
        if let Some(o) = constraints.order {
            if chi.order() != o {
                continue;
            }
        }
        if constraints.totally_odd && !chi.is_totally_odd() {
            continue;
        }
        if let Some(m) = &constraints.conductor_divides {
            if !chi.conductor()?.divides(&group.field, m) {
                continue;
            }
        }
        out.push(RayCharacter::new(chi.group, chi.exps)?);
    }
    Ok(out)
}

/// Convenience: `1 + x` for roots of unity mapped into a field.
pub fn one_plus(field: &CoeffFieldRef, r: &RootOfUnity) -> Result<CoeffElement> {
    Ok(&field.one() + &r.to_coeff(field)?)
}

#[allow(dead_code)]
fn _assert_send_sync() {
    fn is<T: Send + Sync>() {}
    is::<RayCharacter>();
    is::<RayClassGroup>();
    let _ = Rational::one();
}

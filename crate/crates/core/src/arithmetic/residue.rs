use num_integer::Integer;
use num_traits::ToPrimitive;

use super::base::{BaseField, FieldElement};
use super::ideal::PrincipalIdeal;
use crate::error::{Error, Result};

/// Largest residue ring the explicit enumerations will build.
pub const RESIDUE_LIMIT: u64 = 1_000_000;

/// `O_F / n` for a nonzero ideal `n`, elements written `p + q·ω` in the
/// integral basis `(1, ω)` and indexed densely in `[0, N(n))`.
#[derive(Clone, Debug)]
pub struct ResidueRing {
    field: BaseField,
    modulus: PrincipalIdeal,
    // Hermite basis of n: (a, 0) and (b, c).
    a: i64,
    b: i64,
    c: i64,
    // ω² = t·ω + s.
    t: i64,
    s: i64,
    prime_rings: Vec<(i64, i64, i64)>,
}

fn hermite(p0: i64, q0: i64, t: i64, s: i64) -> (i64, i64, i64) {
    // Lattice generated by ν = p0 + q0ω and νω = q0·s + (p0 + q0·t)ω.
    let r1 = (p0 as i128, q0 as i128);
    let r2 = ((q0 as i128) * (s as i128), (p0 as i128) + (q0 as i128) * (t as i128));
    let ext = r1.1.extended_gcd(&r2.1);
    let c = ext.gcd;
    let row_c = (ext.x * r1.0 + ext.y * r2.0, c);
    let det = (r1.0 * r2.1 - r1.1 * r2.0).abs();
    let a = det / c.abs();
    let (mut b, mut c) = row_c;
    if c < 0 {
        b = -b;
        c = -c;
    }
    (a as i64, b.rem_euclid(a) as i64, c as i64)
}

impl ResidueRing {
    pub fn new(field: &BaseField, modulus: &PrincipalIdeal) -> Result<Self> {
        if modulus.norm() > RESIDUE_LIMIT {
            return Err(Error::TooLarge { norm: modulus.norm(), limit: RESIDUE_LIMIT });
        }
        let (t, s) = if field.d().rem_euclid(4) == 1 { (1, (field.d() - 1) / 4) } else { (0, field.d()) };
        let coords = |e: &FieldElement| -> (i64, i64) { Self::basis_coords_of(field, e) };
        let (p0, q0) = coords(modulus.gen());
        let (a, b, c) = hermite(p0, q0, t, s);
        debug_assert_eq!((a * c) as u64, modulus.norm());
        let mut prime_rings = Vec::new();
        for (p, _) in field.factor(modulus) {
            let (pp, pq) = coords(p.gen());
            prime_rings.push(hermite(pp, pq, t, s));
        }
        Ok(ResidueRing { field: field.clone(), modulus: modulus.clone(), a, b, c, t, s, prime_rings })
    }

    fn basis_coords_of(field: &BaseField, e: &FieldElement) -> (i64, i64) {
        let (x, y) = e.half_coords().expect("integral element");
        if field.d().rem_euclid(4) == 1 {
            ((x - y) / 2, y)
        } else {
            (x / 2, y / 2)
        }
    }

    pub fn field(&self) -> &BaseField {
        &self.field
    }

    pub fn modulus(&self) -> &PrincipalIdeal {
        &self.modulus
    }

    pub fn size(&self) -> usize {
        (self.a * self.c) as usize
    }

    fn reduce_with(p: i64, q: i64, (a, b, c): (i64, i64, i64)) -> (i64, i64) {
        let k = q.div_euclid(c);
        let q = q - k * c;
        let p = (p - k * b).rem_euclid(a);
        (p, q)
    }

    /// The positive generator of `n ∩ Z`.
    pub fn smallest_integer(&self) -> i64 {
        self.a
    }

    /// Coordinates `(p, q)` of an integral element in the basis `(1, ω)`,
    /// with `ω = (1+√d)/2` or `√d`.
    pub fn basis_coords(&self, e: &FieldElement) -> (i64, i64) {
        Self::basis_coords_of(&self.field, e)
    }

    /// Residue index of `p + q·ω`.
    pub fn index_of(&self, p: i64, q: i64) -> usize {
        let (p, q) = Self::reduce_with(p, q, (self.a, self.b, self.c));
        (p + self.a * q) as usize
    }

    pub(crate) fn coords_of(&self, idx: usize) -> (i64, i64) {
        let idx = idx as i64;
        (idx % self.a, idx / self.a)
    }

    /// Residue index of an integral element.
    pub fn reduce(&self, e: &FieldElement) -> Result<usize> {
        if !e.is_integral() {
            return Err(Error::NotIntegral(e.to_string()));
        }
        let (x, y) = match e.half_coords() {
            Some(c) if c.0.unsigned_abs() < 1 << 40 && c.1.unsigned_abs() < 1 << 40 => c,
            _ => {
                // Shifting both half coordinates by multiples of 4N(n) moves
                // by an element of (N(n)) ⊆ n and keeps their parities.
                let two = crate::Rational::from_integer(2.into());
                let m = num_bigint::BigInt::from(4 * self.a * self.c);
                let x = (e.x() * &two).to_integer().mod_floor(&m).to_i64().expect("reduced");
                let y = (e.y() * &two).to_integer().mod_floor(&m).to_i64().expect("reduced");
                (x, y)
            }
        };
        let (p, q) = if self.field.d().rem_euclid(4) == 1 { ((x - y) / 2, y) } else { (x / 2, y / 2) };
        Ok(self.index_of(p, q))
    }

    /// Canonical representative of a residue index.
    pub fn element(&self, idx: usize) -> FieldElement {
        let (p, q) = self.coords_of(idx);
        if self.field.d().rem_euclid(4) == 1 {
            self.field.from_half(2 * p + q, q)
        } else {
            self.field.from_half(2 * p, 2 * q)
        }
    }

    pub fn one(&self) -> usize {
        self.index_of(1, 0)
    }

    pub fn from_int(&self, n: i64) -> usize {
        self.index_of(n, 0)
    }

    pub fn mul(&self, i: usize, j: usize) -> usize {
        let (p1, q1) = self.coords_of(i);
        let (p2, q2) = self.coords_of(j);
        let qq = q1 * q2;
        let p = p1 * p2 + qq * self.s;
        let q = p1 * q2 + q1 * p2 + qq * self.t;
        self.index_of(p, q)
    }

    pub fn neg(&self, i: usize) -> usize {
        let (p, q) = self.coords_of(i);
        self.index_of(-p, -q)
    }

    /// Whether the residue is prime to the modulus.
    pub fn is_unit(&self, i: usize) -> bool {
        let (p, q) = self.coords_of(i);
        self.prime_rings.iter().all(|&h| Self::reduce_with(p, q, h) != (0, 0))
    }

    /// Indices of all units, ascending.
    pub fn units(&self) -> Vec<usize> {
        (0..self.size()).filter(|&i| self.is_unit(i)).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unit_counts_match_euler_phi() {
        let f = BaseField::new(5).unwrap();
        // (7) inert: phi = 48. (14): phi = 3 * 48 = 144. (11+ ...) split prime: 10.
        for (gen, phi) in [(f.integer(7), 48), (f.integer(14), 144), (f.from_half(7, 1), 10), (f.integer(2), 3)] {
            let n = f.ideal(&gen).unwrap();
            let r = ResidueRing::new(&f, &n).unwrap();
            assert_eq!(r.units().len(), phi, "{gen}");
        }
    }

    #[test]
    fn multiplication_agrees_with_field_arithmetic() {
        let f = BaseField::new(5).unwrap();
        let n = f.ideal(&f.integer(14)).unwrap();
        let r = ResidueRing::new(&f, &n).unwrap();
        for i in (0..r.size()).step_by(7) {
            for j in (0..r.size()).step_by(11) {
                let prod = &r.element(i) * &r.element(j);
                assert_eq!(r.reduce(&prod).unwrap(), r.mul(i, j));
            }
        }
        assert_eq!(r.reduce(&f.integer(14)).unwrap(), r.from_int(0));
    }

    #[test]
    fn non_one_mod_four_field() {
        let f = BaseField::new(2).unwrap();
        let n = f.ideal(&f.integer(3)).unwrap();
        let r = ResidueRing::new(&f, &n).unwrap();
        assert_eq!(r.size(), 9);
        assert_eq!(r.units().len(), 8);
    }
}

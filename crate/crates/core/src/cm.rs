//! Detection of complex multiplication through quadratic twists: an
//! eigenform with CM by `K/F` satisfies `c(p)ε(p) = c(p)` for the totally
//! odd quadratic character `ε` of `K/F`.

use std::fmt;

use crate::arithmetic::{BaseField, PrincipalIdeal};
use crate::error::{Error, Result};
use crate::exec::{map_slice, Exec};
use crate::fourier::TruncatedSeries;
use crate::hecke::NewformRecord;
use crate::linalg::{combine, nullspace, rank, Vector};
use crate::ray_class::{enumerate_characters, CharacterConstraints, Modulus, RayCharacter, RayClassGroup, RootOfUnity};

/// Outcome of the twist test up to a prime bound.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CmOutcome {
    /// No prime below the bound refutes CM by `ε`. Evidence only.
    NoWitnessBelow { bound: u64, checked: usize },
    /// `ε(p) = -1` and `c(p) ≠ 0`.
    NotCm { witness: PrincipalIdeal },
}

impl fmt::Display for CmOutcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CmOutcome::NoWitnessBelow { bound, checked } => {
                write!(f, "no witness below norm {bound} ({checked} inert primes checked); CM not excluded, not proven")
            }
            CmOutcome::NotCm { witness } => write!(f, "not CM: witness {witness} of norm {}", witness.norm()),
        }
    }
}

/// Totally odd quadratic characters of conductor dividing `level·∞1∞2`.
pub fn cm_twist_candidates(field: &BaseField, level: &PrincipalIdeal) -> Result<Vec<RayCharacter>> {
    let modulus = Modulus::totally_odd(level.clone());
    let group = RayClassGroup::new(field, &modulus)?;
    let c = CharacterConstraints { order: Some(2), totally_odd: true, conductor_divides: Some(modulus) };
    enumerate_characters(&group, &c)
}

fn is_minus_one(r: &RootOfUnity) -> bool {
    *r == RootOfUnity::from_fraction(1, 2)
}

/// The twist criterion at every prime of norm at most `prime_bound` prime
/// to the level and to the conductor of `ε`, scanned in norm order.
pub fn cm_test(record: &NewformRecord, eps: &RayCharacter, prime_bound: u64) -> Result<CmOutcome> {
    let field = &record.field;
    let cond = eps.conductor()?.finite;
    let bad = field.mul_ideals(&record.level, &cond);
    let mut checked = 0;
    for p in field.primes_up_to(prime_bound) {
        if field.divides(&p, &bad) {
            continue;
        }
        if !is_minus_one(&eps.evaluate_root(&p)?) {
            continue;
        }
        let c = record.eigenvalue(&p).ok_or_else(|| Error::MissingEigenvalue(p.to_string()))?;
        if !c.is_zero() {
            return Ok(CmOutcome::NotCm { witness: p });
        }
        checked += 1;
    }
    Ok(CmOutcome::NoWitnessBelow { bound: prime_bound, checked })
}

/// Upper bound for the dimension of the CM part of `span(space)` visible
/// on the box: the dimension of the sum over candidate `ε` of the subspaces
/// on which every `c_α` with `(α)` prime and `ε((α)) = -1` vanishes.
pub fn cm_upper_bound(space: &[TruncatedSeries], level: &PrincipalIdeal) -> Result<usize> {
    cm_upper_bound_with(space, level, Exec::default())
}

pub fn cm_upper_bound_with(space: &[TruncatedSeries], level: &PrincipalIdeal, exec: Exec) -> Result<usize> {
    let Some(first) = space.first() else { return Ok(0) };
    let field = first.field();
    let k = first.coeff_field().clone();
    let candidates = cm_twist_candidates(field, level)?;
    if candidates.is_empty() {
        return Ok(0);
    }
    let vectors: Vec<Vector> = space.iter().map(|s| s.coeffs().to_vec()).collect();
    let len = first.index().len();
    let primes: Vec<(usize, PrincipalIdeal)> = first
        .index()
        .elements()
        .iter()
        .enumerate()
        .filter_map(|(i, a)| {
            let id = field.ideal(a).ok()?;
            field.is_prime_ideal(&id).then_some((i, id))
        })
        .collect();
    let per_eps = map_slice(exec, &candidates, |eps| -> Result<Vec<Vector>> {
        let mut rows: Vec<Vector> = Vec::new();
        for (i, p) in &primes {
            match eps.evaluate_root(p) {
                Ok(r) if is_minus_one(&r) => rows.push(vectors.iter().map(|v| v[*i].clone()).collect()),
                Ok(_) | Err(Error::NotCoprime { .. }) => {}
                Err(e) => return Err(e),
            }
        }
        let kernel = nullspace(&rows, vectors.len(), &k, Exec::Sequential);
        Ok(kernel.iter().map(|x| combine(x, &vectors, len, &k)).collect())
    });
    let mut all = Vec::new();
    for v in per_eps {
        all.extend(v?);
    }
    Ok(rank(&all, len, exec))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arithmetic::{CoeffField, TruncationBound};
    use crate::hecke::reconstruct_expansion;
    use crate::weight::WeightPair;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::collections::BTreeMap;

    fn q5() -> BaseField {
        BaseField::new(5).unwrap()
    }

    fn ideal(f: &BaseField, n: i64) -> PrincipalIdeal {
        f.ideal(&f.integer(n)).unwrap()
    }

    /// A record whose eigenvalues vanish exactly where `ε = -1`, built by
    /// scanning all primes.
    fn cm_like(f: &BaseField, eps: &RayCharacter, level: i64, seed: u64) -> NewformRecord {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let k = CoeffField::rationals();
        let mut eigenvalues = BTreeMap::new();
        eigenvalues.insert(f.unit_ideal(), k.one());
        for p in f.primes_up_to(400) {
            let v = match eps.evaluate_root(&p) {
                Ok(r) if is_minus_one(&r) => k.zero(),
                _ => k.from_int(rng.gen_range(1..=9)),
            };
            eigenvalues.insert(p, v);
        }
        NewformRecord {
            field: f.clone(),
            level: ideal(f, level),
            weight: WeightPair::new(2, 2),
            character: None,
            coeff_field: k,
            eigenvalues,
            provenance: "synthetic".into(),
        }
    }

    #[test]
    fn candidate_examples() {
        let f = q5();
        let at14 = cm_twist_candidates(&f, &ideal(&f, 14)).unwrap();
        let at7 = cm_twist_candidates(&f, &ideal(&f, 7)).unwrap();
        assert_eq!(at14.len(), 1);
        assert_eq!(at7, at14);
        assert!(cm_twist_candidates(&f, &f.unit_ideal()).unwrap().is_empty());
        // Every candidate's conductor divides the level modulus.
        let m = Modulus::totally_odd(ideal(&f, 14));
        assert!(at14.iter().all(|e| e.conductor().unwrap().divides(&f, &m)));
    }

    #[test]
    fn synthetic_cm_record_is_compatible_and_detected() {
        let f = q5();
        let eps = cm_twist_candidates(&f, &ideal(&f, 7)).unwrap().remove(0);
        let r = cm_like(&f, &eps, 7, 1);
        assert!(matches!(cm_test(&r, &eps, 300).unwrap(), CmOutcome::NoWitnessBelow { .. }));
        let s = reconstruct_expansion(&r, &TruncationBound::integers(&f, 12, 12).unwrap()).unwrap();
        assert_eq!(cm_upper_bound(std::slice::from_ref(&s), &ideal(&f, 7)).unwrap(), 1);
        // A generic record is refuted at the first ε-inert prime, and the
        // witness persists at larger bounds.
        let mut g = r.clone();
        let p5 = f.ideal(&f.from_half(5, 1)).unwrap();
        g.eigenvalues.insert(p5.clone(), g.coeff_field.from_int(3));
        for b in [5, 20, 100] {
            assert_eq!(cm_test(&g, &eps, b).unwrap(), CmOutcome::NotCm { witness: p5.clone() });
        }
        let t = reconstruct_expansion(&g, s.bound()).unwrap();
        assert_eq!(cm_upper_bound(std::slice::from_ref(&t), &ideal(&f, 7)).unwrap(), 0);
        assert_eq!(cm_upper_bound(&[s, t], &ideal(&f, 7)).unwrap(), 1);
        assert_eq!(cm_upper_bound(&[], &ideal(&f, 7)).unwrap(), 0);
    }

    #[test]
    fn vacuous_and_missing_cases() {
        let f = q5();
        let eps = cm_twist_candidates(&f, &ideal(&f, 7)).unwrap().remove(0);
        let r = cm_like(&f, &eps, 7, 2);
        // Below norm 5 there is no ε-inert prime prime to 7.
        assert_eq!(cm_test(&r, &eps, 4).unwrap(), CmOutcome::NoWitnessBelow { bound: 4, checked: 0 });
        let mut m = r.clone();
        m.eigenvalues.remove(&f.ideal(&f.from_half(5, 1)).unwrap());
        assert!(matches!(cm_test(&m, &eps, 10), Err(Error::MissingEigenvalue(_))));
    }
}

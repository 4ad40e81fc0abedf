//! Deterministic synthetic data with a known answer.
//!
//! Formal eigenforms are eigenvalue records drawn at random; their
//! expansions satisfy every Hecke relation exactly. Multiplying them by
//! `E_{1,χ⁻¹}` and mixing in random noise gives a numerator space whose
//! `V⁽²⁾` is the span of the formal eigenforms. Tests, benchmarks and the
//! shipped example fixtures are built from here.

use std::collections::BTreeMap;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::arithmetic::{BaseField, CoeffElement, CoeffField, CoeffFieldRef, PrincipalIdeal, TruncationBound};
use crate::data_io::{SpaceContent, SpaceFixture};
use crate::eisenstein::{compute_l0_with, eisenstein_series_on};
use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::fourier::{BoxIndex, TruncatedSeries};
use crate::hecke::{reconstruct_with, NewformRecord};
use crate::ray_class::{Modulus, RayCharacter, RayClassGroup, RootOfUnity};
use crate::search::{enlarged_bound, SearchInput};
use crate::weight::WeightPair;
use crate::Rational;

/// The order 6 character of conductor `(7)∞1∞2` over `Q(√5)` with
/// `χ((2)) = e^{2πi/3}`.
pub fn order_six_character(field: &BaseField) -> Result<RayCharacter> {
    if field.d() != 5 {
        return Err(Error::Validation { invariant: "field".into(), msg: format!("defined over Q(√5), not Q(√{})", field.d()) });
    }
    let seven = field.ideal(&field.integer(7))?;
    let group = RayClassGroup::new(field, &Modulus::totally_odd(seven))?;
    RayCharacter::from_values(
        group,
        &[
            (field.integer(2), [false, false], RootOfUnity::from_fraction(1, 3)),
            (field.one(), [true, false], RootOfUnity::from_fraction(1, 2)),
        ],
    )
}

fn random_element(rng: &mut ChaCha8Rng, k: &CoeffFieldRef, range: i64) -> CoeffElement {
    let coords = (0..k.degree()).map(|_| Rational::from_integer(rng.gen_range(-range..=range).into())).collect();
    k.element(coords).expect("degree matches")
}

/// A record with `c((1)) = 1` and random integral `c(p)` for every prime of
/// norm up to `norm_bound`.
pub fn formal_eigenform(
    field: &BaseField,
    level: &PrincipalIdeal,
    weight: WeightPair,
    character: Option<RayCharacter>,
    k: &CoeffFieldRef,
    norm_bound: u64,
    seed: u64,
) -> NewformRecord {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut eigenvalues = BTreeMap::new();
    eigenvalues.insert(field.unit_ideal(), k.one());
    for p in field.primes_up_to(norm_bound) {
        eigenvalues.insert(p, random_element(&mut rng, k, 6));
    }
    NewformRecord {
        field: field.clone(),
        level: level.clone(),
        weight,
        character,
        coeff_field: k.clone(),
        eigenvalues,
        provenance: format!("synthetic formal eigenform, seed {seed}"),
    }
}

/// Random series with zero constant term on `index`.
pub fn noise_series(index: &Arc<BoxIndex>, k: &CoeffFieldRef, weight: WeightPair, density: f64, seed: u64) -> Result<TruncatedSeries> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let coeffs = (0..index.len()).map(|_| if rng.gen_bool(density) { random_element(&mut rng, k, 3) } else { k.zero() }).collect();
    TruncatedSeries::from_parts(index, k, weight, None, k.zero(), coeffs)
}

fn max_norm(index: &BoxIndex) -> u64 {
    index.elements().iter().map(|a| index.field().ideal(a).expect("nonzero").norm()).max().unwrap_or(1)
}

/// A search problem with a planted answer.
#[derive(Clone, Debug)]
pub struct SyntheticSearch {
    pub input: SearchInput,
    /// The planted forms of weight `[k,1]`; `V⁽²⁾` is their span.
    pub forms: Vec<NewformRecord>,
    /// Numerators `f_i·E_{1,χ⁻¹}` followed by noise, on the box enlarged
    /// from the last bound of the schedule.
    pub numerators: SpaceFixture,
}

/// Level `(14)`, weight `[5,1]`, the order six character and the smallest
/// prime not dividing the level, over `Q(√5)`.
pub fn planted_search(field: &BaseField, forms: usize, noise: usize, bounds: Vec<TruncationBound>, seed: u64) -> Result<SyntheticSearch> {
    let chi = order_six_character(field)?;
    let level = field.ideal(&field.integer(14))?;
    let weight = WeightPair::new(5, 1);
    let hecke_prime = field
        .primes_up_to(50)
        .into_iter()
        .find(|p| !field.divides(p, &level))
        .expect("a prime of small norm avoids the level");
    let input = SearchInput { field: field.clone(), weight, level: level.clone(), character: chi.clone(), bounds, hecke_prime };
    input.validate()?;
    let last = input.bounds.last().expect("validated schedule");
    let big = enlarged_bound(field, &input.hecke_prime, last);
    let index = BoxIndex::new(field, &big);
    let k = CoeffField::new(vec![field.d(), -3])?;
    // Eigenvalues reach well past the box so larger certification boxes
    // can be reconstructed from the same records.
    let records: Vec<NewformRecord> = (0..forms)
        .map(|i| formal_eigenform(field, &level, weight, Some(chi.clone()), &k, 4 * max_norm(&index), seed.wrapping_add(i as u64)))
        .collect();
    let psi = chi.inverse();
    let l0 = compute_l0_with(&psi, Exec::default())?;
    let e = eisenstein_series_on(&psi, &index, &k, &l0.value, Exec::default())?;
    let numerator_weight = weight.add(&WeightPair::new(1, 1));
    let mut basis = Vec::new();
    for r in &records {
        let f = reconstruct_with(r, &index, Exec::default())?;
        basis.push(f.mul(&e)?.with_metadata(numerator_weight, None));
    }
    for j in 0..noise {
        basis.push(noise_series(&index, &k, numerator_weight, 0.5, seed.wrapping_add(1000 + j as u64))?);
    }
    let numerators = SpaceFixture {
        field: field.clone(),
        weight: numerator_weight,
        level,
        dimension: basis.len(),
        bound: Some(big),
        coeff_field: k,
        provenance: format!("synthetic: {forms} planted forms and {noise} noise series, seed {seed}"),
        content: SpaceContent::Basis(basis),
    };
    numerators.validate()?;
    Ok(SyntheticSearch { input, forms: records, numerators })
}

/// Multisets of size `d` from `0..n`, in lexicographic order.
fn monomials(n: usize, d: u32) -> Vec<Vec<usize>> {
    if d == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for m in monomials(n, d - 1) {
        let start = m.last().copied().unwrap_or(0);
        for i in start..n {
            let mut next = m.clone();
            next.push(i);
            out.push(next);
        }
    }
    out
}

fn product(forms: &[TruncatedSeries], m: &[usize]) -> Result<TruncatedSeries> {
    let mut acc = forms[m[0]].clone();
    for &i in &m[1..] {
        acc = acc.mul(&forms[i])?;
    }
    Ok(acc)
}

/// Spaces for certifying any form in the planted span with power `d`:
/// the high space of weight `d·k + [d,d]` holding every degree `d`
/// monomial in the planted forms times `E_{1,χ⁻¹}^d` plus `noise` random
/// series, on `bound`; and the auxiliary space of weight `d·k - [1,1]`
/// holding the same monomials divided by `E_{1,χ^d}`, on the box enlarged
/// for the Hecke prime.
pub fn certification_spaces(
    search: &SyntheticSearch,
    bound: &TruncationBound,
    d: u32,
    noise: usize,
    seed: u64,
) -> Result<(SpaceFixture, SpaceFixture)> {
    let field = &search.input.field;
    let chi = &search.input.character;
    let k = search.numerators.coeff_field.clone();
    let weight = search.input.weight.scale(d as i64);
    let mons = monomials(search.forms.len(), d);

    let index = BoxIndex::new(field, bound);
    let psi = chi.inverse();
    let l0 = compute_l0_with(&psi, Exec::default())?;
    let e = eisenstein_series_on(&psi, &index, &k, &l0.value, Exec::default())?;
    let ed = e.pow(d, Exec::default())?;
    let forms = search.forms.iter().map(|r| reconstruct_with(r, &index, Exec::default())).collect::<Result<Vec<_>>>()?;
    let high_weight = weight.add(&WeightPair::new(d as i64, d as i64));
    let mut high = Vec::new();
    for m in &mons {
        high.push(product(&forms, m)?.mul(&ed)?.with_metadata(high_weight, None));
    }
    for j in 0..noise {
        high.push(noise_series(&index, &k, high_weight, 0.5, seed.wrapping_add(j as u64))?);
    }

    let big = enlarged_bound(field, &search.input.hecke_prime, bound);
    let big_index = BoxIndex::new(field, &big);
    let psi = chi.pow(d as i64);
    let l0 = compute_l0_with(&psi, Exec::default())?;
    let e = eisenstein_series_on(&psi, &big_index, &k, &l0.value, Exec::default())?;
    let forms = search.forms.iter().map(|r| reconstruct_with(r, &big_index, Exec::default())).collect::<Result<Vec<_>>>()?;
    let aux_weight = weight.sub(&WeightPair::new(1, 1));
    let mut aux = Vec::new();
    for m in &mons {
        aux.push(product(&forms, m)?.divide(&e)?.with_metadata(aux_weight, None));
    }

    let fixture = |weight: WeightPair, bound: TruncationBound, basis: Vec<TruncatedSeries>, what: &str| {
        let s = SpaceFixture {
            field: field.clone(),
            weight,
            level: search.input.level.clone(),
            dimension: basis.len(),
            bound: Some(bound),
            coeff_field: k.clone(),
            provenance: format!("synthetic {what} space for power {d}, seed {seed}"),
            content: SpaceContent::Basis(basis),
        };
        s.validate().map(|_| s)
    };
    Ok((fixture(high_weight, bound.clone(), high, "high")?, fixture(aux_weight, big, aux, "auxiliary")?))
}

//! The search for partial weight one forms: ratios of weight `[k+1,2]`
//! cusp forms by `E_{1,χ⁻¹}`, intersected with a Hecke translate, with CM
//! accounting, holomorphy certification and a Ramanujan diagnostic.

mod certify;
mod ramanujan;

use std::cmp::Ordering;
use std::sync::Arc;

use crate::arithmetic::{BaseField, CoeffElement, CoeffField, CoeffFieldRef, FieldElement, PrincipalIdeal, TruncationBound};
use crate::cm::cm_upper_bound_with;
use crate::data_io::{SpaceContent, SpaceFixture};
use crate::eisenstein::{compute_l0_with, eisenstein_series_on};
use crate::error::{Error, Result};
use crate::exec::{map_slice, Exec};
use crate::fourier::{BoxIndex, TruncatedSeries};
use crate::hecke::{apply_t_with, hecke_output_bound, oldform_map, reconstruct_with, BoundScaling, HeckeContext};
use crate::linalg::{charpoly, combine, intersection_coefficients, rank, solve, Vector};
use crate::ray_class::RayCharacter;
use crate::weight::WeightPair;

pub use certify::{certify_holomorphic, certify_holomorphic_with, Certification};
pub use ramanujan::{ramanujan_bound_squared, ramanujan_check, RamanujanRow, ENCLOSURE_WIDTH};

/// Input of one search: target weight `[k,1]`, level, nebentypus, the
/// rerun schedule of truncation bounds and the Hecke prime.
#[derive(Clone, Debug)]
pub struct SearchInput {
    pub field: BaseField,
    pub weight: WeightPair,
    pub level: PrincipalIdeal,
    pub character: RayCharacter,
    /// Bounds in increasing order; the report's dimensions are those of
    /// the last one.
    pub bounds: Vec<TruncationBound>,
    pub hecke_prime: PrincipalIdeal,
}

impl SearchInput {
    pub fn validate(&self) -> Result<()> {
        let fail = |invariant: &str, msg: String| Err(Error::Validation { invariant: invariant.into(), msg });
        if self.weight.k1 % 2 == 0 || self.weight.k2 % 2 == 0 {
            return fail("odd weights", format!("weight {}", self.weight));
        }
        if !self.field.is_squarefree(&self.level) {
            return fail("squarefree level", self.level.to_string());
        }
        if !self.character.is_totally_odd() {
            return Err(Error::NotTotallyOdd);
        }
        if !self.character.check_weight_compatibility(&self.weight) {
            return fail("weight compatibility", format!("{:?} with {}", self.character, self.weight));
        }
        if self.bounds.is_empty() {
            return fail("bound schedule", "no bounds".into());
        }
        HeckeContext::new(&self.field, self.level.clone(), self.weight, Some(self.character.clone()))?;
        if self.field.divides(&self.hecke_prime, &self.level) || !self.field.is_prime_ideal(&self.hecke_prime) {
            return fail("Hecke prime", format!("{} must be prime and prime to the level", self.hecke_prime));
        }
        Ok(())
    }

    fn numerator_weight(&self) -> WeightPair {
        self.weight.add(&WeightPair::new(1, 1))
    }
}

/// Dimensions observed at one bound of the schedule.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BoundDiagnostic {
    pub bound: TruncationBound,
    pub dim_v: usize,
    pub dim_v2: usize,
}

#[derive(Clone, Debug)]
pub struct SearchReport {
    pub weight: WeightPair,
    pub level: PrincipalIdeal,
    pub character: RayCharacter,
    pub hecke_prime: PrincipalIdeal,
    pub dim_v: usize,
    pub dim_v2: usize,
    /// Upper bound for the CM part visible on the box (not an exact count).
    pub cm_bound: usize,
    pub candidates: Vec<TruncatedSeries>,
    pub diagnostics: Vec<BoundDiagnostic>,
    pub provenance: String,
}

impl SearchReport {
    /// Whether `dim V⁽²⁾` agrees across the whole schedule.
    pub fn stable(&self) -> bool {
        self.diagnostics.windows(2).all(|w| w[0].dim_v2 == w[1].dim_v2)
    }
}

/// The ratio space at one bound, kept on the enlarged box where `T_q` can
/// still be applied once.
#[derive(Clone, Debug)]
pub struct RatioSpace {
    /// The box `B` of the report.
    pub bound: TruncationBound,
    /// Basis of `V` on the enlarged box.
    pub basis: Vec<TruncatedSeries>,
    pub eisenstein: TruncatedSeries,
    pub coeff_field: CoeffFieldRef,
}

/// The box `B'` with `hecke_output_bound(B') = B`: each `b_i` multiplied by
/// `max(π_i, 1/π_i)`.
pub fn enlarged_bound(field: &BaseField, q: &PrincipalIdeal, bound: &TruncationBound) -> TruncationBound {
    let one = field.one();
    let grow = |v: FieldElement| if (&v - &one).sign_at(1) == Ordering::Less { v.inv().expect("nonzero") } else { v };
    bound.scale_each(&grow(q.gen().clone()), &grow(q.gen().conj()))
}

/// Field holding numerators, `E_{1,χ⁻¹}` and the unit factors of weight
/// `[k+1,2]`.
fn working_field(field: &BaseField, fixture_field: &CoeffFieldRef, chi: &RayCharacter) -> Result<CoeffFieldRef> {
    let with_chi = CoeffField::compositum(fixture_field, &chi.natural_field())?;
    CoeffField::compositum(&with_chi, &CoeffField::new(vec![field.d()])?)
}

/// Numerator expansions of the fixture on `index`: reconstructed newforms
/// pushed to level `n` by every `V_b`, or an explicit basis truncated.
pub fn numerator_basis(
    field: &BaseField,
    fixture: &SpaceFixture,
    level: &PrincipalIdeal,
    index: &Arc<BoxIndex>,
    k: &CoeffFieldRef,
    exec: Exec,
) -> Result<Vec<TruncatedSeries>> {
    let target = index.bound();
    match &fixture.content {
        SpaceContent::Basis(series) => series
            .iter()
            .map(|s| {
                if !target.le(s.bound()) {
                    return Err(Error::InsufficientBound(format!("fixture bound {} below {target}", s.bound())));
                }
                s.truncate_to(index)?.embed_coeffs(k)
            })
            .collect(),
        SpaceContent::Newforms(records) => {
            let mut jobs = Vec::new();
            for r in records {
                if !field.divides(&r.level, level) {
                    return Err(Error::Validation {
                        invariant: "newform level divides level".into(),
                        msg: format!("{} does not divide {level}", r.level),
                    });
                }
                let quotient = field.quotient(level, &r.level).expect("divides");
                for b in field.divisors(&quotient) {
                    jobs.push((r, b));
                }
            }
            map_slice(exec, &jobs, |(r, b)| -> Result<TruncatedSeries> {
                let beta = b.gen();
                let src = target.scale_each(&beta.inv().expect("nonzero"), &beta.conj().inv().expect("nonzero")).max(target);
                let s = reconstruct_with(r, &BoxIndex::new(field, &src), Exec::Sequential)?;
                oldform_map(&s, b, target)?.embed_coeffs(k)
            })
            .into_iter()
            .collect()
        }
    }
}

/// `V(B)`: the numerator space divided by `E_{1,χ⁻¹}` on the enlarged box.
pub fn build_ratio_space(input: &SearchInput, fixture: &SpaceFixture, bound: &TruncationBound, exec: Exec) -> Result<RatioSpace> {
    let field = &input.field;
    let big = enlarged_bound(field, &input.hecke_prime, bound);
    let index = BoxIndex::new(field, &big);
    let k = working_field(field, &fixture.coeff_field, &input.character)?;
    let psi = input.character.inverse();
    let l0 = compute_l0_with(&psi, exec)?;
    let e = eisenstein_series_on(&psi, &index, &k, &l0.value, exec)?;
    let numerators = numerator_basis(field, fixture, &input.level, &index, &k, exec)?;
    if numerators.iter().any(|s| s.weight() != input.numerator_weight()) {
        return Err(Error::MetadataMismatch(format!("numerators must have weight {}", input.numerator_weight())));
    }
    let vectors: Vec<Vector> = numerators.iter().map(|s| s.to_vector()).collect();
    let r = rank(&vectors, index.len() + 1, exec);
    if r < fixture.dimension {
        return Err(Error::RankDeficient { rank: r, expected: fixture.dimension });
    }
    let basis = numerators.iter().map(|s| s.divide_with(&e, exec)).collect::<Result<Vec<_>>>()?;
    Ok(RatioSpace { bound: bound.clone(), basis, eisenstein: e, coeff_field: k })
}

/// `V⁽²⁾ = V ∩ T_q V` on the box `B`.
#[derive(Clone, Debug)]
pub struct Intersection {
    /// Coefficients of each basis vector of `V⁽²⁾` in the basis of `V`.
    pub coordinates: Vec<Vector>,
    /// The basis of `V⁽²⁾` on `B`.
    pub basis: Vec<TruncatedSeries>,
}

fn context(input: &SearchInput) -> Result<HeckeContext> {
    let mut ctx = HeckeContext::new(&input.field, input.level.clone(), input.weight, Some(input.character.clone()))?;
    ctx.scaling = BoundScaling::PerEmbedding;
    Ok(ctx)
}

pub fn intersect_with_hecke(
    space: &[TruncatedSeries],
    ctx: &HeckeContext,
    q: &PrincipalIdeal,
    bound: &TruncationBound,
    exec: Exec,
) -> Result<Intersection> {
    let Some(first) = space.first() else {
        return Ok(Intersection { coordinates: Vec::new(), basis: Vec::new() });
    };
    let field = first.field();
    let k = first.coeff_field().clone();
    let index = BoxIndex::new(field, bound);
    let images = map_slice(exec, space, |s| apply_t_with(ctx, q, s, Some(bound), Exec::Sequential))
        .into_iter()
        .collect::<Result<Vec<_>>>()?;
    let small = space.iter().map(|s| s.truncate_to(&index)).collect::<Result<Vec<_>>>()?;
    let a: Vec<Vector> = small.iter().map(|s| s.to_vector()).collect();
    let b: Vec<Vector> = images.iter().map(|s| s.to_vector()).collect();
    let pairs = intersection_coefficients(&a, &b, index.len() + 1, &k, exec)?;
    let mut basis = Vec::new();
    let mut coordinates = Vec::new();
    for (x, _) in pairs {
        basis.push(linear_combination(&x, &small)?);
        coordinates.push(x);
    }
    Ok(Intersection { coordinates, basis })
}

/// `Σ x_i s_i` for series sharing box and metadata.
pub fn linear_combination(x: &[CoeffElement], series: &[TruncatedSeries]) -> Result<TruncatedSeries> {
    let first = series.first().ok_or_else(|| Error::Validation { invariant: "nonempty".into(), msg: "no series".into() })?;
    let k = first.coeff_field();
    let len = first.index().len() + 1;
    let vectors: Vec<Vector> = series.iter().map(|s| s.to_vector()).collect();
    let v = combine(x, &vectors, len, k);
    TruncatedSeries::from_parts(first.index(), k, first.weight(), first.character().cloned(), v[0].clone(), v[1..].to_vec())
}

/// Algorithm 1 over the bound schedule.
pub fn run_search(input: &SearchInput, fixture: &SpaceFixture) -> Result<SearchReport> {
    run_search_with(input, fixture, Exec::default())
}

pub fn run_search_with(input: &SearchInput, fixture: &SpaceFixture, exec: Exec) -> Result<SearchReport> {
    input.validate()?;
    let ctx = context(input)?;
    let mut diagnostics = Vec::new();
    let mut last = None;
    for bound in &input.bounds {
        let (dim_v, v2) = if fixture.dimension == 0 && fixture.is_empty() {
            (0, Intersection { coordinates: Vec::new(), basis: Vec::new() })
        } else {
            let v = build_ratio_space(input, fixture, bound, exec)?;
            let v2 = intersect_with_hecke(&v.basis, &ctx, &input.hecke_prime, bound, exec)?;
            (v.basis.len(), v2)
        };
        diagnostics.push(BoundDiagnostic { bound: bound.clone(), dim_v, dim_v2: v2.basis.len() });
        last = Some((dim_v, v2));
    }
    let (dim_v, v2) = last.expect("nonempty schedule");
    let cm_bound = cm_upper_bound_with(&v2.basis, &input.level, exec)?;
    let dim_v2 = v2.basis.len();
    let candidates = if dim_v2 > cm_bound { v2.basis } else { Vec::new() };
    Ok(SearchReport {
        weight: input.weight,
        level: input.level.clone(),
        character: input.character.clone(),
        hecke_prime: input.hecke_prime.clone(),
        dim_v,
        dim_v2,
        cm_bound,
        candidates,
        diagnostics,
        provenance: fixture.provenance.clone(),
    })
}

/// Matrix of `T_p` on a candidate space given by coordinates in the basis
/// of `V` on the enlarged box: row `i` holds `T_p f_i` in the basis `f_j`,
/// solved on the box where `T_p` is determined.
pub fn hecke_matrix(
    ratio: &RatioSpace,
    coordinates: &[Vector],
    ctx: &HeckeContext,
    p: &PrincipalIdeal,
    exec: Exec,
) -> Result<Vec<Vector>> {
    if coordinates.is_empty() {
        return Ok(Vec::new());
    }
    let forms = coordinates.iter().map(|x| linear_combination(x, &ratio.basis)).collect::<Result<Vec<_>>>()?;
    let field = forms[0].field();
    let out = hecke_output_bound(field, p, forms[0].bound(), ctx.scaling);
    let index = BoxIndex::new(field, &out);
    let small: Vec<Vector> = forms.iter().map(|f| f.truncate_to(&index).map(|s| s.to_vector())).collect::<Result<_>>()?;
    let len = index.len() + 1;
    if rank(&small, len, exec) < small.len() {
        return Err(Error::RankDeficient { rank: rank(&small, len, exec), expected: small.len() });
    }
    let k = &ratio.coeff_field;
    forms
        .iter()
        .map(|f| {
            let t = apply_t_with(ctx, p, f, None, exec)?;
            solve(&small, &t.to_vector(), k, exec).ok_or_else(|| Error::Validation {
                invariant: "Hecke stability".into(),
                msg: format!("T_{p} does not preserve the candidate space on {out}"),
            })
        })
        .collect()
}

/// Characteristic polynomial of `T_p` on a candidate space, coefficients
/// from the constant term up.
pub fn hecke_charpoly(
    ratio: &RatioSpace,
    coordinates: &[Vector],
    ctx: &HeckeContext,
    p: &PrincipalIdeal,
    exec: Exec,
) -> Result<Vec<CoeffElement>> {
    let m = hecke_matrix(ratio, coordinates, ctx, p, exec)?;
    Ok(charpoly(&m, &ratio.coeff_field))
}

/// For a monic quadratic `x² + bx + c`, a radicand `r` of the smallest
/// multiquadratic extension of the coefficient field containing its roots
/// (`None` when the roots already lie in the field).
pub fn quadratic_splitting_radicand(poly: &[CoeffElement]) -> Result<Option<i64>> {
    if poly.len() != 3 {
        return Err(Error::Validation { invariant: "quadratic".into(), msg: format!("degree {}", poly.len() - 1) });
    }
    let k = poly[2].field().clone();
    let disc = &(&poly[1] * &poly[1]) - &(&poly[0] * &k.from_int(4));
    if disc.is_zero() || is_square(&k, &disc) {
        return Ok(None);
    }
    for r in squarefree_candidates() {
        if let Ok(ext) = CoeffField::compositum(&k, &CoeffField::new(vec![r])?) {
            if ext.degree() > k.degree() && is_square(&ext, &ext.embed(&disc)?) {
                return Ok(Some(r));
            }
        }
    }
    Err(Error::Validation { invariant: "multiquadratic splitting".into(), msg: format!("discriminant {disc}") })
}

fn squarefree_candidates() -> impl Iterator<Item = i64> {
    (2..200i64).flat_map(|n| [-n, n]).chain(std::iter::once(-1)).filter(|&r| crate::arithmetic::is_squarefree(r))
}

fn is_square(k: &CoeffFieldRef, x: &CoeffElement) -> bool {
    k.embed(x).map(|y| y.sqrt().is_some()).unwrap_or(false)
}

#[cfg(test)]
mod tests;

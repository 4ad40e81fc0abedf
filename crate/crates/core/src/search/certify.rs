//! Holomorphy certification by the power trick: a ratio `f` is holomorphic
//! once `f^d` matches a genuine cusp form `g` on a box where truncation is
//! injective on the space containing `(f^d - g)·E^d`.

use crate::arithmetic::{CoeffField, PrincipalIdeal};
use crate::data_io::SpaceFixture;
use crate::eisenstein::{compute_l0_with, eisenstein_series_on};
use crate::error::{Error, Result};
use crate::exec::{map_slice, Exec};
use crate::fourier::{BoxIndex, TruncatedSeries};
use crate::hecke::{apply_t_with, HeckeContext};
use crate::linalg::{rank, solve, Vector};
use crate::weight::WeightPair;

use super::{enlarged_bound, linear_combination, numerator_basis};

#[derive(Clone, Debug)]
pub enum Certification {
    /// `f^d = g` on the box, with `g` in the span built from the auxiliary
    /// space.
    Certified(TruncatedSeries),
    /// The containing space does not inject into the truncation.
    InjectivityFailure { rank: usize, declared: usize },
    NoMatch,
}

pub fn certify_holomorphic(
    f: &TruncatedSeries,
    d: u32,
    high_space: &SpaceFixture,
    aux_space: &SpaceFixture,
    q: &PrincipalIdeal,
) -> Result<Certification> {
    certify_holomorphic_with(f, d, high_space, aux_space, q, Exec::default())
}

pub fn certify_holomorphic_with(
    f: &TruncatedSeries,
    d: u32,
    high_space: &SpaceFixture,
    aux_space: &SpaceFixture,
    q: &PrincipalIdeal,
    exec: Exec,
) -> Result<Certification> {
    if d < 3 || d.is_multiple_of(2) {
        return Err(Error::Validation { invariant: "odd power d >= 3".into(), msg: format!("d = {d}") });
    }
    let field = f.field().clone();
    let chi = f.character().cloned().ok_or(Error::NotTotallyOdd)?;
    let psi = chi.pow(d as i64);
    let target_weight = f.weight().scale(d as i64);
    let e_weight = WeightPair::new(d as i64, d as i64);
    if high_space.weight != target_weight.add(&e_weight) {
        return Err(Error::MetadataMismatch(format!(
            "high space has weight {}, expected {}",
            high_space.weight,
            target_weight.add(&e_weight)
        )));
    }
    let aux_weight = target_weight.sub(&WeightPair::new(1, 1));
    if aux_space.weight != aux_weight {
        return Err(Error::MetadataMismatch(format!("auxiliary space has weight {}, expected {aux_weight}", aux_space.weight)));
    }
    let k = CoeffField::compositum(f.coeff_field(), &psi.natural_field())?;
    let k = CoeffField::compositum(&k, &aux_space.coeff_field)?;
    let k = CoeffField::compositum(&k, &CoeffField::new(vec![field.d()])?)?;
    let f = f.embed_coeffs(&k)?;
    let index = f.index().clone();
    let len = index.len() + 1;

    // Step 1: truncation to the box is injective on the containing space.
    let high = numerator_basis(&field, high_space, &high_space.level, &index, &k, exec)?;
    let high_vectors: Vec<Vector> = high.iter().map(|s| s.to_vector()).collect();
    let r = rank(&high_vectors, len, exec);
    if r < high_space.dimension {
        return Ok(Certification::InjectivityFailure { rank: r, declared: high_space.dimension });
    }

    // Step 2: E_{1,ψ}·S + T_q(E_{1,ψ}·S) inside the weight d·k space.
    let fd = f.pow(d, exec)?;
    let mut spanning: Vec<TruncatedSeries> = Vec::new();
    if !aux_space.is_empty() {
        let big = BoxIndex::new(&field, &enlarged_bound(&field, q, index.bound()));
        let l0 = compute_l0_with(&psi, exec)?;
        let e = eisenstein_series_on(&psi, &big, &k, &l0.value, exec)?;
        let aux = numerator_basis(&field, aux_space, &aux_space.level, &big, &k, exec)?;
        let ctx = HeckeContext::new(&field, aux_space.level.clone(), target_weight, Some(psi.clone()))?;
        let products = map_slice(exec, &aux, |a| a.mul_with(&e, Exec::Sequential)).into_iter().collect::<Result<Vec<_>>>()?;
        for p in &products {
            spanning.push(p.truncate_to(&index)?);
        }
        let images = map_slice(exec, &products, |p| apply_t_with(&ctx, q, p, Some(index.bound()), Exec::Sequential));
        for t in images {
            spanning.push(t?.truncate_to(&index)?);
        }
    }
    let vectors: Vec<Vector> = spanning.iter().map(|s| s.to_vector()).collect();
    match solve(&vectors, &fd.to_vector(), &k, exec) {
        None => Ok(Certification::NoMatch),
        Some(x) if spanning.is_empty() => {
            let _ = x;
            Ok(Certification::Certified(TruncatedSeries::zero(&index, &k, fd.weight(), fd.character().cloned())))
        }
        Some(x) => {
            let g = linear_combination(&x, &spanning)?.with_metadata(fd.weight(), fd.character().cloned());
            Ok(Certification::Certified(g))
        }
    }
}

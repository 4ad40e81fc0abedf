//! Hecke operators on truncated expansions, reconstruction of newform
//! expansions from eigenvalues, and oldform degeneracy maps.

use std::cmp::Ordering;
use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

use crate::arithmetic::{BaseField, CoeffElement, CoeffFieldRef, FieldElement, PrincipalIdeal, TruncationBound};
use crate::error::{Error, Result};
use crate::exec::{map_range, Exec};
use crate::fourier::{BoxIndex, TruncatedSeries};
use crate::ray_class::RayCharacter;
use crate::weight::WeightPair;

/// How the output box of `T_q` is derived from the input box.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum BoundScaling {
    /// Divide each `b_i` by `max(π_i, 1/π_i)`: the largest box on which
    /// every needed input index is available.
    #[default]
    PerEmbedding,
    /// Additionally divide by the norm of `q`, matching the coarser
    /// convention of scaling the bound by `N(q)`.
    Norm,
}

/// Level, weight and character for Hecke operators.
#[derive(Clone, Debug)]
pub struct HeckeContext {
    pub level: PrincipalIdeal,
    pub weight: WeightPair,
    pub character: Option<RayCharacter>,
    pub scaling: BoundScaling,
}

impl HeckeContext {
    pub fn new(field: &BaseField, level: PrincipalIdeal, weight: WeightPair, character: Option<RayCharacter>) -> Result<Self> {
        if let Some(chi) = &character {
            let f = chi.conductor()?.finite;
            if !field.divides(&f, &level) {
                return Err(Error::Validation {
                    invariant: "conductor divides level".into(),
                    msg: format!("conductor {f} does not divide {level}"),
                });
            }
        }
        Ok(HeckeContext { level, weight, character, scaling: BoundScaling::PerEmbedding })
    }

    fn chi(&self, q: &PrincipalIdeal, k: &CoeffFieldRef) -> Result<CoeffElement> {
        match &self.character {
            None => Ok(k.one()),
            Some(c) => c.evaluate_or_zero(q, k),
        }
    }
}

/// The largest box on which `T_q` of a series on `bound` is determined.
pub fn hecke_output_bound(field: &BaseField, q: &PrincipalIdeal, bound: &TruncationBound, scaling: BoundScaling) -> TruncationBound {
    let pi = q.gen();
    let pi_inv = pi.inv().expect("nonzero");
    let one = field.one();
    let s1 = if (pi - &one).sign_at(1) == Ordering::Less { pi.clone() } else { pi_inv.clone() };
    let s2 = if (pi - &one).sign_at(2) == Ordering::Less { pi.conj() } else { pi_inv.conj() };
    let out = bound.scale_each(&s1, &s2);
    match scaling {
        BoundScaling::PerEmbedding => out,
        BoundScaling::Norm => {
            let n = field.integer(q.norm() as i64).inv().expect("nonzero");
            out.min(&bound.scale_each(&n, &n))
        }
    }
}

/// `T_q` applied to a series, on the largest admissible box.
pub fn apply_t(ctx: &HeckeContext, q: &PrincipalIdeal, s: &TruncatedSeries) -> Result<TruncatedSeries> {
    apply_t_with(ctx, q, s, None, Exec::default())
}

/// `T_q` applied to a series, optionally truncated to a requested box:
/// `c_α(T_q f) = c_{απ} + π₂^{k2-k1} N(q)^{k1-1} χ(q) c_{α/π}` for `q` prime
/// to the level, and `c_α(T_q f) = c_{απ}` when `q` exactly divides it.
pub fn apply_t_with(
    ctx: &HeckeContext,
    q: &PrincipalIdeal,
    s: &TruncatedSeries,
    target: Option<&TruncationBound>,
    exec: Exec,
) -> Result<TruncatedSeries> {
    let field = s.field();
    if !field.is_prime_ideal(q) {
        return Err(Error::NotPrime(q.to_string()));
    }
    let divides_level = field.divides(q, &ctx.level);
    if divides_level && field.divides(&field.mul_ideals(q, q), &ctx.level) {
        return Err(Error::BadLevelRelation { prime: q.to_string(), level: ctx.level.to_string() });
    }
    let avail = hecke_output_bound(field, q, s.bound(), ctx.scaling);
    let out_bound = match target {
        None => avail,
        Some(t) => {
            if !t.le(&avail) {
                return Err(Error::InsufficientBound(format!(
                    "T_{q} on bound {} reaches only {avail}, requested {t}",
                    s.bound()
                )));
            }
            t.clone()
        }
    };
    let out_index = BoxIndex::new(field, &out_bound);
    let k = s.coeff_field();
    let pi = q.gen();
    let pi_inv = pi.inv().expect("nonzero");
    let second = if divides_level {
        None
    } else {
        let w = ctx.weight;
        let pow = k.from_base(&pi.conj().pow(w.k2 - w.k1).expect("nonzero"))?;
        let norm = k.from_int(q.norm() as i64).pow(w.k1 - 1)?;
        Some(&(&pow * &norm) * &ctx.chi(q, k)?)
    };
    let src = s.index();
    let coeffs = map_range(exec, out_index.len(), |i| {
        let alpha = &out_index.elements()[i];
        let up = alpha * pi;
        let mut c = s.coeffs()[src.position(&up).expect("output box sized for απ")].clone();
        if let Some(factor) = &second {
            let down = alpha * &pi_inv;
            if down.is_integral() {
                let j = src.position(&down).expect("α/π lies in the input box");
                let x = &s.coeffs()[j];
                if !x.is_zero() {
                    c = &c + &(factor * x);
                }
            }
        }
        c
    });
    let constant = match &second {
        Some(factor) => s.constant() + &(factor * s.constant()),
        None => s.constant().clone(),
    };
    TruncatedSeries::from_parts(&out_index, k, s.weight(), s.character().cloned(), constant, coeffs)
}

/// Hecke eigenvalue data of a newform: normalized ideal-indexed `c(p)` at
/// primes, plus `c((1)) = 1`.
#[derive(Clone, Debug)]
pub struct NewformRecord {
    pub field: BaseField,
    pub level: PrincipalIdeal,
    pub weight: WeightPair,
    pub character: Option<RayCharacter>,
    pub coeff_field: CoeffFieldRef,
    pub eigenvalues: BTreeMap<PrincipalIdeal, CoeffElement>,
    pub provenance: String,
}

impl NewformRecord {
    pub fn eigenvalue(&self, p: &PrincipalIdeal) -> Option<&CoeffElement> {
        self.eigenvalues.get(p)
    }

    fn check_normalized(&self) -> Result<()> {
        match self.eigenvalues.get(&self.field.unit_ideal()) {
            Some(c) if c.is_one() => Ok(()),
            Some(c) => Err(Error::NotNormalized(c.to_string())),
            None => Err(Error::NotNormalized("missing".into())),
        }
    }

    fn chi(&self, p: &PrincipalIdeal) -> Result<CoeffElement> {
        match &self.character {
            None => Ok(self.coeff_field.one()),
            Some(c) => c.evaluate_or_zero(p, &self.coeff_field),
        }
    }

    /// `c(p^e)`: `c(p)^e` when `p` divides the level, otherwise
    /// `c(p^e) = c(p)c(p^{e-1}) - χ(p)N(p)^{k1-1}c(p^{e-2})`.
    pub fn prime_power_coefficient(&self, p: &PrincipalIdeal, e: u32) -> Result<CoeffElement> {
        let k = &self.coeff_field;
        if e == 0 {
            return Ok(k.one());
        }
        let cp = self.eigenvalues.get(p).ok_or_else(|| Error::MissingEigenvalue(p.to_string()))?;
        if self.field.divides(p, &self.level) {
            return cp.pow(e as i64);
        }
        let t = &self.chi(p)? * &k.from_int(p.norm() as i64).pow(self.weight.k1 - 1)?;
        let (mut prev, mut cur) = (k.one(), cp.clone());
        for _ in 1..e {
            let next = &(cp * &cur) - &(&t * &prev);
            prev = cur;
            cur = next;
        }
        Ok(cur)
    }

    /// Ideal-indexed coefficient `c(a)` via multiplicativity.
    pub fn ideal_coefficient(&self, a: &PrincipalIdeal) -> Result<CoeffElement> {
        let mut acc = self.coeff_field.one();
        for (p, e) in self.field.factor(a) {
            acc = &acc * &self.prime_power_coefficient(&p, e)?;
        }
        Ok(acc)
    }
}

/// The element-indexed expansion of a newform on a box:
/// `c_α = c((α))·α₂^{-(k1-k2)/2}`, constant term zero.
pub fn reconstruct_expansion(record: &NewformRecord, bound: &TruncationBound) -> Result<TruncatedSeries> {
    reconstruct_with(record, &BoxIndex::new(&record.field, bound), Exec::default())
}

pub fn reconstruct_with(record: &NewformRecord, index: &Arc<BoxIndex>, exec: Exec) -> Result<TruncatedSeries> {
    record.check_normalized()?;
    let e = record.weight.half_difference()?;
    let k = &record.coeff_field;
    // Prime-power values are shared across many indices; compute each once.
    let mut cache: HashMap<(PrincipalIdeal, u32), CoeffElement> = HashMap::new();
    let facts: Vec<Vec<(PrincipalIdeal, u32)>> = index
        .elements()
        .iter()
        .map(|a| record.field.factor(&record.field.ideal(a).expect("nonzero")))
        .collect();
    for f in &facts {
        for (p, n) in f {
            if let std::collections::hash_map::Entry::Vacant(e) = cache.entry((p.clone(), *n)) {
                let v = record.prime_power_coefficient(p, *n)?;
                e.insert(v);
            }
        }
    }
    let coeffs = map_range(exec, index.len(), |i| -> Result<CoeffElement> {
        let alpha = &index.elements()[i];
        let mut c = k.one();
        for (p, n) in &facts[i] {
            c = &c * &cache[&(p.clone(), *n)];
        }
        let scale = k.from_base(&alpha.conj().pow(-e).expect("nonzero"))?;
        Ok(&c * &scale)
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;
    TruncatedSeries::from_parts(index, k, record.weight, record.character.clone(), k.zero(), coeffs)
}

/// `V_b`: `Σ c_α q^α ↦ Σ c_α q^{βα}` with `β` the canonical generator of
/// `b`, computed on the target box.
pub fn oldform_map(s: &TruncatedSeries, b: &PrincipalIdeal, target: &TruncationBound) -> Result<TruncatedSeries> {
    oldform_map_by(s, b.gen(), target)
}

/// `V_b` using an explicit totally positive generator `β`.
pub fn oldform_map_by(s: &TruncatedSeries, beta: &FieldElement, target: &TruncationBound) -> Result<TruncatedSeries> {
    let field = s.field();
    let reach = s.bound().scale_each(beta, &beta.conj());
    if !target.le(&reach) {
        return Err(Error::InsufficientBound(format!(
            "V_({beta}) of a series on {} covers {reach}, requested {target}",
            s.bound()
        )));
    }
    let index = BoxIndex::new(field, target);
    let k = s.coeff_field();
    let beta_inv = beta.inv().ok_or(Error::ZeroElement)?;
    let coeffs = index
        .elements()
        .iter()
        .map(|g| {
            let a = g * &beta_inv;
            if a.is_integral() && a.is_totally_positive() {
                s.coeffs()[s.index().position(&a).expect("inside the source box")].clone()
            } else {
                k.zero()
            }
        })
        .collect();
    TruncatedSeries::from_parts(&index, k, s.weight(), s.character().cloned(), s.constant().clone(), coeffs)
}

/// Images `V_b(f)` for every `(m, f)` with `m | n`, `m ≠ n`, and `b | n/m`.
pub fn span_old_space(
    field: &BaseField,
    new_bases: &[(PrincipalIdeal, Vec<TruncatedSeries>)],
    n: &PrincipalIdeal,
    target: &TruncationBound,
) -> Result<Vec<TruncatedSeries>> {
    let mut out = Vec::new();
    for (m, forms) in new_bases {
        if m == n || !field.divides(m, n) {
            continue;
        }
        let quotient = field.quotient(n, m).expect("m divides n");
        for b in field.divisors(&quotient) {
            for f in forms {
                out.push(oldform_map(f, &b, target)?);
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests;

//! The weight `[1,1]` Eisenstein series `E_{1,ψ}` and the exact value
//! `L(ψ,0)` of its constant term.

mod numeric;

use std::sync::Arc;

use num_bigint::BigInt;
use num_complex::Complex64;

use crate::arithmetic::{CoeffElement, CoeffFieldRef, PrincipalIdeal, TruncationBound};
use crate::error::{Error, Result};
use crate::exec::{map_range, Exec};
use crate::fourier::{BoxIndex, TruncatedSeries};
use crate::ray_class::{RayCharacter, RootOfUnity};
use crate::weight::WeightPair;
use crate::Rational;

pub use numeric::numeric_l0;

/// Agreement required between the exact and numeric values of `L(ψ,0)`.
pub const L_TOLERANCE: f64 = 1e-8;

/// `L(ψ,0)` with its numeric cross-check.
#[derive(Clone, Debug)]
pub struct LValue {
    pub character: RayCharacter,
    pub value: CoeffElement,
    pub numeric: Complex64,
    /// Root number recovered from the theta relation; `|W| = 1` is a
    /// consistency diagnostic.
    pub root_number: Complex64,
    pub gap: f64,
}

/// Exact `L(ψ,0)` for a primitive totally odd character: the sum of
/// `ψ(C)·ζ(0,C)` over ray classes, with each partial zeta value at zero
/// computed from the Shintani cone spanned by `1` and the totally positive
/// fundamental unit `u`.
///
/// Lattice points `α = y₁A + y₂Au` with `y ∈ (0,1] × [0,1)`, `A` the least
/// positive integer of the conductor, contribute
/// `B₁(y₁)B₁(y₂) + Tr(u)/4·(B₂(y₁) + B₂(y₂))`.
pub fn l_value_exact(psi: &RayCharacter, exec: Exec) -> Result<CoeffElement> {
    let prim = psi.primitive()?;
    let group = prim.group().clone();
    let ring = group.ring();
    let field = prim.field();
    let u = field.tp_fundamental_unit();
    let a = ring.smallest_integer() as i128;
    let (e, g) = ring.basis_coords(u);
    let (e, g) = (e as i128, g as i128);
    let t = u.trace().to_integer();
    let t: i128 = t.try_into().map_err(|_| Error::TooLarge { norm: u64::MAX, limit: i64::MAX as u64 })?;
    let d = a * g;
    let n_classes = group.order() as usize;
    // Each q-column of the parallelogram is independent; integer partial
    // sums make the reduction order irrelevant.
    let columns = map_range(exec, d as usize, |b| {
        let b = b as i128;
        let mut sums = vec![0i128; n_classes];
        let lo = (b * e).div_euclid(g) + 1;
        let hi = (b * e + a * g).div_euclid(g);
        for p in lo..=hi {
            let x = p * g - b * e;
            debug_assert!(x > 0 && x <= d);
            let res = ring.index_of(p as i64, b as i64);
            if let Some(c) = group.class_of_residue(res) {
                sums[c] += 6 * (2 * x - d) * (2 * b - d)
                    + t * (6 * x * x - 6 * x * d + 2 * d * d + 6 * b * b - 6 * b * d);
            }
        }
        sums
    });
    let mut totals = vec![BigInt::from(0); n_classes];
    for col in columns {
        for (tot, s) in totals.iter_mut().zip(col) {
            *tot += BigInt::from(s);
        }
    }
    let k = prim.natural_field();
    let denom = BigInt::from(24) * BigInt::from(d) * BigInt::from(d);
    let mut value = k.zero();
    for (c, tot) in totals.into_iter().enumerate() {
        if tot == BigInt::from(0) {
            continue;
        }
        let zeta = Rational::new(tot, denom.clone());
        value = &value + &prim.value_at_class(c).to_coeff(&k)?.scale(&zeta);
    }
    Ok(value)
}

/// `L(ψ,0)` exactly, verified against the analytic evaluation.
pub fn compute_l0(psi: &RayCharacter) -> Result<LValue> {
    compute_l0_with(psi, Exec::default())
}

pub fn compute_l0_with(psi: &RayCharacter, exec: Exec) -> Result<LValue> {
    if !psi.is_totally_odd() {
        return Err(Error::NotTotallyOdd);
    }
    let value = l_value_exact(psi, exec)?;
    let (numeric, root_number) = numeric_l0(psi)?;
    let exact = value.to_complex(0);
    let gap = (exact - numeric).norm();
    #[allow(clippy::neg_cmp_op_on_partial_ord)] // also rejects NaN
    if !(gap <= L_TOLERANCE) {
        return Err(Error::NumericMismatch { exact: exact.to_string(), numeric: numeric.to_string(), gap });
    }
    if value.is_zero() {
        return Err(Error::Validation { invariant: "L(psi,0) != 0".into(), msg: "vanishing constant term".into() });
    }
    Ok(LValue { character: psi.clone(), value, numeric, root_number, gap })
}

/// `Σ_{m | a} ψ(m)` with `ψ` extended by zero off the conductor.
pub fn divisor_sum(psi: &RayCharacter, a: &PrincipalIdeal, k: &CoeffFieldRef) -> Result<CoeffElement> {
    let field = psi.field();
    let mut acc = k.one();
    for (p, e) in field.factor(a) {
        let local = match psi.evaluate_root(&p) {
            Ok(r) => {
                let mut s = k.zero();
                let mut pw = RootOfUnity::one();
                for _ in 0..=e {
                    s = &s + &pw.to_coeff(k)?;
                    pw = pw.mul(&r);
                }
                s
            }
            Err(Error::NotCoprime { .. }) => k.one(),
            Err(err) => return Err(err),
        };
        acc = &acc * &local;
    }
    Ok(acc)
}

/// `E_{1,ψ}` on a box, coefficients in the character's natural field.
pub fn eisenstein_series(psi: &RayCharacter, bound: &TruncationBound) -> Result<TruncatedSeries> {
    let index = BoxIndex::new(psi.field(), bound);
    let l = compute_l0(psi)?;
    eisenstein_series_on(psi, &index, &l.value.field().clone(), &l.value, Exec::default())
}

/// `E_{1,ψ}` on a given index, with a known `L(ψ,0)` and target field.
pub fn eisenstein_series_on(
    psi: &RayCharacter,
    index: &Arc<BoxIndex>,
    k: &CoeffFieldRef,
    l0: &CoeffElement,
    exec: Exec,
) -> Result<TruncatedSeries> {
    if !psi.is_totally_odd() {
        return Err(Error::NotTotallyOdd);
    }
    let field = psi.field();
    let coeffs = map_range(exec, index.len(), |i| {
        let a = field.ideal(&index.elements()[i])?;
        divisor_sum(psi, &a, k)
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;
    let constant = k.embed(l0)?.scale(&Rational::new(1.into(), 4.into()));
    TruncatedSeries::from_parts(index, k, WeightPair::new(1, 1), Some(psi.clone()), constant, coeffs)
}

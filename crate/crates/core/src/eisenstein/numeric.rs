//! Floating point evaluation of `L(ψ,0)` through the theta relation of the
//! completed L-function `Λ(s) = A^{s/2} Γ_R(s+1)² L(s,ψ)`, `A = d_F·N(f)`.
//! Used only as an independent check of the exact value.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::arithmetic::Splitting;
use crate::error::Result;
use crate::ray_class::RayCharacter;

const STEP: f64 = 1.0 / 16.0;

/// `∫_0^∞ e^{-x cosh t} w(t) dt` by the trapezoid rule, which converges
/// geometrically for these analytic, doubly exponentially decaying
/// integrands.
fn integrate(x: f64, w: impl Fn(f64) -> f64) -> f64 {
    let mut sum = 0.5 * (-x).exp() * w(0.0);
    let mut k = 1;
    loop {
        let t = k as f64 * STEP;
        let term = (-x * t.cosh()).exp() * w(t);
        sum += term;
        if x * t.cosh() > 750.0 || (term.abs() < 1e-300 && t > 1.0) {
            break;
        }
        k += 1;
    }
    sum * STEP
}

fn k0(x: f64) -> f64 {
    integrate(x, |_| 1.0)
}

fn k1(x: f64) -> f64 {
    integrate(x, |t| t.cosh())
}

/// `∫_x^∞ K_0(u) du`.
fn k0_tail(x: f64) -> f64 {
    integrate(x, |t| 1.0 / t.cosh())
}

fn dirichlet_coefficients(psi: &RayCharacter, nmax: usize) -> Result<Vec<Complex64>> {
    let field = psi.field();
    let value = |p: &crate::arithmetic::PrincipalIdeal| -> Result<Complex64> {
        match psi.evaluate_root(p) {
            Ok(r) => {
                let t = *r.fraction().numer() as f64 / *r.fraction().denom() as f64;
                Ok(Complex64::from_polar(1.0, 2.0 * PI * t))
            }
            Err(crate::Error::NotCoprime { .. }) => Ok(Complex64::new(0.0, 0.0)),
            Err(e) => Err(e),
        }
    };
    let mut a = vec![Complex64::new(0.0, 0.0); nmax + 1];
    a[1] = Complex64::new(1.0, 0.0);
    // Local coefficients at each prime power, then multiplicativity.
    let mut local: Vec<Option<(u64, u32, Complex64)>> = vec![None; nmax + 1];
    for p in 2..=nmax as u64 {
        if !crate::arithmetic::is_prime_u64(p) {
            continue;
        }
        let ps = field.primes_above(p)?;
        let vals: Vec<Complex64> = ps.iter().map(value).collect::<Result<_>>()?;
        let mut pj = p;
        let mut j = 1u32;
        while pj as usize <= nmax {
            let c = match field.splitting(p) {
                Splitting::Split => (0..=j).map(|i| vals[0].powu(i) * vals[1].powu(j - i)).sum(),
                Splitting::Ramified => vals[0].powu(j),
                Splitting::Inert => {
                    if j.is_multiple_of(2) {
                        vals[0].powu(j / 2)
                    } else {
                        Complex64::new(0.0, 0.0)
                    }
                }
            };
            local[pj as usize] = Some((p, j, c));
            pj *= p;
            j += 1;
        }
    }
    for n in 2..=nmax {
        let mut acc = Complex64::new(1.0, 0.0);
        for (p, e) in crate::arithmetic::factor_u64(n as u64) {
            acc *= local[p.pow(e) as usize].expect("prime power").2;
        }
        a[n] = acc;
    }
    Ok(a)
}

/// `L(ψ,0)` and the root number for a totally odd character.
pub fn numeric_l0(psi: &RayCharacter) -> Result<(Complex64, Complex64)> {
    let prim = psi.primitive()?;
    let field = prim.field();
    let cond = prim.modulus().finite.norm() as f64;
    let big_a = field.discriminant() as f64 * cond;
    let c = big_a.sqrt() / PI;
    let nmax = (40.0 * c).ceil() as usize + 10;
    let a = dirichlet_coefficients(&prim, nmax)?;
    let phi = |y: f64| 4.0 / PI * (y / c) * k0(2.0 * y / c);
    let theta = |t: f64, conj: bool| -> Complex64 {
        (1..=nmax)
            .map(|n| {
                let an = if conj { a[n].conj() } else { a[n] };
                an * phi(n as f64 * t)
            })
            .sum()
    };
    let t0 = 1.1;
    let w = t0 * theta(t0, false) / theta(1.0 / t0, true);
    let mut l = Complex64::new(0.0, 0.0);
    for n in 1..=nmax {
        let x = 2.0 * n as f64 / c;
        l += a[n] * (2.0 / PI * k0_tail(x)) + w * a[n].conj() * (2.0 / PI * k1(x));
    }
    Ok((l, w))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bessel_values() {
        // Reference values of K0, K1 and the tail integral at x = 1.
        assert!((k0(1.0) - 0.421_024_438_240_708_3).abs() < 1e-14);
        assert!((k1(1.0) - 0.601_907_230_197_234_6).abs() < 1e-14);
        // ∫_0^∞ K0 = π/2, and ∫_0^1 K0 ≈ 1.2425... so the tail is π/2 - that.
        let head = 1.242_509_848_623_778_3;
        assert!((k0_tail(1.0) - (PI / 2.0 - head)).abs() < 1e-14);
    }
}

use super::*;
use crate::arithmetic::CoeffField;
use crate::eisenstein::eisenstein_series;
use crate::ray_class::{enumerate_characters, one_plus, CharacterConstraints, Modulus, RayClassGroup};
use crate::Rational;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn q5() -> BaseField {
    BaseField::new(5).unwrap()
}

fn bound(f: &BaseField, n: i64) -> TruncationBound {
    TruncationBound::integers(f, n, n).unwrap()
}

fn ideal(f: &BaseField, n: i64) -> PrincipalIdeal {
    f.ideal(&f.integer(n)).unwrap()
}

fn chi7(f: &BaseField) -> RayCharacter {
    let g = RayClassGroup::new(f, &Modulus::totally_odd(ideal(f, 7))).unwrap();
    let c = CharacterConstraints { order: Some(6), ..Default::default() };
    enumerate_characters(&g, &c).unwrap().remove(0)
}

/// A record with random integer eigenvalues: formally an eigenform.
fn synthetic(f: &BaseField, level: i64, weight: WeightPair, max_norm: u64, seed: u64) -> NewformRecord {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let k = CoeffField::new(vec![5]).unwrap();
    let mut eigenvalues = BTreeMap::new();
    eigenvalues.insert(f.unit_ideal(), k.one());
    for p in f.primes_up_to(max_norm) {
        eigenvalues.insert(p, k.from_int(rng.gen_range(-9..=9)));
    }
    NewformRecord {
        field: f.clone(),
        level: ideal(f, level),
        weight,
        character: None,
        coeff_field: k,
        eigenvalues,
        provenance: "synthetic".into(),
    }
}

#[test]
fn reconstruction_is_multiplicative() {
    let f = q5();
    let r = synthetic(&f, 14, WeightPair::new(2, 2), 200, 1);
    let s = reconstruct_expansion(&r, &bound(&f, 14)).unwrap();
    assert!(s.coeff(&f.one()).unwrap().is_one());
    let c = |n: i64| s.coeff(&f.integer(n)).unwrap().clone();
    // 2 divides the level, so c((4)) = c((2))²; 2 and 3 are coprime primes.
    assert_eq!(c(4), &c(2) * &c(2));
    assert_eq!(c(6), &c(2) * &c(3));
    let c3 = r.eigenvalue(&ideal(&f, 3)).unwrap().clone();
    let nine = &(&c3 * &c3) - &r.coeff_field.from_int(9);
    assert_eq!(c(9), nine);
}

#[test]
fn unit_translation_identity() {
    let f = q5();
    let r = synthetic(&f, 1, WeightPair::new(3, 1), 400, 2);
    let s = reconstruct_expansion(&r, &bound(&f, 20)).unwrap();
    let eta = f.from_half(3, 1);
    let k = s.coeff_field().clone();
    let factor = k.from_base(&eta.conj().inv().unwrap()).unwrap();
    let mut seen = 0;
    for a in s.index().elements() {
        if let Some(c) = s.coeff(&(a * &eta)) {
            assert_eq!(c, &(&factor * s.coeff(a).unwrap()));
            seen += 1;
        }
    }
    assert!(seen > 10);
    assert_eq!(s.unit_translate(&eta).unwrap().coeffs(), s.coeffs());
}

#[test]
fn synthetic_records_are_eigenforms() {
    let f = q5();
    for (weight, seed) in [(WeightPair::new(2, 2), 3), (WeightPair::new(3, 1), 4), (WeightPair::new(5, 1), 5)] {
        let r = synthetic(&f, 7, weight, 700, seed);
        let s = reconstruct_expansion(&r, &bound(&f, 26)).unwrap();
        let ctx = HeckeContext::new(&f, r.level.clone(), weight, None).unwrap();
        let e = weight.half_difference().unwrap();
        for q in f.primes_up_to(12) {
            let t = apply_t(&ctx, &q, &s).unwrap();
            let lambda = &r.ideal_coefficient(&q).unwrap() * &r.coeff_field.from_base(&q.gen().conj().pow(-e).unwrap()).unwrap();
            let want = s.scalar_mul(&lambda).unwrap().truncate(t.bound()).unwrap();
            assert_eq!(t.coeffs(), want.coeffs(), "T_{q} in weight {weight}");
        }
    }
}

#[test]
fn eisenstein_eigenvalues() {
    let f = q5();
    let psi = chi7(&f);
    let e = eisenstein_series(&psi, &bound(&f, 24)).unwrap();
    let ctx = HeckeContext::new(&f, ideal(&f, 7), WeightPair::new(1, 1), Some(psi.clone())).unwrap();
    let k = e.coeff_field().clone();
    for q in f.primes_up_to(20) {
        let t = apply_t(&ctx, &q, &e).unwrap();
        let lambda = if q.norm() == 49 { k.one() } else { one_plus(&k, &psi.evaluate_root(&q).unwrap()).unwrap() };
        let want = e.scalar_mul(&lambda).unwrap().truncate(t.bound()).unwrap();
        assert_eq!(t.coeffs(), want.coeffs(), "T_{q}");
        assert_eq!(t.constant(), want.constant(), "constant of T_{q}");
    }
}

#[test]
fn recursion_matches_eisenstein_divisor_sums() {
    let f = q5();
    let psi = chi7(&f);
    let e = eisenstein_series(&psi, &bound(&f, 20)).unwrap();
    let k = e.coeff_field().clone();
    let mut eigenvalues = BTreeMap::new();
    eigenvalues.insert(f.unit_ideal(), k.one());
    for p in f.primes_up_to(400) {
        let v = match psi.evaluate_root(&p) {
            Ok(r) => one_plus(&k, &r).unwrap(),
            Err(_) => k.one(),
        };
        eigenvalues.insert(p, v);
    }
    let r = NewformRecord {
        field: f.clone(),
        level: ideal(&f, 7),
        weight: WeightPair::new(1, 1),
        character: Some(psi),
        coeff_field: k,
        eigenvalues,
        provenance: "eisenstein".into(),
    };
    let s = reconstruct_expansion(&r, e.bound()).unwrap();
    assert_eq!(s.coeffs(), e.coeffs());
}

#[test]
fn bad_inputs_are_rejected() {
    let f = q5();
    let r = synthetic(&f, 4, WeightPair::new(2, 2), 100, 6);
    let s = reconstruct_expansion(&r, &bound(&f, 8)).unwrap();
    let ctx = HeckeContext::new(&f, ideal(&f, 4), WeightPair::new(2, 2), None).unwrap();
    assert!(matches!(apply_t(&ctx, &ideal(&f, 2), &s), Err(Error::BadLevelRelation { .. })));
    assert!(matches!(apply_t(&ctx, &ideal(&f, 6), &s), Err(Error::NotPrime(_))));
    let mut missing = r.clone();
    missing.eigenvalues.remove(&f.unit_ideal());
    assert!(matches!(reconstruct_expansion(&missing, &bound(&f, 4)), Err(Error::NotNormalized(_))));
    let mut gap = r.clone();
    gap.eigenvalues.remove(&ideal(&f, 3));
    assert!(matches!(reconstruct_expansion(&gap, &bound(&f, 4)), Err(Error::MissingEigenvalue(_))));
    let small = bound(&f, 3);
    let ask = bound(&f, 10);
    assert!(matches!(
        apply_t_with(&ctx, &ideal(&f, 3), &s.truncate(&small).unwrap(), Some(&ask), Exec::Sequential),
        Err(Error::InsufficientBound(_))
    ));
}

#[test]
fn output_bound_examples() {
    let f = q5();
    let b = bound(&f, 30);
    let three = ideal(&f, 3);
    assert_eq!(hecke_output_bound(&f, &three, &b, BoundScaling::PerEmbedding), bound(&f, 10));
    let out = hecke_output_bound(&f, &three, &b, BoundScaling::Norm);
    assert_eq!(out, TruncationBound::rational(&f, Rational::new(30.into(), 9.into()), Rational::new(30.into(), 9.into())).unwrap());
}

#[test]
fn oldform_map_examples() {
    let f = q5();
    let r = synthetic(&f, 1, WeightPair::new(2, 2), 900, 7);
    let s = reconstruct_expansion(&r, &bound(&f, 8)).unwrap();
    let v = oldform_map(&s, &ideal(&f, 2), &bound(&f, 16)).unwrap();
    assert_eq!(v.coeff(&f.integer(2)), s.coeff(&f.one()));
    assert_eq!(v.coeff(&f.integer(6)), s.coeff(&f.integer(3)));
    assert!(v.coeff(&f.integer(3)).unwrap().is_zero());
    // In parallel weight the generator of b does not matter.
    let eta = f.from_half(3, 1);
    let big = reconstruct_expansion(&r, &bound(&f, 30)).unwrap();
    let a = oldform_map_by(&big, &f.integer(2), &bound(&f, 16)).unwrap();
    let b = oldform_map_by(&big, &(&f.integer(2) * &eta), &bound(&f, 16)).unwrap();
    assert_eq!(a.coeffs(), b.coeffs());
    assert!(matches!(oldform_map(&s, &ideal(&f, 2), &bound(&f, 40)), Err(Error::InsufficientBound(_))));
}

#[test]
fn old_space_spans_degeneracy_images() {
    let f = q5();
    let r = synthetic(&f, 1, WeightPair::new(2, 2), 400, 8);
    let s = reconstruct_expansion(&r, &bound(&f, 20)).unwrap();
    let n = ideal(&f, 4);
    let old = span_old_space(&f, &[(f.unit_ideal(), vec![s.clone()]), (n.clone(), vec![s])], &n, &bound(&f, 10)).unwrap();
    // Divisors of (4) are (1), (2), (4).
    assert_eq!(old.len(), 3);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn hecke_operators_commute(seed in 0u64..1000, wi in 0usize..3) {
        let f = q5();
        let weight = [WeightPair::new(2, 2), WeightPair::new(3, 1), WeightPair::new(4, 2)][wi];
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let k = CoeffField::new(vec![5]).unwrap();
        let index = BoxIndex::new(&f, &bound(&f, 40));
        let coeffs = (0..index.len()).map(|_| k.from_int(rng.gen_range(-3..=3))).collect();
        let s = TruncatedSeries::from_parts(&index, &k, weight, None, k.from_int(1), coeffs).unwrap();
        let ctx = HeckeContext::new(&f, ideal(&f, 1), weight, None).unwrap();
        let primes = f.primes_up_to(11);
        let p = &primes[rng.gen_range(0..primes.len())];
        let q = &primes[rng.gen_range(0..primes.len())];
        let pq = apply_t(&ctx, p, &apply_t(&ctx, q, &s).unwrap()).unwrap();
        let qp = apply_t(&ctx, q, &apply_t(&ctx, p, &s).unwrap()).unwrap();
        let common = pq.bound().min(qp.bound());
        let (a, b) = (pq.truncate(&common).unwrap(), qp.truncate(&common).unwrap());
        prop_assert_eq!(a.coeffs(), b.coeffs());
        prop_assert_eq!(pq.constant(), qp.constant());
    }

    #[test]
    fn sequential_and_parallel_agree(seed in 0u64..1000) {
        let f = q5();
        let r = synthetic(&f, 7, WeightPair::new(3, 1), 200, seed);
        let index = BoxIndex::new(&f, &bound(&f, 14));
        let a = reconstruct_with(&r, &index, Exec::Sequential).unwrap();
        let b = reconstruct_with(&r, &index, Exec::Parallel).unwrap();
        prop_assert_eq!(a.coeffs(), b.coeffs());
        let ctx = HeckeContext::new(&f, r.level.clone(), r.weight, None).unwrap();
        let q = ideal(&f, 2);
        let x = apply_t_with(&ctx, &q, &a, None, Exec::Sequential).unwrap();
        let y = apply_t_with(&ctx, &q, &a, None, Exec::Parallel).unwrap();
        prop_assert_eq!(x.coeffs(), y.coeffs());
    }
}

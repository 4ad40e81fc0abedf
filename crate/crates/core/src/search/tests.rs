use super::*;
use crate::linalg::{intersect, span_basis};
use crate::synthetic::{certification_spaces, noise_series, planted_search, SyntheticSearch};
use std::sync::OnceLock;

fn q5() -> BaseField {
    BaseField::new(5).unwrap()
}

fn planted() -> &'static SyntheticSearch {
    static CELL: OnceLock<SyntheticSearch> = OnceLock::new();
    CELL.get_or_init(|| {
        let f = q5();
        let bounds = vec![TruncationBound::integers(&f, 5, 5).unwrap(), TruncationBound::integers(&f, 6, 6).unwrap()];
        planted_search(&f, 2, 2, bounds, 11).unwrap()
    })
}

fn planted_on(s: &SyntheticSearch, bound: &TruncationBound) -> Vec<TruncatedSeries> {
    let index = BoxIndex::new(&s.input.field, bound);
    s.forms.iter().map(|r| reconstruct_with(r, &index, Exec::default()).unwrap()).collect()
}

fn vectors(series: &[TruncatedSeries]) -> Vec<Vector> {
    series.iter().map(|s| s.to_vector()).collect()
}

#[test]
fn enlarged_bound_inverts_output_bound() {
    let f = q5();
    let b = TruncationBound::integers(&f, 6, 6).unwrap();
    for p in f.primes_up_to(30) {
        let big = enlarged_bound(&f, &p, &b);
        assert_eq!(hecke_output_bound(&f, &p, &big, BoundScaling::PerEmbedding), b, "{p}");
        assert!(b.le(&big));
    }
}

#[test]
fn planted_space_is_recovered() {
    let s = planted();
    let report = run_search(&s.input, &s.numerators).unwrap();
    assert_eq!(report.dim_v, 4);
    assert_eq!(report.dim_v2, 2);
    assert!(report.stable());
    assert_eq!(report.cm_bound, 0);
    assert_eq!(report.candidates.len(), 2);

    let bound = s.input.bounds.last().unwrap();
    let truth = planted_on(s, bound);
    let k = report.candidates[0].coeff_field().clone();
    let truth: Vec<TruncatedSeries> = truth.iter().map(|t| t.embed_coeffs(&k).unwrap()).collect();
    let len = truth[0].index().len() + 1;
    assert_eq!(span_basis(&vectors(&truth), len, Exec::Sequential), span_basis(&vectors(&report.candidates), len, Exec::Sequential));
    for c in &report.candidates {
        assert_eq!(c.weight(), s.input.weight);
        assert_eq!(c.character(), Some(&s.input.character));
    }
}

#[test]
fn intersection_matches_oracle() {
    // Oracle: the plain two-span intersection of V and T_q V on the box,
    // without the kernel bookkeeping of the search.
    let s = planted();
    let bound = s.input.bounds.last().unwrap();
    let ratio = build_ratio_space(&s.input, &s.numerators, bound, Exec::Sequential).unwrap();
    let ctx = context(&s.input).unwrap();
    let got = intersect_with_hecke(&ratio.basis, &ctx, &s.input.hecke_prime, bound, Exec::Sequential).unwrap();
    let index = BoxIndex::new(&s.input.field, bound);
    let small: Vec<TruncatedSeries> = ratio.basis.iter().map(|v| v.truncate_to(&index).unwrap()).collect();
    let images: Vec<TruncatedSeries> =
        ratio.basis.iter().map(|v| apply_t_with(&ctx, &s.input.hecke_prime, v, Some(bound), Exec::Sequential).unwrap()).collect();
    let len = index.len() + 1;
    let oracle = intersect(&vectors(&small), &vectors(&images), len, &ratio.coeff_field, Exec::Sequential).unwrap();
    assert_eq!(span_basis(&oracle, len, Exec::Sequential), span_basis(&vectors(&got.basis), len, Exec::Sequential));
    for (x, b) in got.coordinates.iter().zip(&got.basis) {
        assert_eq!(&linear_combination(x, &small).unwrap(), b);
    }
}

#[test]
fn sequential_and_parallel_reports_agree() {
    let s = planted();
    let a = run_search_with(&s.input, &s.numerators, Exec::Sequential).unwrap();
    let b = run_search_with(&s.input, &s.numerators, Exec::Parallel).unwrap();
    assert_eq!(a.candidates, b.candidates);
    assert_eq!(a.diagnostics, b.diagnostics);
}

#[test]
fn noise_only_space_has_no_candidates() {
    let s = planted();
    let mut fixture = s.numerators.clone();
    if let SpaceContent::Basis(b) = &mut fixture.content {
        b.drain(..2);
    }
    fixture.dimension = 2;
    let report = run_search(&s.input, &fixture).unwrap();
    assert_eq!(report.dim_v, 2);
    assert_eq!(report.dim_v2, 0);
    assert!(report.candidates.is_empty());
}

#[test]
fn empty_space_and_bad_inputs() {
    let s = planted();
    let mut empty = s.numerators.clone();
    empty.content = SpaceContent::Basis(Vec::new());
    empty.dimension = 0;
    let report = run_search(&s.input, &empty).unwrap();
    assert_eq!((report.dim_v, report.dim_v2, report.candidates.len()), (0, 0, 0));

    let mut deficient = s.numerators.clone();
    deficient.dimension = 5;
    assert!(matches!(
        build_ratio_space(&s.input, &deficient, &s.input.bounds[0], Exec::Sequential),
        Err(Error::RankDeficient { rank: 4, expected: 5 })
    ));

    let f = &s.input.field;
    let mut bad = s.input.clone();
    bad.hecke_prime = f.ideal(&f.integer(2)).unwrap();
    assert!(bad.validate().is_err());
    let mut bad = s.input.clone();
    bad.weight = WeightPair::new(4, 2);
    assert!(bad.validate().is_err());
    let mut bad = s.input.clone();
    bad.level = f.ideal(&f.integer(28)).unwrap();
    assert!(bad.validate().is_err());
    let mut bad = s.input.clone();
    bad.character = s.input.character.pow(2);
    assert!(matches!(bad.validate(), Err(Error::NotTotallyOdd)));
    let mut bad = s.input.clone();
    bad.bounds.clear();
    assert!(bad.validate().is_err());
}

#[test]
fn hecke_matrix_has_planted_eigenvalues() {
    let s = planted();
    let bound = s.input.bounds.last().unwrap();
    let ratio = build_ratio_space(&s.input, &s.numerators, bound, Exec::default()).unwrap();
    let ctx = context(&s.input).unwrap();
    let v2 = intersect_with_hecke(&ratio.basis, &ctx, &s.input.hecke_prime, bound, Exec::default()).unwrap();
    let p = s.input.field.primes_up_to(20).into_iter().find(|p| p.norm() == 11).unwrap();
    let poly = hecke_charpoly(&ratio, &v2.coordinates, &ctx, &p, Exec::default()).unwrap();
    // The planted forms are eigenvectors with λ_i = c_i(p)·π₂^{-2}.
    let k = &ratio.coeff_field;
    let scale = k.from_base(&p.gen().conj().pow(-2).unwrap()).unwrap();
    let lambdas: Vec<CoeffElement> = s.forms.iter().map(|r| &k.embed(r.eigenvalue(&p).unwrap()).unwrap() * &scale).collect();
    let expected = vec![&lambdas[0] * &lambdas[1], -&(&lambdas[0] + &lambdas[1]), k.one()];
    assert_eq!(poly, expected);
    assert_eq!(quadratic_splitting_radicand(&poly).unwrap(), None);
}

#[test]
fn splitting_radicand_examples() {
    let k = CoeffField::new(vec![-3]).unwrap();
    // x² - x + 5 has discriminant -19.
    let poly = vec![k.from_int(5), k.from_int(-1), k.one()];
    let r = quadratic_splitting_radicand(&poly).unwrap().unwrap();
    let ext = CoeffField::compositum(&k, &CoeffField::new(vec![r]).unwrap()).unwrap();
    assert!(ext.sqrt_of(-19).is_some());
    // x² + x + 1 splits over Q(√-3).
    let poly = vec![k.one(), k.one(), k.one()];
    assert_eq!(quadratic_splitting_radicand(&poly).unwrap(), None);
    assert!(quadratic_splitting_radicand(&poly[..2]).is_err());
}

#[test]
fn certification_of_planted_forms() {
    let s = planted();
    let bound = TruncationBound::integers(&s.input.field, 7, 7).unwrap();
    let (high, aux) = certification_spaces(s, &bound, 3, 1, 5).unwrap();
    let forms = planted_on(s, &bound);
    let k = forms[0].coeff_field().clone();
    let f = forms[0].add(&forms[1].scalar_mul(&k.from_int(2)).unwrap()).unwrap();
    match certify_holomorphic(&f, 3, &high, &aux, &s.input.hecke_prime).unwrap() {
        Certification::Certified(g) => assert_eq!(g.to_vector(), f.pow(3, Exec::default()).unwrap().to_vector()),
        other => panic!("{other:?}"),
    }
    let zero = f.sub(&f).unwrap();
    assert!(matches!(certify_holomorphic(&zero, 3, &high, &aux, &s.input.hecke_prime).unwrap(), Certification::Certified(_)));

    // A noise ratio is not holomorphic in the planted sense: its cube
    // matches nothing.
    let index = f.index().clone();
    let noise = noise_series(&index, &k, s.input.weight, 0.7, 77).unwrap().with_metadata(s.input.weight, Some(s.input.character.clone()));
    assert!(matches!(certify_holomorphic(&noise, 3, &high, &aux, &s.input.hecke_prime).unwrap(), Certification::NoMatch));

    let mut inflated = high.clone();
    inflated.dimension += 1;
    assert!(matches!(
        certify_holomorphic(&f, 3, &inflated, &aux, &s.input.hecke_prime).unwrap(),
        Certification::InjectivityFailure { .. }
    ));
    assert!(certify_holomorphic(&f, 2, &high, &aux, &s.input.hecke_prime).is_err());
    assert!(certify_holomorphic(&f, 3, &aux, &aux, &s.input.hecke_prime).is_err());
}

#[test]
fn ramanujan_margins() {
    let f = q5();
    let k = CoeffField::new(vec![5, -3]).unwrap();
    let chi = crate::synthetic::order_six_character(&f).unwrap();
    let level = f.ideal(&f.integer(14)).unwrap();
    let w = WeightPair::new(5, 1);
    let mut r = crate::synthetic::formal_eigenform(&f, &level, w, Some(chi), &k, 30, 3);
    let p11 = f.primes_up_to(11).into_iter().find(|p| p.norm() == 11).unwrap();
    let p9 = f.ideal(&f.integer(3)).unwrap();
    // Exactly on the bound: |c| = 2N².
    r.eigenvalues.insert(p11.clone(), k.from_int(2 * 121));
    // Above the bound: 3p² at the inert prime 3.
    r.eigenvalues.insert(p9.clone(), k.from_int(3 * 9));
    r.eigenvalues.insert(f.ideal(&f.integer(2)).unwrap(), k.zero());
    let rows = ramanujan_check(&r, 12).unwrap();
    let row = |p: &PrincipalIdeal| rows.iter().find(|x| &x.prime == p).unwrap().clone();
    assert_eq!(row(&p11).passes, [true, true]);
    assert!(row(&p11).margins().iter().all(|m| m.abs() < 1e-12));
    assert_eq!(row(&p9).passes, [true, true], "27 < 2·81");
    let two = row(&f.ideal(&f.integer(2)).unwrap());
    assert!(two.divides_level && two.passes == [true, true]);
    r.eigenvalues.insert(p9.clone(), k.from_int(3 * 81));
    let rows = ramanujan_check(&r, 12).unwrap();
    let bad = rows.iter().find(|x| x.prime == p9).unwrap();
    assert_eq!(bad.passes, [false, false]);
    assert!(bad.width < ENCLOSURE_WIDTH);
    assert_eq!(ramanujan_bound_squared(9, w), num_bigint::BigInt::from(4 * 81 * 81));
}

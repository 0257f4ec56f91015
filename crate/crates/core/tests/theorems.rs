use std::collections::BTreeMap;

use ramify_core::fixtures::{three_adic_deg9, two_adic_deg4};
use ramify_core::perturb::{c_lambda, minpoly_linear_algebra, PerturbationSeries};
use ramify_core::theorems::{equiv_ell, special_terms, verify_nochange, verify_special, TheoremError, Verdict};
use ramify_core::{EisensteinPoly, FieldElement, Partition};

/// `φ(X) = X + a X^{ℓ+1} + b X^{ℓ+2}` with `a, b` built from digits.
fn series(f: &EisensteinPoly, ell: u32, a: &[i64], b: &[i64]) -> PerturbationSeries {
    let field = f.field();
    let mut terms = BTreeMap::new();
    terms.insert(1, field.one());
    terms.insert(ell + 1, field.from_digits(a));
    terms.insert(ell + 2, field.from_digits(b));
    PerturbationSeries::from_sparse(field, &terms).unwrap()
}

#[test]
fn degree9_unchanged_coefficients() {
    let f = three_adic_deg9(20).unwrap();
    // expected ρ_h(ℓ) for h = 1..9
    let expected: [(u32, [u32; 9]); 3] = [
        (1, [2, 3, 2, 3, 3, 3, 3, 3, 2]),
        (2, [3; 9]),
        (3, [3, 3, 3, 3, 3, 3, 3, 3, 4]),
    ];
    for (ell, rhos) in expected {
        for (a, b) in [(vec![1], vec![2]), (vec![2, 1], vec![0, 1]), (vec![1, 2, 2], vec![])] {
            let phi = series(&f, ell, &a, &b);
            let report = verify_nochange(&f, &phi, ell).unwrap();
            assert_eq!(report.verdict(), Verdict::Pass, "ℓ = {ell}");
            let got: Vec<u32> = report.rows.iter().map(|r| r.rho).collect();
            assert_eq!(got, rhos.to_vec(), "ℓ = {ell}");
        }
    }
}

#[test]
fn degree9_special_sets() {
    let profile = three_adic_deg9(20).unwrap().indices().unwrap();
    let at = |ell, j| special_terms(&profile, ell, j).unwrap().unwrap();
    for (j, h) in [(0, 1), (1, 3), (2, 9)] {
        let t = at(1, j);
        assert_eq!((t.h, t.h0, t.k, t.s_j()), (h, 1, 2, vec![j]));
    }
    let t = at(2, 2);
    assert_eq!((t.h, t.h0, t.k, t.s_j()), (9, 1, 3, vec![0, 1, 2]));
    assert_eq!(t.terms.iter().map(|x| x.g_m).collect::<Vec<_>>(), vec![-2, -2, 1]);
    assert!(special_terms(&profile, 2, 0).unwrap().is_none());
    let t = at(3, 0);
    assert_eq!((t.h, t.h0, t.k, t.terms[0].g_m), (8, 8, 3, 2));
}

#[test]
fn equiv_ell_profile_choice_is_immaterial() {
    for f in [two_adic_deg4(20).unwrap(), three_adic_deg9(20).unwrap()] {
        let phi = series(&f, 1, &[1, 1], &[2]);
        let ft = minpoly_linear_algebra(&f, &phi).unwrap();
        for ell in 1..=3 {
            let forward = equiv_ell(&f, &ft, ell).unwrap();
            let backward = equiv_ell(&ft, &f, ell).unwrap();
            let rhos = |r: &ramify_core::CongruenceReport| r.rows.iter().map(|x| (x.rho, x.verified)).collect::<Vec<_>>();
            assert_eq!(rhos(&forward), rhos(&backward));
        }
    }
}

#[test]
fn a_wrong_coefficient_is_caught() {
    let f = two_adic_deg4(20).unwrap();
    let q2 = f.field();
    let phi = PerturbationSeries::x_plus(q2, &q2.one(), 1).unwrap();
    let ft = minpoly_linear_algebra(&f, &phi).unwrap();
    // shift c~_3 by 4: still ≡ c_3 mod 4, but not mod 8 = 2^{ρ_3(1)}
    let mut coeffs: Vec<FieldElement> = ft.coeffs().to_vec();
    coeffs[2] = coeffs[2].add(&q2.from_integer(4)).unwrap();
    let broken = EisensteinPoly::new(q2, coeffs).unwrap();
    let report = equiv_ell(&f, &broken, 1).unwrap();
    assert!(!report.holds);
    assert_eq!(report.rows.iter().filter(|r| !r.verified).map(|r| r.h).collect::<Vec<_>>(), vec![3]);
}

#[test]
fn special_checks_are_not_vacuous() {
    // for ℓ = 1 the prediction c_1 - 2c_2 r differs from c_1 mod M^3
    let f = three_adic_deg9(20).unwrap();
    let field = f.field();
    let report = verify_special(&f, &field.one(), 1).unwrap();
    assert_eq!(report.verdict(), Verdict::Pass);
    let check = report.checks.iter().find(|c| c.terms.h == 1).unwrap();
    let predicted = field.parse(&check.predicted).unwrap();
    assert!(!predicted.congruent(f.c(1), 3).unwrap());
}

#[test]
fn hypothesis_is_enforced() {
    let f = three_adic_deg9(20).unwrap();
    let phi = series(&f, 1, &[1], &[]);
    assert!(matches!(
        verify_nochange(&f, &phi, 2),
        Err(TheoremError::HypothesisViolated { valuation: 2, needed: 3 })
    ));
}

#[test]
fn c_lambda_bound_is_attained() {
    // i_0^π = 5 = 2·4 - 3, and λ = {3} attains v_L(c_λ) = i_0^π + |λ|
    let f = two_adic_deg4(20).unwrap();
    let c = c_lambda(&f, &Partition::new(vec![3]).unwrap()).unwrap();
    assert_eq!(c.valuation().finite().map(|v| v * 4), Some(8));
    assert_eq!(f.indices().unwrap().b()[0], 3);
}

use std::sync::Arc;

use super::*;
use crate::dwork::{build_frobenius_series, classical_l, theta_splitting, FiberEvaluator, SigmaModuleSpec, TorusPolynomial};
use crate::ffield::ClosedPoint;
use crate::linalg::Matrix;
use crate::padic::{default_digit_count, make_ring_context, PAdicExponent, RingElement, RingTower};
use crate::series::{MultiSeries, TSeries};

const RANK_TWO: &str = r#"{
    "p": 3, "a": 1, "n": 1, "rank": 2,
    "entries": [
        {"row": 0, "col": 0, "terms": [{"exponent": [0]}, {"exponent": [1], "pi_valuation": 2}]},
        {"row": 1, "col": 0, "terms": [{"exponent": [1], "pi_valuation": 2}]},
        {"row": 0, "col": 1, "terms": [{"exponent": [0], "pi_valuation": 1}, {"exponent": [1], "pi_valuation": 3}]},
        {"row": 1, "col": 1, "terms": [{"exponent": [0], "pi_valuation": 1, "unit_digits": [2]}]}
    ]
}"#;

fn kappa(p: u64, n: u32, v: i64) -> PAdicExponent {
    PAdicExponent::from_i64(p as u32, v, default_digit_count(p as u32, n))
}

#[test]
fn rank_one_moment_is_a_power_of_the_series() {
    let ctx = make_ring_context(3, 1, 1, 10).unwrap();
    let theta = theta_splitting(&ctx, None).unwrap();
    let field = crate::ffield::FiniteField::new(3, 1).unwrap();
    let f = TorusPolynomial::new(&field, 1, &[(vec![1], 1)]).unwrap();
    let fa = build_frobenius_series(&f, &theta, None).unwrap();
    let spec = SigmaModuleSpec::rank_one(fa.clone()).unwrap();
    let family = MomentFamily::new(&spec).unwrap();
    assert_eq!(family.basis().len(), 1);
    let sq = family.moment_matrix(&kappa(3, 10, 2), MomentMode::ExactKappa).unwrap();
    assert!(sq.get(0, 0).eq_mod(&fa.checked_mul(&fa).unwrap(), 10));
    let inv = family.moment_matrix(&kappa(3, 10, -1), MomentMode::ExactKappa).unwrap();
    assert!(inv.get(0, 0).checked_mul(&fa).unwrap().eq_mod(&MultiSeries::one(&ctx, 1, fa.bound()), 10));
}

#[test]
fn kappa_power_of_a_monomial() {
    let ctx = make_ring_context(3, 1, 1, 8).unwrap();
    let pi = RingElement::uniformizer(&ctx);
    let mut b = MultiSeries::one(&ctx, 1, 7);
    b.set(&[1], pi.clone()).unwrap();
    let system = MomentSystem::new(Arc::new(MomentBasis::for_profile(&[0], 8)), &Matrix::from_fn(1, 1, |_, _| b.clone())).unwrap();
    let p2 = system.kappa_power(&kappa(3, 8, 2)).unwrap();
    assert_eq!(p2[0].coeff(&[0]), RingElement::one(&ctx));
    assert_eq!(p2[0].coeff(&[1]), pi.mul_int(2));
    assert_eq!(p2[0].coeff(&[2]), &pi * &pi);
    assert!(p2[0].coeff(&[3]).is_zero());
}

#[test]
fn kappa_one_reproduces_b_on_short_monomials() {
    let ctx = make_ring_context(3, 1, 1, 10).unwrap();
    let spec = SigmaModuleSpec::from_json(&ctx, RANK_TWO).unwrap();
    let family = MomentFamily::new(&spec).unwrap();
    let m = family.moment_matrix(&kappa(3, 10, 1), MomentMode::ExactKappa).unwrap();
    for i in 0..2 {
        for j in 0..2 {
            assert!(m.get(i, j).eq_mod(spec.entry(i, j), 10), "({i},{j})");
        }
    }
    for col in 0..family.basis().len() {
        let l = family.basis().length(col) as u32;
        for row in 0..family.basis().len() {
            assert!(m.get(row, col).min_valuation() >= l.min(10));
        }
    }
}

#[test]
fn wedge_and_exponents() {
    let ctx = make_ring_context(3, 1, 1, 8).unwrap();
    let d = [2i64, 5, 7];
    let b = Matrix::from_fn(3, 3, |i, j| if i == j { RingElement::from_int(&ctx, d[i]) } else { RingElement::zero(&ctx) });
    let w = wedge_matrix(&b, 2).unwrap();
    assert_eq!(w.rows(), 3);
    for (k, v) in [10i64, 14, 35].iter().enumerate() {
        assert_eq!(*w.get(k, k), RingElement::from_int(&ctx, *v));
    }
    assert_eq!(*wedge_matrix(&b, 0).unwrap().get(0, 0), RingElement::one(&ctx));
    assert!(wedge_matrix(&b, 4).is_none());
    let table: Vec<i64> = (0..5).map(assembly_exponent).collect();
    assert_eq!(table, vec![1, 0, -1, 2, -3]);
}

#[test]
fn binomial_identity() {
    let r = binomial_identity_check(2);
    assert_eq!(r.terms, vec!["1", "0", "-3", "2"]);
    assert!(r.is_zero);
    assert_eq!(binomial_identity_check(0).sum, "1");
    for m in 1..=12 {
        assert!(binomial_identity_check(m).is_zero, "m={m}");
    }
}

#[test]
fn kappa_one_moment_l_is_classical() {
    let ctx = make_ring_context(3, 1, 1, 12).unwrap();
    let theta = theta_splitting(&ctx, None).unwrap();
    let field = crate::ffield::FiniteField::new(3, 1).unwrap();
    let f = TorusPolynomial::new(&field, 1, &[(vec![2], 1)]).unwrap();
    let spec = SigmaModuleSpec::rank_one(build_frobenius_series(&f, &theta, None).unwrap()).unwrap();
    let l0 = l_s_compute(&spec, &kappa(3, 12, 1), 0, None, 4).unwrap();
    let classical = classical_l(&f, &theta, 4, None).unwrap();
    assert!(l0.compare(&classical, 12).unwrap().passed());
    let l2 = l_s_compute(&spec, &kappa(3, 12, 1), 2, None, 4).unwrap();
    assert!(l2.compare(&TSeries::one(&ctx, 4), 12).unwrap().passed());
}

#[test]
fn unit_roots() {
    let tower = RingTower::new(3, 1, 2, 12).unwrap();
    let theta = theta_splitting(tower.base(), None).unwrap();
    let f = TorusPolynomial::new(tower.fields().base(), 1, &[(vec![1], 1)]).unwrap();
    let spec = SigmaModuleSpec::rank_one(build_frobenius_series(&f, &theta, None).unwrap()).unwrap();
    let fibers = FiberEvaluator::new(&tower, spec.matrix()).unwrap();
    let one = ClosedPoint { degree: 1, representative: vec![0] };
    let data = fiber_unit_root(&fibers, &one).unwrap();
    assert!(data.unit_root.eq_mod(theta.value_at_one(), 12));

    let ctx = tower.base();
    let pi = RingElement::uniformizer(ctx);
    let mut b0 = MultiSeries::one(ctx, 1, 11);
    b0.set(&[1], pi.clone()).unwrap();
    let b1 = MultiSeries::constant(&pi, 1, 11);
    let diag = SigmaModuleSpec::diagonal(vec![b0, b1]).unwrap();
    let fibers = FiberEvaluator::new(&tower, diag.matrix()).unwrap();
    for pt in tower.fields().closed_points(1, 2).unwrap() {
        let data = fiber_unit_root(&fibers, &pt).unwrap();
        let x = tower.lift_point(pt.degree, &pt.representative).unwrap();
        let mut expected = RingElement::one(&x[0].ctx().clone());
        let mut cur = x[0].clone();
        let lifted_pi = tower.embed(&pi, pt.degree).unwrap();
        for _ in 0..pt.degree {
            expected = &expected * &(&RingElement::one(cur.ctx()) + &(&lifted_pi * &cur));
            cur = cur.pow(3);
        }
        let expected = tower.restrict(&expected, pt.degree).unwrap();
        assert!(data.unit_root.eq_mod(&expected, 12), "{pt:?}");
    }

    let zeta = unit_root_l_euler(&fibers, &kappa(3, 12, 0), 2).unwrap();
    assert_eq!(zeta.to_integers().unwrap(), vec![1, 2, 6]);
}

#[test]
fn sym_semigroup_and_limits() {
    let tower = RingTower::new(3, 1, 2, 10).unwrap();
    let spec = SigmaModuleSpec::from_json(tower.base(), RANK_TWO).unwrap();
    let fibers = FiberEvaluator::new(&tower, spec.matrix()).unwrap();
    let pts = tower.fields().closed_points(1, 2).unwrap();
    let pt = pts.iter().find(|p| p.degree == 2).unwrap();
    let fiber = fibers.fiber_frobenius(pt).unwrap();
    for k in 0..=3 {
        assert!(sym_check(&fiber, k).unwrap() >= 10, "k={k}");
    }
    let basis = Arc::new(MomentBasis::for_profile(spec.profile(), 10));
    let minus_one = PAdicExponent::minus_one(3, default_digit_count(3, 10));
    for j in 1..=3 {
        assert!(semigroup_check(&fibers, &basis, &minus_one, pt, j).unwrap() >= 10, "j={j}");
    }
    let system = MomentSystem::new(basis, &fiber).unwrap();
    let samples = operator_limit_check(&system, &minus_one, &[0, 1, 2], None).unwrap();
    assert!(samples.iter().all(|s| s.passed), "{samples:?}");
}

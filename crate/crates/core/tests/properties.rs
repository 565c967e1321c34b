mod common;

use std::sync::Arc;

use common::*;
use dwork_core::dwork::{classical_l, theta_splitting, FiberEvaluator, SigmaModuleSpec};
use dwork_core::ffield::FieldTower;
use dwork_core::linalg::{fredholm, fredholm_minors, Matrix};
use dwork_core::moment::{moment_l_euler, semigroup_check, unit_root_l_euler, MomentBasis, MomentFamily, MomentSystem};
use dwork_core::oracle::{l_from_character_sums, Character};
use dwork_core::padic::{binomial_big, make_ring_context, vp_factorial, PAdicExponent, RingElement, RingTower};
use num_bigint::BigUint;
use proptest::prelude::*;
use serde_json::json;

fn digits_strategy(p: u32, len: usize) -> impl Strategy<Value = Vec<u32>> {
    prop::collection::vec(0..p, len)
}

/// A normalized rank-two module over `Z_3[pi]` in one variable with random
/// divisible perturbations.
fn random_rank_two(params: &[(u32, usize, u64)], n_pi: u32) -> SigmaModuleSpec {
    let ctx = ring(3, n_pi);
    let term = |(v, k, digit): (u32, usize, u64)| json!({"exponent": [k], "pi_valuation": v, "unit_digits": [digit]});
    let doc = json!({
        "p": 3, "a": 1, "n": 1, "rank": 2,
        "entries": [
            {"row": 0, "col": 0, "terms": [{"exponent": [0]}, term(params[0])]},
            {"row": 1, "col": 0, "terms": [term(params[1])]},
            {"row": 0, "col": 1, "terms": [term(params[2])]},
            {"row": 1, "col": 1, "terms": [term(params[3]), {"exponent": [0], "pi_valuation": 1, "unit_digits": [params[4].2]}]}
        ]
    });
    SigmaModuleSpec::from_json(&ctx, &doc.to_string()).unwrap()
}

fn term_strategy() -> impl Strategy<Value = (u32, usize, u64)> {
    (2u32..5, 1usize..3, 1u64..3)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn teichmuller_lifts_are_roots_of_unity(p in prop::sample::select(vec![2u64, 3, 5]), a in 1usize..3,
                                           d in 1usize..3, seed in any::<u64>()) {
        let tower = RingTower::new(p, a, d, 10).unwrap();
        let field = tower.fields().field(d).unwrap();
        let order = field.order();
        let x = (seed % (order - 1)) as u32 + 1;
        let lift = RingElement::teichmuller(tower.level(d).unwrap(), &field.coeffs(x));
        prop_assert!(lift.pow(order - 1).eq_mod(&RingElement::one(tower.level(d).unwrap()), 10));
        prop_assert_eq!(lift.residue(), field.coeffs(x));
    }

    #[test]
    fn binomial_congruences(p in prop::sample::select(vec![2u32, 3, 5]), digits in digits_strategy(5, 12),
                            j in 0u64..20, m in 0usize..8) {
        let digits: Vec<u32> = digits.iter().map(|d| d % p).collect();
        let kappa = PAdicExponent::from_digits(p, digits).unwrap();
        let loss = vp_factorial(p as u64, j) as usize;
        prop_assume!(m + 1 > loss);
        let modulus = BigUint::from(p).pow((m + 1 - loss) as u32);
        let full = binomial_big(&kappa.residue(), j) % &modulus;
        let truncated = binomial_big(&kappa.truncation(m), j) % &modulus;
        prop_assert_eq!(full, truncated);
    }

    #[test]
    fn orbit_counts_and_trace_invariance(p in prop::sample::select(vec![2u32, 3, 5]), a in 1usize..3,
                                         n in 1usize..3, seed in any::<u32>()) {
        let max = if p == 5 || n == 2 { 2 } else { 3 };
        let tower = FieldTower::new(p, a, max).unwrap();
        let counts = tower.closed_point_counts(n, max).unwrap();
        for m in 1..=max {
            let total: u64 = (1..=m).filter(|d| m % d == 0).map(|d| d as u64 * counts[d - 1] as u64).sum();
            prop_assert_eq!(total, (tower.q().pow(m as u32) - 1).pow(n as u32));
            let field = tower.field(m).unwrap();
            let x = seed % field.order() as u32;
            prop_assert_eq!(field.trace(field.pow(x, p as u64)), field.trace(x));
        }
        prop_assert_eq!(tower.closed_points(n, max).unwrap(), tower.closed_points(n, max).unwrap());
    }

    #[test]
    fn kappa_powers_are_continuous(digits in digits_strategy(3, 12), other in digits_strategy(3, 12),
                                   m in 0usize..4, v in 1u32..3) {
        let n_pi = 16;
        let ctx = make_ring_context(3, 1, 1, n_pi).unwrap();
        let mut shared = other.clone();
        shared[..=m].copy_from_slice(&digits[..=m]);
        let k1 = PAdicExponent::from_digits(3, digits).unwrap();
        let k2 = PAdicExponent::from_digits(3, shared).unwrap();
        let eta = RingElement::uniformizer(&ctx).pow(v as u64);
        let b = Matrix::from_fn(1, 1, |_, _| &RingElement::one(&ctx) + &eta);
        let system = MomentSystem::new(Arc::new(MomentBasis::for_profile(&[0], n_pi)), &b).unwrap();
        let diff = &system.kappa_power(&k1).unwrap()[0] - &system.kappa_power(&k2).unwrap()[0];
        let bound = (v + 2 * (m as u32 + 1)).min(n_pi);
        prop_assert!(diff.val() >= bound, "valuation {} < {}", diff.val(), bound);
    }

    #[test]
    fn newton_identities_match_minors(dim in 1usize..7, seed in prop::collection::vec(0u64..3, 36 * 12)) {
        let ctx = make_ring_context(3, 1, 1, 12).unwrap();
        let m = Matrix::from_fn(dim, dim, |i, j| {
            let k = (i * dim + j) * 12;
            RingElement::from_pi_digits(&ctx, &seed[k..k + 12], 12)
        });
        let a = fredholm(&m, dim).unwrap();
        let b = fredholm_minors(&m, dim).unwrap();
        prop_assert!(a.compare(&b, 12).unwrap().passed());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(10))]

    #[test]
    fn classical_l_matches_the_oracle(c1 in 0u32..3, c2 in 0u32..3, c3 in 1u32..3) {
        let tower = RingTower::new(3, 1, 4, 16).unwrap();
        let theta = theta_splitting(tower.base(), None).unwrap();
        let f = poly(3, 1, 1, &[(vec![1], c1), (vec![2], c2), (vec![4], c3)]);
        let dwork = classical_l(&f, &theta, 4, None).unwrap();
        let oracle = l_from_character_sums(&f, &tower, 4, &Character::from_splitting(&theta)).unwrap();
        prop_assert!(dwork.compare(&oracle, 10).unwrap().passed(), "{}", f);
    }

    #[test]
    fn random_rank_two_modules_satisfy_the_moment_identities(
        params in prop::collection::vec(term_strategy(), 5),
        k in prop::sample::select(vec![-2i64, -1, 0, 1, 3]),
    ) {
        let n_pi = 12;
        let degree = 3;
        let spec = random_rank_two(&params, n_pi);
        let tower = RingTower::new(3, 1, degree, n_pi).unwrap();
        let kappa = kappa(3, n_pi, k);
        let family = MomentFamily::new(&spec).unwrap();
        let fibers = FiberEvaluator::new(&tower, spec.matrix()).unwrap();

        let operator = family.l_s(&kappa, 0, None, degree).unwrap();
        let euler = moment_l_euler(&fibers, family.basis(), &kappa, 0, degree).unwrap();
        prop_assert!(operator.compare(&euler, n_pi - 4).unwrap().passed());

        let assembled = family.l_unit_assembled(&kappa, None, degree, 2).unwrap();
        let unit = unit_root_l_euler(&fibers, &kappa, degree).unwrap();
        prop_assert!(assembled.compare(&unit, n_pi - 4).unwrap().passed());

        for s in 0..=3u32 {
            let l = family.l_s(&kappa, s as usize, None, degree).unwrap();
            prop_assert!(l.min_valuation_from(1) >= s.saturating_sub(1));
        }

        let pt = tower.fields().closed_points(1, 2).unwrap().into_iter().last().unwrap();
        let basis = Arc::new(MomentBasis::for_profile(spec.profile(), n_pi));
        prop_assert!(semigroup_check(&fibers, &basis, &kappa, &pt, 2).unwrap() >= n_pi);
    }
}

//! Shared fixtures for the operator benchmarks.

use std::sync::Arc;

use dwork_core::dwork::{build_frobenius_series, theta_splitting, SigmaModuleSpec, TorusPolynomial};
use dwork_core::ffield::FiniteField;
use dwork_core::padic::{make_ring_context, RingContext};

pub const RANK_THREE: &str = r#"{
    "p": 3, "a": 1, "n": 1, "rank": 3,
    "entries": [
        {"row": 0, "col": 0, "terms": [{"exponent": [0]}, {"exponent": [1], "pi_valuation": 2}]},
        {"row": 1, "col": 0, "terms": [{"exponent": [1], "pi_valuation": 2}]},
        {"row": 2, "col": 0, "terms": [{"exponent": [1], "pi_valuation": 3}]},
        {"row": 0, "col": 1, "terms": [{"exponent": [1], "pi_valuation": 2}]},
        {"row": 1, "col": 1, "terms": [{"exponent": [0], "pi_valuation": 1}, {"exponent": [1], "pi_valuation": 3}]},
        {"row": 2, "col": 1, "terms": [{"exponent": [1], "pi_valuation": 2, "unit_digits": [2]}]},
        {"row": 0, "col": 2, "terms": [{"exponent": [0], "pi_valuation": 2}, {"exponent": [1], "pi_valuation": 3}]},
        {"row": 1, "col": 2, "terms": [{"exponent": [1], "pi_valuation": 3}]},
        {"row": 2, "col": 2, "terms": [{"exponent": [0], "pi_valuation": 2, "unit_digits": [2]}]}
    ],
    "profile": [0, 1, 2]
}"#;

pub fn ring(p: u64, n_pi: u32) -> Arc<RingContext> {
    make_ring_context(p, 1, 1, n_pi).expect("valid ring parameters")
}

/// `x + x^2` over `F_3` in `n` variables along the diagonal.
pub fn sample_polynomial(n: usize) -> TorusPolynomial {
    let field = FiniteField::new(3, 1).expect("prime field");
    let terms: Vec<(Vec<usize>, u32)> = (0..n)
        .flat_map(|k| {
            let mut u1 = vec![0; n];
            u1[k] = 1;
            let mut u2 = vec![0; n];
            u2[k] = 2;
            [(u1, 1), (u2, 1)]
        })
        .collect();
    TorusPolynomial::new(&field, n, &terms).expect("valid polynomial")
}

pub fn rank_one(ctx: &Arc<RingContext>, f: &TorusPolynomial) -> SigmaModuleSpec {
    let theta = theta_splitting(ctx, None).expect("splitting function");
    SigmaModuleSpec::rank_one(build_frobenius_series(f, &theta, None).expect("Frobenius series")).expect("normalized")
}

pub fn rank_three(n_pi: u32) -> SigmaModuleSpec {
    SigmaModuleSpec::from_json(&ring(3, n_pi), RANK_THREE).expect("valid spec")
}

#![allow(dead_code)]

use std::sync::Arc;

use dwork_core::dwork::{build_frobenius_series, theta_splitting, SigmaModuleSpec, TorusPolynomial};
use dwork_core::padic::{default_digit_count, make_ring_context, PAdicExponent, RingContext, RingElement};
use dwork_core::series::MultiSeries;

/// Rank two over `Z_3[pi]`, profile `(0, 1)`.
pub const RANK_TWO: &str = r#"{
    "p": 3, "a": 1, "n": 1, "rank": 2,
    "entries": [
        {"row": 0, "col": 0, "terms": [{"exponent": [0]}, {"exponent": [1], "pi_valuation": 2}]},
        {"row": 1, "col": 0, "terms": [{"exponent": [1], "pi_valuation": 2}]},
        {"row": 0, "col": 1, "terms": [{"exponent": [0], "pi_valuation": 1}, {"exponent": [1], "pi_valuation": 3}]},
        {"row": 1, "col": 1, "terms": [{"exponent": [0], "pi_valuation": 1, "unit_digits": [2]}]}
    ]
}"#;

/// Rank three over `Z_3[pi]`, profile `(0, 1, 2)`, every `x`-term divisible by `pi^2`.
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
    make_ring_context(p, 1, 1, n_pi).unwrap()
}

pub fn kappa(p: u64, n_pi: u32, v: i64) -> PAdicExponent {
    PAdicExponent::from_i64(p as u32, v, default_digit_count(p as u32, n_pi))
}

/// `1 + p + p^2 + ...`, that is `1 / (1 - p)`.
pub fn kappa_geometric(p: u64, n_pi: u32) -> PAdicExponent {
    PAdicExponent::periodic(p as u32, &[], &[1], default_digit_count(p as u32, n_pi)).unwrap()
}

pub fn poly(p: u32, a: usize, n: usize, terms: &[(Vec<usize>, u32)]) -> TorusPolynomial {
    let field = dwork_core::ffield::FiniteField::new(p, a).unwrap();
    TorusPolynomial::new(&field, n, terms).unwrap()
}

/// The rank-one module of `F_a` for `f` over the Dwork splitting.
pub fn rank_one(ctx: &Arc<RingContext>, f: &TorusPolynomial) -> SigmaModuleSpec {
    let theta = theta_splitting(ctx, None).unwrap();
    SigmaModuleSpec::rank_one(build_frobenius_series(f, &theta, None).unwrap()).unwrap()
}

/// `diag(1 + pi x, pi)` in one variable: its unit roots are not roots of unity.
pub fn tilted_diagonal(ctx: &Arc<RingContext>) -> SigmaModuleSpec {
    let pi = RingElement::uniformizer(ctx);
    let bound = ctx.precision() as usize;
    let mut b0 = MultiSeries::one(ctx, 1, bound);
    b0.set(&[1], pi.clone()).unwrap();
    SigmaModuleSpec::diagonal(vec![b0, MultiSeries::constant(&pi, 1, bound)]).unwrap()
}

pub fn spec(ctx: &Arc<RingContext>, text: &str) -> SigmaModuleSpec {
    SigmaModuleSpec::from_json(ctx, text).unwrap()
}

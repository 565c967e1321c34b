//! Truncated arithmetic in `Z_{q^d}[pi]`, `pi^{p-1} = -p`.

mod artin_hasse;
mod context;
mod element;
mod exponent;
mod tower;

pub use artin_hasse::{artin_hasse_coefficients, dwork_bivariate, is_p_integral};
pub(crate) use context::Accumulator;
pub(crate) use element::nonnegative_residue;
pub use context::{make_ring_context, RingContext};
pub use element::{dot, ring_arith, sum, RingElement, RingOp, Valuation};
pub use exponent::{
    binomial_big, binomial_signed, default_digit_count, padic_binomial, vp_factorial,
    PAdicExponent,
};
pub use tower::RingTower;

use super::poly::TorusPolynomial;
use super::splitting::SplittingFunction;
use crate::error::{Error, Result};
use crate::ffield::fp_poly;
use crate::padic::RingElement;
use crate::series::MultiSeries;

/// Box `ceil(N p^{a-1} delta / growth) - 1`: every coefficient of `F_a` outside
/// it has valuation at least `N`.
pub fn frobenius_box(f: &TorusPolynomial, theta: &SplittingFunction) -> usize {
    let ctx = theta.ctx();
    let delta = f.max_coordinate_degree() as u64;
    if delta == 0 {
        return 0;
    }
    let scale = ctx.p().pow(ctx.a() as u32 - 1) * delta * ctx.precision() as u64;
    (scale.div_ceil(theta.growth() as u64) - 1) as usize
}

/// `F_a(x) = prod_{i<a} prod_u theta(tau^i(a_u) x^{p^i u})` with Teichmüller
/// coefficients, in the box `bound` (default [`frobenius_box`]).
pub fn build_frobenius_series(
    f: &TorusPolynomial,
    theta: &SplittingFunction,
    bound: Option<usize>,
) -> Result<MultiSeries> {
    let ctx = theta.ctx();
    let n = f.nvars();
    let bound = bound.unwrap_or_else(|| frobenius_box(f, theta));
    let p = ctx.p();
    let mut out = MultiSeries::one(ctx, n, bound);
    for (u, c) in f.terms() {
        let residue = fp_poly::unpack(*c as u64, p as u32, ctx.a());
        let mut coeff = RingElement::teichmuller(ctx, &residue);
        let mut scale = 1usize;
        for _ in 0..ctx.a() {
            let mut factor = MultiSeries::zero(ctx, n, bound);
            let mut cj = RingElement::one(ctx);
            for (j, lambda) in theta.coeffs().iter().enumerate() {
                let w: Vec<usize> = u.iter().map(|&x| x * scale * j).collect();
                factor.set(&w, lambda * &cj)?;
                cj = &cj * &coeff;
            }
            out = out.checked_mul(&factor)?;
            coeff = coeff.frobenius(1);
            scale *= p as usize;
        }
    }
    if out.truncated() {
        return Err(Error::BoxTooSmall {
            bound,
            precision: ctx.precision(),
        });
    }
    Ok(out)
}

use std::sync::Arc;

use num_bigint::BigInt;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::padic::{artin_hasse_coefficients, dwork_bivariate, nonnegative_residue, RingContext, RingElement, RingTower};

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SplittingKind {
    DworkTheta,
    GenericOneUnit,
}

/// A splitting function `theta(z) = sum lambda_i z^i`, truncated where
/// `ord(lambda_i) >= i * growth` reaches the working precision.
#[derive(Debug, Clone)]
pub struct SplittingFunction {
    kind: SplittingKind,
    coeffs: Vec<RingElement>,
    growth: u32,
    /// `theta(1)`: the p-th root of unity or `alpha`.
    value_at_one: RingElement,
}

impl SplittingFunction {
    pub fn kind(&self) -> &SplittingKind {
        &self.kind
    }

    pub fn ctx(&self) -> &Arc<RingContext> {
        self.coeffs[0].ctx()
    }

    pub fn coeffs(&self) -> &[RingElement] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    /// Guaranteed `ord(lambda_i) >= i * growth`.
    pub fn growth(&self) -> u32 {
        self.growth
    }

    pub fn value_at_one(&self) -> &RingElement {
        &self.value_at_one
    }

    /// `theta(z)` for `z` in any level of a tower over the coefficient ring.
    pub fn evaluate(&self, tower: &RingTower, z: &RingElement, d: usize) -> Result<RingElement> {
        let mut acc = RingElement::zero(z.ctx());
        for c in self.coeffs.iter().rev() {
            acc = &(&acc * z) + &tower.embed(c, d)?;
        }
        Ok(acc)
    }
}

/// The root `gamma = pi * v`, `v ≡ 1 mod p`, of `sum_{i>=0} z^{p^i} / p^i` in `Z_p[pi]`.
pub fn artin_hasse_root(ctx: &Arc<RingContext>) -> Result<RingElement> {
    if !ctx.is_ramified() {
        return Err(Error::Unramified("the Artin-Hasse root needs pi"));
    }
    let p = ctx.p();
    // pi^{p^i - 1} / p^i = (-p)^{(p^i - 1)/(p - 1)} / p^i, an integer
    let digits = ctx.storage_digits() as i64 + 1;
    let mut terms: Vec<(u64, RingElement)> = Vec::new();
    let mut pi_pow = 1u64;
    for i in 0u32.. {
        let k = (pi_pow - 1) / (p - 1);
        let vp = k as i64 - i as i64;
        if i > 0 && vp >= digits {
            break;
        }
        let c = BigInt::from(-(p as i64)).pow(k as u32) / BigInt::from(p).pow(i);
        terms.push((pi_pow, RingElement::from_bigint(ctx, &c)));
        pi_pow *= p;
    }
    let h = |v: &RingElement| -> (RingElement, RingElement) {
        let mut val = RingElement::zero(ctx);
        let mut der = RingElement::zero(ctx);
        for (e, c) in &terms {
            val = &val + &(c * &v.pow(*e));
            der = &der + &(&c.mul_int(*e as i64) * &v.pow(*e - 1));
        }
        (val, der)
    };
    let mut v = RingElement::one(ctx);
    for _ in 0..=(2 * ctx.storage_digits()).ilog2() + 2 {
        let (val, der) = h(&v);
        v = &v - &(&val * &der.inv_unit()?);
    }
    Ok(&RingElement::uniformizer(ctx) * &v)
}

/// Dwork's splitting function `theta(z) = E(gamma z)`, `E` the Artin–Hasse
/// exponential and `gamma` its logarithm's root of valuation one.
pub fn theta_splitting(ctx: &Arc<RingContext>, degree: Option<usize>) -> Result<SplittingFunction> {
    let gamma = artin_hasse_root(ctx)?;
    let degree = degree.unwrap_or(ctx.precision() as usize - 1);
    let c = artin_hasse_coefficients(ctx.p(), degree);
    let mut coeffs = Vec::with_capacity(degree + 1);
    let mut g = RingElement::one(ctx);
    for ci in &c {
        let lambda = &RingElement::from_rational(ctx, ci)? * &g;
        debug_assert!(lambda.val() >= (coeffs.len() as u32).min(ctx.precision()));
        coeffs.push(lambda);
        g = &g * &gamma;
    }
    let value_at_one = crate::padic::sum(ctx, &coeffs);
    Ok(SplittingFunction {
        kind: SplittingKind::DworkTheta,
        coeffs,
        growth: 1,
        value_at_one,
    })
}

/// The splitting function `theta(z) = F(z, alpha - 1)` of a 1-unit `alpha`
/// fixed by Frobenius, from Dwork's two-variable series `F(X, Y)`.
pub fn generic_splitting(alpha: &RingElement) -> Result<SplittingFunction> {
    let ctx = alpha.ctx();
    let eta = alpha - &RingElement::one(ctx);
    let v = eta.val();
    if v == 0 {
        return Err(Error::NotOneUnit);
    }
    if alpha.frobenius(1) != *alpha {
        return Err(Error::Invalid("alpha must lie in Z_p[pi]".into()));
    }
    let n = ctx.precision();
    // theta_i = sum_{k >= i} a_{ik} eta^k has valuation >= i v
    let k_max = n.div_ceil(v) as usize;
    let a = dwork_bivariate(ctx.p(), k_max.saturating_sub(1), k_max);
    let mut eta_pows = Vec::with_capacity(k_max + 1);
    let mut cur = RingElement::one(ctx);
    for _ in 0..=k_max {
        eta_pows.push(cur.clone());
        cur = &cur * &eta;
    }
    let mut coeffs = Vec::with_capacity(a.len());
    for row in &a {
        let mut theta_i = RingElement::zero(ctx);
        for (k, c) in row.iter().enumerate() {
            if !num_traits::Zero::is_zero(c) {
                theta_i = &theta_i + &(&RingElement::from_rational(ctx, c)? * &eta_pows[k]);
            }
        }
        coeffs.push(theta_i);
    }
    if coeffs.is_empty() {
        coeffs.push(RingElement::one(ctx));
    }
    Ok(SplittingFunction {
        kind: SplittingKind::GenericOneUnit,
        coeffs,
        growth: v,
        value_at_one: alpha.clone(),
    })
}

/// `prod_{i<m} theta(t^{p^i})` against `theta(1)^{Tr(t)}` at the Teichmüller
/// lift of `t` in `F_{p^m}` (given as a log to the generator, `None` for zero).
/// The tower must have base `Z_p[pi]` (a = 1). Returns the valuation of the difference.
pub fn splitting_defect(
    theta: &SplittingFunction,
    tower: &RingTower,
    m: usize,
    log: Option<u64>,
) -> Result<u32> {
    if tower.base().a() != 1 {
        return Err(Error::Invalid("splitting checks run over Z_p".into()));
    }
    let ctx = tower.level(m)?;
    let p = ctx.p();
    let t = match log {
        Some(j) => tower.generator_lift(m)?.pow(j),
        None => RingElement::zero(ctx),
    };
    let mut lhs = RingElement::one(ctx);
    let mut cur = t.clone();
    for _ in 0..m {
        lhs = &lhs * &theta.evaluate(tower, &cur, m)?;
        cur = cur.pow(p);
    }
    let alpha = tower.embed(theta.value_at_one(), m)?;
    let rhs = match theta.kind() {
        SplittingKind::DworkTheta => {
            let field = tower.fields().field(m)?;
            let tr = log.map_or(0, |j| field.trace(field.exp(j)));
            alpha.pow(tr as u64)
        }
        SplittingKind::GenericOneUnit => {
            let tr = tower.absolute_trace(&t);
            alpha.pow_u128(nonnegative_residue(&tr)?)
        }
    };
    Ok(lhs.diff_valuation(&rhs))
}

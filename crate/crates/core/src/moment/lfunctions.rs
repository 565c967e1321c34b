use std::sync::Arc;

use rayon::prelude::*;
use serde::Serialize;

use super::basis::MomentBasis;
use super::system::{MomentMode, MomentSystem};
use crate::dwork::{fredholm_determinant, l_from_fredholm, BlockOperator, FiberEvaluator, SigmaModuleSpec};
use crate::error::{Error, Result};
use crate::ffield::ClosedPoint;
use crate::linalg::{berkowitz, Algebra, Matrix};
use crate::padic::{padic_binomial, PAdicExponent, RingElement};
use crate::series::{MultiSeries, TSeries};

/// Increasing `s`-subsets of `0..r` in lexicographic order.
fn subsets(r: usize, s: usize) -> Vec<Vec<usize>> {
    fn go(start: usize, r: usize, s: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == s {
            out.push(cur.clone());
            return;
        }
        for i in start..r {
            cur.push(i);
            go(i + 1, r, s, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(0, r, s, &mut Vec::new(), &mut out);
    out
}

/// The matrix of `wedge^s phi` on `e_{j_1} ∧ ... ∧ e_{j_s}`: its entries are the
/// `s x s` minors of `B`. `None` when `s > r` (the exterior power vanishes).
pub fn wedge_matrix<C: Algebra>(b: &Matrix<C>, s: usize) -> Option<Matrix<C>> {
    let r = b.rows();
    if s > r {
        return None;
    }
    let idx = subsets(r, s);
    let one = b.get(0, 0).one_like();
    Some(Matrix::from_fn(idx.len(), idx.len(), |i, j| {
        if s == 0 {
            one.clone()
        } else {
            b.select(&idx[i], &idx[j]).determinant_laplace()
        }
    }))
}

/// The exponent `(-1)^{s-1} (s - 1)` of `L^{(s)}` in the unit-root relation.
pub fn assembly_exponent(s: usize) -> i64 {
    let sign = if s % 2 == 1 { 1 } else { -1 };
    sign * (s as i64 - 1)
}

/// The family moment module of a spec over the profile-pruned basis.
pub struct MomentFamily<'a> {
    spec: &'a SigmaModuleSpec,
    system: MomentSystem<MultiSeries>,
}

impl<'a> MomentFamily<'a> {
    pub fn new(spec: &'a SigmaModuleSpec) -> Result<Self> {
        let basis = Arc::new(MomentBasis::for_profile(spec.profile(), spec.ctx().precision()));
        let system = MomentSystem::new(basis, spec.matrix())?;
        Ok(MomentFamily { spec, system })
    }

    pub fn spec(&self) -> &SigmaModuleSpec {
        self.spec
    }

    pub fn system(&self) -> &MomentSystem<MultiSeries> {
        &self.system
    }

    pub fn basis(&self) -> &Arc<MomentBasis> {
        self.system.basis()
    }

    /// `B^{[kappa]}` over series.
    pub fn moment_matrix(&self, kappa: &PAdicExponent, mode: MomentMode) -> Result<Matrix<MultiSeries>> {
        let m = self.system.matrix(kappa, mode)?;
        if m.entries().iter().any(MultiSeries::truncated) {
            return Err(Error::BoxTooSmall {
                bound: self.spec.bound(),
                precision: self.system.precision(),
            });
        }
        Ok(m)
    }

    /// `B^{[kappa - s]} ⊗ wedge^s B`, or `None` when `s > r`.
    pub fn twisted_family(&self, kappa: &PAdicExponent, s: usize) -> Result<Option<Matrix<MultiSeries>>> {
        let Some(wedge) = wedge_matrix(self.spec.matrix(), s) else {
            return Ok(None);
        };
        let moment = self.moment_matrix(&kappa.add_i64(-(s as i64)), MomentMode::ExactKappa)?;
        Ok(Some(if s == 0 { moment } else { moment.kronecker(&wedge) }))
    }

    /// `L^{(s)}(kappa, T)` to `T^degree` through `det(1 - F T)^{delta^n}`.
    pub fn l_s(&self, kappa: &PAdicExponent, s: usize, bound: Option<usize>, degree: usize) -> Result<TSeries> {
        let ctx = self.spec.ctx();
        let Some(family) = self.twisted_family(kappa, s)? else {
            return Ok(TSeries::one(ctx, degree));
        };
        let op = BlockOperator::assemble(&family, ctx.q(), bound)?;
        l_from_fredholm(&fredholm_determinant(&op, degree)?, self.spec.nvars())
    }

    /// `prod_{s <= s_max, s != 1} L^{(s)}(kappa, T)^{(-1)^{s-1}(s-1)}`.
    pub fn l_unit_assembled(
        &self,
        kappa: &PAdicExponent,
        bound: Option<usize>,
        degree: usize,
        s_max: usize,
    ) -> Result<TSeries> {
        let ctx = self.spec.ctx();
        let factors = (0..=s_max.min(self.spec.rank()))
            .filter(|&s| s != 1)
            .map(|s| Ok((self.l_s(kappa, s, bound, degree)?, assembly_exponent(s))))
            .collect::<Result<Vec<_>>>()?;
        TSeries::euler_product(ctx, &factors, degree)
    }
}

/// `L^{(s)}` for a spec, building the moment family on the fly.
pub fn l_s_compute(
    spec: &SigmaModuleSpec,
    kappa: &PAdicExponent,
    s: usize,
    bound: Option<usize>,
    degree: usize,
) -> Result<TSeries> {
    MomentFamily::new(spec)?.l_s(kappa, s, bound, degree)
}

/// Default `s_max = min(r, N + 1)`.
pub fn unit_root_l_assemble(
    spec: &SigmaModuleSpec,
    kappa: &PAdicExponent,
    bound: Option<usize>,
    degree: usize,
    s_max: Option<usize>,
) -> Result<TSeries> {
    let s_max = s_max.unwrap_or(spec.rank().min(spec.ctx().precision() as usize + 1));
    MomentFamily::new(spec)?.l_unit_assembled(kappa, bound, degree, s_max)
}

/// Fiber charpoly split into its unit root and the positive-slope part.
#[derive(Debug, Clone, Serialize)]
pub struct FiberEigenData {
    pub point: ClosedPoint,
    pub charpoly: TSeries,
    pub unit_root: RingElement,
    /// `charpoly / (1 - unit_root T)`.
    pub quotient: TSeries,
}

/// Extracts the unit root `pi_0(x)` by Newton iteration from `T = 1` on
/// `det(1 - B_x T)`, after checking there is exactly one unit reciprocal root.
pub fn fiber_unit_root(fibers: &FiberEvaluator, pt: &ClosedPoint) -> Result<FiberEigenData> {
    let charpoly = fibers.fiber_charpoly(pt)?;
    let c = charpoly.coeffs();
    let units = c.iter().rposition(|x| x.is_unit()).unwrap_or(0);
    if units != 1 {
        return Err(Error::NotOrdinary(units));
    }
    let ctx = charpoly.ctx();
    let deriv: Vec<RingElement> = c.iter().enumerate().skip(1).map(|(k, x)| x.mul_int(k as i64)).collect();
    let eval = |cs: &[RingElement], t: &RingElement| {
        cs.iter().rev().fold(RingElement::zero(ctx), |acc, x| &(&acc * t) + x)
    };
    let mut t = RingElement::one(ctx);
    for _ in 0..=(2 * ctx.precision()).ilog2() + 2 {
        let step = &eval(c, &t) * &eval(&deriv, &t).inv_unit()?;
        t = &t - &step;
    }
    let unit_root = t.inv_unit()?;
    let mut q = Vec::with_capacity(c.len());
    let mut prev = RingElement::zero(ctx);
    for x in c {
        prev = x + &(&unit_root * &prev);
        q.push(prev.clone());
    }
    q.pop();
    Ok(FiberEigenData {
        point: pt.clone(),
        quotient: TSeries::new(q)?,
        charpoly,
        unit_root,
    })
}

/// `u^kappa = sum_j binom(kappa, j) (u - 1)^j` for a 1-unit `u`.
pub fn one_unit_power(u: &RingElement, kappa: &PAdicExponent) -> Result<RingElement> {
    let ctx = u.ctx();
    let eta = u - &RingElement::one(ctx);
    if eta.val() == 0 {
        return Err(Error::NotOneUnit);
    }
    let n = ctx.precision();
    let mut acc = RingElement::zero(ctx);
    let mut pw = RingElement::one(ctx);
    let mut j = 0u32;
    while pw.val() < n {
        acc = &acc + &(&padic_binomial(ctx, kappa, j as u64, n - pw.val())? * &pw);
        pw = &pw * &eta;
        j += 1;
    }
    Ok(acc)
}

/// `1 - c T^d` truncated at `T^degree`, from a polynomial in `T`.
fn spread(poly: &[RingElement], d: usize, degree: usize) -> Result<TSeries> {
    let ctx = poly[0].ctx();
    let mut coeffs = vec![RingElement::zero(ctx); degree + 1];
    for (k, c) in poly.iter().enumerate() {
        if k * d <= degree {
            coeffs[k * d] = c.clone();
        }
    }
    TSeries::new(coeffs)
}

/// `L_unit(kappa, T) = prod_x (1 - pi_0(x)^kappa T^{deg x})^{-1}` over closed points
/// of degree `<= degree`.
pub fn unit_root_l_euler(fibers: &FiberEvaluator, kappa: &PAdicExponent, degree: usize) -> Result<TSeries> {
    let tower = fibers.tower();
    let n = fibers.nvars();
    let points = tower.fields().closed_points(n, degree)?;
    let factors = points
        .par_iter()
        .map(|pt| {
            let data = fiber_unit_root(fibers, pt)?;
            let root = one_unit_power(&data.unit_root, kappa)?;
            let ctx = root.ctx();
            let f = spread(&[RingElement::one(ctx), -&root], pt.degree, degree)?;
            Ok((f, -1))
        })
        .collect::<Result<Vec<_>>>()?;
    TSeries::euler_product(tower.base(), &factors, degree)
}

/// `L^{(s)}(kappa, T)` as the Euler product of fiber determinants
/// `det(1 - [phi_x^d]_{kappa-s} ⊗ wedge^s phi_x^d T^{deg x})^{-1}`.
pub fn moment_l_euler(
    fibers: &FiberEvaluator,
    basis: &Arc<MomentBasis>,
    kappa: &PAdicExponent,
    s: usize,
    degree: usize,
) -> Result<TSeries> {
    let tower = fibers.tower();
    let n = fibers.nvars();
    let points = tower.fields().closed_points(n, degree)?;
    let shifted = kappa.add_i64(-(s as i64));
    let factors = points
        .par_iter()
        .map(|pt| {
            let fiber = fibers.fiber_frobenius(pt)?;
            let Some(wedge) = wedge_matrix(&fiber, s) else {
                return Ok(None);
            };
            let moment = MomentSystem::new(basis.clone(), &fiber)?.matrix(&shifted, MomentMode::ExactKappa)?;
            let m = if s == 0 { moment } else { moment.kronecker(&wedge) };
            let det = berkowitz(&m, degree / pt.degree)?
                .iter()
                .map(|c| tower.restrict(c, pt.degree))
                .collect::<Result<Vec<_>>>()?;
            Ok(Some((spread(&det, pt.degree, degree)?, -1)))
        })
        .collect::<Result<Vec<_>>>()?;
    let factors: Vec<(TSeries, i64)> = factors.into_iter().flatten().collect();
    TSeries::euler_product(tower.base(), &factors, degree)
}

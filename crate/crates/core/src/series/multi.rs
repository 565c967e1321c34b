use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::ffield::ClosedPoint;
use crate::padic::{RingContext, RingElement, RingTower};

/// Power series in `n` variables over `Z_{q^d}[pi]`, truncated to the exponent
/// box `[0, U]^n` and to the working π-adic precision.
///
/// Coefficients are stored densely; index of `u` is `sum u_i (U+1)^i`.
#[derive(Clone)]
pub struct MultiSeries {
    ctx: Arc<RingContext>,
    n: usize,
    bound: usize,
    coeffs: Vec<RingElement>,
    truncated: bool,
}

impl MultiSeries {
    pub fn zero(ctx: &Arc<RingContext>, n: usize, bound: usize) -> Self {
        let len = (bound + 1).pow(n as u32);
        MultiSeries {
            ctx: ctx.clone(),
            n,
            bound,
            coeffs: vec![RingElement::zero(ctx); len],
            truncated: false,
        }
    }

    pub fn constant(c: &RingElement, n: usize, bound: usize) -> Self {
        let mut s = Self::zero(c.ctx(), n, bound);
        s.coeffs[0] = c.clone();
        s
    }

    pub fn one(ctx: &Arc<RingContext>, n: usize, bound: usize) -> Self {
        Self::constant(&RingElement::one(ctx), n, bound)
    }

    /// `c x^u`; an exponent outside the box gives 0 with the truncation flag set.
    pub fn monomial(c: &RingElement, u: &[usize], bound: usize) -> Self {
        let mut s = Self::zero(c.ctx(), u.len(), bound);
        match s.index(u) {
            Some(i) => s.coeffs[i] = c.clone(),
            None => s.truncated = !c.is_zero(),
        }
        s
    }

    pub fn ctx(&self) -> &Arc<RingContext> {
        &self.ctx
    }

    pub fn nvars(&self) -> usize {
        self.n
    }

    pub fn bound(&self) -> usize {
        self.bound
    }

    /// Set when some term that is nonzero at its precision fell outside the box.
    pub fn truncated(&self) -> bool {
        self.truncated
    }

    pub fn clear_truncated(&mut self) {
        self.truncated = false;
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn index(&self, u: &[usize]) -> Option<usize> {
        debug_assert_eq!(u.len(), self.n);
        let mut idx = 0;
        for &ui in u.iter().rev() {
            if ui > self.bound {
                return None;
            }
            idx = idx * (self.bound + 1) + ui;
        }
        Some(idx)
    }

    pub fn exponent(&self, mut idx: usize) -> Vec<usize> {
        (0..self.n)
            .map(|_| {
                let u = idx % (self.bound + 1);
                idx /= self.bound + 1;
                u
            })
            .collect()
    }

    /// Coefficient of `x^u` (zero outside the box).
    pub fn coeff(&self, u: &[usize]) -> RingElement {
        match self.index(u) {
            Some(i) => self.coeffs[i].clone(),
            None => RingElement::zero(&self.ctx),
        }
    }

    pub fn coeff_at(&self, idx: usize) -> &RingElement {
        &self.coeffs[idx]
    }

    pub fn set(&mut self, u: &[usize], c: RingElement) -> Result<()> {
        if !c.ctx().same(&self.ctx) {
            return Err(Error::ContextMismatch);
        }
        match self.index(u) {
            Some(i) => self.coeffs[i] = c,
            None => {
                if !c.is_zero() {
                    self.truncated = true;
                }
            }
        }
        Ok(())
    }

    /// Nonzero terms `(u, a_u)` in index order.
    pub fn terms(&self) -> impl Iterator<Item = (Vec<usize>, &RingElement)> + '_ {
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(i, c)| (self.exponent(i), c))
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    /// Least coefficient valuation (capped by precision).
    pub fn min_valuation(&self) -> u32 {
        self.coeffs
            .iter()
            .map(|c| c.val())
            .min()
            .unwrap_or(self.ctx.precision())
    }

    /// Largest coordinate exponent among coefficients nonzero at their precision.
    pub fn max_exponent(&self) -> usize {
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(i, _)| self.exponent(i).into_iter().max().unwrap_or(0))
            .max()
            .unwrap_or(0)
    }

    fn check(&self, o: &MultiSeries) -> Result<()> {
        if !self.ctx.same(&o.ctx) || self.n != o.n {
            return Err(Error::ContextMismatch);
        }
        Ok(())
    }

    fn zip_with(
        &self,
        o: &MultiSeries,
        f: impl Fn(&RingElement, &RingElement) -> RingElement,
    ) -> Result<MultiSeries> {
        self.check(o)?;
        let bound = self.bound.max(o.bound);
        let mut out = Self::zero(&self.ctx, self.n, bound);
        for (i, slot) in out.coeffs.iter_mut().enumerate() {
            let u = exponent_of(i, self.n, bound);
            *slot = f(&self.coeff(&u), &o.coeff(&u));
        }
        out.truncated = self.truncated || o.truncated;
        Ok(out)
    }

    pub fn checked_add(&self, o: &MultiSeries) -> Result<MultiSeries> {
        if self.bound == o.bound {
            self.check(o)?;
            let mut out = self.clone();
            for (a, b) in out.coeffs.iter_mut().zip(&o.coeffs) {
                *a = &*a + b;
            }
            out.truncated |= o.truncated;
            return Ok(out);
        }
        self.zip_with(o, |a, b| a + b)
    }

    pub fn checked_sub(&self, o: &MultiSeries) -> Result<MultiSeries> {
        self.zip_with(o, |a, b| a - b)
    }

    pub fn neg(&self) -> MultiSeries {
        let mut out = self.clone();
        for c in out.coeffs.iter_mut() {
            *c = -&*c;
        }
        out
    }

    pub fn scale(&self, s: &RingElement) -> MultiSeries {
        let mut out = self.clone();
        for c in out.coeffs.iter_mut() {
            if !c.is_zero() {
                *c = &*c * s;
            }
        }
        out
    }

    /// Product truncated to this box (the larger of the two boxes).
    /// Products of valuation `>= N` are zero at working precision and skipped.
    pub fn checked_mul(&self, o: &MultiSeries) -> Result<MultiSeries> {
        self.check(o)?;
        let bound = self.bound.max(o.bound);
        let n_pi = self.ctx.precision();
        let sa = support(self);
        let sb = support(o);
        let mut out = Self::zero(&self.ctx, self.n, bound);
        out.truncated = self.truncated || o.truncated;
        let mut w = vec![0usize; self.n];
        for (ua, va, ca) in &sa {
            'inner: for (ub, vb, cb) in &sb {
                if va + vb >= n_pi {
                    continue;
                }
                for k in 0..self.n {
                    w[k] = ua[k] + ub[k];
                    if w[k] > bound {
                        out.truncated = true;
                        continue 'inner;
                    }
                }
                let idx = index_of(&w, bound);
                out.coeffs[idx] = &out.coeffs[idx] + &(*ca * *cb);
            }
        }
        Ok(out)
    }

    pub fn pow(&self, e: u64) -> Result<MultiSeries> {
        let mut result = Self::one(&self.ctx, self.n, self.bound);
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                result = result.checked_mul(&base)?;
            }
            e >>= 1;
            if e > 0 {
                base = base.checked_mul(&base)?;
            }
        }
        Ok(result)
    }

    /// `sum a_u x^u -> sum tau^j(a_u) x^{s u}`; exponents beyond the box are dropped
    /// (with the flag set when the dropped coefficient is nonzero).
    pub fn twist(&self, scale: usize, tau_power: usize) -> MultiSeries {
        let mut out = Self::zero(&self.ctx, self.n, self.bound);
        out.truncated = self.truncated;
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let u: Vec<usize> = self.exponent(i).iter().map(|&x| x * scale).collect();
            match out.index(&u) {
                Some(j) => out.coeffs[j] = c.frobenius(tau_power),
                None => out.truncated = true,
            }
        }
        out
    }

    /// The σ-twist `x^u -> x^{qu}` with the q-power Frobenius on coefficients.
    pub fn sigma(&self) -> MultiSeries {
        self.twist(self.ctx.q() as usize, self.ctx.a())
    }

    /// Same series in a different box.
    pub fn rebox(&self, bound: usize) -> MultiSeries {
        let mut out = Self::zero(&self.ctx, self.n, bound);
        out.truncated = self.truncated;
        for (i, c) in self.coeffs.iter().enumerate() {
            let u = self.exponent(i);
            match out.index(&u) {
                Some(j) => out.coeffs[j] = c.clone(),
                None if !c.is_zero() => out.truncated = true,
                None => {}
            }
        }
        out
    }

    /// Apply a coefficient map into another ring (e.g. a tower embedding).
    pub fn map_coefficients(
        &self,
        ctx: &Arc<RingContext>,
        f: impl Fn(&RingElement) -> Result<RingElement>,
    ) -> Result<MultiSeries> {
        let mut out = Self::zero(ctx, self.n, self.bound);
        out.truncated = self.truncated;
        for (slot, c) in out.coeffs.iter_mut().zip(&self.coeffs) {
            if !c.is_zero() {
                *slot = f(c)?;
            }
        }
        Ok(out)
    }

    /// `sum a_u x^u` at the given point (coordinates in the same ring).
    pub fn evaluate(&self, point: &[RingElement]) -> Result<RingElement> {
        if point.len() != self.n {
            return Err(Error::Invalid("point dimension differs from series".into()));
        }
        if point.iter().any(|x| !x.ctx().same(&self.ctx)) {
            return Err(Error::ContextMismatch);
        }
        let powers: Vec<Vec<RingElement>> = point
            .iter()
            .map(|x| {
                let mut v = Vec::with_capacity(self.bound + 1);
                let mut cur = RingElement::one(&self.ctx);
                for _ in 0..=self.bound {
                    v.push(cur.clone());
                    cur = &cur * x;
                }
                v
            })
            .collect();
        let mut terms: Vec<(RingElement, RingElement)> = Vec::new();
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let u = self.exponent(i);
            let mut mono = RingElement::one(&self.ctx);
            for (k, &uk) in u.iter().enumerate() {
                mono = &mono * &powers[k][uk];
            }
            terms.push((c.clone(), mono));
        }
        let mut out = crate::padic::dot(&self.ctx, terms.iter().map(|(a, b)| (a, b)));
        let prec = self.coeffs.iter().map(|c| c.precision()).min().unwrap_or(out.precision());
        out = out.with_precision(prec);
        Ok(out)
    }

    /// Specialize at the Teichmüller lift of the representative of a closed point,
    /// embedding the coefficients (which live in the base ring) into level `d(x)`.
    pub fn evaluate_at_teichmuller(&self, tower: &RingTower, pt: &ClosedPoint) -> Result<RingElement> {
        if !self.ctx.same(tower.base()) {
            return Err(Error::ContextMismatch);
        }
        let ctx = tower.level(pt.degree)?;
        let embedded = self.map_coefficients(ctx, |c| tower.embed(c, pt.degree))?;
        let x = tower.lift_point(pt.degree, &pt.representative)?;
        embedded.evaluate(&x)
    }

    pub fn with_precision(&self, prec: u32) -> MultiSeries {
        let mut out = self.clone();
        for c in out.coeffs.iter_mut() {
            *c = c.clone().with_precision(prec);
        }
        out
    }

    /// True when all coefficients agree modulo `pi^n` (clipped per coefficient).
    pub fn eq_mod(&self, o: &MultiSeries, n: u32) -> bool {
        self.diff_valuation(o).is_ok_and(|v| v >= n)
    }

    /// Least valuation of the coefficientwise difference.
    pub fn diff_valuation(&self, o: &MultiSeries) -> Result<u32> {
        Ok(self.checked_sub(o)?.min_valuation())
    }
}

fn support(s: &MultiSeries) -> Vec<(Vec<usize>, u32, &RingElement)> {
    s.coeffs
        .iter()
        .enumerate()
        .filter_map(|(i, c)| match c.valuation() {
            crate::padic::Valuation::Finite(v) => Some((s.exponent(i), v, c)),
            _ => None,
        })
        .collect()
}

fn exponent_of(mut idx: usize, n: usize, bound: usize) -> Vec<usize> {
    (0..n)
        .map(|_| {
            let u = idx % (bound + 1);
            idx /= bound + 1;
            u
        })
        .collect()
}

fn index_of(u: &[usize], bound: usize) -> usize {
    u.iter().rev().fold(0, |acc, &x| acc * (bound + 1) + x)
}

impl fmt::Debug for MultiSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut m = f.debug_map();
        for (u, c) in self.terms() {
            m.entry(&u, c);
        }
        m.finish()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::padic::make_ring_context;

    #[test]
    fn small_identities() {
        let ctx = make_ring_context(3, 1, 1, 10).unwrap();
        let one = RingElement::one(&ctx);
        let x = MultiSeries::monomial(&one, &[1], 4);
        let f = MultiSeries::one(&ctx, 1, 4).checked_add(&x).unwrap();
        let g = MultiSeries::one(&ctx, 1, 4).checked_sub(&x).unwrap();
        assert_eq!(f.checked_mul(&MultiSeries::one(&ctx, 1, 4)).unwrap().diff_valuation(&f).unwrap(), 10);
        let h = f.checked_mul(&g).unwrap();
        assert_eq!(h.coeff(&[0]), one);
        assert!(h.coeff(&[1]).is_zero());
        assert_eq!(h.coeff(&[2]), -&one);
        assert!(!h.truncated());
        let edge = MultiSeries::monomial(&one, &[4], 4).checked_mul(&x).unwrap();
        assert!(edge.is_zero());
        assert!(edge.truncated());
    }

    #[test]
    fn sigma_examples() {
        let ctx = make_ring_context(2, 2, 1, 8).unwrap();
        let t = RingElement::generator(&ctx);
        let one = MultiSeries::one(&ctx, 1, 20);
        assert!(one.sigma().eq_mod(&one, 8));
        let x = MultiSeries::monomial(&t, &[1], 20);
        let sx = x.twist(4, 1);
        assert_eq!(sx.coeff(&[4]), t.frobenius(1));
        let x1 = MultiSeries::monomial(&RingElement::one(&ctx), &[1], 20);
        assert_eq!(x1.sigma().sigma().coeff(&[16]), RingElement::one(&ctx));
        assert!(x1.sigma().sigma().sigma().truncated());
    }

    #[test]
    fn evaluation_at_teichmuller_points() {
        let tower = RingTower::new(5, 1, 1, 6).unwrap();
        let one = RingElement::one(tower.base());
        let x = MultiSeries::monomial(&one, &[1], 3);
        let field = tower.fields().field(1).unwrap();
        let pt = ClosedPoint {
            degree: 1,
            representative: vec![field.log(2).unwrap()],
        };
        let v = x.evaluate_at_teichmuller(&tower, &pt).unwrap();
        assert_eq!(v.to_integer().unwrap().rem_euclid(25), 7);
        let c = MultiSeries::one(tower.base(), 1, 3);
        assert_eq!(c.evaluate_at_teichmuller(&tower, &pt).unwrap(), one);
    }
}

use std::sync::Arc;

use crate::padic::{RingContext, RingElement};
use crate::series::MultiSeries;

/// Commutative algebra over `Z_{q^d}[pi]` with a π-adic size.
pub trait Algebra: Clone + Send + Sync {
    fn ring(&self) -> &Arc<RingContext>;
    fn zero_like(&self) -> Self;
    fn one_like(&self) -> Self;
    fn add(&self, o: &Self) -> Self;
    fn sub(&self, o: &Self) -> Self;
    fn mul(&self, o: &Self) -> Self;
    fn scale(&self, c: &RingElement) -> Self;
    /// Zero at working precision.
    fn is_zero(&self) -> bool;
    /// Least π-adic valuation of the coefficients, capped by precision.
    fn min_valuation(&self) -> u32;

    fn neg(&self) -> Self {
        self.zero_like().sub(self)
    }

    /// `sum a_k b_k`.
    fn dot<'a>(first: &Self, pairs: impl Iterator<Item = (&'a Self, &'a Self)>) -> Self
    where
        Self: 'a,
    {
        let mut acc = first.zero_like();
        for (a, b) in pairs {
            if !a.is_zero() && !b.is_zero() {
                acc = acc.add(&a.mul(b));
            }
        }
        acc
    }
}

impl Algebra for RingElement {
    fn ring(&self) -> &Arc<RingContext> {
        self.ctx()
    }
    fn zero_like(&self) -> Self {
        RingElement::zero(self.ctx())
    }
    fn one_like(&self) -> Self {
        RingElement::one(self.ctx())
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn scale(&self, c: &RingElement) -> Self {
        self * c
    }
    fn is_zero(&self) -> bool {
        RingElement::is_zero(self)
    }
    fn min_valuation(&self) -> u32 {
        self.val()
    }
    fn dot<'a>(first: &Self, pairs: impl Iterator<Item = (&'a Self, &'a Self)>) -> Self {
        crate::padic::dot(first.ctx(), pairs)
    }
}

impl Algebra for MultiSeries {
    fn ring(&self) -> &Arc<RingContext> {
        self.ctx()
    }
    fn zero_like(&self) -> Self {
        MultiSeries::zero(self.ctx(), self.nvars(), self.bound())
    }
    fn one_like(&self) -> Self {
        MultiSeries::one(self.ctx(), self.nvars(), self.bound())
    }
    fn add(&self, o: &Self) -> Self {
        self.checked_add(o).expect("series shape mismatch")
    }
    fn sub(&self, o: &Self) -> Self {
        self.checked_sub(o).expect("series shape mismatch")
    }
    fn mul(&self, o: &Self) -> Self {
        self.checked_mul(o).expect("series shape mismatch")
    }
    fn scale(&self, c: &RingElement) -> Self {
        MultiSeries::scale(self, c)
    }
    fn is_zero(&self) -> bool {
        MultiSeries::is_zero(self)
    }
    fn min_valuation(&self) -> u32 {
        MultiSeries::min_valuation(self)
    }
}

use std::fmt;
use std::sync::Arc;

use serde::ser::{Serialize, SerializeSeq, Serializer};

use crate::error::{Error, Result};
use crate::padic::{RingContext, RingElement};

/// Power series `c_0 + c_1 T + ... + c_D T^D` over `Z_{q^d}[pi]`.
#[derive(Clone)]
pub struct TSeries {
    ctx: Arc<RingContext>,
    coeffs: Vec<RingElement>,
}

/// Coefficientwise comparison of two series.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Comparison {
    /// Least valuation of `a_j - b_j` over all compared coefficients.
    pub min_valuation: u32,
    /// First index whose difference has valuation below the threshold.
    pub first_failure: Option<usize>,
}

impl Comparison {
    pub fn passed(&self) -> bool {
        self.first_failure.is_none()
    }
}

impl TSeries {
    pub fn new(coeffs: Vec<RingElement>) -> Result<Self> {
        let ctx = coeffs
            .first()
            .ok_or_else(|| Error::Invalid("empty series".into()))?
            .ctx()
            .clone();
        if coeffs.iter().any(|c| !c.ctx().same(&ctx)) {
            return Err(Error::ContextMismatch);
        }
        Ok(TSeries { ctx, coeffs })
    }

    pub fn one(ctx: &Arc<RingContext>, degree: usize) -> Self {
        let mut coeffs = vec![RingElement::zero(ctx); degree + 1];
        coeffs[0] = RingElement::one(ctx);
        TSeries {
            ctx: ctx.clone(),
            coeffs,
        }
    }

    pub fn from_integers(ctx: &Arc<RingContext>, values: &[i64], degree: usize) -> Self {
        let coeffs = (0..=degree)
            .map(|i| RingElement::from_int(ctx, values.get(i).copied().unwrap_or(0)))
            .collect();
        TSeries {
            ctx: ctx.clone(),
            coeffs,
        }
    }

    /// `1 - c T^k` truncated at degree D.
    pub fn one_minus(c: &RingElement, k: usize, degree: usize) -> Self {
        let mut s = Self::one(c.ctx(), degree);
        if k <= degree {
            s.coeffs[k] = -c;
        }
        s
    }

    pub fn ctx(&self) -> &Arc<RingContext> {
        &self.ctx
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[RingElement] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> &RingElement {
        &self.coeffs[i]
    }

    pub fn truncate(&self, degree: usize) -> TSeries {
        let mut coeffs = self.coeffs.clone();
        coeffs.resize(degree + 1, RingElement::zero(&self.ctx));
        TSeries {
            ctx: self.ctx.clone(),
            coeffs,
        }
    }

    /// Least precision over the coefficients.
    pub fn precision(&self) -> u32 {
        self.coeffs.iter().map(|c| c.precision()).min().unwrap()
    }

    pub fn is_one_unit(&self) -> bool {
        self.coeffs[0] == RingElement::one(&self.ctx)
    }

    fn check(&self, o: &TSeries) -> Result<()> {
        if !self.ctx.same(&o.ctx) {
            return Err(Error::ContextMismatch);
        }
        Ok(())
    }

    pub fn checked_mul(&self, o: &TSeries) -> Result<TSeries> {
        self.check(o)?;
        let d = self.degree().min(o.degree());
        let coeffs = (0..=d)
            .map(|k| crate::padic::dot(&self.ctx, (0..=k).map(|i| (&self.coeffs[i], &o.coeffs[k - i]))))
            .collect();
        Ok(TSeries {
            ctx: self.ctx.clone(),
            coeffs,
        })
    }

    pub fn checked_add(&self, o: &TSeries) -> Result<TSeries> {
        self.check(o)?;
        let d = self.degree().min(o.degree());
        let coeffs = (0..=d).map(|k| &self.coeffs[k] + &o.coeffs[k]).collect();
        Ok(TSeries {
            ctx: self.ctx.clone(),
            coeffs,
        })
    }

    /// Inverse of a series with constant term 1; no precision is lost.
    pub fn inv(&self) -> Result<TSeries> {
        if !self.is_one_unit() {
            return Err(Error::NotOneUnit);
        }
        let mut h: Vec<RingElement> = Vec::with_capacity(self.coeffs.len());
        h.push(RingElement::one(&self.ctx));
        for n in 1..=self.degree() {
            let s = crate::padic::dot(&self.ctx, (1..=n).map(|k| (&self.coeffs[k], &h[n - k])));
            h.push(-&s);
        }
        Ok(TSeries {
            ctx: self.ctx.clone(),
            coeffs: h,
        })
    }

    /// Integer power; negative exponents require a 1-unit.
    pub fn pow(&self, e: i64) -> Result<TSeries> {
        let base = if e < 0 { self.inv()? } else { self.clone() };
        let mut e = e.unsigned_abs();
        let mut result = Self::one(&self.ctx, self.degree());
        let mut b = base;
        while e > 0 {
            if e & 1 == 1 {
                result = result.checked_mul(&b)?;
            }
            e >>= 1;
            if e > 0 {
                b = b.checked_mul(&b)?;
            }
        }
        Ok(result)
    }

    /// `g(cT)`.
    pub fn scale_variable(&self, c: &RingElement) -> TSeries {
        let mut cur = RingElement::one(&self.ctx);
        let coeffs = self
            .coeffs
            .iter()
            .map(|a| {
                let v = a * &cur;
                cur = &cur * c;
                v
            })
            .collect();
        TSeries {
            ctx: self.ctx.clone(),
            coeffs,
        }
    }

    /// `g -> g(T)/g(qT)` applied `times` times.
    pub fn delta(&self, times: usize) -> Result<TSeries> {
        if !self.is_one_unit() {
            return Err(Error::NotOneUnit);
        }
        let q = RingElement::from_int(&self.ctx, self.ctx.q() as i64);
        let mut g = self.clone();
        for _ in 0..times {
            g = g.checked_mul(&g.scale_variable(&q).inv()?)?;
        }
        Ok(g)
    }

    /// `exp(sum_{m=1}^D s_m T^m / m)` via `n g_n = sum_{m=1}^n s_m g_{n-m}`.
    /// Each division by `n` costs `e * v_p(n)` digits of that coefficient.
    pub fn exp_of_sums(ctx: &Arc<RingContext>, sums: &[RingElement]) -> Result<TSeries> {
        let mut g = Vec::with_capacity(sums.len() + 1);
        g.push(RingElement::one(ctx));
        for n in 1..=sums.len() {
            let acc = crate::padic::dot(ctx, (1..=n).map(|m| (&sums[m - 1], &g[n - m])));
            let v = acc.div_int(n as i64).map_err(|_| {
                Error::PrecisionExhausted(format!("dividing the T^{n} coefficient by {n}"))
            })?;
            if v.precision() == 0 {
                return Err(Error::PrecisionExhausted(format!("T^{n} coefficient")));
            }
            g.push(v);
        }
        Ok(TSeries {
            ctx: ctx.clone(),
            coeffs: g,
        })
    }

    /// Inverse of `exp_of_sums`: `s_n = n g_n - sum_{m<n} s_m g_{n-m}`.
    pub fn log_sums(&self) -> Result<Vec<RingElement>> {
        if !self.is_one_unit() {
            return Err(Error::NotOneUnit);
        }
        let mut s: Vec<RingElement> = Vec::with_capacity(self.degree());
        for n in 1..=self.degree() {
            let tail = crate::padic::dot(&self.ctx, (1..n).map(|m| (&s[m - 1], &self.coeffs[n - m])));
            s.push(&self.coeffs[n].mul_int(n as i64) - &tail);
        }
        Ok(s)
    }

    /// `prod factor_i^{e_i}` truncated at T^D; factors must be 1-units when `e_i < 0`.
    pub fn euler_product(ctx: &Arc<RingContext>, factors: &[(TSeries, i64)], degree: usize) -> Result<TSeries> {
        let mut acc = Self::one(ctx, degree);
        for (f, e) in factors {
            let f = f.truncate(degree);
            acc = acc.checked_mul(&f.pow(*e)?)?;
        }
        Ok(acc)
    }

    /// Compare coefficientwise; a coefficient passes when the difference has valuation
    /// at least `min(threshold, joint precision)`.
    pub fn compare(&self, o: &TSeries, threshold: u32) -> Result<Comparison> {
        self.check(o)?;
        let d = self.degree().min(o.degree());
        let mut min_valuation = u32::MAX;
        let mut first_failure = None;
        for k in 0..=d {
            let diff = &self.coeffs[k] - &o.coeffs[k];
            let v = diff.val();
            min_valuation = min_valuation.min(v);
            if v < threshold.min(diff.precision()) && first_failure.is_none() {
                first_failure = Some(k);
            }
        }
        Ok(Comparison {
            min_valuation,
            first_failure,
        })
    }

    /// Least valuation over the coefficients of index `>= from`.
    pub fn min_valuation_from(&self, from: usize) -> u32 {
        self.coeffs
            .iter()
            .skip(from)
            .map(|c| c.val())
            .min()
            .unwrap_or(self.ctx.precision())
    }

    /// Balanced integer coefficients when every coefficient lies in Z_p.
    pub fn to_integers(&self) -> Option<Vec<i128>> {
        self.coeffs.iter().map(|c| c.to_integer()).collect()
    }

    /// Move the series into another context with the same prime and precision layout.
    pub fn map(&self, ctx: &Arc<RingContext>, f: impl Fn(&RingElement) -> Result<RingElement>) -> Result<TSeries> {
        let coeffs = self.coeffs.iter().map(f).collect::<Result<Vec<_>>>()?;
        Ok(TSeries {
            ctx: ctx.clone(),
            coeffs,
        })
    }
}

impl fmt::Debug for TSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(&self.coeffs).finish()
    }
}

impl Serialize for TSeries {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(self.coeffs.len()))?;
        for c in &self.coeffs {
            seq.serialize_element(c)?;
        }
        seq.end()
    }
}

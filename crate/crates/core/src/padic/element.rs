use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use serde::ser::{Serialize, SerializeStruct, Serializer};

use super::context::{Limbs, RingContext};
use crate::error::{Error, Result};

/// π-adic valuation of an element known only to finite precision.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Valuation {
    Finite(u32),
    /// The element is zero modulo `pi^N` for the stated precision N.
    AtLeast(u32),
}

impl Valuation {
    /// The valuation, or the precision bound when the element is indistinguishable from 0.
    pub fn value(self) -> u32 {
        match self {
            Valuation::Finite(v) | Valuation::AtLeast(v) => v,
        }
    }
}

/// Element of `Z_{q^d}[pi]` known modulo `pi^precision`.
#[derive(Clone)]
pub struct RingElement {
    ctx: Arc<RingContext>,
    c: Limbs,
    prec: u32,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RingOp {
    Add,
    Sub,
    Mul,
    Neg,
    InvUnit,
}

/// Checked arithmetic entry point; binary ops require `y`.
pub fn ring_arith(op: RingOp, x: &RingElement, y: Option<&RingElement>) -> Result<RingElement> {
    let need = || y.ok_or_else(|| Error::Invalid("binary op needs two operands".into()));
    match op {
        RingOp::Add => x.checked_add(need()?),
        RingOp::Sub => x.checked_sub(need()?),
        RingOp::Mul => x.checked_mul(need()?),
        RingOp::Neg => Ok(-x),
        RingOp::InvUnit => x.inv_unit(),
    }
}

impl RingElement {
    pub(crate) fn from_limbs(ctx: &Arc<RingContext>, c: Limbs, prec: u32) -> Self {
        debug_assert_eq!(c.len(), ctx.len());
        RingElement {
            ctx: ctx.clone(),
            c,
            prec: prec.min(ctx.precision()),
        }
    }

    pub fn zero(ctx: &Arc<RingContext>) -> Self {
        Self::from_limbs(ctx, ctx.zero_limbs(), ctx.precision())
    }

    pub fn one(ctx: &Arc<RingContext>) -> Self {
        Self::from_int(ctx, 1)
    }

    pub fn from_int(ctx: &Arc<RingContext>, v: i64) -> Self {
        Self::from_limbs(ctx, ctx.int_limbs(v), ctx.precision())
    }

    pub fn from_bigint(ctx: &Arc<RingContext>, v: &BigInt) -> Self {
        let m = BigInt::from(ctx.storage_modulus());
        let r = v.mod_floor(&m).to_u64().unwrap();
        let mut c = ctx.zero_limbs();
        c[0] = r;
        Self::from_limbs(ctx, c, ctx.precision())
    }

    /// Reduce a p-integral rational into the ring.
    pub fn from_rational(ctx: &Arc<RingContext>, v: &BigRational) -> Result<Self> {
        let m = BigInt::from(ctx.storage_modulus());
        let den = v.denom().mod_floor(&m);
        let p = BigInt::from(ctx.p());
        if den.is_zero() || (v.denom() % &p).is_zero() {
            return Err(Error::Invalid(format!("{v} is not p-integral")));
        }
        let inv = den.extended_gcd(&m).x;
        let num = v.numer().mod_floor(&m);
        Ok(Self::from_bigint(ctx, &(num * inv)))
    }

    /// The uniformizer: pi when ramified, p otherwise.
    pub fn uniformizer(ctx: &Arc<RingContext>) -> Self {
        let mut c = ctx.zero_limbs();
        if ctx.ramification() >= 2 {
            c[ctx.unramified_degree()] = 1;
        } else if ctx.is_ramified() {
            c[0] = ctx.reduce_i128(-(ctx.p() as i128));
        } else {
            c[0] = ctx.p();
        }
        Self::from_limbs(ctx, c, ctx.precision())
    }

    /// The unramified generator `t` (a root of the lifted residue modulus).
    pub fn generator(ctx: &Arc<RingContext>) -> Self {
        let mut c = ctx.zero_limbs();
        if ctx.unramified_degree() > 1 {
            c[1] = 1;
        } else {
            // degree-one modulus x + g0 has root -g0
            c[0] = ctx.reduce_i128(-(ctx.residue_modulus()[0] as i128));
        }
        Self::from_limbs(ctx, c, ctx.precision())
    }

    /// Naive lift of a residue-field element (coefficients in `0..p`).
    pub fn from_residue(ctx: &Arc<RingContext>, coeffs: &[u32]) -> Self {
        Self::from_limbs(ctx, ctx.lift_residue(coeffs), ctx.precision())
    }

    pub fn ctx(&self) -> &Arc<RingContext> {
        &self.ctx
    }

    pub fn precision(&self) -> u32 {
        self.prec
    }

    pub fn with_precision(mut self, prec: u32) -> Self {
        self.prec = self.prec.min(prec);
        self
    }

    pub(crate) fn limbs(&self) -> &[u64] {
        &self.c
    }

    /// Stored integer coefficients: `out[i][k]` multiplies `pi^i t^k`.
    pub fn raw_coefficients(&self) -> Vec<Vec<u64>> {
        let q = self.ctx.unramified_degree();
        self.c.chunks(q).map(|ch| ch.to_vec()).collect()
    }

    fn check(&self, other: &RingElement) -> Result<()> {
        if self.ctx.same(&other.ctx) {
            Ok(())
        } else {
            Err(Error::ContextMismatch)
        }
    }

    pub fn checked_add(&self, o: &RingElement) -> Result<RingElement> {
        self.check(o)?;
        Ok(Self::from_limbs(&self.ctx, self.ctx.add_limbs(&self.c, &o.c), self.prec.min(o.prec)))
    }

    pub fn checked_sub(&self, o: &RingElement) -> Result<RingElement> {
        self.check(o)?;
        Ok(Self::from_limbs(&self.ctx, self.ctx.sub_limbs(&self.c, &o.c), self.prec.min(o.prec)))
    }

    pub fn checked_mul(&self, o: &RingElement) -> Result<RingElement> {
        self.check(o)?;
        Ok(Self::from_limbs(&self.ctx, self.ctx.mul_limbs(&self.c, &o.c), self.prec.min(o.prec)))
    }

    pub fn mul_int(&self, s: i64) -> RingElement {
        let s = self.ctx.reduce_i128(s as i128);
        Self::from_limbs(&self.ctx, self.ctx.scale_limbs(&self.c, s), self.prec)
    }

    pub fn pow(&self, e: u64) -> RingElement {
        Self::from_limbs(&self.ctx, self.ctx.pow_limbs(&self.c, e as u128), self.prec)
    }

    pub fn pow_u128(&self, e: u128) -> RingElement {
        Self::from_limbs(&self.ctx, self.ctx.pow_limbs(&self.c, e), self.prec)
    }

    pub fn is_unit(&self) -> bool {
        matches!(self.valuation(), Valuation::Finite(0))
    }

    /// Inverse of a unit, to the element's precision.
    pub fn inv_unit(&self) -> Result<RingElement> {
        match self.valuation() {
            Valuation::Finite(0) => {}
            v => return Err(Error::NotUnit(v.value())),
        }
        let inv = self.ctx.inv_unit_limbs(&self.c).ok_or(Error::NotUnit(0))?;
        Ok(Self::from_limbs(&self.ctx, inv, self.prec))
    }

    /// Exact division by p; costs `e` digits of precision.
    pub fn div_p(&self) -> Result<RingElement> {
        let e = self.ctx.ramification() as u32;
        let c = self.ctx.div_p_limbs(&self.c, self.prec)?;
        Ok(Self::from_limbs(&self.ctx, c, self.prec.saturating_sub(e)))
    }

    /// Division by a nonzero integer; each factor p of `m` debits `e` digits.
    pub fn div_int(&self, m: i64) -> Result<RingElement> {
        if m == 0 {
            return Err(Error::Invalid("division by zero".into()));
        }
        let p = self.ctx.p() as i64;
        let mut unit = m;
        let mut x = self.clone();
        while unit % p == 0 {
            unit /= p;
            x = x.div_p()?;
        }
        let inv = RingElement::from_int(&self.ctx, unit).inv_unit()?;
        Ok(&x * &inv)
    }

    /// π-adic valuation, or `AtLeast(precision)` when the element is 0 mod `pi^precision`.
    pub fn valuation(&self) -> Valuation {
        let q = self.ctx.unramified_degree();
        let e = self.ctx.ramification() as u32;
        let p = self.ctx.p();
        let mut best = self.prec;
        for (i, block) in self.c.chunks(q).enumerate() {
            let i = i as u32;
            if i >= best {
                break;
            }
            // digits of c_i known: ceil((prec - i)/e)
            let known = (self.prec - i).div_ceil(e);
            for &coef in block {
                let mut v = 0u32;
                let mut c = coef;
                while v < known && c % p == 0 {
                    c /= p;
                    v += 1;
                }
                if v < known {
                    best = best.min(e * v + i);
                }
            }
        }
        if best >= self.prec {
            Valuation::AtLeast(self.prec)
        } else {
            Valuation::Finite(best)
        }
    }

    /// `min(valuation, precision)`.
    pub fn val(&self) -> u32 {
        self.valuation().value()
    }

    pub fn is_zero(&self) -> bool {
        matches!(self.valuation(), Valuation::AtLeast(_))
    }

    /// All stored limbs are zero.
    pub fn is_exact_zero(&self) -> bool {
        self.c.iter().all(|&x| x == 0)
    }

    /// Canonical reduction modulo `pi^n` (n is clipped to the precision).
    pub fn reduce(&self, n: u32) -> RingElement {
        let n = n.min(self.prec);
        let q = self.ctx.unramified_degree();
        let e = self.ctx.ramification() as u32;
        let p = self.ctx.p();
        let mut c = self.c.clone();
        for (i, block) in c.chunks_mut(q).enumerate() {
            let i = i as u32;
            let keep = if n > i { (n - i).div_ceil(e) } else { 0 };
            let m = p.checked_pow(keep).unwrap_or(u64::MAX);
            for coef in block {
                *coef = if keep >= self.ctx.storage_digits() { *coef } else { *coef % m };
            }
        }
        Self::from_limbs(&self.ctx, c, n)
    }

    /// True when `self ≡ other (mod pi^n)`; `n` is clipped to the joint precision.
    pub fn eq_mod(&self, other: &RingElement, n: u32) -> bool {
        let d = self - other;
        d.val() >= n.min(d.prec)
    }

    /// Valuation of the difference, clipped to the joint precision.
    pub fn diff_valuation(&self, other: &RingElement) -> u32 {
        (self - other).val()
    }

    /// Apply the absolute Frobenius `tau` j times (fixes pi).
    pub fn frobenius(&self, j: usize) -> RingElement {
        let order = self.ctx.unramified_degree();
        let mut c = self.c.clone();
        for _ in 0..(j % order) {
            c = self.ctx.frobenius_limbs(&c);
        }
        Self::from_limbs(&self.ctx, c, self.prec)
    }

    /// Teichmüller lift of a residue-field element given by its coefficients
    /// over the context modulus: the root of `X^{q^d} = X` above it.
    pub fn teichmuller(ctx: &Arc<RingContext>, residue: &[u32]) -> Self {
        let mut x = Self::from_residue(ctx, residue);
        let order = (ctx.p() as u128).pow(ctx.unramified_degree() as u32);
        for _ in 0..ctx.storage_digits() {
            let next = x.pow_u128(order);
            if next.c == x.c {
                break;
            }
            x = next;
        }
        x
    }

    /// Residue modulo the uniformizer as F_{p^{ad}} coefficients.
    pub fn residue(&self) -> Vec<u32> {
        self.ctx.residue_coeffs(&self.c)
    }

    /// Packed residue `sum c_k p^k`.
    pub fn residue_packed(&self) -> u64 {
        crate::ffield::fp_poly::pack(&self.residue(), self.ctx.p() as u32)
    }

    /// Division by the uniformizer of an element with positive valuation.
    fn div_uniformizer(&self) -> RingElement {
        let ctx = &self.ctx;
        let q = ctx.unramified_degree();
        let e = ctx.ramification();
        let mut c = ctx.zero_limbs();
        // y/pi = sum_{i>=1} c_i pi^{i-1} + (c_0/p) (p/pi), p/pi = -pi^{e-1} (ramified)
        for i in 1..e {
            c[(i - 1) * q..i * q].copy_from_slice(&self.c[i * q..(i + 1) * q]);
        }
        let sign_neg = ctx.is_ramified();
        for k in 0..q {
            let v = self.c[k] / ctx.p();
            let v = if sign_neg { ctx.submod(0, v) } else { v };
            let idx = (e - 1) * q + k;
            c[idx] = ctx.addmod(c[idx], v);
        }
        Self::from_limbs(ctx, c, self.prec.saturating_sub(1))
    }

    /// π-adic digits `d_0..d_{N-1}` with `x = sum lift(d_k) pi^k (mod pi^N)`,
    /// each digit a packed residue-field element with coefficients in `0..p`.
    pub fn pi_digits(&self) -> Vec<u64> {
        let mut out = Vec::with_capacity(self.prec as usize);
        let mut x = self.clone();
        let n = self.prec;
        for _ in 0..n {
            let res = x.residue();
            out.push(crate::ffield::fp_poly::pack(&res, self.ctx.p() as u32));
            let lift = RingElement::from_residue(&self.ctx, &res);
            x = (&x - &lift).div_uniformizer();
        }
        out
    }

    /// Rebuild an element from π-adic digits (inverse of `pi_digits`).
    pub fn from_pi_digits(ctx: &Arc<RingContext>, digits: &[u64], prec: u32) -> Self {
        let pi = RingElement::uniformizer(ctx);
        let p = ctx.p() as u32;
        let q = ctx.unramified_degree();
        let mut acc = RingElement::zero(ctx);
        for &dgt in digits.iter().rev() {
            let res = crate::ffield::fp_poly::unpack(dgt, p, q);
            acc = &(&acc * &pi) + &RingElement::from_residue(ctx, &res);
        }
        acc.with_precision(prec)
    }

    /// Balanced integer representative when the element lies in Z_p
    /// (modulo its precision); `None` otherwise.
    pub fn to_integer(&self) -> Option<i128> {
        let e = self.ctx.ramification() as u32;
        let known = self.prec.div_ceil(e);
        if known == 0 {
            return Some(0);
        }
        let m = self.ctx.p().checked_pow(known.min(self.ctx.storage_digits()))? as i128;
        // every coefficient other than the constant must vanish mod its precision
        let mut only_const = self.clone();
        only_const.c[0] = 0;
        if !only_const.is_zero() {
            return None;
        }
        let r = self.c[0] as i128 % m;
        Some(if r > m / 2 { r - m } else { r })
    }

    pub fn to_bigint_balanced(&self) -> Option<BigInt> {
        self.to_integer().map(BigInt::from)
    }
}

/// JSON form `{pi_digits, precision}` plus `integer` when the element lies in Z_p.
impl Serialize for RingElement {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let integer = self.to_integer();
        let mut st = s.serialize_struct("RingElement", 2 + integer.is_some() as usize)?;
        st.serialize_field("pi_digits", &self.pi_digits())?;
        st.serialize_field("precision", &self.prec)?;
        if let Some(v) = integer {
            st.serialize_field("integer", &v)?;
        }
        st.end()
    }
}

impl fmt::Debug for RingElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(v) = self.to_integer() {
            return write!(f, "{v} (mod pi^{})", self.prec);
        }
        write!(f, "{:?} (mod pi^{})", self.raw_coefficients(), self.prec)
    }
}

impl PartialEq for RingElement {
    /// Equality modulo the joint precision.
    fn eq(&self, other: &Self) -> bool {
        self.ctx.same(&other.ctx) && self.eq_mod(other, u32::MAX)
    }
}

impl<'a> Add<&'a RingElement> for &'a RingElement {
    type Output = RingElement;
    fn add(self, o: &RingElement) -> RingElement {
        self.checked_add(o).expect("ring context mismatch")
    }
}

impl<'a> Sub<&'a RingElement> for &'a RingElement {
    type Output = RingElement;
    fn sub(self, o: &RingElement) -> RingElement {
        self.checked_sub(o).expect("ring context mismatch")
    }
}

impl<'a> Mul<&'a RingElement> for &'a RingElement {
    type Output = RingElement;
    fn mul(self, o: &RingElement) -> RingElement {
        self.checked_mul(o).expect("ring context mismatch")
    }
}

impl Neg for &RingElement {
    type Output = RingElement;
    fn neg(self) -> RingElement {
        RingElement::from_limbs(&self.ctx, self.ctx.neg_limbs(&self.c), self.prec)
    }
}

impl Add for RingElement {
    type Output = RingElement;
    fn add(self, o: RingElement) -> RingElement {
        &self + &o
    }
}

impl Sub for RingElement {
    type Output = RingElement;
    fn sub(self, o: RingElement) -> RingElement {
        &self - &o
    }
}

impl Mul for RingElement {
    type Output = RingElement;
    fn mul(self, o: RingElement) -> RingElement {
        &self * &o
    }
}

impl Neg for RingElement {
    type Output = RingElement;
    fn neg(self) -> RingElement {
        -&self
    }
}

/// `sum_k x_k * y_k` with a single reduction at the end.
pub fn dot<'a, I>(ctx: &Arc<RingContext>, pairs: I) -> RingElement
where
    I: IntoIterator<Item = (&'a RingElement, &'a RingElement)>,
{
    let mut acc = ctx.accumulator();
    let mut prec = ctx.precision();
    for (x, y) in pairs {
        debug_assert!(x.ctx.same(ctx) && y.ctx.same(ctx));
        prec = prec.min(x.prec).min(y.prec);
        acc.add_product(&x.c, &y.c);
    }
    RingElement::from_limbs(ctx, acc.finish(), prec)
}

/// Sum of elements with one reduction.
pub fn sum<'a, I>(ctx: &Arc<RingContext>, items: I) -> RingElement
where
    I: IntoIterator<Item = &'a RingElement>,
{
    let mut acc = ctx.accumulator();
    let mut prec = ctx.precision();
    for x in items {
        prec = prec.min(x.prec);
        acc.add(&x.c);
    }
    RingElement::from_limbs(ctx, acc.finish(), prec)
}

/// The least nonnegative integer congruent to an element of `Z_p` at its known precision.
pub(crate) fn nonnegative_residue(x: &RingElement) -> crate::error::Result<u128> {
    let v = x
        .to_integer()
        .ok_or_else(|| crate::error::Error::Invalid("trace is not in Z_p".into()))?;
    let ctx = x.ctx();
    let known = x.precision().div_ceil(ctx.ramification() as u32).min(ctx.storage_digits());
    let pm = (ctx.p() as i128).pow(known);
    Ok(v.rem_euclid(pm) as u128)
}

use std::fmt;
use std::sync::Arc;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};

use super::context::RingContext;
use super::element::RingElement;
use crate::error::{Error, Result};

/// A p-adic integer `kappa = sum a_i p^i`, stored as a finite digit prefix.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct PAdicExponent {
    p: u32,
    digits: Vec<u32>,
}

/// Default prefix length `N + v_p(N!) + 4` for working precision `N`.
pub fn default_digit_count(p: u32, n_pi: u32) -> usize {
    n_pi as usize + vp_factorial(p as u64, n_pi as u64) as usize + 4
}

/// `v_p(n!)` by Legendre's formula.
pub fn vp_factorial(p: u64, n: u64) -> u32 {
    let mut v = 0;
    let mut m = n / p;
    while m > 0 {
        v += m;
        m /= p;
    }
    v as u32
}

impl PAdicExponent {
    pub fn from_digits(p: u32, digits: Vec<u32>) -> Result<Self> {
        if let Some(&bad) = digits.iter().find(|&&d| d >= p) {
            return Err(Error::Invalid(format!("digit {bad} out of range for p = {p}")));
        }
        Ok(PAdicExponent { p, digits })
    }

    /// Finite digit list padded with zeros (a non-negative integer) to `len` digits.
    pub fn from_finite_digits(p: u32, digits: &[u32], len: usize) -> Result<Self> {
        let mut d = digits.to_vec();
        if d.len() < len {
            d.resize(len, 0);
        }
        Self::from_digits(p, d)
    }

    /// Periodic expansion: `head` followed by `period` repeated, `len` digits total.
    pub fn periodic(p: u32, head: &[u32], period: &[u32], len: usize) -> Result<Self> {
        if period.is_empty() {
            return Self::from_finite_digits(p, head, len);
        }
        let mut d = head.to_vec();
        let mut i = 0;
        while d.len() < len {
            d.push(period[i % period.len()]);
            i += 1;
        }
        Self::from_digits(p, d)
    }

    pub fn from_integer(p: u32, v: &BigInt, len: usize) -> Self {
        let m = BigInt::from(p).pow(len as u32);
        let mut r = v.mod_floor(&m).to_biguint().unwrap();
        let pb = BigUint::from(p);
        let digits = (0..len)
            .map(|_| {
                let (q, d) = r.div_rem(&pb);
                r = q;
                d.to_u32().unwrap()
            })
            .collect();
        PAdicExponent { p, digits }
    }

    pub fn from_i64(p: u32, v: i64, len: usize) -> Self {
        Self::from_integer(p, &BigInt::from(v), len)
    }

    /// `-1`, every digit `p - 1`.
    pub fn minus_one(p: u32, len: usize) -> Self {
        PAdicExponent {
            p,
            digits: vec![p - 1; len],
        }
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn digits(&self) -> &[u32] {
        &self.digits
    }

    pub fn len(&self) -> usize {
        self.digits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.digits.is_empty()
    }

    /// Truncation `k_m = sum_{i <= m} a_i p^i`.
    pub fn truncation(&self, m: usize) -> BigUint {
        let pb = BigUint::from(self.p);
        self.digits
            .iter()
            .take(m + 1)
            .rev()
            .fold(BigUint::zero(), |acc, &d| acc * &pb + BigUint::from(d))
    }

    /// Representative `k_{M-1}` of kappa modulo `p^M`.
    pub fn residue(&self) -> BigUint {
        if self.digits.is_empty() {
            return BigUint::zero();
        }
        self.truncation(self.digits.len() - 1)
    }

    /// kappa + t (same prefix length, carries/borrows past the prefix dropped).
    pub fn add_int(&self, t: &BigInt) -> Self {
        let v = BigInt::from(self.residue()) + t;
        Self::from_integer(self.p, &v, self.digits.len())
    }

    pub fn add_i64(&self, t: i64) -> Self {
        self.add_int(&BigInt::from(t))
    }

    /// Shorten (or zero-extend) the prefix.
    pub fn with_len(&self, len: usize) -> Self {
        let mut digits = self.digits.clone();
        digits.resize(len, 0);
        PAdicExponent { p: self.p, digits }
    }

    /// The integer value when kappa is a small non-negative integer within the prefix
    /// (all digits beyond its expansion zero).
    pub fn as_small_integer(&self) -> Option<u64> {
        let last = self.digits.iter().rposition(|&d| d != 0);
        match last {
            None => Some(0),
            Some(i) if i + 1 < self.digits.len() => self.truncation(i).to_u64(),
            Some(_) => None,
        }
    }

    /// `p`-adic valuation of `kappa - other` as seen in the common prefix.
    pub fn agreement(&self, other: &PAdicExponent) -> usize {
        self.digits
            .iter()
            .zip(&other.digits)
            .take_while(|(a, b)| a == b)
            .count()
    }
}

impl fmt::Debug for PAdicExponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PAdicExponent(p={}, digits={:?})", self.p, self.digits)
    }
}

/// `binom(kappa, j)` as a ring element, computed from the integer `binom(k_{M-1}, j)`.
///
/// The result is known modulo `p^{M - v_p(j!)}`; `target` is the π-adic precision
/// the caller needs and the call fails if the prefix cannot supply it.
pub fn padic_binomial(
    ctx: &Arc<RingContext>,
    kappa: &PAdicExponent,
    j: u64,
    target: u32,
) -> Result<RingElement> {
    let p = ctx.p();
    if kappa.p as u64 != p {
        return Err(Error::Invalid("exponent prime differs from ring prime".into()));
    }
    let e = ctx.ramification() as u32;
    let loss = vp_factorial(p, j);
    let have_p = (kappa.len() as u32).saturating_sub(loss);
    let prec = have_p.saturating_mul(e).min(ctx.precision());
    if prec < target.min(ctx.precision()) {
        let need = (target.div_ceil(e) + loss) as usize;
        return Err(Error::InsufficientDigits {
            have: kappa.len(),
            need,
        });
    }
    if j == 0 {
        return Ok(RingElement::one(ctx));
    }
    let k = kappa.residue();
    let b = binomial_big(&k, j);
    Ok(RingElement::from_bigint(ctx, &BigInt::from(b)).with_precision(prec))
}

/// Exact `binom(k, j)` for a big non-negative `k`.
pub fn binomial_big(k: &BigUint, j: u64) -> BigUint {
    if BigUint::from(j) > *k {
        return BigUint::zero();
    }
    let mut num = BigUint::one();
    let mut den = BigUint::one();
    for i in 0..j {
        num *= k - BigUint::from(i);
        den *= BigUint::from(i + 1);
    }
    num / den
}

/// `binom(n, j)` for signed integers `n`.
pub fn binomial_signed(n: &BigInt, j: u64) -> BigInt {
    let mut num = BigInt::one();
    let mut den = BigInt::one();
    for i in 0..j {
        num *= n - BigInt::from(i);
        den *= BigInt::from(i + 1);
    }
    debug_assert!((&num % &den).is_zero());
    num / den
}

use std::sync::{Arc, OnceLock};

use smallvec::{smallvec, SmallVec};

use crate::error::{Error, Result};
use crate::ffield::fp_poly;

pub(crate) type Limbs = SmallVec<[u64; 8]>;

/// Largest storage modulus p^M. Products fit in 112 bits, so a u128
/// accumulator absorbs 2^16 of them before it has to be reduced.
const STORAGE_BITS: u32 = 56;
const FLUSH_TERMS: usize = 1 << 15;

/// Arithmetic context for `Z_{q^d}[pi]`, `q = p^a`, with `pi^{p-1} = -p`
/// (or for the unramified ring `Z_{q^d}` when `ramified` is false).
///
/// An element is `sum_{i<e} c_i pi^i` where `e` is the ramification index and
/// each `c_i` is a polynomial of degree `< a*d` in the unramified generator `t`
/// with coefficients in `Z/p^M`. The generator satisfies the naive integer lift
/// of the least irreducible polynomial of degree `a*d` over F_p.
#[derive(Debug)]
pub struct RingContext {
    p: u64,
    a: usize,
    d: usize,
    unram: usize,
    e: usize,
    ramified: bool,
    n_pi: u32,
    digits: u32,
    pm: u64,
    /// `pi^e` expressed as an integer: `-p` (ramified) or `p` (unramified).
    pi_e: u64,
    modulus: Vec<u64>,
    residue_modulus: Vec<u32>,
    frobenius: OnceLock<Vec<Limbs>>,
}

/// Build the ramified context `Z_{q^d}[pi]` with `q = p^a` and working
/// precision `n_pi` pi-adic digits.
pub fn make_ring_context(p: u64, a: usize, d: usize, n_pi: u32) -> Result<Arc<RingContext>> {
    RingContext::new(p, a, d, n_pi, true).map(Arc::new)
}

impl RingContext {
    pub fn new(p: u64, a: usize, d: usize, n_pi: u32, ramified: bool) -> Result<Self> {
        if !fp_poly::is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        if a == 0 || d == 0 {
            return Err(Error::ZeroDegree);
        }
        if n_pi == 0 {
            return Err(Error::ZeroPrecision);
        }
        let e = if ramified { (p - 1) as usize } else { 1 };
        let digits = n_pi.div_ceil(e as u32) + 1;
        let pm = p
            .checked_pow(digits)
            .filter(|&v| v < (1u64 << STORAGE_BITS))
            .ok_or(Error::PrecisionTooLarge { p, digits })?;
        let unram = a * d;
        let residue_modulus = fp_poly::least_irreducible(p as u32, unram);
        let modulus = residue_modulus.iter().map(|&c| c as u64).collect();
        let pi_e = if ramified { pm - p } else { p };
        Ok(RingContext {
            p,
            a,
            d,
            unram,
            e,
            ramified,
            n_pi,
            digits,
            pm,
            pi_e,
            modulus,
            residue_modulus,
            frobenius: OnceLock::new(),
        })
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    /// Unramified degree of the base ring over Z_p (q = p^a).
    pub fn a(&self) -> usize {
        self.a
    }

    /// Further unramified degree (fiber rings Z_{q^d}).
    pub fn d(&self) -> usize {
        self.d
    }

    pub fn q(&self) -> u64 {
        self.p.pow(self.a as u32)
    }

    /// Total unramified degree `a*d` over Z_p.
    pub fn unramified_degree(&self) -> usize {
        self.unram
    }

    /// Ramification index: `p - 1` when pi is adjoined, else 1.
    pub fn ramification(&self) -> usize {
        self.e
    }

    pub fn is_ramified(&self) -> bool {
        self.ramified
    }

    /// Working precision in uniformizer digits.
    pub fn precision(&self) -> u32 {
        self.n_pi
    }

    /// Number of stored p-adic digits per unramified coefficient.
    pub fn storage_digits(&self) -> u32 {
        self.digits
    }

    pub(crate) fn storage_modulus(&self) -> u64 {
        self.pm
    }

    /// Defining polynomial of the residue field, low degree first.
    pub fn residue_modulus(&self) -> &[u32] {
        &self.residue_modulus
    }

    pub(crate) fn len(&self) -> usize {
        self.e * self.unram
    }

    pub fn same(&self, other: &RingContext) -> bool {
        std::ptr::eq(self, other)
            || (self.p == other.p
                && self.a == other.a
                && self.d == other.d
                && self.n_pi == other.n_pi
                && self.ramified == other.ramified)
    }

    // ----- raw limb arithmetic -------------------------------------------------

    pub(crate) fn zero_limbs(&self) -> Limbs {
        smallvec![0; self.len()]
    }

    pub(crate) fn int_limbs(&self, v: i64) -> Limbs {
        let mut out = self.zero_limbs();
        out[0] = self.reduce_i128(v as i128);
        out
    }

    pub(crate) fn reduce_i128(&self, v: i128) -> u64 {
        v.rem_euclid(self.pm as i128) as u64
    }

    #[inline]
    pub(crate) fn mulmod(&self, x: u64, y: u64) -> u64 {
        ((x as u128 * y as u128) % self.pm as u128) as u64
    }

    #[inline]
    pub(crate) fn addmod(&self, x: u64, y: u64) -> u64 {
        let s = x + y;
        if s >= self.pm {
            s - self.pm
        } else {
            s
        }
    }

    #[inline]
    pub(crate) fn submod(&self, x: u64, y: u64) -> u64 {
        if x >= y {
            x - y
        } else {
            x + self.pm - y
        }
    }

    pub(crate) fn add_limbs(&self, x: &[u64], y: &[u64]) -> Limbs {
        x.iter().zip(y).map(|(&a, &b)| self.addmod(a, b)).collect()
    }

    pub(crate) fn sub_limbs(&self, x: &[u64], y: &[u64]) -> Limbs {
        x.iter().zip(y).map(|(&a, &b)| self.submod(a, b)).collect()
    }

    pub(crate) fn neg_limbs(&self, x: &[u64]) -> Limbs {
        x.iter().map(|&a| self.submod(0, a)).collect()
    }

    pub(crate) fn scale_limbs(&self, x: &[u64], s: u64) -> Limbs {
        x.iter().map(|&a| self.mulmod(a, s)).collect()
    }

    pub(crate) fn accumulator(&self) -> Accumulator<'_> {
        Accumulator::new(self)
    }

    pub(crate) fn mul_limbs(&self, x: &[u64], y: &[u64]) -> Limbs {
        let mut acc = self.accumulator();
        acc.add_product(x, y);
        acc.finish()
    }

    pub(crate) fn pow_limbs(&self, x: &[u64], mut e: u128) -> Limbs {
        let mut result = self.int_limbs(1);
        let mut base: Limbs = x.into();
        while e > 0 {
            if e & 1 == 1 {
                result = self.mul_limbs(&result, &base);
            }
            e >>= 1;
            if e > 0 {
                base = self.mul_limbs(&base, &base);
            }
        }
        result
    }

    /// Residue of `x` modulo the uniformizer, as F_{p^{ad}} coefficients.
    pub(crate) fn residue_coeffs(&self, x: &[u64]) -> Vec<u32> {
        x[..self.unram].iter().map(|&c| (c % self.p) as u32).collect()
    }

    pub(crate) fn lift_residue(&self, coeffs: &[u32]) -> Limbs {
        let mut out = self.zero_limbs();
        for (k, &c) in coeffs.iter().enumerate().take(self.unram) {
            out[k] = c as u64 % self.p;
        }
        out
    }

    /// Inverse of a unit, by Newton iteration from the residue-field inverse.
    pub(crate) fn inv_unit_limbs(&self, x: &[u64]) -> Option<Limbs> {
        let res = self.residue_coeffs(x);
        if res.iter().all(|&c| c == 0) {
            return None;
        }
        let p32 = self.p as u32;
        let order = self.p.pow(self.unram as u32);
        let inv_res = fp_poly::powmod(&res, order - 2, &self.residue_modulus, p32);
        let mut y = self.lift_residue(&inv_res);
        let two = self.int_limbs(2);
        let mut correct = 1u32;
        let target = self.e as u32 * self.digits;
        while correct < target {
            let xy = self.mul_limbs(x, &y);
            y = self.mul_limbs(&y, &self.sub_limbs(&two, &xy));
            correct *= 2;
        }
        Some(y)
    }

    /// Divide every stored coefficient by p. Digits that are known (below the
    /// given pi-adic precision) must be divisible; unknown digits are dropped.
    pub(crate) fn div_p_limbs(&self, x: &[u64], prec: u32) -> Result<Limbs> {
        let mut out = self.zero_limbs();
        for i in 0..self.e {
            for k in 0..self.unram {
                let c = x[i * self.unram + k];
                if c % self.p != 0 && (i as u32) < prec {
                    return Err(Error::NotDivisible);
                }
                out[i * self.unram + k] = c / self.p;
            }
        }
        Ok(out)
    }

    /// Lazily computed matrix of the arithmetic Frobenius on the unramified
    /// basis: entry k is `tau(t)^k`.
    pub(crate) fn frobenius_table(&self) -> &[Limbs] {
        self.frobenius.get_or_init(|| {
            let q = self.unram;
            let mut table = Vec::with_capacity(q);
            if q == 1 {
                table.push(self.int_limbs(1));
                return table;
            }
            let mut t = self.zero_limbs();
            t[1] = 1;
            // Newton iteration for the root of the modulus congruent to t^p.
            let mut y = self.pow_limbs(&t, self.p as u128);
            let deriv: Vec<u64> = (1..=q)
                .map(|k| self.mulmod(self.modulus[k], k as u64 % self.pm))
                .collect();
            let eval = |coeffs: &[u64], y: &Limbs| -> Limbs {
                let mut acc = self.zero_limbs();
                for &c in coeffs.iter().rev() {
                    acc = self.mul_limbs(&acc, y);
                    acc[0] = self.addmod(acc[0], c);
                }
                acc
            };
            for _ in 0..=(2 * self.digits).ilog2() + 2 {
                let gy = eval(&self.modulus, &y);
                let dy = eval(&deriv, &y);
                let inv = self.inv_unit_limbs(&dy).expect("separable modulus");
                y = self.sub_limbs(&y, &self.mul_limbs(&gy, &inv));
            }
            let mut cur = self.int_limbs(1);
            for _ in 0..q {
                table.push(cur.clone());
                cur = self.mul_limbs(&cur, &y);
            }
            table
        })
    }

    /// Apply the absolute Frobenius once (pi is fixed).
    pub(crate) fn frobenius_limbs(&self, x: &[u64]) -> Limbs {
        let q = self.unram;
        if q == 1 {
            return x.into();
        }
        let table = self.frobenius_table();
        let mut out = self.zero_limbs();
        for i in 0..self.e {
            let block = &x[i * q..(i + 1) * q];
            for (k, &c) in block.iter().enumerate() {
                if c == 0 {
                    continue;
                }
                for j in 0..q {
                    let idx = i * q + j;
                    out[idx] = self.addmod(out[idx], self.mulmod(c, table[k][j]));
                }
            }
        }
        out
    }
}

/// Fused sum of products. Raw 112-bit products are summed in u128 slots and
/// only reduced when the sum is finished (or every `FLUSH_TERMS` terms).
pub(crate) struct Accumulator<'a> {
    ctx: &'a RingContext,
    acc: Vec<u128>,
    width: usize,
    terms: usize,
}

impl<'a> Accumulator<'a> {
    fn new(ctx: &'a RingContext) -> Self {
        let width = 2 * ctx.unram - 1;
        Accumulator {
            ctx,
            acc: vec![0; (2 * ctx.e - 1) * width],
            width,
            terms: 0,
        }
    }

    fn flush(&mut self) {
        let pm = self.ctx.pm as u128;
        for slot in self.acc.iter_mut() {
            *slot %= pm;
        }
        self.terms = 0;
    }

    pub(crate) fn add_product(&mut self, x: &[u64], y: &[u64]) {
        let q = self.ctx.unram;
        let e = self.ctx.e;
        let mut added = false;
        for i1 in 0..e {
            let xb = &x[i1 * q..(i1 + 1) * q];
            if xb.iter().all(|&c| c == 0) {
                continue;
            }
            for i2 in 0..e {
                let yb = &y[i2 * q..(i2 + 1) * q];
                let row = (i1 + i2) * self.width;
                for (k1, &a) in xb.iter().enumerate() {
                    if a == 0 {
                        continue;
                    }
                    for (k2, &b) in yb.iter().enumerate() {
                        self.acc[row + k1 + k2] += a as u128 * b as u128;
                    }
                }
                added = true;
            }
        }
        if added {
            self.terms += e * q;
            if self.terms >= FLUSH_TERMS {
                self.flush();
            }
        }
    }

    pub(crate) fn add(&mut self, x: &[u64]) {
        let q = self.ctx.unram;
        for i in 0..self.ctx.e {
            for k in 0..q {
                self.acc[i * self.width + k] += x[i * q + k] as u128;
            }
        }
        self.terms += 1;
        if self.terms >= FLUSH_TERMS {
            self.flush();
        }
    }

    pub(crate) fn finish(mut self) -> Limbs {
        self.flush();
        let ctx = self.ctx;
        let (q, e, w) = (ctx.unram, ctx.e, self.width);
        let mut vals: Vec<u64> = self.acc.iter().map(|&v| v as u64).collect();
        // pi^{i} = pi^{i-e} * pi^e for i >= e
        for i in (e..2 * e - 1).rev() {
            for k in 0..w {
                let v = vals[i * w + k];
                if v != 0 {
                    let t = (i - e) * w + k;
                    vals[t] = ctx.addmod(vals[t], ctx.mulmod(v, ctx.pi_e));
                }
            }
        }
        let mut out = ctx.zero_limbs();
        for i in 0..e {
            let row = &mut vals[i * w..(i + 1) * w];
            for k in (q..w).rev() {
                let c = row[k];
                if c == 0 {
                    continue;
                }
                row[k] = 0;
                for j in 0..q {
                    let t = k - q + j;
                    row[t] = ctx.submod(row[t], ctx.mulmod(c, ctx.modulus[j]));
                }
            }
            out[i * q..(i + 1) * q].copy_from_slice(&row[..q]);
        }
        out
    }
}

use super::fp_poly;
use crate::error::{Error, Result};

/// Largest field order for which log/antilog tables are built.
pub const MAX_FIELD_ORDER: u64 = 1 << 24;

/// The finite field F_{p^k} = F_p[t]/(g(t)) with g the least irreducible
/// polynomial of degree k. Elements are packed as `sum c_j p^j` where `c_j` is
/// the coefficient of `t^j`; zero packs to 0 and one packs to 1.
#[derive(Debug, Clone)]
pub struct FiniteField {
    p: u32,
    degree: usize,
    order: u64,
    modulus: Vec<u32>,
    generator: u32,
    exp: Vec<u32>,
    log: Vec<u32>,
    basis_traces: Vec<u32>,
}

impl FiniteField {
    pub fn new(p: u32, degree: usize) -> Result<Self> {
        if !fp_poly::is_prime(p as u64) {
            return Err(Error::NotPrime(p as u64));
        }
        if degree == 0 {
            return Err(Error::ZeroDegree);
        }
        let order = (p as u64)
            .checked_pow(degree as u32)
            .filter(|&o| o <= MAX_FIELD_ORDER)
            .ok_or(Error::FieldTooLarge { p: p as u64, degree })?;
        let modulus = fp_poly::least_irreducible(p, degree);
        let group = order - 1;
        let factors = fp_poly::prime_factors(group);
        let is_primitive = |cand: &[u32]| {
            factors
                .iter()
                .all(|&l| fp_poly::powmod(cand, group / l, &modulus, p) != [1])
        };
        let mut generator = 1u64;
        if group > 1 {
            generator = 2;
            while !is_primitive(&fp_poly::unpack(generator, p, degree)) {
                generator += 1;
            }
        }
        let gpoly = fp_poly::unpack(generator, p, degree);
        let mut exp = Vec::with_capacity(group as usize);
        let mut log = vec![u32::MAX; order as usize];
        let mut cur = vec![1u32];
        for k in 0..group {
            let packed = fp_poly::pack(&cur, p);
            exp.push(packed as u32);
            log[packed as usize] = k as u32;
            cur = fp_poly::mulmod(&cur, &gpoly, &modulus, p);
        }
        let mut field = FiniteField {
            p,
            degree,
            order,
            modulus,
            generator: generator as u32,
            exp,
            log,
            basis_traces: Vec::new(),
        };
        field.basis_traces = (0..degree)
            .map(|k| {
                let tk = p.pow(k as u32);
                let mut x = tk;
                let mut acc = 0u32;
                for _ in 0..degree {
                    acc = field.add(acc, x);
                    x = field.frobenius(x);
                }
                debug_assert!(acc < p);
                acc
            })
            .collect();
        Ok(field)
    }

    pub fn characteristic(&self) -> u32 {
        self.p
    }

    /// Degree over the prime field.
    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn order(&self) -> u64 {
        self.order
    }

    /// Monic defining polynomial over F_p, low degree first.
    pub fn modulus(&self) -> &[u32] {
        &self.modulus
    }

    /// The primitive element used for logarithms (least packed value of full order).
    pub fn generator(&self) -> u32 {
        self.generator
    }

    pub fn coeffs(&self, x: u32) -> Vec<u32> {
        fp_poly::unpack(x as u64, self.p, self.degree)
    }

    pub fn from_coeffs(&self, c: &[u32]) -> u32 {
        fp_poly::pack(c, self.p) as u32
    }

    pub fn add(&self, x: u32, y: u32) -> u32 {
        let p = self.p;
        let (mut x, mut y) = (x, y);
        let (mut out, mut scale) = (0u32, 1u32);
        while x > 0 || y > 0 {
            out += ((x % p + y % p) % p) * scale;
            x /= p;
            y /= p;
            scale = scale.wrapping_mul(p);
        }
        out
    }

    pub fn neg(&self, x: u32) -> u32 {
        let p = self.p;
        let (mut x, mut out, mut scale) = (x, 0u32, 1u32);
        while x > 0 {
            out += ((p - x % p) % p) * scale;
            x /= p;
            scale = scale.wrapping_mul(p);
        }
        out
    }

    pub fn sub(&self, x: u32, y: u32) -> u32 {
        self.add(x, self.neg(y))
    }

    pub fn mul(&self, x: u32, y: u32) -> u32 {
        if x == 0 || y == 0 {
            return 0;
        }
        let k = (self.log[x as usize] as u64 + self.log[y as usize] as u64) % (self.order - 1);
        self.exp[k as usize]
    }

    pub fn pow(&self, x: u32, e: u64) -> u32 {
        if e == 0 {
            return 1;
        }
        if x == 0 {
            return 0;
        }
        let k = (self.log[x as usize] as u128 * e as u128) % (self.order as u128 - 1);
        self.exp[k as usize]
    }

    pub fn inv(&self, x: u32) -> Option<u32> {
        if x == 0 {
            return None;
        }
        let n = self.order - 1;
        Some(self.exp[((n - self.log[x as usize] as u64) % n) as usize])
    }

    /// Discrete logarithm to the base `generator()`.
    pub fn log(&self, x: u32) -> Option<u64> {
        (x != 0).then(|| self.log[x as usize] as u64)
    }

    /// `generator()^k`.
    pub fn exp(&self, k: u64) -> u32 {
        self.exp[(k % (self.order - 1)) as usize]
    }

    /// Absolute Frobenius x -> x^p.
    pub fn frobenius(&self, x: u32) -> u32 {
        self.pow(x, self.p as u64)
    }

    /// Absolute trace to F_p, returned as an integer in 0..p.
    pub fn trace(&self, x: u32) -> u32 {
        let c = self.coeffs(x);
        let s: u64 = c
            .iter()
            .zip(&self.basis_traces)
            .map(|(&a, &b)| a as u64 * b as u64)
            .sum();
        (s % self.p as u64) as u32
    }

    /// Evaluate a polynomial with F_p coefficients (low degree first) at `x`.
    pub fn eval_fp_poly(&self, g: &[u32], x: u32) -> u32 {
        g.iter().rev().fold(0, |acc, &c| self.add(self.mul(acc, x), c))
    }

    pub fn elements(&self) -> impl Iterator<Item = u32> {
        0..self.order as u32
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn f4_trace_of_generator_root() {
        let f = FiniteField::new(2, 2).unwrap();
        assert_eq!(f.modulus(), &[1, 1, 1]);
        let xi = 2; // t
        assert_eq!(f.mul(xi, xi), f.add(xi, 1));
        assert_eq!(f.trace(xi), 1);
        assert_eq!(f.trace(0), 0);
        assert_eq!(f.trace(1), 0);
    }

    #[test]
    fn trace_of_one_is_degree() {
        for (p, k) in [(3u32, 2usize), (5, 3), (2, 5)] {
            let f = FiniteField::new(p, k).unwrap();
            assert_eq!(f.trace(1), (k as u32) % p);
        }
    }

    #[test]
    fn trace_is_frobenius_invariant_and_additive() {
        let f = FiniteField::new(3, 3).unwrap();
        for x in f.elements() {
            assert_eq!(f.trace(f.frobenius(x)), f.trace(x));
            let y = f.mul(x, 7);
            assert_eq!(f.trace(f.add(x, y)), (f.trace(x) + f.trace(y)) % 3);
        }
        let hit: std::collections::BTreeSet<u32> = f.elements().map(|x| f.trace(x)).collect();
        assert_eq!(hit.len(), 3);
    }

    #[test]
    fn generator_has_full_order() {
        let f = FiniteField::new(3, 2).unwrap();
        let g = f.generator();
        let mut x = g;
        let mut ord = 1;
        while x != 1 {
            x = f.mul(x, g);
            ord += 1;
        }
        assert_eq!(ord, 8);
        for x in 1..9 {
            assert_eq!(f.mul(x, f.inv(x).unwrap()), 1);
        }
    }
}

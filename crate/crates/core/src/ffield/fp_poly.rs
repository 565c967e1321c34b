//! Dense polynomials over the prime field F_p, stored low degree first.

pub(crate) fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

pub(crate) fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            out.push(d);
            while n % d == 0 {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

fn trim(a: &mut Vec<u32>) {
    while a.last() == Some(&0) {
        a.pop();
    }
}

pub(crate) fn inv_mod_p(a: u32, p: u32) -> u32 {
    let (mut r, mut base, mut e) = (1u64, a as u64 % p as u64, p as u64 - 2);
    while e > 0 {
        if e & 1 == 1 {
            r = r * base % p as u64;
        }
        base = base * base % p as u64;
        e >>= 1;
    }
    r as u32
}

pub(crate) fn sub(a: &[u32], b: &[u32], p: u32) -> Vec<u32> {
    let n = a.len().max(b.len());
    let mut out: Vec<u32> = (0..n)
        .map(|i| {
            let x = a.get(i).copied().unwrap_or(0);
            let y = b.get(i).copied().unwrap_or(0);
            (x + p - y) % p
        })
        .collect();
    trim(&mut out);
    out
}

pub(crate) fn mul(a: &[u32], b: &[u32], p: u32) -> Vec<u32> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![0u64; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        for (j, &y) in b.iter().enumerate() {
            out[i + j] = (out[i + j] + x as u64 * y as u64) % p as u64;
        }
    }
    let mut out: Vec<u32> = out.into_iter().map(|c| c as u32).collect();
    trim(&mut out);
    out
}

/// Remainder of `a` modulo the nonzero polynomial `m`.
pub(crate) fn rem(a: &[u32], m: &[u32], p: u32) -> Vec<u32> {
    let mut r = a.to_vec();
    trim(&mut r);
    let mut m = m.to_vec();
    trim(&mut m);
    let dm = m.len() - 1;
    let lead_inv = inv_mod_p(m[dm], p);
    while r.len() > dm {
        let dr = r.len() - 1;
        let c = (r[dr] as u64 * lead_inv as u64 % p as u64) as u32;
        for (j, &mj) in m.iter().enumerate() {
            let idx = dr - dm + j;
            r[idx] = ((r[idx] as u64 + (p - c) as u64 * mj as u64) % p as u64) as u32;
        }
        trim(&mut r);
    }
    r
}

pub(crate) fn mulmod(a: &[u32], b: &[u32], m: &[u32], p: u32) -> Vec<u32> {
    rem(&mul(a, b, p), m, p)
}

pub(crate) fn powmod(a: &[u32], mut e: u64, m: &[u32], p: u32) -> Vec<u32> {
    let mut result = vec![1u32];
    let mut base = rem(a, m, p);
    while e > 0 {
        if e & 1 == 1 {
            result = mulmod(&result, &base, m, p);
        }
        base = mulmod(&base, &base, m, p);
        e >>= 1;
    }
    result
}

pub(crate) fn gcd(a: &[u32], b: &[u32], p: u32) -> Vec<u32> {
    let mut x = a.to_vec();
    let mut y = b.to_vec();
    trim(&mut x);
    trim(&mut y);
    while !y.is_empty() {
        let r = rem(&x, &y, p);
        x = y;
        y = r;
    }
    x
}

/// Ben-Or irreducibility test for a monic polynomial of degree >= 1.
pub(crate) fn is_irreducible(g: &[u32], p: u32) -> bool {
    let deg = g.len() - 1;
    if deg == 1 {
        return true;
    }
    let x = vec![0u32, 1];
    let mut h = x.clone();
    for _ in 1..=deg / 2 {
        h = powmod(&h, p as u64, g, p);
        let diff = sub(&h, &x, p);
        let common = gcd(g, &diff, p);
        if common.len() > 1 {
            return false;
        }
    }
    true
}

/// Least irreducible monic polynomial of the given degree, ordering candidates
/// by the base-p integer formed from their lower coefficients (constant term
/// least significant).
pub(crate) fn least_irreducible(p: u32, degree: usize) -> Vec<u32> {
    let mut packed: u64 = 0;
    loop {
        let mut g = unpack(packed, p, degree);
        g.push(1);
        if is_irreducible(&g, p) {
            return g;
        }
        packed += 1;
    }
}

pub(crate) fn unpack(mut v: u64, p: u32, len: usize) -> Vec<u32> {
    (0..len)
        .map(|_| {
            let d = (v % p as u64) as u32;
            v /= p as u64;
            d
        })
        .collect()
}

pub(crate) fn pack(c: &[u32], p: u32) -> u64 {
    c.iter().rev().fold(0u64, |acc, &d| acc * p as u64 + d as u64)
}

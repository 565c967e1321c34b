use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

/// Coefficients `c_0..c_D` of the Artin–Hasse exponential
/// `E(z) = exp(sum_{i>=0} z^{p^i}/p^i)`, exact.
///
/// From `E' = E * sum_i z^{p^i - 1}`: `n c_n = sum_{p^i <= n} c_{n - p^i}`.
pub fn artin_hasse_coefficients(p: u64, degree: usize) -> Vec<BigRational> {
    let mut c: Vec<BigRational> = Vec::with_capacity(degree + 1);
    c.push(BigRational::one());
    for n in 1..=degree {
        let mut s = BigRational::zero();
        let mut pi = 1usize;
        while pi <= n {
            s += &c[n - pi];
            pi *= p as usize;
        }
        c.push(s / BigRational::from_integer(BigInt::from(n)));
    }
    c
}

/// True when the denominator of `x` is prime to `p`.
pub fn is_p_integral(x: &BigRational, p: u64) -> bool {
    !(x.denom() % BigInt::from(p)).is_zero()
}

/// Dwork's two-variable splitting series
/// `F(X, Y) = (1 + Y)^X * prod_{j>=1} (1 + Y^{p^j})^{(X^{p^j} - X^{p^{j-1}})/p^j}`
/// as exact coefficients `a[i][k]` of `X^i Y^k`, `i <= x_degree`, `k <= y_degree`.
///
/// Computed as `exp` of
/// `X log(1+Y) + sum_j (X^{p^j} - X^{p^{j-1}})/p^j * log(1 + Y^{p^j})`
/// through the recursion `k F_k = sum_{l=1}^k l G_l F_{k-l}` in the Y-degree.
/// Every `a[i][k]` is p-integral and vanishes for `k < i`.
pub fn dwork_bivariate(p: u64, x_degree: usize, y_degree: usize) -> Vec<Vec<BigRational>> {
    let zero_poly = || vec![BigRational::zero(); x_degree + 1];
    // g[k] is the X-polynomial multiplying Y^k in the logarithm
    let mut g = vec![zero_poly(); y_degree + 1];
    let log_coeff = |l: usize| -> BigRational {
        let sign = if l % 2 == 1 { 1 } else { -1 };
        BigRational::new(BigInt::from(sign), BigInt::from(l))
    };
    for l in 1..=y_degree {
        if x_degree >= 1 {
            g[l][1] += log_coeff(l);
        }
    }
    let mut pj = p as usize;
    let mut pj_prev = 1usize;
    while pj <= y_degree {
        let inv = BigRational::new(BigInt::one(), BigInt::from(pj));
        let mut l = 1;
        while l * pj <= y_degree {
            let c = log_coeff(l) * &inv;
            if pj <= x_degree {
                g[l * pj][pj] += &c;
            }
            if pj_prev <= x_degree {
                g[l * pj][pj_prev] -= &c;
            }
            l += 1;
        }
        pj_prev = pj;
        pj *= p as usize;
    }
    let mut f = vec![zero_poly(); y_degree + 1];
    f[0][0] = BigRational::one();
    for k in 1..=y_degree {
        let mut acc = zero_poly();
        for l in 1..=k {
            let gl = &g[l];
            let fk = &f[k - l];
            let scale = BigRational::from_integer(BigInt::from(l));
            for (i, gi) in gl.iter().enumerate() {
                if gi.is_zero() {
                    continue;
                }
                let gi = gi * &scale;
                for (i2, fv) in fk.iter().enumerate() {
                    if i + i2 > x_degree {
                        break;
                    }
                    if !fv.is_zero() {
                        acc[i + i2] += &gi * fv;
                    }
                }
            }
        }
        let inv_k = BigRational::new(BigInt::one(), BigInt::from(k));
        f[k] = acc.into_iter().map(|v| v * &inv_k).collect();
    }
    (0..=x_degree)
        .map(|i| (0..=y_degree).map(|k| f[k][i].clone()).collect())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn leading_coefficients() {
        for p in [2u64, 3, 5, 7] {
            let c = artin_hasse_coefficients(p, 4);
            assert_eq!(c[0], q(1, 1));
            assert_eq!(c[1], q(1, 1));
        }
        assert_eq!(artin_hasse_coefficients(3, 2)[2], q(1, 2));
        assert_eq!(artin_hasse_coefficients(2, 2)[2], q(1, 1));
    }

    #[test]
    fn p_integral_to_degree_64() {
        for p in [2u64, 3, 5] {
            for c in artin_hasse_coefficients(p, 64) {
                assert!(is_p_integral(&c, p), "p = {p}: {c}");
            }
        }
    }

    #[test]
    fn bivariate_is_integral_and_upper_triangular() {
        for p in [2u64, 3, 5] {
            let a = dwork_bivariate(p, 12, 12);
            for (i, row) in a.iter().enumerate() {
                for (k, v) in row.iter().enumerate() {
                    assert!(is_p_integral(v, p), "p={p} a[{i}][{k}] = {v}");
                    if k < i {
                        assert!(v.is_zero(), "p={p} a[{i}][{k}] = {v}");
                    }
                }
            }
        }
    }

    #[test]
    fn bivariate_at_x_one_is_one_plus_y() {
        let a = dwork_bivariate(3, 10, 10);
        for k in 0..=10 {
            let s: BigRational = a.iter().map(|row| row[k].clone()).sum();
            let expect = if k <= 1 { q(1, 1) } else { q(0, 1) };
            assert_eq!(s, expect, "Y^{k}");
        }
    }
}

use std::sync::Arc;

use super::algebra::Algebra;
use super::matrix::Matrix;
use crate::error::{Error, Result};
use crate::padic::{RingContext, RingElement};
use crate::series::TSeries;

/// Coefficients of `det(1 - A T)` up to `T^k`, by the division-free Berkowitz
/// recursion truncated at degree `k`.
pub fn berkowitz<A: Algebra>(m: &Matrix<A>, k: usize) -> Result<Vec<A>> {
    let n = m.rows();
    if n != m.cols() {
        return Err(Error::Invalid("characteristic polynomial of a non-square matrix".into()));
    }
    if n == 0 {
        return Err(Error::Invalid("empty matrix".into()));
    }
    let proto = m.get(0, 0);
    let one = proto.one_like();
    let mut vect = vec![one.clone(), m.get(0, 0).neg()];
    vect.truncate(k + 1);
    for r in 1..n {
        let len = (r + 2).min(k + 1);
        // col = [1, -a, -R C, -R A C, ..., -R A^{len-3} C]
        let mut col = Vec::with_capacity(len);
        col.push(one.clone());
        if len > 1 {
            col.push(m.get(r, r).neg());
        }
        let mut v: Vec<A> = (0..r).map(|i| m.get(i, r).clone()).collect();
        for step in 2..len {
            let rc = A::dot(proto, (0..r).map(|j| m.get(r, j)).zip(v.iter()));
            col.push(rc.neg());
            if step + 1 < len {
                v = (0..r)
                    .map(|i| A::dot(proto, (0..r).map(|j| m.get(i, j)).zip(v.iter())))
                    .collect();
            }
        }
        let mut next = Vec::with_capacity(len);
        for i in 0..len {
            let lo = i.saturating_sub(col.len() - 1);
            let hi = i.min(vect.len() - 1);
            next.push(A::dot(proto, (lo..=hi).map(|j| (&col[i - j], &vect[j]))));
        }
        vect = next;
    }
    Ok(vect)
}

/// Determinant; cofactor expansion up to size 4, Berkowitz beyond.
pub fn determinant<A: Algebra>(m: &Matrix<A>) -> Result<A> {
    let n = m.rows();
    if n <= 4 {
        return Ok(m.determinant_laplace());
    }
    let c = berkowitz(m, n)?;
    Ok(if n % 2 == 0 { c[n].clone() } else { c[n].neg() })
}

/// `Tr(F^m)` for `1 <= m <= degree`, from `F, ..., F^h`, `h = ceil(degree / 2)`.
pub fn power_traces(f: &Matrix<RingElement>, degree: usize) -> Result<Vec<RingElement>> {
    if degree == 0 {
        return Ok(Vec::new());
    }
    let h = degree.div_ceil(2);
    let mut powers = vec![f.clone()];
    for _ in 1..h {
        let next = powers.last().unwrap().mul_sparse(f)?;
        powers.push(next);
    }
    let mut traces = Vec::with_capacity(degree);
    for m in 1..=degree {
        let t = if m <= h {
            powers[m - 1].trace()
        } else {
            powers[h - 1].trace_of_product(&powers[m - h - 1])
        };
        traces.push(t);
    }
    Ok(traces)
}

/// `det(1 - F T)` from power traces: `exp(-sum Tr(F^m) T^m / m)`.
pub fn fredholm_from_traces(ctx: &Arc<RingContext>, traces: &[RingElement]) -> Result<TSeries> {
    let sums: Vec<RingElement> = traces.iter().map(|t| -t).collect();
    TSeries::exp_of_sums(ctx, &sums)
}

/// `det(1 - F T)` truncated at `T^degree` via Newton's identities.
pub fn fredholm(f: &Matrix<RingElement>, degree: usize) -> Result<TSeries> {
    let ctx = f.get(0, 0).ctx().clone();
    fredholm_from_traces(&ctx, &power_traces(f, degree)?)
}

/// `det(1 - F T)` from principal minors: `c_k = (-1)^k sum_{|S| = k} det F_S`.
/// Exponential in the dimension; used as an independent check.
pub fn fredholm_minors(f: &Matrix<RingElement>, degree: usize) -> Result<TSeries> {
    let n = f.rows();
    if n > 12 {
        return Err(Error::Invalid(format!("minor expansion limited to dimension 12, got {n}")));
    }
    let ctx = f.get(0, 0).ctx().clone();
    let mut coeffs = vec![RingElement::zero(&ctx); degree + 1];
    coeffs[0] = RingElement::one(&ctx);
    for mask in 1u32..(1 << n) {
        let k = mask.count_ones() as usize;
        if k > degree {
            continue;
        }
        let idx: Vec<usize> = (0..n).filter(|&i| mask >> i & 1 == 1).collect();
        let det = f.select(&idx, &idx).determinant_laplace();
        coeffs[k] = if k % 2 == 0 { &coeffs[k] + &det } else { &coeffs[k] - &det };
    }
    TSeries::new(coeffs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::padic::make_ring_context;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_matrix(ctx: &Arc<RingContext>, n: usize, rng: &mut ChaCha8Rng) -> Matrix<RingElement> {
        let pi = RingElement::uniformizer(ctx);
        Matrix::from_fn(n, n, |i, j| {
            let v: i64 = rng.gen_range(-50..50);
            let x = RingElement::from_int(ctx, v);
            if i > j { &x * &pi } else { x }
        })
    }

    #[test]
    fn three_ways_agree() {
        let ctx = make_ring_context(3, 1, 1, 20).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for n in 1..=6 {
            let m = random_matrix(&ctx, n, &mut rng);
            let b = berkowitz(&m, n).unwrap();
            let minors = fredholm_minors(&m, n).unwrap();
            for k in 0..=n {
                assert_eq!(b[k], *minors.coeff(k), "n={n} k={k}");
            }
        }
    }

    #[test]
    fn newton_matches_minors_on_contracting_matrix() {
        let ctx = make_ring_context(3, 1, 1, 24).unwrap();
        let pi = RingElement::uniformizer(&ctx);
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let m = random_matrix(&ctx, 5, &mut rng).map(|x| x * &pi);
        let newton = fredholm(&m, 5).unwrap();
        let minors = fredholm_minors(&m, 5).unwrap();
        let cmp = newton.compare(&minors, 24).unwrap();
        assert!(cmp.min_valuation >= 18, "{cmp:?}");
    }

    #[test]
    fn truncated_berkowitz_is_prefix() {
        let ctx = make_ring_context(2, 1, 1, 16).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let m = random_matrix(&ctx, 7, &mut rng);
        let full = berkowitz(&m, 7).unwrap();
        let part = berkowitz(&m, 3).unwrap();
        assert_eq!(&full[..4], &part[..]);
    }

    #[test]
    fn determinant_of_triangular() {
        let ctx = make_ring_context(5, 1, 1, 10).unwrap();
        let m = Matrix::from_fn(6, 6, |i, j| {
            if i <= j { RingElement::from_int(&ctx, (i + j + 1) as i64) } else { RingElement::zero(&ctx) }
        });
        let det = determinant(&m).unwrap();
        assert_eq!(det, RingElement::from_int(&ctx, 1 * 3 * 5 * 7 * 9 * 11));
    }
}

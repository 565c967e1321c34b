use std::collections::HashMap;
use std::sync::Arc;

use num_bigint::BigInt;
use serde::Serialize;

use super::basis::MomentBasis;
use super::system::{MomentMode, MomentSystem};
use crate::dwork::FiberEvaluator;
use crate::error::Result;
use crate::ffield::ClosedPoint;
use crate::linalg::{Algebra, Matrix};
use crate::padic::{binomial_signed, default_digit_count, PAdicExponent, RingElement};

#[derive(Debug, Clone, Serialize)]
pub struct BinomialIdentityReport {
    pub m: u32,
    /// `(-1)^{s-1} (s-1) binom(m+1, s)` for `s = 0..=m+1`, with `(-1)^{-1} = -1`.
    pub terms: Vec<String>,
    pub sum: String,
    pub is_zero: bool,
}

/// Exact evaluation of `sum_{s=0}^{m+1} (-1)^{s-1} (s-1) binom(m+1, s)`.
pub fn binomial_identity_check(m: u32) -> BinomialIdentityReport {
    let n = BigInt::from(m + 1);
    let terms: Vec<BigInt> = (0..=m as usize + 1)
        .map(|s| binomial_signed(&n, s as u64) * super::assembly_exponent(s))
        .collect();
    let sum: BigInt = terms.iter().sum();
    BinomialIdentityReport {
        m,
        terms: terms.iter().map(ToString::to_string).collect(),
        is_zero: sum == BigInt::from(0),
        sum: sum.to_string(),
    }
}

/// One column of `[phi]_{kappa; m} - [phi]_kappa` against its bound.
#[derive(Debug, Clone, Serialize)]
pub struct LimitSample {
    pub m: usize,
    pub k_m: String,
    pub column: Vec<usize>,
    pub valuation: u32,
    pub bound: u32,
    pub passed: bool,
}

/// Checks `|([phi]_{kappa; m} - [phi]_kappa) e_I|` against
/// `|pi p^{m+1}| |pi^l|` when `l <= k_m` and `|pi^l|` otherwise, `l = length(e_I)`,
/// both capped at the working precision.
pub fn operator_limit_check<C: Algebra>(
    system: &MomentSystem<C>,
    kappa: &PAdicExponent,
    ms: &[usize],
    columns: Option<&[usize]>,
) -> Result<Vec<LimitSample>> {
    let basis = system.basis();
    let n = system.precision();
    let exact = system.matrix(kappa, MomentMode::ExactKappa)?;
    let e = exact.get(0, 0).ring().ramification() as u32;
    let all: Vec<usize> = (0..basis.len()).collect();
    let columns = columns.unwrap_or(&all);
    let mut out = Vec::new();
    for &m in ms {
        let truncated = system.matrix(kappa, MomentMode::TruncatedAt(m))?;
        let k_m = kappa.truncation(m);
        for &col in columns {
            let l = basis.length(col);
            let valuation = (0..basis.len())
                .map(|row| exact.get(row, col).sub(truncated.get(row, col)).min_valuation())
                .min()
                .unwrap_or(n);
            let within = num_bigint::BigUint::from(l) <= k_m;
            let raw = if within { 1 + e * (m as u32 + 1) + l as u32 } else { l as u32 };
            let bound = raw.min(n);
            out.push(LimitSample {
                m,
                k_m: k_m.to_string(),
                column: basis.monomial(col).to_vec(),
                valuation,
                bound,
                passed: valuation >= bound,
            });
        }
    }
    Ok(out)
}

/// Least valuation of `M(B(x^{q^{j-1}})) ... M(B(x)) - M(B(x^{q^{j-1}}) ... B(x))`
/// at a closed point, `M` the exact moment map.
pub fn semigroup_check(
    fibers: &FiberEvaluator,
    basis: &Arc<MomentBasis>,
    kappa: &PAdicExponent,
    pt: &ClosedPoint,
    j: usize,
) -> Result<u32> {
    let d = pt.degree;
    let q = fibers.tower().fields().q();
    let group = fibers.tower().fields().field(d)?.order() - 1;
    let mut logs = pt.representative.clone();
    let mut product: Option<Matrix<RingElement>> = None;
    let mut moments: Option<Matrix<RingElement>> = None;
    for _ in 0..j {
        let b = fibers.matrix_at(d, &logs)?;
        let m = MomentSystem::new(basis.clone(), &b)?.matrix(kappa, MomentMode::ExactKappa)?;
        moments = Some(match moments {
            Some(acc) => m.mul(&acc)?,
            None => m,
        });
        product = Some(match product {
            Some(acc) => b.mul(&acc)?,
            None => b,
        });
        logs = crate::ffield::frobenius_logs(&logs, q, group);
    }
    let (product, moments) = (product.unwrap(), moments.unwrap());
    let direct = MomentSystem::new(basis.clone(), &product)?.matrix(kappa, MomentMode::ExactKappa)?;
    Ok(difference_valuation(&moments, &direct))
}

fn difference_valuation<C: Algebra>(a: &Matrix<C>, b: &Matrix<C>) -> u32 {
    a.entries()
        .iter()
        .zip(b.entries())
        .map(|(x, y)| x.sub(y).min_valuation())
        .min()
        .unwrap_or(u32::MAX)
}

/// Compares the truncated moment matrix at integer `k` with `Sym^k B` expanded
/// directly on degree-`k` monomials of `e_0..e_{r-1}`, under
/// `e_I -> e_0^{k - |I|} e_I`. Returns the least valuation of the difference.
pub fn sym_check<C: Algebra>(b: &Matrix<C>, k: usize) -> Result<u32> {
    let r = b.rows();
    let proto = b.get(0, 0);
    let ctx = proto.ring();
    let basis = Arc::new(MomentBasis::new(r, k));
    let len = default_digit_count(ctx.p() as u32, ctx.precision());
    let kappa = PAdicExponent::from_i64(ctx.p() as u32, k as i64, len);
    let moment = MomentSystem::new(basis.clone(), b)?.matrix(&kappa, MomentMode::TruncatedAt(len - 1))?;
    let mut worst = u32::MAX;
    for col in 0..basis.len() {
        let mut factors = vec![0usize; k - basis.length(col)];
        factors.extend_from_slice(basis.monomial(col));
        let mut poly: HashMap<Vec<u32>, C> = HashMap::from([(vec![0u32; r], proto.one_like())]);
        for &j in &factors {
            let mut next: HashMap<Vec<u32>, C> = HashMap::new();
            for (mono, c) in &poly {
                for i in 0..r {
                    let mut w = mono.clone();
                    w[i] += 1;
                    let term = c.mul(b.get(i, j));
                    next.entry(w)
                        .and_modify(|x| *x = x.add(&term))
                        .or_insert(term);
                }
            }
            poly = next;
        }
        for row in 0..basis.len() {
            let mut mono = vec![(k - basis.length(row)) as u32];
            mono.extend_from_slice(basis.exponents(row));
            let expected = poly.get(&mono).cloned().unwrap_or_else(|| proto.zero_like());
            worst = worst.min(expected.sub(moment.get(row, col)).min_valuation());
        }
    }
    Ok(worst)
}

use std::sync::Arc;

use num_bigint::BigInt;
use rayon::prelude::*;
use serde::Serialize;

use super::basis::MomentBasis;
use crate::error::{Error, Result};
use crate::linalg::{Algebra, Matrix};
use crate::padic::{padic_binomial, PAdicExponent};

/// Which moment map a matrix represents.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum MomentMode {
    /// `[phi]_kappa`.
    ExactKappa,
    /// `[phi]_{kappa; m}`: `[phi]_{k_m}` on lengths `<= k_m`, zero beyond.
    TruncatedAt(usize),
}

/// Elements of `S = R[[e_1, ..., e_{r-1}]]` truncated to a [`MomentBasis`], as
/// coefficient vectors.
pub type MomentElement<C> = Vec<C>;

/// `a * b` in the truncated algebra; products of valuation `>= N` are skipped.
pub fn moment_mul<C: Algebra>(basis: &MomentBasis, a: &[C], b: &[C], precision: u32) -> MomentElement<C> {
    let zero = a[0].zero_like();
    let mut out = vec![zero; basis.len()];
    let vb: Vec<u32> = b.iter().map(|x| x.min_valuation()).collect();
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        let va = x.min_valuation();
        for (j, y) in b.iter().enumerate() {
            if va + vb[j] >= precision || y.is_zero() {
                continue;
            }
            if let Some(k) = basis.product(i, j) {
                out[k] = out[k].add(&x.mul(y));
            }
        }
    }
    out
}

/// The moment machinery of a rank-`r` matrix `B` (a family over series or a
/// fiber over the ring): `eta`, its powers and the per-variable step
/// `(1 + eta)^{-1} Upsilon(phi e_i)`.
pub struct MomentSystem<C> {
    basis: Arc<MomentBasis>,
    precision: u32,
    eta_powers: Vec<MomentElement<C>>,
    steps: Vec<MomentElement<C>>,
}

impl<C: Algebra> MomentSystem<C> {
    /// Requires the normalization `B ≡ E_00 mod pi` on the coordinates `eta` uses.
    pub fn new(basis: Arc<MomentBasis>, b: &Matrix<C>) -> Result<Self> {
        let r = basis.rank();
        if b.rows() != r || b.cols() != r {
            return Err(Error::Invalid(format!("matrix is {}x{}, basis has rank {r}", b.rows(), b.cols())));
        }
        let proto = b.get(0, 0);
        let precision = proto.ring().precision();
        let embed = |j: usize| -> MomentElement<C> {
            let mut v = vec![proto.zero_like(); basis.len()];
            v[0] = b.get(0, j).clone();
            for i in 1..r {
                if let Some(k) = basis.variable(i) {
                    v[k] = b.get(i, j).clone();
                }
            }
            v
        };
        let mut eta = embed(0);
        eta[0] = eta[0].sub(&proto.one_like());
        for (k, c) in eta.iter().enumerate() {
            if !c.is_zero() && c.min_valuation() == 0 {
                let row = if k == 0 { 0 } else { basis.monomial(k)[0] };
                let detail = if k == 0 {
                    "B_00 is not congruent to 1 mod pi".to_string()
                } else {
                    format!("B_{row}0 is not divisible by pi")
                };
                return Err(Error::Normalization { row, col: 0, detail });
            }
        }
        let mut one = vec![proto.zero_like(); basis.len()];
        one[0] = proto.one_like();
        let mut eta_powers = vec![one];
        for _ in 1..precision {
            let next = moment_mul(&basis, eta_powers.last().unwrap(), &eta, precision);
            if next.iter().all(Algebra::is_zero) {
                break;
            }
            eta_powers.push(next);
        }
        let mut system = MomentSystem {
            basis: basis.clone(),
            precision,
            eta_powers,
            steps: Vec::new(),
        };
        let mut inverse = vec![proto.zero_like(); basis.len()];
        for (j, pw) in system.eta_powers.iter().enumerate() {
            for (o, x) in inverse.iter_mut().zip(pw) {
                *o = if j % 2 == 0 { o.add(x) } else { o.sub(x) };
            }
        }
        system.steps = (1..r)
            .map(|i| moment_mul(&basis, &inverse, &embed(i), precision))
            .collect();
        Ok(system)
    }

    pub fn basis(&self) -> &Arc<MomentBasis> {
        &self.basis
    }

    pub fn precision(&self) -> u32 {
        self.precision
    }

    pub fn eta(&self) -> Option<&MomentElement<C>> {
        self.eta_powers.get(1)
    }

    fn proto(&self) -> &C {
        &self.eta_powers[0][0]
    }

    /// `(1 + eta)^kappa = sum_j binom(kappa, j) eta^j`.
    pub fn kappa_power(&self, kappa: &PAdicExponent) -> Result<MomentElement<C>> {
        let proto = self.proto();
        let ctx = proto.ring().clone();
        let mut out = vec![proto.zero_like(); self.basis.len()];
        for (j, pw) in self.eta_powers.iter().enumerate() {
            let c = padic_binomial(&ctx, kappa, j as u64, self.precision - j as u32)?;
            if c.is_zero() {
                continue;
            }
            for (o, x) in out.iter_mut().zip(pw) {
                if !x.is_zero() {
                    *o = o.add(&x.scale(&c));
                }
            }
        }
        Ok(out)
    }

    /// The matrix of the moment map on the basis (acting on column vectors).
    pub fn matrix(&self, kappa: &PAdicExponent, mode: MomentMode) -> Result<Matrix<C>> {
        let basis = &self.basis;
        let (head, cap) = match mode {
            MomentMode::ExactKappa => {
                if basis.exact_below() < self.precision {
                    return Err(Error::Invalid(format!(
                        "basis is exact only below pi^{}, precision is {}",
                        basis.exact_below(),
                        self.precision
                    )));
                }
                (self.kappa_power(kappa)?, usize::MAX)
            }
            MomentMode::TruncatedAt(m) => {
                let k = kappa.truncation(m);
                let k_small = usize::try_from(k.clone()).unwrap_or(usize::MAX);
                if basis.rank() > 1 && basis.max_length() < k_small.min(self.precision as usize - 1) {
                    return Err(Error::Invalid(format!("basis length {} is below k_m", basis.max_length())));
                }
                let km = PAdicExponent::from_integer(kappa.p(), &BigInt::from(k), kappa.len());
                (self.kappa_power(&km)?, k_small)
            }
        };
        let len = basis.len();
        let mut cols: Vec<Option<MomentElement<C>>> = vec![None; len];
        cols[0] = Some(head);
        let max_len = (0..len).map(|k| basis.length(k)).max().unwrap_or(0);
        for l in 1..=max_len {
            let layer: Vec<usize> = (0..len).filter(|&k| basis.length(k) == l).collect();
            let computed: Vec<(usize, MomentElement<C>)> = layer
                .par_iter()
                .map(|&k| {
                    let (parent, var) = basis.parent(k).expect("non-empty monomial");
                    let prev = cols[parent].as_ref().expect("parents precede children");
                    (k, moment_mul(basis, prev, &self.steps[var - 1], self.precision))
                })
                .collect();
            for (k, c) in computed {
                cols[k] = Some(c);
            }
        }
        let zero = self.proto().zero_like();
        Ok(Matrix::from_fn(len, len, |row, col| {
            if basis.length(col) > cap {
                zero.clone()
            } else {
                cols[col].as_ref().unwrap()[row].clone()
            }
        }))
    }
}

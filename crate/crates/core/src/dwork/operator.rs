use std::sync::Arc;

use rayon::prelude::*;
use serde::Serialize;

use super::fiber::FiberEvaluator;
use super::frobenius::build_frobenius_series;
use super::poly::TorusPolynomial;
use super::splitting::SplittingFunction;
use crate::error::{Error, Result};
use crate::linalg::{power_traces, Matrix};
use crate::padic::{sum, RingContext, RingElement, RingTower};
use crate::series::{MultiSeries, TSeries};

/// The block matrix `F_B = (B_{qu - v})` on `[0, U]^n x {0..r-1}`, with indices
/// whose row or column vanishes mod `pi^N` removed (this leaves `det(1 - F T)`
/// and every power trace unchanged).
#[derive(Debug, Clone)]
pub struct BlockOperator {
    q: u64,
    bound: usize,
    family: Matrix<MultiSeries>,
    retained: Vec<(Vec<usize>, usize)>,
    matrix: Matrix<RingElement>,
}

impl BlockOperator {
    /// Assembles `F_B` over the box `[0, bound]^n`. The default box
    /// `floor(e / (q - 1))`, `e` the largest exponent coordinate of `B`, holds every
    /// index lying on a cycle of the operator graph, so it is exact.
    pub fn assemble(family: &Matrix<MultiSeries>, q: u64, bound: Option<usize>) -> Result<Self> {
        let r = family.rows();
        if r == 0 || family.cols() != r {
            return Err(Error::Invalid("B must be a non-empty square matrix".into()));
        }
        let first = family.get(0, 0);
        let (ctx, n) = (first.ctx().clone(), first.nvars());
        let e = family.entries().iter().map(MultiSeries::max_exponent).max().unwrap_or(0);
        let bound = bound.unwrap_or(e / (q as usize - 1));
        let side = bound + 1;
        let boxes = side.checked_pow(n as u32).ok_or_else(|| Error::Invalid("box too large".into()))?;
        let dim = boxes * r;
        let point = |mut idx: usize| -> Vec<usize> {
            (0..n)
                .map(|_| {
                    let x = idx % side;
                    idx /= side;
                    x
                })
                .collect()
        };
        let flat = |u: &[usize]| u.iter().rev().fold(0, |acc, &x| acc * side + x);
        let terms: Vec<Vec<(Vec<usize>, &RingElement)>> = family
            .entries()
            .iter()
            .map(|s| s.terms().filter(|(_, c)| !c.is_zero()).collect())
            .collect();
        let rows: Vec<Vec<(usize, RingElement)>> = (0..dim)
            .into_par_iter()
            .map(|row| {
                let (u, i) = (point(row / r), row % r);
                let mut out = Vec::new();
                for j in 0..r {
                    for (w, c) in &terms[i * r + j] {
                        let v: Option<Vec<usize>> = u
                            .iter()
                            .zip(w)
                            .map(|(&a, &b)| (q as usize * a).checked_sub(b).filter(|&x| x <= bound))
                            .collect();
                        if let Some(v) = v {
                            out.push((flat(&v) * r + j, (*c).clone()));
                        }
                    }
                }
                out.sort_by_key(|(k, _)| *k);
                out
            })
            .collect();
        let mut alive = vec![true; dim];
        loop {
            let mut col_live = vec![false; dim];
            let mut row_live = vec![false; dim];
            for (k, row) in rows.iter().enumerate() {
                if !alive[k] {
                    continue;
                }
                for (c, _) in row.iter().filter(|(c, _)| alive[*c]) {
                    col_live[*c] = true;
                    row_live[k] = true;
                }
            }
            let mut changed = false;
            for k in 0..dim {
                if alive[k] && !(row_live[k] && col_live[k]) {
                    alive[k] = false;
                    changed = true;
                }
            }
            if !changed {
                break;
            }
        }
        let kept: Vec<usize> = (0..dim).filter(|&k| alive[k]).collect();
        let mut position = vec![usize::MAX; dim];
        for (pos, &k) in kept.iter().enumerate() {
            position[k] = pos;
        }
        let zero = RingElement::zero(&ctx);
        let mut matrix = Matrix::zeros(&zero, kept.len(), kept.len());
        for (pos, &k) in kept.iter().enumerate() {
            for (c, x) in &rows[k] {
                if position[*c] != usize::MAX {
                    matrix.set(pos, position[*c], x.clone());
                }
            }
        }
        let retained = kept.iter().map(|&k| (point(k / r), k % r)).collect();
        Ok(BlockOperator {
            q,
            bound,
            family: family.clone(),
            retained,
            matrix,
        })
    }

    pub fn ctx(&self) -> &Arc<RingContext> {
        self.family.get(0, 0).ctx()
    }

    pub fn bound(&self) -> usize {
        self.bound
    }

    pub fn rank(&self) -> usize {
        self.family.rows()
    }

    pub fn nvars(&self) -> usize {
        self.family.get(0, 0).nvars()
    }

    /// `r (U + 1)^n`, the size of the unpruned operator.
    pub fn full_dimension(&self) -> usize {
        self.rank() * (self.bound + 1).pow(self.nvars() as u32)
    }

    /// Size of the retained matrix.
    pub fn dimension(&self) -> usize {
        self.retained.len()
    }

    pub fn retained(&self) -> &[(Vec<usize>, usize)] {
        &self.retained
    }

    pub fn matrix(&self) -> &Matrix<RingElement> {
        &self.matrix
    }

    /// `(B_{qu - v})_{ij}` for any in-box indices, zero outside the support of `B`.
    pub fn entry(&self, u: &[usize], i: usize, v: &[usize], j: usize) -> RingElement {
        let e = self.family.get(i, j);
        let w: Option<Vec<usize>> = u
            .iter()
            .zip(v)
            .map(|(&a, &b)| (self.q as usize * a).checked_sub(b))
            .collect();
        match w {
            Some(w) => e.coeff(&w),
            None => RingElement::zero(e.ctx()),
        }
    }

    /// `Tr(F^m)` for `1 <= m <= degree`.
    pub fn power_traces(&self, degree: usize) -> Result<Vec<RingElement>> {
        if self.dimension() == 0 {
            return Ok(vec![RingElement::zero(self.ctx()); degree]);
        }
        power_traces(&self.matrix, degree)
    }
}

/// `det(1 - F T)` truncated at `T^degree`, via power traces and Newton's identities.
pub fn fredholm_determinant(op: &BlockOperator, degree: usize) -> Result<TSeries> {
    crate::linalg::fredholm_from_traces(op.ctx(), &op.power_traces(degree)?)
}

/// `(g^{delta^n})^{(-1)^{n+1}}`: the torus L-function from a Fredholm determinant.
pub fn l_from_fredholm(det: &TSeries, n: usize) -> Result<TSeries> {
    let g = det.delta(n)?;
    if n % 2 == 0 {
        g.inv()
    } else {
        Ok(g)
    }
}

/// `L(f, G_m^n / F_q, T)` to `T^degree` from the rank-one operator `F_{F_a}`.
pub fn classical_l(
    f: &TorusPolynomial,
    theta: &SplittingFunction,
    degree: usize,
    bound: Option<usize>,
) -> Result<TSeries> {
    let fa = build_frobenius_series(f, theta, None)?;
    let family = Matrix::from_fn(1, 1, |_, _| fa.clone());
    let op = BlockOperator::assemble(&family, theta.ctx().q(), bound)?;
    l_from_fredholm(&fredholm_determinant(&op, degree)?, f.nvars())
}

/// Both sides of `(q^m - 1)^n Tr(F_B^m) = sum_x Tr(B(x̂^{q^{m-1}}) ... B(x̂))`.
#[derive(Debug, Clone, Serialize)]
pub struct TraceReport {
    pub m: usize,
    pub lhs: RingElement,
    pub rhs: RingElement,
    pub difference_valuation: u32,
}

/// Evaluates both sides of the trace formula for `1 <= m <= max_m`; the tower
/// needs levels up to `max_m`.
pub fn trace_formula_check(
    family: &Matrix<MultiSeries>,
    tower: &RingTower,
    max_m: usize,
    bound: Option<usize>,
) -> Result<Vec<TraceReport>> {
    let ctx = tower.base();
    let q = ctx.q();
    let n = family.get(0, 0).nvars();
    let op = BlockOperator::assemble(family, q, bound)?;
    let traces = op.power_traces(max_m)?;
    let fibers = FiberEvaluator::new(tower, family)?;
    let mut out = Vec::with_capacity(max_m);
    for (m, trace) in (1..=max_m).zip(&traces) {
        let scale = RingElement::from_int(ctx, (q.pow(m as u32) - 1) as i64).pow(n as u64);
        let lhs = &scale * trace;
        let points: Vec<Vec<u64>> = tower.fields().enumerate_torus(n, m)?.map(|pt| pt.logs).collect();
        let level = tower.level(m)?;
        let terms = points
            .par_iter()
            .map(|logs| Ok(fibers.iterate(m, logs, m)?.trace()))
            .collect::<Result<Vec<_>>>()?;
        let rhs = sum(level, &terms);
        let difference_valuation = tower.embed(&lhs, m)?.diff_valuation(&rhs);
        out.push(TraceReport {
            m,
            lhs,
            rhs,
            difference_valuation,
        });
    }
    Ok(out)
}

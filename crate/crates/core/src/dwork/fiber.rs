use std::sync::{Arc, OnceLock};

use crate::error::{Error, Result};
use crate::ffield::ClosedPoint;
use crate::linalg::{berkowitz, Matrix};
use crate::padic::{dot, RingContext, RingElement, RingTower};
use crate::series::{MultiSeries, TSeries};

/// Largest multiplicative group whose Teichmüller powers are tabulated.
const POWER_TABLE_LIMIT: u64 = 1 << 17;

/// Specializes a family matrix `B(x)` at Teichmüller points of the torus and
/// composes fiber Frobenius matrices. Per-level data is built on first use.
pub struct FiberEvaluator<'a> {
    tower: &'a RingTower,
    matrix: &'a Matrix<MultiSeries>,
    levels: Vec<OnceLock<Result<Level>>>,
}

struct Level {
    ctx: Arc<RingContext>,
    group: u64,
    /// Nonzero terms of each entry with coefficients embedded in this level.
    terms: Vec<Vec<(Vec<u64>, RingElement)>>,
    powers: Option<Vec<RingElement>>,
    generator: RingElement,
}

impl Level {
    fn teichmuller_power(&self, k: u64) -> RingElement {
        match &self.powers {
            Some(t) => t[k as usize].clone(),
            None => self.generator.pow(k),
        }
    }
}

impl<'a> FiberEvaluator<'a> {
    pub fn new(tower: &'a RingTower, matrix: &'a Matrix<MultiSeries>) -> Result<Self> {
        if matrix.entries().iter().any(|e| !e.ctx().same(tower.base())) {
            return Err(Error::ContextMismatch);
        }
        Ok(FiberEvaluator {
            tower,
            matrix,
            levels: (0..tower.max_degree()).map(|_| OnceLock::new()).collect(),
        })
    }

    pub fn tower(&self) -> &RingTower {
        self.tower
    }

    pub fn rank(&self) -> usize {
        self.matrix.rows()
    }

    pub fn nvars(&self) -> usize {
        self.matrix.get(0, 0).nvars()
    }

    fn level(&self, d: usize) -> Result<&Level> {
        let slot = self.levels.get(d.wrapping_sub(1)).ok_or(Error::DegreeOutOfRange(d))?;
        slot.get_or_init(|| self.build_level(d)).as_ref().map_err(Clone::clone)
    }

    fn build_level(&self, d: usize) -> Result<Level> {
        let ctx = self.tower.level(d)?.clone();
        let group = self.tower.fields().field(d)?.order() - 1;
        let terms = self
            .matrix
            .entries()
            .iter()
            .map(|e| {
                e.terms()
                    .filter(|(_, c)| !c.is_zero())
                    .map(|(u, c)| Ok((u.iter().map(|&x| x as u64).collect(), self.tower.embed(c, d)?)))
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        let generator = self.tower.generator_lift(d)?.clone();
        let powers = (group <= POWER_TABLE_LIMIT).then(|| {
            let mut t = Vec::with_capacity(group as usize);
            let mut cur = RingElement::one(&ctx);
            for _ in 0..group {
                t.push(cur.clone());
                cur = &cur * &generator;
            }
            t
        });
        Ok(Level {
            ctx,
            group,
            terms,
            powers,
            generator,
        })
    }

    /// `B(x̂)` at the Teichmüller point with the given logs in F_{q^d}.
    pub fn matrix_at(&self, d: usize, logs: &[u64]) -> Result<Matrix<RingElement>> {
        let level = self.level(d)?;
        if logs.len() != self.matrix.get(0, 0).nvars() {
            return Err(Error::Invalid("point dimension differs from the family".into()));
        }
        let r = self.rank();
        let g = level.group as u128;
        let entries: Vec<RingElement> = level
            .terms
            .iter()
            .map(|terms| {
                let pows: Vec<RingElement> = terms
                    .iter()
                    .map(|(u, _)| {
                        let k = u.iter().zip(logs).map(|(&a, &b)| a as u128 * b as u128).sum::<u128>() % g;
                        level.teichmuller_power(k as u64)
                    })
                    .collect();
                dot(&level.ctx, terms.iter().map(|(_, c)| c).zip(&pows))
            })
            .collect();
        Ok(Matrix::from_fn(r, r, |i, j| entries[i * r + j].clone()))
    }

    /// `B(x̂^{q^{m-1}}) ... B(x̂^q) B(x̂)` for a point of `(F_{q^d}^*)^n`.
    pub fn iterate(&self, d: usize, logs: &[u64], m: usize) -> Result<Matrix<RingElement>> {
        let level = self.level(d)?;
        let q = self.tower.fields().q();
        let mut acc = self.matrix_at(d, logs)?;
        let mut cur = logs.to_vec();
        for _ in 1..m {
            cur = crate::ffield::frobenius_logs(&cur, q, level.group);
            acc = self.matrix_at(d, &cur)?.mul(&acc)?;
        }
        Ok(acc)
    }

    /// The matrix of the `d(x̄)`-th iterate of the fiber map at the representative.
    pub fn fiber_frobenius(&self, pt: &ClosedPoint) -> Result<Matrix<RingElement>> {
        self.iterate(pt.degree, &pt.representative, pt.degree)
    }

    /// `det(1 - B_x T)` of the fiber Frobenius, restricted to the base ring.
    pub fn fiber_charpoly(&self, pt: &ClosedPoint) -> Result<TSeries> {
        let m = self.fiber_frobenius(pt)?;
        let coeffs = berkowitz(&m, self.rank())?
            .iter()
            .map(|c| self.tower.restrict(c, pt.degree))
            .collect::<Result<Vec<_>>>()?;
        TSeries::new(coeffs)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dwork::{build_frobenius_series, theta_splitting, TorusPolynomial};
    use crate::padic::make_ring_context;

    #[test]
    fn rank_one_fiber_at_one_is_zeta() {
        let tower = RingTower::new(3, 1, 2, 12).unwrap();
        let theta = theta_splitting(tower.base(), None).unwrap();
        let f = TorusPolynomial::new(tower.fields().base(), 1, &[(vec![1], 1)]).unwrap();
        let fa = build_frobenius_series(&f, &theta, None).unwrap();
        let b = Matrix::from_fn(1, 1, |_, _| fa.clone());
        let ev = FiberEvaluator::new(&tower, &b).unwrap();
        let one = ClosedPoint {
            degree: 1,
            representative: vec![0],
        };
        let at_one = ev.fiber_frobenius(&one).unwrap();
        assert!(at_one.get(0, 0).eq_mod(theta.value_at_one(), 12));
        let pts = tower.fields().closed_points(1, 2).unwrap();
        for pt in pts.iter().filter(|p| p.degree == 2) {
            let conj = ClosedPoint {
                degree: 2,
                representative: crate::ffield::frobenius_logs(&pt.representative, 3, 8),
            };
            let a = ev.fiber_charpoly(pt).unwrap();
            let b = ev.fiber_charpoly(&conj).unwrap();
            assert!(a.compare(&b, 12).unwrap().passed());
        }
    }

    #[test]
    fn constant_family_is_one_everywhere() {
        let ctx = make_ring_context(2, 1, 1, 8).unwrap();
        let tower = RingTower::new(2, 1, 3, 8).unwrap();
        assert!(ctx.same(tower.base()));
        let b = Matrix::from_fn(1, 1, |_, _| MultiSeries::one(tower.base(), 2, 0));
        let ev = FiberEvaluator::new(&tower, &b).unwrap();
        for pt in tower.fields().closed_points(2, 3).unwrap() {
            let m = ev.fiber_frobenius(&pt).unwrap();
            assert_eq!(*m.get(0, 0), RingElement::one(tower.level(pt.degree).unwrap()));
        }
    }
}

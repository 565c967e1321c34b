use serde::Serialize;

use super::field::FiniteField;
use crate::error::{Error, Result};

/// The base field F_q (q = p^a) and its extensions F_{q^m}, m <= `max_degree`.
#[derive(Debug, Clone)]
pub struct FieldTower {
    p: u32,
    a: usize,
    max_degree: usize,
    /// `fields[m - 1]` is F_{q^m}, built over F_p with its own least modulus.
    fields: Vec<FiniteField>,
    /// Image of the base generator `t_a` in each F_{q^m}.
    base_roots: Vec<u32>,
}

/// A point of `(F_{q^m}^*)^n` written as discrete logs of its coordinates to the
/// generator of F_{q^m}.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct TorusPoint {
    pub field_degree: usize,
    pub logs: Vec<u64>,
}

/// A Frobenius orbit of torus points, represented by its least exponent tuple
/// in `F_{q^degree}`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct ClosedPoint {
    pub degree: usize,
    pub representative: Vec<u64>,
}

impl FieldTower {
    pub fn new(p: u32, a: usize, max_degree: usize) -> Result<Self> {
        if a == 0 || max_degree == 0 {
            return Err(Error::ZeroDegree);
        }
        let base = FiniteField::new(p, a)?;
        let mut fields = Vec::with_capacity(max_degree);
        let mut base_roots = Vec::with_capacity(max_degree);
        for m in 1..=max_degree {
            let f = FiniteField::new(p, a * m)?;
            base_roots.push(base_root(&f, &base));
            fields.push(f);
        }
        Ok(FieldTower {
            p,
            a,
            max_degree,
            fields,
            base_roots,
        })
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn a(&self) -> usize {
        self.a
    }

    pub fn q(&self) -> u64 {
        (self.p as u64).pow(self.a as u32)
    }

    pub fn max_degree(&self) -> usize {
        self.max_degree
    }

    pub fn base(&self) -> &FiniteField {
        &self.fields[0]
    }

    /// F_{q^m}.
    pub fn field(&self, m: usize) -> Result<&FiniteField> {
        if m == 0 || m > self.max_degree {
            return Err(Error::DegreeOutOfRange(m));
        }
        Ok(&self.fields[m - 1])
    }

    /// Root of the base modulus in F_{q^m} that the base generator maps to.
    pub fn base_root(&self, m: usize) -> Result<u32> {
        self.field(m)?;
        Ok(self.base_roots[m - 1])
    }

    /// Embed an element of F_q (packed over the base modulus) into F_{q^m}.
    pub fn embed(&self, m: usize, x: u32) -> Result<u32> {
        let target = self.field(m)?;
        let coeffs = self.base().coeffs(x);
        let root = self.base_roots[m - 1];
        let mut acc = 0;
        for &c in coeffs.iter().rev() {
            acc = target.add(target.mul(acc, root), c);
        }
        Ok(acc)
    }

    /// Absolute trace `F_{q^m} -> F_p`.
    pub fn absolute_trace(&self, m: usize, x: u32) -> Result<u32> {
        Ok(self.field(m)?.trace(x))
    }

    /// All points of `(F_{q^m}^*)^n` in lexicographic order of their logs.
    pub fn enumerate_torus(
        &self,
        n: usize,
        m: usize,
    ) -> Result<impl Iterator<Item = TorusPoint> + '_> {
        let group = self.field(m)?.order() - 1;
        Ok(LogTuples::new(n, group).map(move |logs| TorusPoint {
            field_degree: m,
            logs,
        }))
    }

    /// Coordinates of a torus point as packed field elements.
    pub fn coordinates(&self, pt: &TorusPoint) -> Result<Vec<u32>> {
        let f = self.field(pt.field_degree)?;
        Ok(pt.logs.iter().map(|&j| f.exp(j)).collect())
    }

    /// Least `d >= 1` with `pt^{q^d} = pt` coordinatewise.
    pub fn point_degree(&self, pt: &TorusPoint) -> Result<usize> {
        let group = self.field(pt.field_degree)?.order() - 1;
        Ok(orbit_degree(&pt.logs, self.q(), group))
    }

    /// One representative (lexicographically least log tuple) for every
    /// Frobenius orbit of degree `<= max_degree`.
    pub fn closed_points(&self, n: usize, max_degree: usize) -> Result<Vec<ClosedPoint>> {
        let q = self.q();
        let mut out = Vec::new();
        for d in 1..=max_degree {
            let group = self.field(d)?.order() - 1;
            for logs in LogTuples::new(n, group) {
                if orbit_degree(&logs, q, group) != d {
                    continue;
                }
                if is_orbit_minimum(&logs, q, group, d) {
                    out.push(ClosedPoint {
                        degree: d,
                        representative: logs,
                    });
                }
            }
        }
        Ok(out)
    }

    /// Count of closed points per degree `1..=max_degree`.
    pub fn closed_point_counts(&self, n: usize, max_degree: usize) -> Result<Vec<usize>> {
        let mut counts = vec![0; max_degree];
        for cp in self.closed_points(n, max_degree)? {
            counts[cp.degree - 1] += 1;
        }
        Ok(counts)
    }

    /// The orbit of a closed point: its `degree` conjugate log tuples.
    pub fn orbit(&self, cp: &ClosedPoint) -> Result<Vec<Vec<u64>>> {
        let group = self.field(cp.degree)?.order() - 1;
        let q = self.q();
        let mut cur = cp.representative.clone();
        let mut out = Vec::with_capacity(cp.degree);
        for _ in 0..cp.degree {
            out.push(cur.clone());
            cur = frobenius_logs(&cur, q, group);
        }
        Ok(out)
    }
}

/// Search `gamma^{k (p^{am} - 1)/(p^a - 1)}`, k = 1, 2, ..., for a root of the base modulus.
fn base_root(field: &FiniteField, base: &FiniteField) -> u32 {
    if base.degree() == 1 {
        return 0;
    }
    let group = field.order() - 1;
    let step = group / (base.order() - 1);
    let g = base.modulus();
    (1..base.order())
        .map(|k| field.exp(k * step))
        .find(|&x| field.eval_fp_poly(g, x) == 0)
        .expect("base modulus splits in every extension")
}

pub(crate) fn frobenius_logs(logs: &[u64], q: u64, group: u64) -> Vec<u64> {
    logs.iter()
        .map(|&j| ((j as u128 * q as u128) % group as u128) as u64)
        .collect()
}

fn orbit_degree(logs: &[u64], q: u64, group: u64) -> usize {
    let mut cur = frobenius_logs(logs, q, group);
    let mut d = 1;
    while cur != logs {
        cur = frobenius_logs(&cur, q, group);
        d += 1;
    }
    d
}

fn is_orbit_minimum(logs: &[u64], q: u64, group: u64, degree: usize) -> bool {
    let mut cur = logs.to_vec();
    for _ in 1..degree {
        cur = frobenius_logs(&cur, q, group);
        if cur.as_slice() < logs {
            return false;
        }
    }
    true
}

/// Lexicographic iterator over `{0..group}^n`.
struct LogTuples {
    cur: Option<Vec<u64>>,
    group: u64,
}

impl LogTuples {
    fn new(n: usize, group: u64) -> Self {
        LogTuples {
            cur: (group > 0).then(|| vec![0; n]),
            group,
        }
    }
}

impl Iterator for LogTuples {
    type Item = Vec<u64>;

    fn next(&mut self) -> Option<Vec<u64>> {
        let out = self.cur.clone()?;
        let cur = self.cur.as_mut().unwrap();
        let mut i = cur.len();
        loop {
            if i == 0 {
                self.cur = None;
                break;
            }
            i -= 1;
            cur[i] += 1;
            if cur[i] < self.group {
                break;
            }
            cur[i] = 0;
        }
        Some(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn torus_sizes() {
        let t2 = FieldTower::new(2, 1, 3).unwrap();
        assert_eq!(t2.enumerate_torus(1, 2).unwrap().count(), 3);
        let pts: Vec<_> = t2.enumerate_torus(1, 1).unwrap().collect();
        assert_eq!(t2.coordinates(&pts[0]).unwrap(), vec![1]);
        assert_eq!(pts.len(), 1);
        let t3 = FieldTower::new(3, 1, 2).unwrap();
        assert_eq!(t3.enumerate_torus(2, 1).unwrap().count(), 4);
    }

    #[test]
    fn closed_point_counts_match_torus() {
        for (p, a, n, dmax) in [(2u32, 1usize, 1usize, 5usize), (3, 1, 2, 3), (2, 2, 1, 3), (3, 2, 1, 2)] {
            let t = FieldTower::new(p, a, dmax).unwrap();
            let counts = t.closed_point_counts(n, dmax).unwrap();
            let q = t.q();
            for m in 1..=dmax {
                let lhs: u64 = (1..=m)
                    .filter(|d| m % d == 0)
                    .map(|d| d as u64 * counts[d - 1] as u64)
                    .sum();
                assert_eq!(lhs, (q.pow(m as u32) - 1).pow(n as u32), "p={p} a={a} n={n} m={m}");
            }
        }
        let t = FieldTower::new(2, 1, 3).unwrap();
        assert_eq!(t.closed_point_counts(1, 3).unwrap(), vec![1, 1, 2]);
    }

    #[test]
    fn degrees_of_points() {
        let t = FieldTower::new(3, 1, 2).unwrap();
        let g = TorusPoint { field_degree: 2, logs: vec![1] };
        assert_eq!(t.point_degree(&g).unwrap(), 2);
        let one_g = TorusPoint { field_degree: 2, logs: vec![0, 1] };
        assert_eq!(t.point_degree(&one_g).unwrap(), 2);
        // F_3^* inside F_9^* is generated by g^4
        let base = TorusPoint { field_degree: 2, logs: vec![4, 0] };
        assert_eq!(t.point_degree(&base).unwrap(), 1);
    }

    #[test]
    fn embedding_is_a_homomorphism() {
        let t = FieldTower::new(2, 2, 3).unwrap();
        let base = t.base().clone();
        for m in 1..=3 {
            let f = t.field(m).unwrap();
            for x in base.elements() {
                for y in base.elements() {
                    let lhs = t.embed(m, base.mul(x, y)).unwrap();
                    let rhs = f.mul(t.embed(m, x).unwrap(), t.embed(m, y).unwrap());
                    assert_eq!(lhs, rhs);
                    assert_eq!(
                        t.embed(m, base.add(x, y)).unwrap(),
                        f.add(t.embed(m, x).unwrap(), t.embed(m, y).unwrap())
                    );
                }
            }
        }
    }

    #[test]
    fn representatives_are_stable() {
        let t = FieldTower::new(3, 1, 3).unwrap();
        assert_eq!(t.closed_points(2, 2).unwrap(), t.closed_points(2, 2).unwrap());
        for cp in t.closed_points(1, 3).unwrap() {
            let orbit = t.orbit(&cp).unwrap();
            assert_eq!(orbit.len(), cp.degree);
            assert!(orbit.iter().all(|o| o >= &cp.representative));
        }
    }
}

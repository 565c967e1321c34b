//! Ground truth by enumeration: character sums over torus points, the
//! L-functions they determine, and fiber characteristic polynomials by minors.

use rayon::prelude::*;
use serde::Serialize;

use crate::dwork::{SplittingFunction, SplittingKind, TorusPolynomial};
use crate::error::{Error, Result};
use crate::ffield::ClosedPoint;
use crate::linalg::Matrix;
use crate::padic::{nonnegative_residue, RingElement, RingTower};
use crate::series::{MultiSeries, TSeries};

/// Largest number of torus points a single character sum enumerates.
pub const MAX_ORACLE_POINTS: u64 = 1 << 24;

/// The additive character applied to `f` at a point.
#[derive(Debug, Clone)]
pub enum Character {
    /// `zeta^{Tr_{F_{q^m}/F_p} f(x)}` for a primitive `p`-th root of unity `zeta`.
    ZetaP(RingElement),
    /// `alpha^{Tr_{Q_{q^m}/Q_p} f(x̂)}` for a 1-unit `alpha` in `Z_p[pi]`.
    OneUnit(RingElement),
}

impl Character {
    /// The character matching a splitting function: `theta(1)` in either role.
    pub fn from_splitting(theta: &SplittingFunction) -> Self {
        match theta.kind() {
            SplittingKind::DworkTheta => Character::ZetaP(theta.value_at_one().clone()),
            SplittingKind::GenericOneUnit => Character::OneUnit(theta.value_at_one().clone()),
        }
    }

    pub fn value(&self) -> &RingElement {
        match self {
            Character::ZetaP(z) | Character::OneUnit(z) => z,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CharacterSumReport {
    pub f: String,
    pub m: usize,
    pub points: u64,
    pub value: RingElement,
    /// Number of points with each trace value `0..p`, for `ZetaP`.
    pub trace_counts: Option<Vec<u64>>,
    /// Coordinates on `1, zeta, ..., zeta^{p-2}`, for `ZetaP`.
    pub cyclotomic: Option<Vec<i64>>,
}

fn check_inputs(f: &TorusPolynomial, tower: &RingTower, character: &Character) -> Result<()> {
    if !character.value().ctx().same(tower.base()) {
        return Err(Error::ContextMismatch);
    }
    if f.is_zero() && f.nvars() == 0 {
        return Err(Error::Invalid("polynomial has no variables".into()));
    }
    Ok(())
}

/// The summand `psi(f(x))` at a point of `(F_{q^m}^*)^n`, in the base ring.
fn point_value(
    f: &TorusPolynomial,
    tower: &RingTower,
    m: usize,
    logs: &[u64],
    character: &Character,
) -> Result<RingElement> {
    match character {
        Character::ZetaP(zeta) => Ok(zeta.pow(zeta_exponent(f, tower, m, logs)? as u64)),
        Character::OneUnit(alpha) => Ok(alpha.pow_u128(lifted_trace(f, tower, m, logs)?)),
    }
}

fn zeta_exponent(f: &TorusPolynomial, tower: &RingTower, m: usize, logs: &[u64]) -> Result<u32> {
    let fields = tower.fields();
    let field = fields.field(m)?;
    let x: Vec<u32> = logs.iter().map(|&j| field.exp(j)).collect();
    fields.absolute_trace(m, f.evaluate(fields, m, &x)?)
}

/// `Tr_{Q_{q^m}/Q_p}(sum c_u^ x̂^u)` as a nonnegative integer residue.
fn lifted_trace(f: &TorusPolynomial, tower: &RingTower, m: usize, logs: &[u64]) -> Result<u128> {
    let ctx = tower.level(m)?;
    let x = tower.lift_point(m, logs)?;
    let mut value = RingElement::zero(ctx);
    for (u, c) in f.terms() {
        let mut mono = tower.embed(&tower.lift_base(*c), m)?;
        for (xk, &uk) in x.iter().zip(u) {
            mono = &mono * &xk.pow(uk as u64);
        }
        value = &value + &mono;
    }
    nonnegative_residue(&tower.absolute_trace(&value))
}

/// `S_m(f) = sum_{x in (F_{q^m}^*)^n} psi(f(x))` by direct enumeration.
pub fn character_sum(
    f: &TorusPolynomial,
    tower: &RingTower,
    m: usize,
    character: &Character,
) -> Result<CharacterSumReport> {
    check_inputs(f, tower, character)?;
    let fields = tower.fields();
    let group = fields.field(m)?.order() - 1;
    let n = f.nvars();
    let points = group
        .checked_pow(n as u32)
        .filter(|&c| c <= MAX_ORACLE_POINTS)
        .ok_or_else(|| Error::Invalid(format!("enumeration bound exceeded: ({group})^{n} points")))?;
    let ctx = tower.base();
    let all: Vec<Vec<u64>> = fields.enumerate_torus(n, m)?.map(|pt| pt.logs).collect();
    let mut report = CharacterSumReport {
        f: f.to_string(),
        m,
        points,
        value: RingElement::zero(ctx),
        trace_counts: None,
        cyclotomic: None,
    };
    match character {
        Character::ZetaP(zeta) => {
            let p = fields.p() as usize;
            let counts = all
                .par_iter()
                .map(|logs| zeta_exponent(f, tower, m, logs))
                .try_fold(
                    || vec![0u64; p],
                    |mut acc, t| {
                        acc[t? as usize] += 1;
                        Ok::<_, Error>(acc)
                    },
                )
                .try_reduce(
                    || vec![0u64; p],
                    |a, b| Ok(a.iter().zip(&b).map(|(x, y)| x + y).collect()),
                )?;
            let mut value = RingElement::zero(ctx);
            for &c in counts.iter().rev() {
                value = &(&value * zeta) + &RingElement::from_int(ctx, c as i64);
            }
            let top = counts[p - 1] as i64;
            let coords: Vec<i64> = counts[..p - 1].iter().map(|&c| c as i64 - top).collect();
            let mut check = RingElement::zero(ctx);
            for &a in coords.iter().rev() {
                check = &(&check * zeta) + &RingElement::from_int(ctx, a);
            }
            if !check.eq_mod(&value, value.precision()) {
                return Err(Error::Invalid("zeta is not a primitive p-th root of unity".into()));
            }
            report.value = value;
            report.trace_counts = Some(counts);
            report.cyclotomic = Some(coords);
        }
        Character::OneUnit(_) => {
            let terms = all
                .par_iter()
                .map(|logs| point_value(f, tower, m, logs, character))
                .collect::<Result<Vec<_>>>()?;
            report.value = crate::padic::sum(ctx, terms.iter());
        }
    }
    Ok(report)
}

/// `exp(sum_{m <= degree} S_m(f) T^m / m)`.
pub fn l_from_character_sums(
    f: &TorusPolynomial,
    tower: &RingTower,
    degree: usize,
    character: &Character,
) -> Result<TSeries> {
    let sums = (1..=degree)
        .map(|m| Ok(character_sum(f, tower, m, character)?.value))
        .collect::<Result<Vec<_>>>()?;
    TSeries::exp_of_sums(tower.base(), &sums)
}

/// `prod_x (1 - psi(f(x)) T^{deg x})^{-1}` over closed points of degree `<= degree`.
pub fn l_euler_from_points(
    f: &TorusPolynomial,
    tower: &RingTower,
    degree: usize,
    character: &Character,
) -> Result<TSeries> {
    check_inputs(f, tower, character)?;
    let points = tower.fields().closed_points(f.nvars(), degree)?;
    let factors = points
        .par_iter()
        .map(|pt| {
            let v = point_value(f, tower, pt.degree, &pt.representative, character)?;
            Ok((TSeries::one_minus(&v, pt.degree, degree), -1))
        })
        .collect::<Result<Vec<_>>>()?;
    TSeries::euler_product(tower.base(), &factors, degree)
}

/// `B(x̂^{q^{d-1}}) ... B(x̂)` at a closed point, by direct series evaluation.
pub fn fiber_matrix_oracle(
    matrix: &Matrix<MultiSeries>,
    tower: &RingTower,
    pt: &ClosedPoint,
) -> Result<Matrix<RingElement>> {
    let d = pt.degree;
    let ctx = tower.level(d)?;
    let embedded = matrix.try_map(|e| e.map_coefficients(ctx, |c| tower.embed(c, d)))?;
    let q = tower.fields().q();
    let mut x = tower.lift_point(d, &pt.representative)?;
    let mut acc: Option<Matrix<RingElement>> = None;
    for _ in 0..d {
        let b = embedded.try_map(|e| e.evaluate(&x))?;
        acc = Some(match acc {
            Some(a) => b.mul(&a)?,
            None => b,
        });
        x = x.iter().map(|c| c.pow(q)).collect();
    }
    Ok(acc.expect("degree is at least one"))
}

/// Increasing `k`-subsets of `0..r`.
fn subsets(r: usize, k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for last in k - 1..r {
        for mut s in subsets(last, k - 1) {
            s.push(last);
            out.push(s);
        }
    }
    out
}

/// `det(1 - B_x T)` with coefficients `(-1)^k` times the sum of principal `k x k`
/// minors of the fiber matrix, restricted to the base ring.
pub fn fiber_charpoly_oracle(matrix: &Matrix<MultiSeries>, tower: &RingTower, pt: &ClosedPoint) -> Result<TSeries> {
    let fiber = fiber_matrix_oracle(matrix, tower, pt)?;
    let ctx = tower.level(pt.degree)?;
    let r = fiber.rows();
    let coeffs = (0..=r)
        .map(|k| {
            let mut c = RingElement::zero(ctx);
            for s in subsets(r, k) {
                let minor = if k == 0 {
                    RingElement::one(ctx)
                } else {
                    fiber.select(&s, &s).determinant_laplace()
                };
                c = &c + &minor;
            }
            if k % 2 == 1 {
                c = -&c;
            }
            tower.restrict(&c, pt.degree)
        })
        .collect::<Result<Vec<_>>>()?;
    TSeries::new(coeffs)
}

/// `prod_x det(1 - B_x T^{deg x})^{-1}` from oracle fiber characteristic polynomials.
pub fn fiber_l_euler_oracle(matrix: &Matrix<MultiSeries>, tower: &RingTower, degree: usize) -> Result<TSeries> {
    let n = matrix.get(0, 0).nvars();
    let points = tower.fields().closed_points(n, degree)?;
    let ctx = tower.base();
    let factors = points
        .par_iter()
        .map(|pt| {
            let charpoly = fiber_charpoly_oracle(matrix, tower, pt)?;
            let mut coeffs = vec![RingElement::zero(ctx); degree + 1];
            for (k, c) in charpoly.coeffs().iter().enumerate() {
                if k * pt.degree <= degree {
                    coeffs[k * pt.degree] = c.clone();
                }
            }
            Ok((TSeries::new(coeffs)?, -1))
        })
        .collect::<Result<Vec<_>>>()?;
    TSeries::euler_product(ctx, &factors, degree)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dwork::{build_frobenius_series, theta_splitting, SigmaModuleSpec};

    fn setup(p: u64, a: usize, d: usize, n: u32) -> (RingTower, Character) {
        let tower = RingTower::new(p, a, d, n).unwrap();
        let theta = theta_splitting(tower.base(), None).unwrap();
        (tower, Character::from_splitting(&theta))
    }

    fn poly(tower: &RingTower, n: usize, terms: &[(Vec<usize>, u32)]) -> TorusPolynomial {
        TorusPolynomial::new(tower.fields().base(), n, terms).unwrap()
    }

    #[test]
    fn small_sums() {
        let (tower, chi) = setup(3, 1, 3, 12);
        let zero = TorusPolynomial::zero(2);
        for m in 1..=3 {
            let s = character_sum(&zero, &tower, m, &chi).unwrap();
            let count = (3i64.pow(m as u32) - 1).pow(2);
            assert_eq!(s.value, RingElement::from_int(tower.base(), count));
        }
        let x = poly(&tower, 1, &[(vec![1], 1)]);
        for m in 1..=3 {
            assert_eq!(character_sum(&x, &tower, m, &chi).unwrap().value.to_integer(), Some(-1));
        }
        let x2 = poly(&tower, 1, &[(vec![2], 1)]);
        let s = character_sum(&x2, &tower, 1, &chi).unwrap();
        assert_eq!(s.trace_counts, Some(vec![0, 2, 0]));
        assert_eq!(s.cyclotomic, Some(vec![0, 2]));
        assert_eq!(s.value, chi.value().mul_int(2));
    }

    #[test]
    fn closed_forms() {
        let (tower, chi) = setup(3, 1, 4, 12);
        let x = poly(&tower, 1, &[(vec![1], 1)]);
        let l = l_from_character_sums(&x, &tower, 4, &chi).unwrap();
        assert_eq!(l.to_integers().unwrap(), vec![1, -1, 0, 0, 0]);
        let zeta = l_from_character_sums(&TorusPolynomial::zero(1), &tower, 4, &chi).unwrap();
        assert_eq!(zeta.to_integers().unwrap(), vec![1, 2, 6, 18, 54]);
    }

    #[test]
    fn euler_and_exponential_paths_agree() {
        let (tower, chi) = setup(3, 1, 4, 14);
        for (n, terms) in [(1, vec![(vec![1], 1), (vec![2], 1)]), (2, vec![(vec![1, 0], 1), (vec![0, 1], 2), (vec![1, 1], 1)])] {
            let f = poly(&tower, n, &terms);
            let degree = if n == 1 { 4 } else { 3 };
            let a = l_from_character_sums(&f, &tower, degree, &chi).unwrap();
            let b = l_euler_from_points(&f, &tower, degree, &chi).unwrap();
            assert!(a.compare(&b, 12).unwrap().passed(), "{f}");
        }
    }

    #[test]
    fn fiber_oracle() {
        let (tower, chi) = setup(3, 1, 2, 12);
        let theta = theta_splitting(tower.base(), None).unwrap();
        let f = poly(&tower, 1, &[(vec![1], 1)]);
        let spec = SigmaModuleSpec::rank_one(build_frobenius_series(&f, &theta, None).unwrap()).unwrap();
        let one = ClosedPoint { degree: 1, representative: vec![0] };
        let c = fiber_charpoly_oracle(spec.matrix(), &tower, &one).unwrap();
        assert!(c.coeff(1).eq_mod(&-chi.value(), 12));
        for pt in tower.fields().closed_points(1, 2).unwrap() {
            let c = fiber_charpoly_oracle(spec.matrix(), &tower, &pt).unwrap();
            for rep in tower.fields().orbit(&pt).unwrap().into_iter().skip(1) {
                let conj = ClosedPoint { degree: pt.degree, representative: rep };
                let d = fiber_charpoly_oracle(spec.matrix(), &tower, &conj).unwrap();
                assert!(c.compare(&d, 12).unwrap().passed());
            }
        }
        let trivial = Matrix::from_fn(1, 1, |_, _| MultiSeries::one(tower.base(), 1, 0));
        for pt in tower.fields().closed_points(1, 2).unwrap() {
            let c = fiber_charpoly_oracle(&trivial, &tower, &pt).unwrap();
            assert_eq!(c.to_integers().unwrap(), vec![1, -1]);
        }
    }
}

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ffield::{FieldTower, FiniteField};

/// A polynomial `f = sum a_u x^u` over F_q with exponents in `Z_{>=0}^n`.
/// Coefficients are packed over the least irreducible modulus of F_q.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TorusPolynomial {
    n: usize,
    terms: Vec<(Vec<usize>, u32)>,
}

impl TorusPolynomial {
    /// Collects like terms and drops zero coefficients.
    pub fn new(field: &FiniteField, n: usize, terms: &[(Vec<usize>, u32)]) -> Result<Self> {
        let mut merged: Vec<(Vec<usize>, u32)> = Vec::new();
        for (u, c) in terms {
            if u.len() != n {
                return Err(Error::Invalid(format!("exponent {u:?} has the wrong length for n = {n}")));
            }
            if *c as u64 >= field.order() {
                return Err(Error::Invalid(format!("coefficient {c} is not in F_{}", field.order())));
            }
            match merged.iter_mut().find(|(v, _)| v == u) {
                Some(t) => t.1 = field.add(t.1, *c),
                None => merged.push((u.clone(), *c)),
            }
        }
        merged.retain(|(_, c)| *c != 0);
        merged.sort();
        Ok(TorusPolynomial { n, terms: merged })
    }

    pub fn zero(n: usize) -> Self {
        TorusPolynomial { n, terms: Vec::new() }
    }

    pub fn nvars(&self) -> usize {
        self.n
    }

    pub fn terms(&self) -> &[(Vec<usize>, u32)] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Largest single-coordinate exponent.
    pub fn max_coordinate_degree(&self) -> usize {
        self.terms.iter().flat_map(|(u, _)| u.iter().copied()).max().unwrap_or(0)
    }

    /// `f(x)` at a point of `(F_{q^m}^*)^n` given by packed coordinates.
    pub fn evaluate(&self, tower: &FieldTower, m: usize, x: &[u32]) -> Result<u32> {
        let field = tower.field(m)?;
        let mut acc = 0;
        for (u, c) in &self.terms {
            let mut mono = tower.embed(m, *c)?;
            for (xk, &uk) in x.iter().zip(u) {
                mono = field.mul(mono, field.pow(*xk, uk as u64));
            }
            acc = field.add(acc, mono);
        }
        Ok(acc)
    }
}

impl std::fmt::Display for TorusPolynomial {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(u, c)| {
                let mono: Vec<String> = u
                    .iter()
                    .enumerate()
                    .filter(|(_, &e)| e > 0)
                    .map(|(k, &e)| if e == 1 { format!("x{k}") } else { format!("x{k}^{e}") })
                    .collect();
                match (mono.is_empty(), *c) {
                    (true, c) => c.to_string(),
                    (false, 1) => mono.join("*"),
                    (false, c) => format!("{c}*{}", mono.join("*")),
                }
            })
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn merges_and_evaluates() {
        let tower = FieldTower::new(3, 1, 2).unwrap();
        let f = TorusPolynomial::new(tower.base(), 1, &[(vec![2], 1), (vec![1], 2), (vec![2], 2)]).unwrap();
        assert_eq!(f.terms(), &[(vec![1], 2)]);
        assert_eq!(f.evaluate(&tower, 1, &[2]).unwrap(), 1);
        assert_eq!(f.to_string(), "2*x0");
        assert!(TorusPolynomial::new(tower.base(), 1, &[(vec![1], 3)]).is_err());
    }
}

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::padic::{RingContext, RingElement};
use crate::series::MultiSeries;

/// A finite-rank truncated nuclear σ-module: the matrix `B(x)` of `phi` on the
/// basis `e_0..e_{r-1}` (acting on column vectors) with its column divisibility
/// profile.
#[derive(Debug, Clone)]
pub struct SigmaModuleSpec {
    matrix: Matrix<MultiSeries>,
    profile: Vec<u32>,
    normalized: bool,
}

/// JSON form of a spec with polynomial entries.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SpecDocument {
    pub p: u64,
    pub a: usize,
    pub n: usize,
    pub rank: usize,
    pub entries: Vec<EntryDocument>,
    #[serde(default)]
    pub profile: Option<Vec<u32>>,
    #[serde(default = "default_true")]
    pub normalized: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EntryDocument {
    pub row: usize,
    pub col: usize,
    pub terms: Vec<TermDocument>,
}

/// The coefficient `pi^{pi_valuation} * sum unit_digits[k] pi^k` of `x^exponent`;
/// digits are packed residue-field elements.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TermDocument {
    pub exponent: Vec<usize>,
    #[serde(default)]
    pub pi_valuation: u32,
    #[serde(default = "default_unit")]
    pub unit_digits: Vec<u64>,
}

fn default_true() -> bool {
    true
}

fn default_unit() -> Vec<u64> {
    vec![1]
}

impl SigmaModuleSpec {
    /// Validates shape, the divisibility profile (derived from the columns when
    /// absent) and, when `normalized`, the normalization condition.
    pub fn new(matrix: Matrix<MultiSeries>, profile: Option<Vec<u32>>, normalized: bool) -> Result<Self> {
        let r = matrix.rows();
        if r == 0 || matrix.cols() != r {
            return Err(Error::Invalid("B must be a non-empty square matrix".into()));
        }
        let first = matrix.get(0, 0);
        for e in matrix.entries() {
            if !e.ctx().same(first.ctx()) || e.nvars() != first.nvars() || e.bound() != first.bound() {
                return Err(Error::Invalid("entries of B must share ring, variables and box".into()));
            }
        }
        if normalized {
            check_normalization(&matrix)?;
        }
        let column_val = |j: usize| (0..r).map(|i| matrix.get(i, j).min_valuation()).min().unwrap();
        let profile = match profile {
            Some(c) => {
                if c.len() != r || c[0] != 0 || c.windows(2).any(|w| w[0] > w[1]) {
                    return Err(Error::Invalid(format!(
                        "profile {c:?} must have length {r}, start at 0 and be nondecreasing"
                    )));
                }
                for (j, &cj) in c.iter().enumerate() {
                    let v = column_val(j);
                    if v < cj {
                        return Err(Error::Invalid(format!(
                            "column {j} has valuation {v} below its profile value {cj}"
                        )));
                    }
                }
                c
            }
            None => (0..r).map(|j| if j == 0 { 0 } else { column_val(j) }).collect(),
        };
        Ok(SigmaModuleSpec {
            matrix,
            profile,
            normalized,
        })
    }

    /// The rank-one module `e_0 -> F(x) e_0`.
    pub fn rank_one(f: MultiSeries) -> Result<Self> {
        let m = Matrix::from_fn(1, 1, |_, _| f.clone());
        Self::new(m, Some(vec![0]), true)
    }

    /// Diagonal module `e_i -> b_i e_i`.
    pub fn diagonal(entries: Vec<MultiSeries>) -> Result<Self> {
        let r = entries.len();
        let e0 = &entries[0];
        let zero = MultiSeries::zero(e0.ctx(), e0.nvars(), e0.bound());
        let m = Matrix::from_fn(r, r, |i, j| if i == j { entries[i].clone() } else { zero.clone() });
        Self::new(m, None, true)
    }

    pub fn from_document(ctx: &Arc<RingContext>, doc: &SpecDocument) -> Result<Self> {
        if doc.p != ctx.p() || doc.a != ctx.a() {
            return Err(Error::Invalid(format!(
                "spec is over p = {}, a = {} but the ring has p = {}, a = {}",
                doc.p,
                doc.a,
                ctx.p(),
                ctx.a()
            )));
        }
        let r = doc.rank;
        if r == 0 {
            return Err(Error::Invalid("rank must be positive".into()));
        }
        let mut cells: Vec<Vec<(Vec<usize>, RingElement)>> = vec![Vec::new(); r * r];
        let pi = RingElement::uniformizer(ctx);
        for (k, e) in doc.entries.iter().enumerate() {
            if e.row >= r || e.col >= r {
                return Err(Error::Invalid(format!("entries[{k}]: index ({}, {}) outside rank {r}", e.row, e.col)));
            }
            for (t, term) in e.terms.iter().enumerate() {
                if term.exponent.len() != doc.n {
                    return Err(Error::Invalid(format!(
                        "entries[{k}].terms[{t}]: exponent length {} differs from n = {}",
                        term.exponent.len(),
                        doc.n
                    )));
                }
                if term.unit_digits.first().is_none_or(|&d| d == 0) {
                    return Err(Error::Invalid(format!("entries[{k}].terms[{t}]: leading unit digit is zero")));
                }
                let unit = RingElement::from_pi_digits(ctx, &term.unit_digits, ctx.precision());
                let c = &pi.pow(term.pi_valuation as u64) * &unit;
                cells[e.row * r + e.col].push((term.exponent.clone(), c));
            }
        }
        let bound = natural_bound(&cells, ctx.precision(), doc.normalized)?;
        let mut m = Matrix::zeros(&MultiSeries::zero(ctx, doc.n, bound), r, r);
        for (idx, terms) in cells.iter().enumerate() {
            let mut s = MultiSeries::zero(ctx, doc.n, bound);
            for (u, c) in terms {
                let cur = s.coeff(u);
                s.set(u, &cur + c)?;
            }
            m.set(idx / r, idx % r, s);
        }
        Self::new(m, doc.profile.clone(), doc.normalized)
    }

    pub fn from_json(ctx: &Arc<RingContext>, text: &str) -> Result<Self> {
        let doc: SpecDocument = serde_json::from_str(text).map_err(|e| Error::Invalid(e.to_string()))?;
        Self::from_document(ctx, &doc)
    }

    pub fn ctx(&self) -> &Arc<RingContext> {
        self.matrix.get(0, 0).ctx()
    }

    pub fn nvars(&self) -> usize {
        self.matrix.get(0, 0).nvars()
    }

    pub fn rank(&self) -> usize {
        self.matrix.rows()
    }

    pub fn bound(&self) -> usize {
        self.matrix.get(0, 0).bound()
    }

    pub fn matrix(&self) -> &Matrix<MultiSeries> {
        &self.matrix
    }

    pub fn entry(&self, i: usize, j: usize) -> &MultiSeries {
        self.matrix.get(i, j)
    }

    pub fn profile(&self) -> &[u32] {
        &self.profile
    }

    pub fn normalized(&self) -> bool {
        self.normalized
    }

    /// Empirical log-convergence slope: the least `ord(B_u) / log_q |u|` over
    /// exponents with `|u| >= 2` carrying a nonzero coefficient.
    pub fn decay_estimate(&self) -> Option<f64> {
        let q = self.ctx().q() as f64;
        let mut best: Option<f64> = None;
        for e in self.matrix.entries() {
            for (u, c) in e.terms() {
                let size: usize = u.iter().sum();
                if size < 2 || c.is_zero() {
                    continue;
                }
                let slope = c.val() as f64 / (size as f64).log(q);
                best = Some(best.map_or(slope, |b: f64| b.min(slope)));
            }
        }
        best
    }
}

fn check_normalization(matrix: &Matrix<MultiSeries>) -> Result<()> {
    let r = matrix.rows();
    let b00 = matrix.get(0, 0);
    let one = MultiSeries::one(b00.ctx(), b00.nvars(), b00.bound());
    for j in 0..r {
        for i in 0..r {
            let e = matrix.get(i, j);
            let v = if i == 0 && j == 0 {
                e.diff_valuation(&one)?
            } else {
                e.min_valuation()
            };
            if v == 0 {
                let detail = if i == 0 && j == 0 {
                    "B_00 is not congruent to 1 mod pi".to_string()
                } else {
                    format!("B_{i}{j} is not divisible by pi")
                };
                return Err(Error::Normalization { row: i, col: j, detail });
            }
        }
    }
    Ok(())
}

/// Smallest box outside which every product of entries is zero mod `pi^N`,
/// given that non-constant terms carry valuation (normalization).
fn natural_bound(cells: &[Vec<(Vec<usize>, RingElement)>], n_pi: u32, normalized: bool) -> Result<usize> {
    let mut bound = 0usize;
    for (u, c) in cells.iter().flatten() {
        let m = u.iter().copied().max().unwrap_or(0);
        if m == 0 || c.is_zero() {
            continue;
        }
        let v = c.val();
        if v == 0 {
            if normalized {
                return Err(Error::Invalid("a non-constant term is a unit in a normalized spec".into()));
            }
            bound = bound.max(m);
            continue;
        }
        bound = bound.max((n_pi as usize * m).div_ceil(v as usize) - 1);
    }
    Ok(bound)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::padic::make_ring_context;

    const RANK_TWO: &str = r#"{
        "p": 3, "a": 1, "n": 1, "rank": 2,
        "entries": [
            {"row": 0, "col": 0, "terms": [{"exponent": [0]}, {"exponent": [1], "pi_valuation": 1}]},
            {"row": 1, "col": 0, "terms": [{"exponent": [1], "pi_valuation": 2}]},
            {"row": 0, "col": 1, "terms": [{"exponent": [1], "pi_valuation": 1, "unit_digits": [2]}]},
            {"row": 1, "col": 1, "terms": [{"exponent": [0], "pi_valuation": 1}]}
        ],
        "profile": [0, 1]
    }"#;

    #[test]
    fn parses_json_spec() {
        let ctx = make_ring_context(3, 1, 1, 10).unwrap();
        let spec = SigmaModuleSpec::from_json(&ctx, RANK_TWO).unwrap();
        assert_eq!(spec.rank(), 2);
        assert_eq!(spec.bound(), 9);
        assert_eq!(spec.profile(), &[0, 1]);
        assert_eq!(spec.entry(1, 0).coeff(&[1]).val(), 2);
        assert_eq!(spec.entry(0, 1).coeff(&[1]), RingElement::uniformizer(&ctx).mul_int(2));
    }

    #[test]
    fn normalization_violations_name_the_entry() {
        let ctx = make_ring_context(3, 1, 1, 10).unwrap();
        let bad = RANK_TWO.replace(r#"{"exponent": [0], "pi_valuation": 1}"#, r#"{"exponent": [0]}"#);
        let err = SigmaModuleSpec::from_json(&ctx, &bad).unwrap_err();
        assert!(matches!(err, Error::Normalization { row: 1, col: 1, .. }), "{err:?}");
        let bad_profile = RANK_TWO.replace("[0, 1]", "[0, 2]");
        assert!(SigmaModuleSpec::from_json(&ctx, &bad_profile).is_err());
    }
}

use std::collections::HashMap;

use serde::Serialize;

/// Monomials `e_{i_1} ... e_{i_l}`, `1 <= i_1 <= ... <= i_l <= r - 1`, in graded-lex
/// order, the empty monomial first.
#[derive(Debug, Clone, Serialize)]
pub struct MomentBasis {
    rank: usize,
    max_length: usize,
    /// Every omitted column of a moment matrix is divisible by `pi^exact_below`.
    exact_below: u32,
    monomials: Vec<Vec<usize>>,
    #[serde(skip)]
    exponents: Vec<Vec<u32>>,
    #[serde(skip)]
    index: HashMap<Vec<u32>, usize>,
    #[serde(skip)]
    parents: Vec<Option<(usize, usize)>>,
    #[serde(skip)]
    products: Vec<Option<usize>>,
}

impl MomentBasis {
    /// All monomials of length at most `max_length`.
    pub fn new(rank: usize, max_length: usize) -> Self {
        let weights = vec![1; rank.saturating_sub(1)];
        Self::build(rank, max_length, &weights, u32::MAX, max_length as u32 + 1)
    }

    /// Monomials whose columns can be nonzero mod `pi^precision` for a module with
    /// divisibility profile `profile`: those with `sum c_{i_k} < precision`.
    pub fn for_profile(profile: &[u32], precision: u32) -> Self {
        let rank = profile.len();
        let weights: Vec<u32> = profile.iter().skip(1).map(|&c| c.max(1)).collect();
        let max_length = precision.saturating_sub(1) as usize;
        Self::build(rank, max_length, &weights, precision, precision)
    }

    fn build(rank: usize, max_length: usize, weights: &[u32], cutoff: u32, exact_below: u32) -> Self {
        let vars = rank.saturating_sub(1);
        let mut monomials: Vec<Vec<usize>> = vec![Vec::new()];
        let mut layer: Vec<Vec<usize>> = vec![Vec::new()];
        for _ in 0..max_length {
            if vars == 0 {
                break;
            }
            let mut next = Vec::new();
            for m in &layer {
                let start = m.last().copied().unwrap_or(1);
                for i in start..=vars {
                    let mut w = m.clone();
                    w.push(i);
                    let weight: u64 = w.iter().map(|&k| weights[k - 1] as u64).sum();
                    if weight < cutoff as u64 {
                        next.push(w);
                    }
                }
            }
            if next.is_empty() {
                break;
            }
            monomials.extend(next.iter().cloned());
            layer = next;
        }
        let exponents: Vec<Vec<u32>> = monomials
            .iter()
            .map(|m| {
                let mut e = vec![0u32; vars];
                for &i in m {
                    e[i - 1] += 1;
                }
                e
            })
            .collect();
        let index: HashMap<Vec<u32>, usize> = exponents.iter().cloned().enumerate().map(|(k, e)| (e, k)).collect();
        let parents = monomials
            .iter()
            .map(|m| {
                let (&last, rest) = m.split_last()?;
                let mut e = vec![0u32; vars];
                for &i in rest {
                    e[i - 1] += 1;
                }
                Some((index[&e], last))
            })
            .collect();
        let len = monomials.len();
        let mut products = vec![None; len * len];
        for a in 0..len {
            for b in a..len {
                let e: Vec<u32> = exponents[a].iter().zip(&exponents[b]).map(|(x, y)| x + y).collect();
                let k = index.get(&e).copied();
                products[a * len + b] = k;
                products[b * len + a] = k;
            }
        }
        MomentBasis {
            rank,
            max_length,
            exact_below,
            monomials,
            exponents,
            index,
            parents,
            products,
        }
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn max_length(&self) -> usize {
        self.max_length
    }

    pub fn exact_below(&self) -> u32 {
        self.exact_below
    }

    pub fn len(&self) -> usize {
        self.monomials.len()
    }

    pub fn is_empty(&self) -> bool {
        self.monomials.is_empty()
    }

    /// Sorted variable indices `i_1 <= ... <= i_l` of the `k`-th monomial.
    pub fn monomial(&self, k: usize) -> &[usize] {
        &self.monomials[k]
    }

    pub fn length(&self, k: usize) -> usize {
        self.monomials[k].len()
    }

    /// Exponent vector over `e_1..e_{r-1}`.
    pub fn exponents(&self, k: usize) -> &[u32] {
        &self.exponents[k]
    }

    pub fn position(&self, exponents: &[u32]) -> Option<usize> {
        self.index.get(exponents).copied()
    }

    /// The monomial with its last variable removed, and that variable.
    pub fn parent(&self, k: usize) -> Option<(usize, usize)> {
        self.parents[k]
    }

    /// Index of the product of two basis monomials, if retained.
    pub fn product(&self, a: usize, b: usize) -> Option<usize> {
        self.products[a * self.len() + b]
    }

    /// Index of the degree-one monomial `e_i`, `i >= 1`.
    pub fn variable(&self, i: usize) -> Option<usize> {
        let mut e = vec![0u32; self.rank - 1];
        e[i - 1] = 1;
        self.position(&e)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn binom(n: usize, k: usize) -> usize {
        (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
    }

    #[test]
    fn sizes_and_order() {
        assert_eq!(MomentBasis::new(1, 5).len(), 1);
        let b = MomentBasis::new(3, 2);
        let names: Vec<&[usize]> = (0..b.len()).map(|k| b.monomial(k)).collect();
        assert_eq!(names, vec![&[][..], &[1], &[2], &[1, 1], &[1, 2], &[2, 2]]);
        assert_eq!(MomentBasis::new(2, 3).len(), 4);
        for r in 2..5 {
            for l in 0..6 {
                let expected: usize = (0..=l).map(|k| binom(k + r - 2, r - 2)).sum();
                assert_eq!(MomentBasis::new(r, l).len(), expected);
            }
        }
    }

    #[test]
    fn profile_pruning_and_products() {
        let b = MomentBasis::for_profile(&[0, 1, 2], 12);
        assert_eq!(b.len(), 42);
        assert_eq!(b.exact_below(), 12);
        let e1 = b.variable(1).unwrap();
        let e2 = b.variable(2).unwrap();
        let e1e2 = b.product(e1, e2).unwrap();
        assert_eq!(b.monomial(e1e2), &[1, 2]);
        assert_eq!(b.parent(e1e2), Some((e1, 2)));
        let top = b.position(&[0, 5]).unwrap();
        assert_eq!(b.product(top, e2), None);
    }
}

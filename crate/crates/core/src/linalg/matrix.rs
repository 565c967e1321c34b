use std::fmt;

use rayon::prelude::*;

use super::algebra::Algebra;
use crate::error::{Error, Result};
use crate::padic::{Accumulator, RingElement};

/// Dense row-major matrix over an [`Algebra`].
#[derive(Clone)]
pub struct Matrix<A> {
    rows: usize,
    cols: usize,
    data: Vec<A>,
}

impl<A: Algebra> Matrix<A> {
    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> A) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Matrix { rows, cols, data }
    }

    pub fn from_rows(rows: Vec<Vec<A>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        if rows.iter().any(|x| x.len() != c) {
            return Err(Error::Invalid("ragged matrix rows".into()));
        }
        Ok(Matrix {
            rows: r,
            cols: c,
            data: rows.into_iter().flatten().collect(),
        })
    }

    pub fn zeros(proto: &A, rows: usize, cols: usize) -> Self {
        let z = proto.zero_like();
        Matrix {
            rows,
            cols,
            data: vec![z; rows * cols],
        }
    }

    pub fn identity(proto: &A, n: usize) -> Self {
        let (z, o) = (proto.zero_like(), proto.one_like());
        Self::from_fn(n, n, |i, j| if i == j { o.clone() } else { z.clone() })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &A {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: A) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[A] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn entries(&self) -> &[A] {
        &self.data
    }

    pub fn map<B>(&self, f: impl Fn(&A) -> B) -> Matrix<B> {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(f).collect(),
        }
    }

    pub fn try_map<B>(&self, f: impl Fn(&A) -> Result<B>) -> Result<Matrix<B>> {
        Ok(Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(f).collect::<Result<_>>()?,
        })
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self.get(j, i).clone())
    }

    pub fn add(&self, o: &Self) -> Result<Self> {
        self.same_shape(o)?;
        Ok(Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&o.data).map(|(a, b)| a.add(b)).collect(),
        })
    }

    pub fn sub(&self, o: &Self) -> Result<Self> {
        self.same_shape(o)?;
        Ok(Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&o.data).map(|(a, b)| a.sub(b)).collect(),
        })
    }

    fn same_shape(&self, o: &Self) -> Result<()> {
        if self.rows != o.rows || self.cols != o.cols {
            return Err(Error::Invalid(format!(
                "shape mismatch {}x{} vs {}x{}",
                self.rows, self.cols, o.rows, o.cols
            )));
        }
        Ok(())
    }

    /// Matrix product, parallel over output rows.
    pub fn mul(&self, o: &Self) -> Result<Self> {
        if self.cols != o.rows {
            return Err(Error::Invalid("inner dimensions differ".into()));
        }
        let ot = o.transpose();
        let data: Vec<A> = (0..self.rows)
            .into_par_iter()
            .flat_map_iter(|i| {
                let row = self.row(i);
                let ot = &ot;
                (0..o.cols).map(move |j| A::dot(&row[0], row.iter().zip(ot.row(j))))
            })
            .collect();
        Ok(Matrix {
            rows: self.rows,
            cols: o.cols,
            data,
        })
    }

    pub fn pow(&self, e: u32) -> Result<Self> {
        let mut result = Self::identity(&self.data[0], self.rows);
        for _ in 0..e {
            result = result.mul(self)?;
        }
        Ok(result)
    }

    pub fn trace(&self) -> A {
        let mut acc = self.data[0].zero_like();
        for i in 0..self.rows.min(self.cols) {
            acc = acc.add(self.get(i, i));
        }
        acc
    }

    /// `sum_{i,j} self_{ij} o_{ji}`, the trace of `self * o`.
    pub fn trace_of_product(&self, o: &Self) -> A {
        let ot = o.transpose();
        A::dot(&self.data[0], self.data.iter().zip(&ot.data))
    }

    /// Kronecker product; row index `(i, k)` maps to `i * o.rows + k`.
    pub fn kronecker(&self, o: &Self) -> Self {
        let (r, c) = (self.rows * o.rows, self.cols * o.cols);
        let data: Vec<A> = (0..r)
            .into_par_iter()
            .flat_map_iter(|row| {
                let (i, k) = (row / o.rows, row % o.rows);
                (0..c).map(move |col| {
                    let (j, l) = (col / o.cols, col % o.cols);
                    let (a, b) = (self.get(i, j), o.get(k, l));
                    if a.is_zero() || b.is_zero() {
                        a.zero_like()
                    } else {
                        a.mul(b)
                    }
                })
            })
            .collect();
        Matrix { rows: r, cols: c, data }
    }

    /// Submatrix on the given rows and columns.
    pub fn select(&self, rows: &[usize], cols: &[usize]) -> Self {
        Self::from_fn(rows.len(), cols.len(), |i, j| self.get(rows[i], cols[j]).clone())
    }

    /// Determinant by cofactor expansion (intended for small matrices).
    pub fn determinant_laplace(&self) -> A {
        let n = self.rows;
        let proto = &self.data[0];
        if n == 0 {
            return proto.one_like();
        }
        let idx: Vec<usize> = (0..n).collect();
        laplace(self, 0, &idx)
    }

    /// Least valuation over all entries.
    pub fn min_valuation(&self) -> u32 {
        self.data.iter().map(|a| a.min_valuation()).min().unwrap_or(u32::MAX)
    }

    /// True when every entry of `self - o` has valuation `>= n`.
    pub fn eq_mod(&self, o: &Self, n: u32) -> bool {
        self.sub(o).is_ok_and(|d| d.min_valuation() >= n)
    }
}

fn laplace<A: Algebra>(m: &Matrix<A>, row: usize, cols: &[usize]) -> A {
    if cols.len() == 1 {
        return m.get(row, cols[0]).clone();
    }
    let mut acc = m.get(0, 0).zero_like();
    for (k, &c) in cols.iter().enumerate() {
        let a = m.get(row, c);
        if a.is_zero() {
            continue;
        }
        let rest: Vec<usize> = cols.iter().copied().filter(|&x| x != c).collect();
        let minor = a.mul(&laplace(m, row + 1, &rest));
        acc = if k % 2 == 0 { acc.add(&minor) } else { acc.sub(&minor) };
    }
    acc
}

impl Matrix<RingElement> {
    /// Product that skips exact zeros on both sides; suited to the sparse block
    /// operators and their low powers.
    pub fn mul_sparse(&self, o: &Self) -> Result<Self> {
        if self.cols != o.rows {
            return Err(Error::Invalid("inner dimensions differ".into()));
        }
        let ctx = self.data[0].ctx().clone();
        let o_rows: Vec<Vec<(usize, &RingElement)>> = (0..o.rows)
            .map(|k| {
                o.row(k)
                    .iter()
                    .enumerate()
                    .filter(|(_, x)| !x.is_exact_zero())
                    .collect()
            })
            .collect();
        let o_prec = o.data.iter().map(|x| x.precision()).min().unwrap_or(ctx.precision());
        let data: Vec<RingElement> = (0..self.rows)
            .into_par_iter()
            .flat_map_iter(|i| {
                let mut accs: Vec<Option<Accumulator>> = (0..o.cols).map(|_| None).collect();
                let mut prec = o_prec;
                for (k, a) in self.row(i).iter().enumerate() {
                    prec = prec.min(a.precision());
                    if a.is_exact_zero() {
                        continue;
                    }
                    for &(j, b) in &o_rows[k] {
                        accs[j]
                            .get_or_insert_with(|| ctx.accumulator())
                            .add_product(a.limbs(), b.limbs());
                    }
                }
                let out: Vec<RingElement> = accs
                    .into_iter()
                    .map(|acc| match acc {
                        Some(acc) => RingElement::from_limbs(&ctx, acc.finish(), prec),
                        None => RingElement::zero(&ctx).with_precision(prec),
                    })
                    .collect();
                out
            })
            .collect();
        Ok(Matrix {
            rows: self.rows,
            cols: o.cols,
            data,
        })
    }
}

impl<A: fmt::Debug> fmt::Debug for Matrix<A> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<&[A]> = (0..self.rows)
            .map(|i| &self.data[i * self.cols..(i + 1) * self.cols])
            .collect();
        f.debug_list().entries(rows).finish()
    }
}

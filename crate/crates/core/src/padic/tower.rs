use std::sync::{Arc, OnceLock};

use super::context::RingContext;
use super::element::RingElement;
use crate::error::{Error, Result};
use crate::ffield::FieldTower;

/// The rings `Z_{q^d}[pi]`, `1 <= d <= max_degree`, over a common base `Z_q[pi]`,
/// with the base embedded into each level and a restriction map back.
#[derive(Debug)]
pub struct RingTower {
    fields: FieldTower,
    levels: Vec<Level>,
}

#[derive(Debug)]
struct Level {
    ctx: Arc<RingContext>,
    /// `rho^k`, `k < a`, as unramified coefficient vectors in this level.
    rho_powers: Vec<Vec<u64>>,
    /// Rows used to solve for base coordinates and the inverse of that block.
    pivots: Vec<usize>,
    pivot_inverse: Vec<Vec<u64>>,
    generator_lift: OnceLock<RingElement>,
}

impl RingTower {
    pub fn new(p: u64, a: usize, max_degree: usize, n_pi: u32) -> Result<Self> {
        Self::with_ramification(p, a, max_degree, n_pi, true)
    }

    pub fn with_ramification(
        p: u64,
        a: usize,
        max_degree: usize,
        n_pi: u32,
        ramified: bool,
    ) -> Result<Self> {
        let fields = FieldTower::new(p as u32, a, max_degree)?;
        let mut levels = Vec::with_capacity(max_degree);
        for d in 1..=max_degree {
            let ctx = Arc::new(RingContext::new(p, a, d, n_pi, ramified)?);
            let rho = hensel_root(&ctx, fields.base().modulus(), fields.base_root(d)?, &fields, d)?;
            let mut rho_powers = Vec::with_capacity(a);
            let mut cur = RingElement::one(&ctx);
            for _ in 0..a {
                rho_powers.push(cur.limbs()[..ctx.unramified_degree()].to_vec());
                cur = &cur * &rho;
            }
            let (pivots, pivot_inverse) = pivot_system(&ctx, &rho_powers)?;
            levels.push(Level {
                ctx,
                rho_powers,
                pivots,
                pivot_inverse,
                generator_lift: OnceLock::new(),
            });
        }
        Ok(RingTower { fields, levels })
    }

    pub fn fields(&self) -> &FieldTower {
        &self.fields
    }

    pub fn max_degree(&self) -> usize {
        self.levels.len()
    }

    pub fn base(&self) -> &Arc<RingContext> {
        &self.levels[0].ctx
    }

    pub fn level(&self, d: usize) -> Result<&Arc<RingContext>> {
        self.get(d).map(|l| &l.ctx)
    }

    fn get(&self, d: usize) -> Result<&Level> {
        if d == 0 || d > self.levels.len() {
            return Err(Error::DegreeOutOfRange(d));
        }
        Ok(&self.levels[d - 1])
    }

    /// Image of a base-ring element in `Z_{q^d}[pi]`.
    pub fn embed(&self, x: &RingElement, d: usize) -> Result<RingElement> {
        if !x.ctx().same(self.base()) {
            return Err(Error::ContextMismatch);
        }
        let level = self.get(d)?;
        let ctx = &level.ctx;
        let (qa, qd) = (self.base().unramified_degree(), ctx.unramified_degree());
        let src = x.limbs();
        let mut out = ctx.zero_limbs();
        for i in 0..ctx.ramification() {
            for k in 0..qa {
                let c = src[i * qa + k];
                if c == 0 {
                    continue;
                }
                for (j, &r) in level.rho_powers[k].iter().enumerate() {
                    let idx = i * qd + j;
                    out[idx] = ctx.addmod(out[idx], ctx.mulmod(c, r));
                }
            }
        }
        Ok(RingElement::from_limbs(ctx, out, x.precision()))
    }

    /// Preimage in the base ring of an element of `Z_{q^d}[pi]` that lies in it.
    pub fn restrict(&self, x: &RingElement, d: usize) -> Result<RingElement> {
        let level = self.get(d)?;
        if !x.ctx().same(&level.ctx) {
            return Err(Error::ContextMismatch);
        }
        let base = self.base();
        let (qa, qd) = (base.unramified_degree(), level.ctx.unramified_degree());
        let ctx = &level.ctx;
        let src = x.limbs();
        let mut out = base.zero_limbs();
        for i in 0..ctx.ramification() {
            let block = &src[i * qd..(i + 1) * qd];
            for (k, row) in level.pivot_inverse.iter().enumerate() {
                let mut acc = 0u64;
                for (r, &piv) in row.iter().zip(&level.pivots) {
                    acc = ctx.addmod(acc, ctx.mulmod(*r, block[piv]));
                }
                out[i * qa + k] = acc;
            }
        }
        let y = RingElement::from_limbs(base, out, x.precision());
        let back = self.embed(&y, d)?;
        if !back.eq_mod(x, x.precision()) {
            return Err(Error::NotInBaseRing);
        }
        Ok(y)
    }

    /// Teichmüller lift of the generator of F_{q^d}.
    pub fn generator_lift(&self, d: usize) -> Result<&RingElement> {
        let level = self.get(d)?;
        let field = self.fields.field(d)?;
        Ok(level
            .generator_lift
            .get_or_init(|| RingElement::teichmuller(&level.ctx, &field.coeffs(field.generator()))))
    }

    /// Teichmüller lift of a torus point given by logs in F_{q^d}.
    pub fn lift_point(&self, d: usize, logs: &[u64]) -> Result<Vec<RingElement>> {
        let g = self.generator_lift(d)?;
        Ok(logs.iter().map(|&j| g.pow(j)).collect())
    }

    /// Teichmüller lift of an element of F_q (packed over the base modulus) in the base ring.
    pub fn lift_base(&self, x: u32) -> RingElement {
        RingElement::teichmuller(self.base(), &self.fields.base().coeffs(x))
    }

    /// The absolute trace `Z_{q^d} -> Z_p`, summing all `a*d` Frobenius conjugates.
    pub fn absolute_trace(&self, x: &RingElement) -> RingElement {
        let n = x.ctx().unramified_degree();
        let mut acc = x.clone();
        let mut cur = x.clone();
        for _ in 1..n {
            cur = cur.frobenius(1);
            acc = &acc + &cur;
        }
        acc
    }
}

/// Hensel lift of a root of the base modulus with the given residue in `F_{q^d}`.
fn hensel_root(
    ctx: &Arc<RingContext>,
    g: &[u32],
    residue: u32,
    fields: &FieldTower,
    d: usize,
) -> Result<RingElement> {
    let field = fields.field(d)?;
    if g.len() == 2 {
        // a = 1: the base is Z_p and the root is never used
        return Ok(RingElement::zero(ctx));
    }
    let mut y = RingElement::from_residue(ctx, &field.coeffs(residue));
    let coeffs: Vec<RingElement> = g.iter().map(|&c| RingElement::from_int(ctx, c as i64)).collect();
    let eval = |cs: &[RingElement], y: &RingElement| {
        cs.iter()
            .rev()
            .fold(RingElement::zero(ctx), |acc, c| &(&acc * y) + c)
    };
    let deriv: Vec<RingElement> = coeffs
        .iter()
        .enumerate()
        .skip(1)
        .map(|(k, c)| c.mul_int(k as i64))
        .collect();
    for _ in 0..=(2 * ctx.storage_digits()).ilog2() + 2 {
        let step = &eval(&coeffs, &y) * &eval(&deriv, &y).inv_unit()?;
        y = &y - &step;
    }
    Ok(y)
}

/// Choose `a` rows of the `Q x a` matrix of `rho^k` coordinates that are
/// independent mod p and invert that block modulo the storage modulus.
fn pivot_system(ctx: &RingContext, cols: &[Vec<u64>]) -> Result<(Vec<usize>, Vec<Vec<u64>>)> {
    let a = cols.len();
    let q = ctx.unramified_degree();
    let p = ctx.p();
    let mut pivots = Vec::with_capacity(a);
    // greedy row selection with elimination mod p
    let mut basis: Vec<Vec<u64>> = Vec::new();
    for row in 0..q {
        if pivots.len() == a {
            break;
        }
        let mut v: Vec<u64> = cols.iter().map(|c| c[row] % p).collect();
        for (b, lead) in basis.iter().zip(pivot_leads(&basis)) {
            let f = v[lead];
            if f != 0 {
                for k in 0..a {
                    v[k] = (v[k] + (p - f) * b[k]) % p;
                }
            }
        }
        if let Some(lead) = v.iter().position(|&x| x != 0) {
            let inv = crate::ffield::fp_poly::inv_mod_p(v[lead] as u32, p as u32) as u64;
            for x in v.iter_mut() {
                *x = *x * inv % p;
            }
            basis.push(v);
            pivots.push(row);
        }
    }
    if pivots.len() < a {
        return Err(Error::Invalid("base embedding is degenerate".into()));
    }
    // invert the a x a block M[r][k] = cols[k][pivots[r]] over Z/p^M
    let mut m: Vec<Vec<u64>> = pivots
        .iter()
        .map(|&r| cols.iter().map(|c| c[r]).collect())
        .collect();
    let mut inv: Vec<Vec<u64>> = (0..a)
        .map(|i| (0..a).map(|j| u64::from(i == j)).collect())
        .collect();
    for col in 0..a {
        let piv = (col..a)
            .find(|&r| m[r][col] % p != 0)
            .ok_or_else(|| Error::Invalid("singular embedding block".into()))?;
        m.swap(col, piv);
        inv.swap(col, piv);
        let unit = {
            let mut limbs = ctx.zero_limbs();
            limbs[0] = m[col][col];
            ctx.inv_unit_limbs(&limbs).expect("pivot is a unit")[0]
        };
        for k in 0..a {
            m[col][k] = ctx.mulmod(m[col][k], unit);
            inv[col][k] = ctx.mulmod(inv[col][k], unit);
        }
        for r in 0..a {
            if r == col || m[r][col] == 0 {
                continue;
            }
            let f = m[r][col];
            for k in 0..a {
                m[r][k] = ctx.submod(m[r][k], ctx.mulmod(f, m[col][k]));
                inv[r][k] = ctx.submod(inv[r][k], ctx.mulmod(f, inv[col][k]));
            }
        }
    }
    Ok((pivots, inv))
}

fn pivot_leads(basis: &[Vec<u64>]) -> Vec<usize> {
    basis
        .iter()
        .map(|b| b.iter().position(|&x| x != 0).unwrap())
        .collect()
}

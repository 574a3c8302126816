//! Fraction-free elimination over GF(q)[x] for matrices of rational functions.

use crate::error::{Error, Result};
use crate::field::{FieldContext, FieldElement};
use crate::poly::{gcd, Poly};

pub type Matrix = Vec<Vec<FieldElement>>;

struct Echelon {
    rows: Vec<Vec<Poly>>,
    pivots: Vec<(usize, usize)>,
}

fn common_ctx(m: &Matrix) -> Result<Option<FieldContext>> {
    let mut ctx: Option<FieldContext> = None;
    for row in m {
        for e in row {
            match &ctx {
                None => ctx = Some(e.ctx().clone()),
                Some(c) if c != e.ctx() => return Err(Error::ContextMismatch),
                _ => {}
            }
        }
    }
    Ok(ctx)
}

/// Multiplies each row by a common denominator so all entries become polynomials.
fn clear_denominators(ctx: &FieldContext, m: &Matrix) -> Vec<Vec<Poly>> {
    let gf = ctx.gf();
    m.iter()
        .map(|row| {
            let mut l = Poly::one();
            for e in row {
                if !e.den().is_one() && !e.is_zero() {
                    let g = gcd(gf, &l, e.den());
                    l = l.mul(gf, &e.den().div_exact(gf, &g).expect("gcd divides"));
                }
            }
            row.iter()
                .map(|e| {
                    if e.is_zero() {
                        Poly::zero()
                    } else {
                        e.num().mul(gf, &l.div_exact(gf, e.den()).expect("denominator divides lcm"))
                    }
                })
                .collect()
        })
        .collect()
}

/// Row echelon form by Bareiss elimination, pivoting only over the first `ncols` columns.
fn bareiss(ctx: &FieldContext, mut rows: Vec<Vec<Poly>>, ncols: usize) -> Result<Echelon> {
    let gf = ctx.gf();
    let n = rows.len();
    let width = rows.first().map(|r| r.len()).unwrap_or(0);
    let mut prev = Poly::one();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..ncols {
        if r == n {
            break;
        }
        let pick = (r..n).filter(|&i| !rows[i][c].is_zero()).min_by_key(|&i| (rows[i][c].len(), rows[i][c].total_degree()));
        let Some(i) = pick else { continue };
        rows.swap(i, r);
        let (top, rest) = rows.split_at_mut(r + 1);
        let pivot_row = &top[r];
        let piv = pivot_row[c].clone();
        for row in rest.iter_mut() {
            let lead = std::mem::take(&mut row[c]);
            for j in c + 1..width {
                let t = piv.mul(gf, &row[j]);
                let t = if lead.is_zero() { t } else { t.sub(gf, &lead.mul(gf, &pivot_row[j])) };
                row[j] = if prev.is_one() {
                    t
                } else {
                    t.div_exact(gf, &prev).ok_or_else(|| Error::internal("inexact Bareiss division"))?
                };
            }
        }
        prev = piv;
        pivots.push((r, c));
        r += 1;
    }
    Ok(Echelon { rows, pivots })
}

fn back_substitute(
    ctx: &FieldContext,
    ech: &Echelon,
    ncols: usize,
    rhs_col: Option<usize>,
    free_values: &[(usize, FieldElement)],
) -> Result<Vec<FieldElement>> {
    let mut x: Vec<FieldElement> = vec![ctx.zero(); ncols];
    for (i, v) in free_values {
        x[*i] = v.clone();
    }
    for &(r, c) in ech.pivots.iter().rev() {
        let row = &ech.rows[r];
        let mut acc = match rhs_col {
            Some(k) => ctx.from_poly(row[k].clone())?,
            None => ctx.zero(),
        };
        for j in c + 1..ncols {
            if !row[j].is_zero() && !x[j].is_zero() {
                acc = acc.sub(&ctx.from_poly(row[j].clone())?.mul(&x[j])?)?;
            }
        }
        x[c] = acc.div(&ctx.from_poly(row[c].clone())?)?;
    }
    Ok(x)
}

/// One solution of `m * x = rhs`.
pub fn linsolve(m: &Matrix, rhs: &[FieldElement]) -> Result<Vec<FieldElement>> {
    if m.len() != rhs.len() {
        return Err(Error::internal("right-hand side length mismatch"));
    }
    let ncols = m.first().map(|r| r.len()).unwrap_or(0);
    let aug: Matrix = m
        .iter()
        .zip(rhs)
        .map(|(row, b)| {
            let mut r = row.clone();
            r.push(b.clone());
            r
        })
        .collect();
    let ctx = match common_ctx(&aug)? {
        Some(c) => c,
        None => return Ok(Vec::new()),
    };
    let rows = clear_denominators(&ctx, &aug);
    let ech = bareiss(&ctx, rows, ncols)?;
    let rank = ech.pivots.len();
    if ech.rows[rank..].iter().any(|row| !row[ncols].is_zero()) {
        return Err(Error::NoSolution);
    }
    back_substitute(&ctx, &ech, ncols, Some(ncols), &[])
}

/// A basis of the right kernel of `m`, one vector per free column.
pub fn nullspace(m: &Matrix) -> Result<Vec<Vec<FieldElement>>> {
    let ctx = match common_ctx(m)? {
        Some(c) => c,
        None => return Ok(Vec::new()),
    };
    let ncols = m[0].len();
    let rows = clear_denominators(&ctx, m);
    let ech = bareiss(&ctx, rows, ncols)?;
    let pivot_cols: Vec<usize> = ech.pivots.iter().map(|p| p.1).collect();
    let mut basis = Vec::new();
    for f in (0..ncols).filter(|c| !pivot_cols.contains(c)) {
        basis.push(back_substitute(&ctx, &ech, ncols, None, &[(f, ctx.one())])?);
    }
    Ok(basis)
}

pub fn rank(m: &Matrix) -> Result<usize> {
    let ctx = match common_ctx(m)? {
        Some(c) => c,
        None => return Ok(0),
    };
    let ncols = m[0].len();
    let rows = clear_denominators(&ctx, m);
    Ok(bareiss(&ctx, rows, ncols)?.pivots.len())
}

pub fn inverse(m: &Matrix) -> Result<Matrix> {
    let n = m.len();
    let ctx = common_ctx(m)?.ok_or(Error::NoSolution)?;
    let aug: Matrix = m
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend((0..n).map(|j| if i == j { ctx.one() } else { ctx.zero() }));
            r
        })
        .collect();
    let rows = clear_denominators(&ctx, &aug);
    let ech = bareiss(&ctx, rows, n)?;
    if ech.pivots.len() < n {
        return Err(Error::NoSolution);
    }
    let mut cols = Vec::with_capacity(n);
    for k in 0..n {
        cols.push(back_substitute(&ctx, &ech, n, Some(n + k), &[])?);
    }
    Ok((0..n).map(|i| (0..n).map(|j| cols[j][i].clone()).collect()).collect())
}

pub fn mat_vec(m: &Matrix, v: &[FieldElement]) -> Result<Vec<FieldElement>> {
    m.iter()
        .map(|row| {
            let mut acc = v[0].ctx().zero();
            for (a, b) in row.iter().zip(v) {
                if !a.is_zero() && !b.is_zero() {
                    acc = acc.add(&a.mul(b)?)?;
                }
            }
            Ok(acc)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx() -> FieldContext {
        FieldContext::with_names(2, 1, &["x", "y"]).unwrap()
    }

    #[test]
    fn identity_system() {
        let c = ctx();
        let x = c.gen(0);
        let y = c.gen(1);
        let m = vec![vec![c.one(), c.zero()], vec![c.zero(), c.one()]];
        assert_eq!(linsolve(&m, &[x.clone(), y.clone()]).unwrap(), vec![x, y]);
    }

    #[test]
    fn scalar_system() {
        let c = ctx();
        let x = c.gen(0);
        let sol = linsolve(&vec![vec![x.clone()]], &[x.pow(2).unwrap()]).unwrap();
        assert_eq!(sol, vec![x]);
    }

    #[test]
    fn inconsistent_system() {
        let c = ctx();
        let x = c.gen(0);
        let m = vec![vec![x.clone(), c.one()], vec![x.pow(2).unwrap(), x.clone()]];
        assert_eq!(linsolve(&m, &[c.one(), c.zero()]), Err(Error::NoSolution));
    }

    #[test]
    fn inverse_and_kernel() {
        let c = FieldContext::with_names(3, 1, &["x", "y"]).unwrap();
        let x = c.gen(0);
        let y = c.gen(1);
        let m = vec![
            vec![x.clone(), y.clone(), c.one()],
            vec![c.one(), x.add(&y).unwrap(), y.inv().unwrap()],
            vec![c.int(2), x.mul(&y).unwrap(), c.zero()],
        ];
        let inv = inverse(&m).unwrap();
        for i in 0..3 {
            let col: Vec<_> = (0..3).map(|k| inv[k][i].clone()).collect();
            let prod = mat_vec(&m, &col).unwrap();
            for (j, e) in prod.iter().enumerate() {
                assert_eq!(*e, if i == j { c.one() } else { c.zero() });
            }
        }
        let sing = vec![vec![x.clone(), y.clone()], vec![x.mul(&y).unwrap(), y.pow(2).unwrap()]];
        assert_eq!(rank(&sing).unwrap(), 1);
        let ker = nullspace(&sing).unwrap();
        assert_eq!(ker.len(), 1);
        assert!(mat_vec(&sing, &ker[0]).unwrap().iter().all(|e| e.is_zero()));
    }
}

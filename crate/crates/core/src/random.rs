//! Random elements, forms and symbols for tests and self-checks.

use std::collections::BTreeMap;

use rand::Rng;

use crate::error::Result;
use crate::field::{FieldContext, FieldElement};
use crate::forms::{dlog_symbol, DifferentialForm, Frame, PureSymbol};
use crate::poly::{Mono, Poly};

fn random_mono<R: Rng>(rng: &mut R, nvars: usize, max_degree: u32) -> Mono {
    let total = rng.gen_range(0..=max_degree);
    let mut exps = vec![0u32; nvars];
    for _ in 0..total {
        exps[rng.gen_range(0..nvars)] += 1;
    }
    Mono::from_exponents(&exps)
}

/// A polynomial with at most `max_terms` terms of total degree at most `max_degree`.
pub fn polynomial<R: Rng>(rng: &mut R, ctx: &FieldContext, max_degree: u32, max_terms: usize) -> Poly {
    let gf = ctx.gf();
    let n = rng.gen_range(1..=max_terms.max(1));
    let terms = (0..n)
        .map(|_| (random_mono(rng, ctx.nvars(), max_degree), rng.gen_range(1..gf.order())))
        .collect();
    Poly::from_terms(gf, terms)
}

pub fn nonzero_polynomial<R: Rng>(rng: &mut R, ctx: &FieldContext, max_degree: u32, max_terms: usize) -> Poly {
    loop {
        let p = polynomial(rng, ctx, max_degree, max_terms);
        if !p.is_zero() {
            return p;
        }
    }
}

/// A rational function whose numerator and denominator have degree at most `max_degree`;
/// about a third of the results have a nontrivial denominator.
pub fn element<R: Rng>(rng: &mut R, ctx: &FieldContext, max_degree: u32) -> Result<FieldElement> {
    let num = polynomial(rng, ctx, max_degree, 3);
    let den = if rng.gen_range(0..3) == 0 { nonzero_polynomial(rng, ctx, max_degree, 2) } else { Poly::one() };
    ctx.fraction(num, den)
}

pub fn nonzero_element<R: Rng>(rng: &mut R, ctx: &FieldContext, max_degree: u32) -> Result<FieldElement> {
    loop {
        let e = element(rng, ctx, max_degree)?;
        if !e.is_zero() {
            return Ok(e);
        }
    }
}

pub fn nonzero_poly_element<R: Rng>(rng: &mut R, ctx: &FieldContext, max_degree: u32) -> Result<FieldElement> {
    ctx.from_poly(nonzero_polynomial(rng, ctx, max_degree, 3))
}

/// A form of the given degree with each basis coefficient drawn by [`element`].
pub fn form<R: Rng>(rng: &mut R, frame: &Frame, degree: usize, max_degree: u32) -> Result<DifferentialForm> {
    let r = frame.rank();
    let mut coeffs = BTreeMap::new();
    for mask in 0u32..(1 << r) {
        if mask.count_ones() as usize == degree {
            coeffs.insert(mask as u16, element(rng, frame.ctx(), max_degree)?);
        }
    }
    DifferentialForm::from_coeffs(frame, degree, coeffs)
}

/// A symbol with polynomial entries.
pub fn symbol<R: Rng>(rng: &mut R, ctx: &FieldContext, len: usize, max_degree: u32) -> Result<PureSymbol> {
    let entries = (0..len).map(|_| nonzero_poly_element(rng, ctx, max_degree)).collect::<Result<Vec<_>>>()?;
    PureSymbol::new(entries)
}

/// A sum of integer multiples of dlogs of random symbols, with the symbols used.
pub fn symbol_combination<R: Rng>(
    rng: &mut R,
    frame: &Frame,
    degree: usize,
    count: usize,
    max_degree: u32,
) -> Result<(Vec<(i64, PureSymbol)>, DifferentialForm)> {
    let p = frame.ctx().p() as i64;
    let mut acc = DifferentialForm::zero(frame, degree);
    let mut used = Vec::with_capacity(count);
    for _ in 0..count {
        let s = symbol(rng, frame.ctx(), degree, max_degree)?;
        let n = rng.gen_range(1..p);
        acc = acc.add(&dlog_symbol(&s, frame)?.scale_int(n))?;
        used.push((n, s));
    }
    Ok((used, acc))
}

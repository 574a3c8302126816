//! Decomposition of forms in the kernel of the Artin-Schreier operator into
//! logarithmic pure symbols.

use std::cmp::Ordering;
use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::field::{FieldContext, FieldElement, MultiIndex};
use crate::forms::{
    dlog_symbol, is_exact, lex_cmp, mask_indices, nu_member, top_class_coordinate, DifferentialForm, Frame, PureSymbol,
};
use crate::linalg::{nullspace, rank, Matrix};
use crate::pbasis::{extend_to_pbasis, in_p_subfield, p_independent};

/// Largest constant field reachable by extension.
const MAX_FIELD_ORDER: u64 = 1 << 16;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExtensionCertificate {
    /// Degree of the constant-field extension; 1 when none was needed.
    pub d: usize,
    pub description: String,
}

impl ExtensionCertificate {
    pub fn none() -> Self {
        ExtensionCertificate { d: 1, description: "none".into() }
    }

    fn root_extension(d: usize) -> Self {
        if d == 1 {
            return Self::none();
        }
        ExtensionCertificate { d, description: format!("constants extended by degree {d} to take a (p-1)-th root") }
    }
}

/// Per-symbol certificate of a decomposition relative to distinguished elements.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SymbolCertificate {
    /// `a_i` lies in F^p(symbol entries), one flag per distinguished element.
    pub contains: Vec<bool>,
    /// The dlog of the symbol lies in the ideal generated by the distinguished dlog.
    pub in_wedge_ideal: bool,
}

#[derive(Clone, Debug)]
pub struct SymbolDecomposition {
    pub extension: ExtensionCertificate,
    pub symbols: Vec<PureSymbol>,
    /// Coefficient of each symbol's dlog on the basis form it was produced for.
    pub scalars: Option<Vec<FieldElement>>,
    pub certificates: Vec<SymbolCertificate>,
    /// Frame over the (possibly extended) constants in which the symbols live.
    pub frame: Frame,
    /// Degree of the decomposed form.
    pub degree: usize,
}

impl SymbolDecomposition {
    pub fn context(&self) -> &FieldContext {
        self.frame.ctx()
    }

    pub fn dlog_sum(&self) -> Result<DifferentialForm> {
        sum_dlogs(&self.symbols, &self.frame, self.degree)
    }
}

fn sum_dlogs(symbols: &[PureSymbol], frame: &Frame, degree: usize) -> Result<DifferentialForm> {
    let mut acc = DifferentialForm::zero(frame, degree);
    for s in symbols {
        acc = acc.add(&dlog_symbol(s, frame)?)?;
    }
    Ok(acc)
}

fn require_rank_one(frame: &Frame) -> Result<()> {
    if frame.rank() != 1 {
        return Err(Error::FrameMismatch);
    }
    Ok(())
}

/// Coordinates of `f` on the basis 1, b, ..., b^(p-1) of a rank-one frame.
fn coordinates(frame: &Frame, f: &FieldElement) -> Result<Vec<FieldElement>> {
    let p = frame.ctx().p();
    let b = &frame.pbasis()[0];
    (0..p)
        .map(|i| {
            let part = frame.project(f, &MultiIndex(vec![i]))?;
            if part.is_zero() {
                Ok(part)
            } else {
                part.div(&b.pow(i as i64)?)
            }
        })
        .collect()
}

fn from_coordinates(frame: &Frame, y: &[FieldElement]) -> Result<FieldElement> {
    let b = &frame.pbasis()[0];
    let mut acc = frame.ctx().zero();
    let mut power = frame.ctx().one();
    for yi in y {
        if !yi.is_zero() {
            acc = acc.add(&yi.mul(&power)?)?;
        }
        power = power.mul(b)?;
    }
    Ok(acc)
}

/// Matrix of multiplication by `c` on the basis 1, ..., b^(p-1): column i holds c * b^i.
fn multiplication_matrix(frame: &Frame, c: &FieldElement) -> Result<Matrix> {
    let p = frame.ctx().p() as usize;
    let cc = coordinates(frame, c)?;
    let beta = frame.pbasis()[0].pow(p as i64)?;
    let mut m = vec![vec![frame.ctx().zero(); p]; p];
    for (l, row) in m.iter_mut().enumerate() {
        for (i, entry) in row.iter_mut().enumerate() {
            let j = (l + p - i) % p;
            if cc[j].is_zero() {
                continue;
            }
            *entry = if i + j >= p { cc[j].mul(&beta)? } else { cc[j].clone() };
        }
    }
    Ok(m)
}

/// Scales a kernel vector so that its last nonzero entry is 1.
fn normalize_last(v: Vec<FieldElement>) -> Result<Vec<FieldElement>> {
    let Some(last) = v.iter().rev().find(|e| !e.is_zero()).cloned() else {
        return Err(Error::internal("zero kernel vector"));
    };
    v.iter().map(|e| e.div(&last)).collect()
}

/// y with dy/y = c * db/b for the rank-one frame k(b) | k.
pub fn cartier_preimage(c: &FieldElement, frame: &Frame) -> Result<FieldElement> {
    require_rank_one(frame)?;
    if c.ctx() != frame.ctx() {
        return Err(Error::ContextMismatch);
    }
    if !nu_member(&DifferentialForm::term(frame, 1, c.clone())?)? {
        return Err(Error::NotInNu);
    }
    if c.is_zero() {
        return Ok(frame.ctx().one());
    }
    // theta(y) = c * y, with theta acting diagonally on the monomial basis
    let mut m = multiplication_matrix(frame, c)?;
    for (i, row) in m.iter_mut().enumerate() {
        for e in row.iter_mut() {
            *e = e.neg();
        }
        row[i] = row[i].add(&frame.ctx().int(i as i64))?;
    }
    let ker = nullspace(&m)?;
    let v = ker.into_iter().next().ok_or(Error::NotInNu)?;
    from_coordinates(frame, &normalize_last(v)?)
}

/// alpha with alpha * V = W for codimension-one k-subspaces of k(b), given by spanning coordinate vectors.
pub fn lemma34_scale(frame: &Frame, v_span: &[Vec<FieldElement>], w_span: &[Vec<FieldElement>]) -> Result<FieldElement> {
    require_rank_one(frame)?;
    let p = frame.ctx().p() as usize;
    if v_span.iter().chain(w_span).any(|v| v.len() != p) {
        return Err(Error::BadCodimension);
    }
    if v_span.is_empty() || w_span.is_empty() || rank(&v_span.to_vec())? != p - 1 || rank(&w_span.to_vec())? != p - 1 {
        return Err(Error::BadCodimension);
    }
    let psi = nullspace(&w_span.to_vec())?.into_iter().next().ok_or(Error::BadCodimension)?;
    // alpha * e lies in W = ker(psi) for every spanning vector e of V
    let mut rows = Vec::new();
    for e in v_span {
        let me = multiplication_matrix(frame, &from_coordinates(frame, e)?)?;
        let row = (0..p)
            .map(|i| {
                let mut acc = frame.ctx().zero();
                for l in 0..p {
                    if !psi[l].is_zero() && !me[l][i].is_zero() {
                        acc = acc.add(&psi[l].mul(&me[l][i])?)?;
                    }
                }
                Ok(acc)
            })
            .collect::<Result<Vec<_>>>()?;
        rows.push(row);
    }
    let v = nullspace(&rows)?.into_iter().next().ok_or_else(|| Error::internal("no scaling element"))?;
    from_coordinates(frame, &normalize_last(v)?)
}

fn divisors(n: u32) -> Vec<u32> {
    (1..=n).filter(|d| n % d == 0).collect()
}

/// An m-th root of `rho`, or the constant-field extension degree needed to find one.
fn root_in_field(rho: &FieldElement, m: u32) -> Result<FieldElement> {
    let ctx = rho.ctx();
    let gf = ctx.gf();
    if m == 1 {
        return Ok(rho.clone());
    }
    let unsupported = || Error::UnsupportedExtension(format!("{rho} has no {m}-th root over a constant-field extension"));
    if rho.is_zero() {
        return Err(Error::ZeroElement);
    }
    let lc = rho.num().lc();
    let Some(lead) = gf.nth_root(lc, m) else {
        for d in divisors(m).into_iter().skip(1) {
            let emb = gf.extension(d as usize)?;
            if emb.big().nth_root(emb.embed(lc), m).is_some() {
                return Err(Error::ExtensionRequired(d as usize));
            }
        }
        return Err(unsupported());
    };
    let num = rho.num().nth_root(gf, m, lead).ok_or_else(unsupported)?;
    let den = rho.den().nth_root(gf, m, 1).ok_or_else(unsupported)?;
    ctx.fraction(num, den)
}

/// (u, y) with form = u * dy/y; `ExtensionRequired` when the constants are too small.
fn normalize_degree_one(form: &DifferentialForm) -> Result<(FieldElement, FieldElement)> {
    let frame = form.frame();
    let p = frame.ctx().p();
    let a = form.coeff(1);
    let a0 = top_class_coordinate(form)?;
    if a0.is_zero() {
        return Err(Error::IsExact);
    }
    let rho = a.pow(p as i64)?.div(&a0)?;
    let scalar = root_in_field(&rho, p - 1)?;
    let y = cartier_preimage(&a.div(&scalar)?, frame)?;
    Ok((scalar, y))
}

/// Runs `step` over GF(q^d), growing d whenever an extension is requested.
fn with_extensions<T>(base: &FieldContext, mut step: impl FnMut(&FieldContext) -> Result<T>) -> Result<(usize, T)> {
    let mut d = 1usize;
    loop {
        let ctx = if d == 1 { base.clone() } else { base.extend_constants(d)? };
        match step(&ctx) {
            Err(Error::ExtensionRequired(e)) if base.parent().is_none() => {
                d *= e;
                if (base.gf().order() as u64).saturating_pow(d as u32) > MAX_FIELD_ORDER {
                    return Err(Error::UnsupportedExtension(format!(
                        "constant field of order {}^{d} is too large",
                        base.gf().order()
                    )));
                }
            }
            other => return other.map(|t| (d, t)),
        }
    }
}

fn lift_form(u: &DifferentialForm, ext: &FieldContext) -> Result<DifferentialForm> {
    if u.frame().ctx() == ext {
        return Ok(u.clone());
    }
    let frame = u.frame().restrict_constants(ext)?;
    u.restrict_constants_to(&frame)
}

/// Writes a non-exact degree-one form on a rank-one frame as u * dy/y with u in k.
pub fn lemma33_normalize(form: &DifferentialForm) -> Result<(ExtensionCertificate, FieldElement, FieldElement)> {
    require_rank_one(form.frame())?;
    if form.degree() != 1 {
        return Err(Error::NotTopDegree { degree: form.degree(), top: 1 });
    }
    if is_exact(form)? {
        return Err(Error::IsExact);
    }
    let (d, (u, y)) = with_extensions(form.frame().ctx(), |ext| normalize_degree_one(&lift_form(form, ext)?))?;
    Ok((ExtensionCertificate::root_extension(d), u, y))
}

fn annihilator(g: &[FieldElement], frame: &Frame) -> Result<FieldElement> {
    let ctx = frame.ctx();
    let p = ctx.p() as usize;
    if g.len() != p || g.iter().any(|e| e.ctx() != ctx) {
        return Err(Error::FrameMismatch);
    }
    if g[0].is_zero() {
        return Ok(ctx.one());
    }
    let v_span = nullspace(&vec![g.to_vec()])?;
    let w_span: Vec<Vec<FieldElement>> =
        (1..p).map(|i| (0..p).map(|j| if i == j { ctx.one() } else { ctx.zero() }).collect()).collect();
    let alpha = lemma34_scale(frame, &v_span, &w_span)?;
    let form = DifferentialForm::term(frame, 1, alpha)?;
    Ok(normalize_degree_one(&form)?.1)
}

/// c with g(c^i) = 0 for 1 <= i < p, where g is given by its values on 1, b, ..., b^(p-1).
pub fn lemma32_annihilator(g: &[FieldElement], frame: &Frame) -> Result<(ExtensionCertificate, FieldElement)> {
    require_rank_one(frame)?;
    let (d, c) = with_extensions(frame.ctx(), |ext| {
        let f = frame.restrict_constants(ext)?;
        let gl = g.iter().map(|e| e.restrict_to(ext)).collect::<Result<Vec<_>>>()?;
        annihilator(&gl, &f)
    })?;
    Ok((ExtensionCertificate::root_extension(d), c))
}

/// Evaluates a functional given on the monomial basis at `x`.
pub fn apply_functional(g: &[FieldElement], frame: &Frame, x: &FieldElement) -> Result<FieldElement> {
    let coords = coordinates(frame, x)?;
    let mut acc = frame.ctx().zero();
    for (gi, ci) in g.iter().zip(&coords) {
        if !gi.is_zero() && !ci.is_zero() {
            acc = acc.add(&gi.mul(ci)?)?;
        }
    }
    Ok(acc)
}

fn prepend(c: &FieldElement, symbols: Vec<PureSymbol>) -> Vec<PureSymbol> {
    symbols
        .into_iter()
        .map(|s| {
            let mut entries = vec![c.clone()];
            entries.extend(s.entries);
            PureSymbol { entries }
        })
        .collect()
}

/// Values of x -> class of x * u on 1, b, ..., b^(p-1).
fn class_functional(u: &DifferentialForm, b: &FieldElement) -> Result<Vec<FieldElement>> {
    let p = u.frame().ctx().p();
    let mut out = Vec::with_capacity(p as usize);
    let mut power = u.frame().ctx().one();
    for _ in 0..p {
        out.push(top_class_coordinate(&u.scale(&power)?)?);
        power = power.mul(b)?;
    }
    Ok(out)
}

/// The p-basis with each of its elements moved to the front in turn.
fn candidate_bases(basis: &[FieldElement]) -> Vec<Vec<FieldElement>> {
    (0..basis.len())
        .map(|j| {
            let mut upper = basis.to_vec();
            let b = upper.remove(j);
            upper.insert(0, b);
            upper
        })
        .collect()
}

/// Peels one basis element at a time. When the annihilator for one choice needs a
/// non-constant root, the other basis elements are tried first.
fn top_degree_symbols(u: &DifferentialForm) -> Result<Vec<PureSymbol>> {
    if u.is_zero() {
        return Ok(Vec::new());
    }
    let frame = u.frame();
    let mut wanted: Option<Error> = None;
    let mut last = None;
    for (i, upper) in candidate_bases(frame.pbasis()).into_iter().enumerate() {
        let attempt = if i == 0 {
            peel_first(u)
        } else {
            let moved = match Frame::new(frame.ctx(), frame.lower().to_vec(), upper) {
                Ok(f) => f,
                Err(Error::NotPIndependent) => continue,
                Err(e) => return Err(e),
            };
            peel_first(&u.change_pbasis_unchecked(&moved)?)
        };
        match attempt {
            Err(e @ Error::UnsupportedExtension(_)) => last = Some(e),
            Err(e @ Error::ExtensionRequired(_)) => {
                wanted.get_or_insert(e);
            }
            other => return other,
        }
    }
    Err(wanted.or(last).expect("rank is positive"))
}

fn peel_first(u: &DifferentialForm) -> Result<Vec<PureSymbol>> {
    let frame = u.frame();
    let ctx = frame.ctx();
    let r = frame.rank();
    let basis = frame.pbasis();
    let g = class_functional(u, &basis[0])?;
    let mut e_lower = frame.lower().to_vec();
    e_lower.extend(basis[1..].iter().cloned());
    let e_frame = Frame::new(ctx, e_lower, vec![basis[0].clone()])?;
    let c = annihilator(&g, &e_frame)?;
    if e_frame.theta(0, &c)?.is_zero() {
        return Err(Error::internal("annihilator lies in the base field"));
    }
    let mut upper = vec![c.clone()];
    upper.extend(basis[1..].iter().cloned());
    let new_frame = Frame::new(ctx, frame.lower().to_vec(), upper)?;
    let moved = u.change_pbasis_unchecked(&new_frame)?;
    let a = moved.coeff(new_frame.top_mask());
    if r == 1 {
        if a.is_zero() {
            return Ok(Vec::new());
        }
        let n = a
            .constant_value()
            .and_then(|v| ctx.gf().as_prime_field(v))
            .ok_or_else(|| Error::internal("last coefficient is not in the prime field"))?;
        return Ok(vec![PureSymbol::new(vec![c.pow(n as i64)?])?]);
    }
    let mut lower = frame.lower().to_vec();
    lower.push(c.clone());
    let sub_frame = Frame::new(ctx, lower, basis[1..].to_vec())?;
    let sub = DifferentialForm::term(&sub_frame, sub_frame.top_mask(), a)?;
    Ok(prepend(&c, top_degree_symbols(&sub)?))
}

/// Decomposes a top-degree form in the kernel of the Artin-Schreier operator into dlogs of pure symbols.
pub fn prop41_decompose(u: &DifferentialForm) -> Result<SymbolDecomposition> {
    let r = u.frame().rank();
    if u.degree() != r {
        return Err(Error::NotTopDegree { degree: u.degree(), top: r });
    }
    if !nu_member(u)? {
        return Err(Error::NotInNu);
    }
    let (d, (lifted, symbols)) = with_extensions(u.frame().ctx(), |ext| {
        let v = lift_form(u, ext)?;
        let s = top_degree_symbols(&v)?;
        Ok((v, s))
    })?;
    if sum_dlogs(&symbols, lifted.frame(), r)? != lifted {
        return Err(Error::internal("symbol decomposition does not reproduce the form"));
    }
    Ok(SymbolDecomposition {
        extension: ExtensionCertificate::root_extension(d),
        symbols,
        scalars: None,
        certificates: Vec::new(),
        frame: lifted.frame().clone(),
        degree: lifted.degree(),
    })
}

/// Symbols for `a * omega_s ^ eta` in an adapted frame whose last `n` basis elements are distinguished.
fn peel(a: &FieldElement, s: u16, frame: &Frame, n: usize) -> Result<Vec<PureSymbol>> {
    let ctx = frame.ctx();
    let basis = frame.pbasis();
    let r = basis.len() - n;
    let (bs, tail) = basis.split_at(r);
    if s == 0 && tail.is_empty() {
        let v = a
            .constant_value()
            .and_then(|v| ctx.gf().as_prime_field(v))
            .ok_or_else(|| Error::internal("degree-zero coefficient is not in the prime field"))?;
        return Ok(vec![PureSymbol { entries: Vec::new() }; v as usize]);
    }
    if s == 0 {
        let mut lower = frame.lower().to_vec();
        lower.extend(bs.iter().cloned());
        let inner = Frame::new(ctx, lower, tail.to_vec())?;
        return top_degree_symbols(&DifferentialForm::term(&inner, inner.top_mask(), a.clone())?);
    }
    let idx = mask_indices(s);
    let (first, last) = (idx[0], *idx.last().expect("nonempty"));
    let mut g_lower = frame.lower().to_vec();
    let mut g_upper = Vec::new();
    for (j, b) in bs.iter().enumerate() {
        if j < first || j > last {
            g_lower.push(b.clone());
        } else {
            g_upper.push(b.clone());
        }
    }
    g_upper.extend(tail.iter().cloned());
    let g_frame = Frame::new(ctx, g_lower, g_upper)?;
    let u = DifferentialForm::term(&g_frame, g_frame.top_mask(), a.clone())?;
    let g = class_functional(&u, &bs[first])?;
    let mut e_lower = frame.lower().to_vec();
    e_lower.extend(basis.iter().enumerate().filter(|(j, _)| *j != first).map(|(_, b)| b.clone()));
    let e_frame = Frame::new(ctx, e_lower, vec![bs[first].clone()])?;
    let c = annihilator(&g, &e_frame)?;
    let th = frame.theta(first, &c)?;
    if th.is_zero() {
        return Err(Error::internal("annihilator lies in the base field"));
    }
    let next = a.mul(&c)?.div(&th)?;
    Ok(prepend(&c, peel(&next, s & !(1 << first), frame, n)?))
}

/// Descent loop: peels the lexicographically largest remaining index set until nothing is left.
fn descend(target: &DifferentialForm, n: usize) -> Result<(Vec<PureSymbol>, Vec<FieldElement>)> {
    let frame = target.frame();
    let total = frame.rank();
    let r = total - n;
    let a_mask: u16 = (((1u32 << n) - 1) << r) as u16;
    let m = target.degree();
    let cap = binomial(r, m - n) + 1;
    let mut rest = target.clone();
    let mut symbols = Vec::new();
    let mut scalars = Vec::new();
    for _ in 0..=cap {
        if rest.is_zero() {
            return Ok((symbols, scalars));
        }
        if rest.coeffs().keys().any(|k| k & a_mask != a_mask) {
            return Err(Error::NotInWedgeIdeal);
        }
        let s = rest.coeffs().keys().map(|k| k & !a_mask).max_by(|x, y| lex_cmp(*x, *y)).expect("nonzero");
        let a = rest.coeff(s | a_mask);
        let new = peel(&a, s, frame, n)?;
        for sym in &new {
            let dl = dlog_symbol(sym, frame)?;
            scalars.push(dl.coeff(s | a_mask));
            rest = rest.sub(&dl)?;
        }
        if rest.coeffs().keys().any(|k| lex_cmp(k & !a_mask, s) != Ordering::Less) {
            return Err(Error::internal("descent did not decrease the leading index set"));
        }
        symbols.extend(new);
    }
    Err(Error::internal("descent exceeded its iteration bound"))
}

/// Symbols ending in the distinguished elements, found by decomposing the cofactor of eta relative to
/// F^p(a_1, ..., a_n). `None` when that cofactor is not itself in the kernel of the Artin-Schreier operator.
fn tail_symbols(target: &DifferentialForm, n: usize) -> Result<Option<Vec<PureSymbol>>> {
    let frame = target.frame();
    let ctx = frame.ctx();
    let r = frame.rank() - n;
    let a_mask: u16 = (((1u32 << n) - 1) << r) as u16;
    let (bs, tail) = frame.pbasis().split_at(r);
    let mut lower = frame.lower().to_vec();
    lower.extend(tail.iter().cloned());
    let k_frame = Frame::new(ctx, lower, bs.to_vec())?;
    let mut coeffs = BTreeMap::new();
    for (k, v) in target.coeffs() {
        if k & a_mask != a_mask {
            return Err(Error::NotInWedgeIdeal);
        }
        coeffs.insert(k & !a_mask, v.clone());
    }
    let omega = DifferentialForm::from_coeffs(&k_frame, target.degree() - n, coeffs)?;
    if !nu_member(&omega)? {
        return Ok(None);
    }
    let (heads, _) = descend(&omega, 0)?;
    Ok(Some(
        heads
            .into_iter()
            .map(|h| {
                let mut entries = h.entries;
                entries.extend(tail.iter().cloned());
                PureSymbol { entries }
            })
            .collect(),
    ))
}

/// Tries [`tail_symbols`] and falls back to the general descent.
fn wedge_symbols(target: &DifferentialForm, n: usize) -> Result<(Vec<PureSymbol>, Vec<FieldElement>)> {
    if let Some(symbols) = tail_symbols(target, n)? {
        let ones = vec![target.frame().ctx().one(); symbols.len()];
        return Ok((symbols, ones));
    }
    descend(target, n).map_err(|e| match e {
        Error::NotInWedgeIdeal => Error::internal("descent left the wedge ideal"),
        other => other,
    })
}

fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

fn adapted_frame(ctx: &FieldContext, a: &[FieldElement]) -> Result<Frame> {
    if a.is_empty() {
        return Err(Error::NotPIndependent);
    }
    if a.iter().any(|e| e.ctx() != ctx) {
        return Err(Error::ContextMismatch);
    }
    match p_independent(a) {
        Ok(true) => {}
        Ok(false) | Err(Error::ZeroElement) => return Err(Error::NotPIndependent),
        Err(e) => return Err(e),
    }
    Frame::new(ctx, Vec::new(), extend_to_pbasis(a)?)
}

fn eta(frame: &Frame, n: usize) -> Result<DifferentialForm> {
    let r = frame.rank() - n;
    DifferentialForm::term(frame, (((1u32 << n) - 1) << r) as u16, frame.ctx().one())
}

fn eta_in(frame: &Frame, a: &[FieldElement]) -> Result<DifferentialForm> {
    let mut acc = DifferentialForm::scalar(frame, frame.ctx().one())?;
    for ai in a {
        acc = acc.wedge(&frame.dlog(ai)?)?;
    }
    Ok(acc)
}

/// Decomposes omega ^ dlog(a_1) ^ ... ^ dlog(a_n) into symbols ending with the distinguished dlogs.
pub fn cor52_decompose(omega: &DifferentialForm, a: &[FieldElement]) -> Result<SymbolDecomposition> {
    let ctx = omega.frame().ctx();
    if !omega.frame().lower().is_empty() {
        return Err(Error::FrameMismatch);
    }
    let frame = adapted_frame(ctx, a)?;
    let target = omega.change_pbasis(&frame)?.wedge(&eta(&frame, a.len())?)?;
    if !nu_member(&target)? {
        return Err(Error::NotInNu);
    }
    let plain = omega.wedge(&eta_in(omega.frame(), a)?)?;
    let (d, (lifted, (symbols, scalars))) = with_extensions(ctx, |ext| {
        let out = wedge_symbols(&lift_form(&target, ext)?, a.len())?;
        Ok((lift_form(&plain, ext)?, out))
    })?;
    if sum_dlogs(&symbols, lifted.frame(), lifted.degree())? != lifted {
        return Err(Error::internal("symbol decomposition does not reproduce the form"));
    }
    Ok(SymbolDecomposition {
        extension: ExtensionCertificate::root_extension(d),
        symbols,
        scalars: Some(scalars),
        certificates: Vec::new(),
        frame: lifted.frame().clone(),
        degree: lifted.degree(),
    })
}

/// Decomposes u in the ideal of dlog(a_1) ^ ... ^ dlog(a_n) into symbols whose entries generate each a_i over F^p.
pub fn thm14_decompose(u: &DifferentialForm, a: &[FieldElement]) -> Result<SymbolDecomposition> {
    let ctx = u.frame().ctx();
    if !u.frame().lower().is_empty() {
        return Err(Error::FrameMismatch);
    }
    let frame = adapted_frame(ctx, a)?;
    let n = a.len();
    if !nu_member(u)? {
        return Err(Error::NotInNu);
    }
    let moved = u.change_pbasis(&frame)?;
    if !moved.is_zero() && moved.degree() < n {
        return Err(Error::NotInWedgeIdeal);
    }
    let (d, (symbols, scalars)) = with_extensions(ctx, |ext| wedge_symbols(&lift_form(&moved, ext)?, n))?;
    if d > 1 {
        return Err(Error::UnsupportedExtension(format!(
            "decomposition needs constants of degree {d} and cannot be folded back to the base field"
        )));
    }
    let a_mask: u16 = (((1u32 << n) - 1) << (frame.rank() - n)) as u16;
    let mut certificates = Vec::with_capacity(symbols.len());
    for sym in &symbols {
        let contains = a.iter().map(|ai| in_p_subfield(ai, &sym.entries)).collect::<Result<Vec<_>>>()?;
        let dl = dlog_symbol(sym, &frame)?;
        let in_wedge_ideal = dl.coeffs().keys().all(|k| k & a_mask == a_mask);
        if contains.iter().any(|c| !c) || !in_wedge_ideal {
            return Err(Error::internal("symbol fails its containment certificate"));
        }
        certificates.push(SymbolCertificate { contains, in_wedge_ideal });
    }
    if sum_dlogs(&symbols, u.frame(), u.degree())? != *u {
        return Err(Error::internal("symbol decomposition does not reproduce the form"));
    }
    Ok(SymbolDecomposition {
        extension: ExtensionCertificate::none(),
        symbols,
        scalars: Some(scalars),
        certificates,
        frame: u.frame().clone(),
        degree: u.degree(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gf2x() -> (FieldContext, Frame, FieldElement) {
        let c = FieldContext::with_names(2, 1, &["x"]).unwrap();
        let f = Frame::standard(&c);
        let x = c.gen(0);
        (c, f, x)
    }

    fn ratio(x: &FieldElement) -> FieldElement {
        x.div(&x.add(&x.ctx().one()).unwrap()).unwrap()
    }

    #[test]
    fn cartier_examples() {
        let (c, f, x) = gf2x();
        assert_eq!(cartier_preimage(&c.zero(), &f).unwrap(), c.one());
        assert_eq!(cartier_preimage(&c.one(), &f).unwrap(), x);
        let y = cartier_preimage(&ratio(&x), &f).unwrap();
        assert_eq!(y, x.add(&c.one()).unwrap());
        assert_eq!(cartier_preimage(&x, &f), Err(Error::NotInNu));
    }

    #[test]
    fn cartier_in_char_three() {
        let c = FieldContext::with_names(3, 1, &["x", "y"]).unwrap();
        let f = Frame::new(&c, vec![c.gen(1)], vec![c.gen(0)]).unwrap();
        let b = c.gen(0).add(&c.gen(1)).unwrap().mul(&c.gen(0)).unwrap();
        let form = f.dlog(&b).unwrap();
        let y = cartier_preimage(&form.coeff(1), &f).unwrap();
        assert_eq!(f.dlog(&y).unwrap(), form);
    }

    #[test]
    fn scaling_examples() {
        let (c, f, x) = gf2x();
        let v = vec![vec![c.one(), c.zero()]];
        let w = vec![vec![c.zero(), c.one()]];
        assert_eq!(lemma34_scale(&f, &v, &w).unwrap(), x);
        assert_eq!(lemma34_scale(&f, &v, &v).unwrap(), c.one());
        assert_eq!(lemma34_scale(&f, &[], &w), Err(Error::BadCodimension));
        assert_eq!(lemma34_scale(&f, &[vec![c.one()]], &w), Err(Error::BadCodimension));
    }

    #[test]
    fn normalize_examples() {
        let (c, f, x) = gf2x();
        let (cert, u, y) = lemma33_normalize(&f.dlog(&x).unwrap()).unwrap();
        assert_eq!((cert.d, u, y), (1, c.one(), x.clone()));
        let form = DifferentialForm::term(&f, 1, ratio(&x)).unwrap();
        let (cert, u, y) = lemma33_normalize(&form).unwrap();
        assert_eq!((cert.d, u, y), (1, c.one(), x.add(&c.one()).unwrap()));
        let exact = DifferentialForm::term(&f, 1, x.clone()).unwrap();
        assert_eq!(lemma33_normalize(&exact).unwrap_err(), Error::IsExact);
    }

    #[test]
    fn annihilator_examples() {
        let (c, f, x) = gf2x();
        assert_eq!(lemma32_annihilator(&[c.zero(), c.one()], &f).unwrap().1, c.one());
        assert_eq!(lemma32_annihilator(&[c.one(), c.zero()], &f).unwrap().1, x);
        assert_eq!(lemma32_annihilator(&[c.one(), c.one()], &f).unwrap().1, x.add(&c.one()).unwrap());
    }

    #[test]
    fn annihilator_in_char_three() {
        let c = FieldContext::with_names(3, 1, &["x", "y"]).unwrap();
        let f = Frame::new(&c, vec![c.gen(1)], vec![c.gen(0)]).unwrap();
        let b = c.gen(0).add(&c.gen(1)).unwrap().mul(&c.gen(0).pow(2).unwrap()).unwrap();
        let g = class_functional(&f.dlog(&b).unwrap(), &c.gen(0)).unwrap();
        let (cert, cc) = lemma32_annihilator(&g, &f).unwrap();
        let ext = if cert.d == 1 { c.clone() } else { c.extend_constants(cert.d).unwrap() };
        let fe = f.restrict_constants(&ext).unwrap();
        let ge: Vec<_> = g.iter().map(|e| e.restrict_to(&ext).unwrap()).collect();
        for i in 1..3 {
            assert!(apply_functional(&ge, &fe, &cc.pow(i).unwrap()).unwrap().is_zero());
        }
    }

    #[test]
    fn top_degree_examples() {
        let (_, f, x) = gf2x();
        let d = prop41_decompose(&f.dlog(&x).unwrap()).unwrap();
        assert_eq!(d.symbols.len(), 1);
        assert_eq!(d.dlog_sum().unwrap(), f.dlog(&x).unwrap());
        let form = DifferentialForm::term(&f, 1, ratio(&x)).unwrap();
        let d = prop41_decompose(&form).unwrap();
        assert_eq!(d.dlog_sum().unwrap(), form);

        let c = FieldContext::with_names(2, 1, &["x", "y"]).unwrap();
        let f = Frame::standard(&c);
        let (x, y) = (c.gen(0), c.gen(1));
        let sym = PureSymbol::new(vec![x.clone(), y.mul(&x.add(&y).unwrap()).unwrap()]).unwrap();
        let u = dlog_symbol(&sym, &f).unwrap();
        let d = prop41_decompose(&u).unwrap();
        assert_eq!(d.extension.d, 1);
        assert_eq!(d.dlog_sum().unwrap(), u);
        assert_eq!(prop41_decompose(&f.dlog(&x).unwrap()).unwrap_err(), Error::NotTopDegree { degree: 1, top: 2 });
    }

    #[test]
    fn top_degree_rejects_non_members() {
        let (_, f, x) = gf2x();
        let form = DifferentialForm::term(&f, 1, x).unwrap();
        assert_eq!(prop41_decompose(&form).unwrap_err(), Error::NotInNu);
    }

    #[test]
    fn wedge_ideal_examples() {
        let c = FieldContext::with_names(2, 1, &["x", "y"]).unwrap();
        let f = Frame::standard(&c);
        let (x, y) = (c.gen(0), c.gen(1));
        let d = cor52_decompose(&f.dlog(&y).unwrap(), &[x.clone()]).unwrap();
        assert_eq!(d.symbols.len(), 1);
        assert_eq!(d.scalars.as_ref().unwrap()[0], c.one());
        let target = f.dlog(&y).unwrap().wedge(&f.dlog(&x).unwrap()).unwrap();
        assert_eq!(d.dlog_sum().unwrap(), target);
        let zero = DifferentialForm::zero(&f, 1);
        assert!(cor52_decompose(&zero, &[x.clone()]).unwrap().symbols.is_empty());
    }

    #[test]
    fn wedge_ideal_degree_zero_case() {
        let (c, f, x) = gf2x();
        let omega = DifferentialForm::scalar(&f, ratio(&x)).unwrap();
        let d = cor52_decompose(&omega, &[x.clone()]).unwrap();
        assert_eq!(d.dlog_sum().unwrap(), DifferentialForm::term(&f, 1, ratio(&x)).unwrap());
        assert_eq!(d.context(), &c);
    }

    #[test]
    fn containment_examples() {
        let c = FieldContext::with_names(2, 1, &["x", "y"]).unwrap();
        let f = Frame::standard(&c);
        let (x, y) = (c.gen(0), c.gen(1));
        let u = dlog_symbol(&PureSymbol::new(vec![y.clone(), x.clone()]).unwrap(), &f).unwrap();
        let d = thm14_decompose(&u, &[x.clone()]).unwrap();
        assert_eq!(d.dlog_sum().unwrap(), u);
        assert!(d.certificates.iter().all(|c| c.contains == vec![true] && c.in_wedge_ideal));

        let u = dlog_symbol(&PureSymbol::new(vec![x.mul(&y).unwrap(), x.clone()]).unwrap(), &f).unwrap();
        let d = thm14_decompose(&u, &[x.clone()]).unwrap();
        assert_eq!(d.dlog_sum().unwrap(), u);
        for s in &d.symbols {
            assert!(in_p_subfield(&x, &s.entries).unwrap());
        }
        assert!(thm14_decompose(&DifferentialForm::zero(&f, 2), &[x.clone()]).unwrap().symbols.is_empty());
    }

    #[test]
    fn containment_errors() {
        let c = FieldContext::with_names(2, 1, &["x", "y"]).unwrap();
        let f = Frame::standard(&c);
        let (x, y) = (c.gen(0), c.gen(1));
        let u = f.dlog(&y).unwrap();
        assert_eq!(thm14_decompose(&u, &[x.clone()]).unwrap_err(), Error::NotInWedgeIdeal);
        assert_eq!(thm14_decompose(&u, &[x.pow(2).unwrap()]).unwrap_err(), Error::NotPIndependent);
        let not_nu = DifferentialForm::term(&f, 3, x.clone()).unwrap();
        assert_eq!(thm14_decompose(&not_nu, &[x.clone()]).unwrap_err(), Error::NotInNu);
    }
}

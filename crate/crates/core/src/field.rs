//! Rational function fields GF(q)(x_1, ..., x_v) and their elements.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::gf::{ConstantEmbedding, GaloisField};
use crate::poly::{gcd, Mono, Poly, MAX_VARS};

pub const DEFAULT_MAX_DEGREE: u32 = 512;

#[derive(Clone)]
pub struct FieldContext(Arc<CtxInner>);

struct CtxInner {
    gf: GaloisField,
    vars: Vec<String>,
    max_degree: u32,
    gcd: bool,
    parent: Option<Parent>,
}

/// The base context of a constant-field extension together with the embedding of constants.
#[derive(Clone)]
pub struct Parent {
    pub ctx: FieldContext,
    pub embedding: ConstantEmbedding,
}

impl PartialEq for FieldContext {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || (self.0.gf == other.0.gf && self.0.vars == other.0.vars)
    }
}

impl Eq for FieldContext {}

impl fmt::Debug for FieldContext {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}({})", self.0.gf, self.0.vars.join(","))
    }
}

fn valid_name(name: &str) -> bool {
    let mut chars = name.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() || c == '_' => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_') && name != "w" && name != "dlog"
}

impl FieldContext {
    pub fn new(gf: GaloisField, vars: Vec<String>) -> Result<Self> {
        if vars.is_empty() {
            return Err(Error::InvalidField("at least one variable is required".into()));
        }
        if vars.len() > MAX_VARS {
            return Err(Error::InvalidField(format!("at most {MAX_VARS} variables are supported")));
        }
        for (i, v) in vars.iter().enumerate() {
            if !valid_name(v) {
                return Err(Error::InvalidField(format!("invalid variable name `{v}`")));
            }
            if vars[..i].contains(v) {
                return Err(Error::InvalidField(format!("duplicate variable `{v}`")));
            }
        }
        Ok(FieldContext(Arc::new(CtxInner {
            gf,
            vars,
            max_degree: DEFAULT_MAX_DEGREE,
            gcd: true,
            parent: None,
        })))
    }

    /// Convenience constructor: GF(p^e) with the default modulus.
    pub fn with_names(p: u32, e: usize, vars: &[&str]) -> Result<Self> {
        Self::new(GaloisField::new(p, e)?, vars.iter().map(|s| s.to_string()).collect())
    }

    fn rebuild(&self, f: impl FnOnce(&mut CtxInner)) -> Self {
        let mut inner = CtxInner {
            gf: self.0.gf.clone(),
            vars: self.0.vars.clone(),
            max_degree: self.0.max_degree,
            gcd: self.0.gcd,
            parent: self.0.parent.clone(),
        };
        f(&mut inner);
        FieldContext(Arc::new(inner))
    }

    pub fn with_max_degree(&self, bound: u32) -> Self {
        self.rebuild(|c| c.max_degree = bound)
    }

    /// Toggles full GCD normalization of fractions (on by default).
    pub fn with_gcd(&self, on: bool) -> Self {
        self.rebuild(|c| c.gcd = on)
    }

    pub fn gf(&self) -> &GaloisField {
        &self.0.gf
    }

    pub fn p(&self) -> u32 {
        self.0.gf.p()
    }

    pub fn vars(&self) -> &[String] {
        &self.0.vars
    }

    pub fn nvars(&self) -> usize {
        self.0.vars.len()
    }

    pub fn max_degree(&self) -> u32 {
        self.0.max_degree
    }

    pub fn uses_gcd(&self) -> bool {
        self.0.gcd
    }

    pub fn var_index(&self, name: &str) -> Result<usize> {
        self.0
            .vars
            .iter()
            .position(|v| v == name)
            .ok_or_else(|| Error::UnknownVariable(name.to_string()))
    }

    pub fn parent(&self) -> Option<&Parent> {
        self.0.parent.as_ref()
    }

    /// The context with variables appended, sharing the constant field.
    pub fn with_extra_vars(&self, extra: &[String]) -> Result<Self> {
        let mut vars = self.0.vars.clone();
        vars.extend(extra.iter().cloned());
        let ctx = FieldContext::new(self.0.gf.clone(), vars)?;
        Ok(ctx.rebuild(|c| {
            c.max_degree = self.0.max_degree;
            c.gcd = self.0.gcd;
        }))
    }

    /// The same function field over GF(q^d), linked back to this context.
    pub fn extend_constants(&self, d: usize) -> Result<Self> {
        let embedding = self.0.gf.extension(d)?;
        let big = embedding.big().clone();
        Ok(self.rebuild(|c| {
            c.gf = big;
            c.parent = Some(Parent { ctx: self.clone(), embedding });
        }))
    }

    /// The root of the chain of constant-field extensions and the total degree.
    pub fn root(&self) -> (FieldContext, usize) {
        match self.parent() {
            Some(par) => (par.ctx.clone(), par.embedding.degree()),
            None => (self.clone(), 1),
        }
    }

    pub fn zero(&self) -> FieldElement {
        FieldElement { ctx: self.clone(), num: Poly::zero(), den: Poly::one() }
    }

    pub fn one(&self) -> FieldElement {
        self.constant(1)
    }

    pub fn constant(&self, c: u32) -> FieldElement {
        FieldElement { ctx: self.clone(), num: Poly::constant(c), den: Poly::one() }
    }

    pub fn int(&self, n: i64) -> FieldElement {
        self.constant(self.gf().from_int(n))
    }

    pub fn gen(&self, i: usize) -> FieldElement {
        assert!(i < self.nvars(), "variable index out of range");
        FieldElement { ctx: self.clone(), num: Poly::var(i), den: Poly::one() }
    }

    pub fn var(&self, name: &str) -> Result<FieldElement> {
        Ok(self.gen(self.var_index(name)?))
    }

    pub fn gens(&self) -> Vec<FieldElement> {
        (0..self.nvars()).map(|i| self.gen(i)).collect()
    }

    pub fn from_poly(&self, num: Poly) -> Result<FieldElement> {
        FieldElement::build(self, num, Poly::one())
    }

    pub fn fraction(&self, num: Poly, den: Poly) -> Result<FieldElement> {
        FieldElement::build(self, num, den)
    }

    pub fn monomial(&self, exps: &[u32], c: u32) -> Result<FieldElement> {
        self.from_poly(Poly::monomial(Mono::from_exponents(exps), c))
    }
}

/// Exponents mod p, one per variable of the context.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct MultiIndex(pub Vec<u32>);

impl MultiIndex {
    pub fn zero(r: usize) -> Self {
        MultiIndex(vec![0; r])
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&a| a == 0)
    }

    /// All multi-indices in [0, p-1]^r in lexicographic order.
    pub fn all(p: u32, r: usize) -> Vec<MultiIndex> {
        let mut out = vec![MultiIndex(Vec::new())];
        for _ in 0..r {
            out = out
                .into_iter()
                .flat_map(|m| {
                    (0..p).map(move |a| {
                        let mut v = m.0.clone();
                        v.push(a);
                        MultiIndex(v)
                    })
                })
                .collect();
        }
        out
    }
}

#[derive(Clone)]
pub struct FieldElement {
    ctx: FieldContext,
    num: Poly,
    den: Poly,
}

impl fmt::Debug for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl PartialEq for FieldElement {
    fn eq(&self, other: &Self) -> bool {
        rf_eq(self, other).unwrap_or(false)
    }
}

impl Eq for FieldElement {}

/// Semantic equality by cross-multiplication.
pub fn rf_eq(a: &FieldElement, b: &FieldElement) -> Result<bool> {
    a.check_ctx(b)?;
    if a.num == b.num && a.den == b.den {
        return Ok(true);
    }
    if a.ctx.uses_gcd() && b.ctx.uses_gcd() {
        return Ok(false);
    }
    let gf = a.ctx.gf();
    Ok(a.num.mul(gf, &b.den) == b.num.mul(gf, &a.den))
}

impl FieldElement {
    fn build(ctx: &FieldContext, num: Poly, den: Poly) -> Result<Self> {
        if den.is_zero() {
            return Err(Error::DivisionByZero);
        }
        if num.is_zero() {
            return Ok(ctx.zero());
        }
        let gf = ctx.gf();
        let (num, den) = if ctx.uses_gcd() {
            let g = gcd(gf, &num, &den);
            if g.is_one() {
                (num, den)
            } else {
                (num.div_exact(gf, &g).expect("gcd divides"), den.div_exact(gf, &g).expect("gcd divides"))
            }
        } else {
            let m = num.monomial_content().gcd_with(&den.monomial_content());
            if m.is_one() {
                (num, den)
            } else {
                let mp = Poly::monomial(m, 1);
                (num.div_exact(gf, &mp).unwrap(), den.div_exact(gf, &mp).unwrap())
            }
        };
        Self::finish(ctx, num, den)
    }

    /// Scales the denominator to be monic and applies the degree guard.
    fn finish(ctx: &FieldContext, num: Poly, den: Poly) -> Result<Self> {
        let gf = ctx.gf();
        let (num, den) = match den.lc() {
            1 => (num, den),
            c => {
                let inv = gf.inv(c)?;
                (num.scale(gf, inv), den.scale(gf, inv))
            }
        };
        let bound = ctx.max_degree();
        let degree = num.total_degree().max(den.total_degree());
        if degree > bound {
            return Err(Error::DegreeOverflow { degree, bound });
        }
        Ok(FieldElement { ctx: ctx.clone(), num, den })
    }

    fn check_ctx(&self, other: &Self) -> Result<()> {
        if self.ctx == other.ctx {
            Ok(())
        } else {
            Err(Error::ContextMismatch)
        }
    }

    pub fn ctx(&self) -> &FieldContext {
        &self.ctx
    }

    pub fn num(&self) -> &Poly {
        &self.num
    }

    pub fn den(&self) -> &Poly {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.num.is_one() && self.den.is_one()
    }

    /// The value when the element is a constant of GF(q).
    pub fn constant_value(&self) -> Option<u32> {
        if self.den.is_one() {
            self.num.constant_value()
        } else {
            None
        }
    }

    pub fn total_degree(&self) -> u32 {
        self.num.total_degree().max(self.den.total_degree())
    }

    /// Number of stored terms in numerator and denominator.
    pub fn size(&self) -> usize {
        self.num.len() + self.den.len()
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_ctx(other)?;
        if self.is_zero() {
            return Ok(other.clone());
        }
        if other.is_zero() {
            return Ok(self.clone());
        }
        let gf = self.ctx.gf();
        if !self.ctx.uses_gcd() {
            let num = self.num.mul(gf, &other.den).add(gf, &other.num.mul(gf, &self.den));
            return Self::build(&self.ctx, num, self.den.mul(gf, &other.den));
        }
        if self.den == other.den {
            let num = self.num.add(gf, &other.num);
            if self.den.is_one() {
                return Self::finish(&self.ctx, num, Poly::one());
            }
            return Self::build(&self.ctx, num, self.den.clone());
        }
        let g = gcd(gf, &self.den, &other.den);
        if g.is_one() {
            let num = self.num.mul(gf, &other.den).add(gf, &other.num.mul(gf, &self.den));
            if num.is_zero() {
                return Ok(self.ctx.zero());
            }
            return Self::finish(&self.ctx, num, self.den.mul(gf, &other.den));
        }
        let ad = self.den.div_exact(gf, &g).expect("gcd divides");
        let bd = other.den.div_exact(gf, &g).expect("gcd divides");
        let num = self.num.mul(gf, &bd).add(gf, &other.num.mul(gf, &ad));
        if num.is_zero() {
            return Ok(self.ctx.zero());
        }
        let den = self.den.mul(gf, &bd);
        let h = gcd(gf, &num, &g);
        if h.is_one() {
            Self::finish(&self.ctx, num, den)
        } else {
            Self::finish(
                &self.ctx,
                num.div_exact(gf, &h).expect("gcd divides"),
                den.div_exact(gf, &h).expect("gcd divides"),
            )
        }
    }

    pub fn neg(&self) -> Self {
        FieldElement { ctx: self.ctx.clone(), num: self.num.neg(self.ctx.gf()), den: self.den.clone() }
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.neg())
    }

    pub fn scale(&self, c: u32) -> Self {
        if c == 0 {
            return self.ctx.zero();
        }
        FieldElement { ctx: self.ctx.clone(), num: self.num.scale(self.ctx.gf(), c), den: self.den.clone() }
    }

    pub fn scale_int(&self, n: i64) -> Self {
        self.scale(self.ctx.gf().from_int(n))
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check_ctx(other)?;
        if self.is_zero() || other.is_zero() {
            return Ok(self.ctx.zero());
        }
        let gf = self.ctx.gf();
        if !self.ctx.uses_gcd() {
            return Self::build(&self.ctx, self.num.mul(gf, &other.num), self.den.mul(gf, &other.den));
        }
        let reduce = |a: &Poly, b: &Poly| -> (Poly, Poly) {
            if a.is_constant() || b.is_one() {
                return (a.clone(), b.clone());
            }
            let g = gcd(gf, a, b);
            if g.is_one() {
                (a.clone(), b.clone())
            } else {
                (a.div_exact(gf, &g).unwrap(), b.div_exact(gf, &g).unwrap())
            }
        };
        let (an, bd) = reduce(&self.num, &other.den);
        let (bn, ad) = reduce(&other.num, &self.den);
        Self::finish(&self.ctx, an.mul(gf, &bn), ad.mul(gf, &bd))
    }

    pub fn inv(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Self::finish(&self.ctx, self.den.clone(), self.num.clone())
    }

    pub fn div(&self, other: &Self) -> Result<Self> {
        self.mul(&other.inv()?)
    }

    pub fn pow(&self, k: i64) -> Result<Self> {
        let base = if k < 0 { self.inv()? } else { self.clone() };
        let k = k.unsigned_abs();
        if k == 0 {
            return Ok(self.ctx.one());
        }
        let gf = self.ctx.gf();
        let bound = self.ctx.max_degree() as u64;
        let degree = base.total_degree() as u64 * k;
        if degree > bound {
            return Err(Error::DegreeOverflow { degree: degree.min(u32::MAX as u64) as u32, bound: bound as u32 });
        }
        let k = k as u32;
        Self::finish(&self.ctx, base.num.pow(gf, k), base.den.pow(gf, k))
    }

    /// The p-th power, computed term-wise.
    pub fn frobenius(&self) -> Result<Self> {
        let gf = self.ctx.gf();
        Self::finish(&self.ctx, self.num.frobenius(gf), self.den.frobenius(gf))
    }

    pub fn pth_root(&self) -> Result<Self> {
        let gf = self.ctx.gf();
        if self.ctx.uses_gcd() {
            return match (self.num.pth_root(gf), self.den.pth_root(gf)) {
                (Some(n), Some(d)) => Self::finish(&self.ctx, n, d),
                _ => Err(Error::NotAPthPower),
            };
        }
        let p = gf.p();
        let n = self.num.mul(gf, &self.den.pow(gf, p - 1));
        let d = self.den.pow(gf, p);
        match (n.pth_root(gf), d.pth_root(gf)) {
            (Some(n), Some(d)) => Self::build(&self.ctx, n, d),
            _ => Err(Error::NotAPthPower),
        }
    }

    pub fn is_pth_power(&self) -> bool {
        self.pth_root().is_ok()
    }

    /// Partial derivative with respect to the variable with index `var`.
    pub fn partial(&self, var: usize) -> Result<Self> {
        if var >= self.ctx.nvars() {
            return Err(Error::UnknownVariable(format!("#{var}")));
        }
        let gf = self.ctx.gf();
        let dn = self.num.partial(gf, var);
        let dd = self.den.partial(gf, var);
        if dd.is_zero() {
            if dn.is_zero() {
                return Ok(self.ctx.zero());
            }
            return Self::build(&self.ctx, dn, self.den.clone());
        }
        let num = dn.mul(gf, &self.den).sub(gf, &self.num.mul(gf, &dd));
        Self::build(&self.ctx, num, self.den.mul(gf, &self.den))
    }

    pub fn partial_named(&self, name: &str) -> Result<Self> {
        self.partial(self.ctx.var_index(name)?)
    }

    /// Splits into p-residue classes: self = sum over alpha of c_alpha * x^alpha with c_alpha in F^p.
    pub fn pclass_decompose(&self) -> Result<BTreeMap<MultiIndex, FieldElement>> {
        let gf = self.ctx.gf();
        let p = gf.p();
        let v = self.ctx.nvars();
        let mut out = BTreeMap::new();
        if self.is_zero() {
            return Ok(out);
        }
        let (n, d) = match self.den.pth_root(gf) {
            Some(_) => (self.num.clone(), self.den.clone()),
            None => (self.num.mul(gf, &self.den.pow(gf, p - 1)), self.den.pow(gf, p)),
        };
        let mut buckets: BTreeMap<MultiIndex, Vec<(Mono, u32)>> = BTreeMap::new();
        for (m, c) in n.terms() {
            let alpha = MultiIndex((0..v).map(|i| m.0[i] as u32 % p).collect());
            let mut rest = *m;
            for i in 0..v {
                rest.0[i] -= alpha.0[i] as u16;
            }
            buckets.entry(alpha).or_default().push((rest, *c));
        }
        for (alpha, terms) in buckets {
            let c = Self::build(&self.ctx, Poly::from_terms(gf, terms), d.clone())?;
            out.insert(alpha, c);
        }
        Ok(out)
    }

    /// The monomial x^alpha in this element's context.
    pub fn basis_monomial(ctx: &FieldContext, alpha: &MultiIndex) -> FieldElement {
        let exps: Vec<u32> = alpha.0.clone();
        FieldElement { ctx: ctx.clone(), num: Poly::monomial(Mono::from_exponents(&exps), 1), den: Poly::one() }
    }

    fn map_coeffs_into(&self, target: &FieldContext, f: impl Fn(u32) -> Option<u32>) -> Result<Self> {
        let tgf = target.gf();
        let map = |p: &Poly| -> Result<Poly> {
            let mut terms = Vec::with_capacity(p.len());
            for (m, c) in p.terms() {
                terms.push((*m, f(*c).ok_or_else(|| Error::internal("coefficient does not descend"))?));
            }
            Ok(Poly::from_terms(tgf, terms))
        };
        Self::build(target, map(&self.num)?, map(&self.den)?)
    }

    /// Reinterprets the element over a constant-field extension of its context.
    pub fn restrict_to(&self, ext: &FieldContext) -> Result<Self> {
        if *ext == self.ctx {
            return Ok(self.clone());
        }
        let par = ext.parent().ok_or(Error::ContextMismatch)?;
        if par.ctx != self.ctx {
            return Err(Error::ContextMismatch);
        }
        let emb = &par.embedding;
        self.map_coeffs_into(ext, |c| Some(emb.embed(c)))
    }

    /// Applies the generator of Gal(GF(q^d)/GF(q)) to all constants.
    pub fn conjugate(&self) -> Result<Self> {
        let par = self.ctx.parent().ok_or(Error::ContextMismatch)?;
        let emb = par.embedding.clone();
        self.map_coeffs_into(&self.ctx.clone(), |c| Some(emb.frobenius(c)))
    }

    /// Trace down to the base context: the sum of all Galois conjugates.
    pub fn trace_down(&self) -> Result<Self> {
        let par = self.ctx.parent().ok_or(Error::ContextMismatch)?;
        let d = par.embedding.degree();
        let mut acc = self.clone();
        let mut conj = self.clone();
        for _ in 1..d {
            conj = conj.conjugate()?;
            acc = acc.add(&conj)?;
        }
        acc.descend()
    }

    /// Moves an element whose constants lie in the base field down to the base context.
    pub fn descend(&self) -> Result<Self> {
        let par = self.ctx.parent().ok_or(Error::ContextMismatch)?;
        let emb = par.embedding.clone();
        self.map_coeffs_into(&par.ctx.clone(), |c| emb.descend(c))
    }

    /// Moves the element into a context whose variable list extends this one's.
    pub fn lift_to(&self, target: &FieldContext) -> Result<Self> {
        let v = self.ctx.nvars();
        if target.gf() != self.ctx.gf() || target.nvars() < v || target.vars()[..v] != *self.ctx.vars() {
            return Err(Error::ContextMismatch);
        }
        Ok(FieldElement { ctx: target.clone(), num: self.num.clone(), den: self.den.clone() })
    }

    /// Moves the element into a context that uses only a prefix of the variables.
    pub fn project_to(&self, target: &FieldContext) -> Result<Self> {
        let v = target.nvars();
        if target.gf() != self.ctx.gf() || self.ctx.vars()[..v.min(self.ctx.nvars())] != *target.vars() {
            return Err(Error::ContextMismatch);
        }
        if (v..self.ctx.nvars()).any(|i| self.num.uses_var(i) || self.den.uses_var(i)) {
            return Err(Error::ContextMismatch);
        }
        Ok(FieldElement { ctx: target.clone(), num: self.num.clone(), den: self.den.clone() })
    }

    /// Substitutes elements for the variables of the context.
    pub fn substitute(&self, images: &[FieldElement], target: &FieldContext) -> Result<Self> {
        let eval = |p: &Poly| -> Result<FieldElement> {
            let mut acc = target.zero();
            for (m, c) in p.terms() {
                let mut t = target.constant(*c);
                for (i, &e) in m.0.iter().enumerate() {
                    if e > 0 {
                        t = t.mul(&images[i].pow(e as i64)?)?;
                    }
                }
                acc = acc.add(&t)?;
            }
            Ok(acc)
        };
        eval(&self.num)?.div(&eval(&self.den)?)
    }
}

// Display

fn format_coeff_factor(gf: &GaloisField, c: u32) -> Option<String> {
    if c == 1 {
        return None;
    }
    let s = gf.format(c);
    Some(if s.contains('+') { format!("({s})") } else { s })
}

fn format_term(gf: &GaloisField, vars: &[String], m: &Mono, c: u32) -> String {
    let mut factors: Vec<String> = Vec::new();
    for (i, &e) in m.0.iter().enumerate() {
        match e {
            0 => {}
            1 => factors.push(vars[i].clone()),
            _ => factors.push(format!("{}^{}", vars[i], e)),
        }
    }
    if factors.is_empty() {
        return gf.format(c);
    }
    if let Some(cf) = format_coeff_factor(gf, c) {
        factors.insert(0, cf);
    }
    factors.join("*")
}

pub fn format_poly(gf: &GaloisField, vars: &[String], p: &Poly) -> String {
    if p.is_zero() {
        return "0".into();
    }
    p.terms().iter().map(|(m, c)| format_term(gf, vars, m, *c)).collect::<Vec<_>>().join("+")
}

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let gf = self.ctx.gf();
        let vars = self.ctx.vars();
        let num = format_poly(gf, vars, &self.num);
        if self.den.is_one() {
            return write!(f, "{num}");
        }
        let num_atomic = self.num.len() == 1 && !num.contains('+');
        let den = format_poly(gf, vars, &self.den);
        let den_atomic = self.den.len() == 1 && !den.contains('*') && !den.contains('+');
        let num = if num_atomic { num } else { format!("({num})") };
        let den = if den_atomic { den } else { format!("({den})") };
        write!(f, "{num}/{den}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx2() -> FieldContext {
        FieldContext::with_names(2, 1, &["x", "y"]).unwrap()
    }

    #[test]
    fn cross_multiplication_equality() {
        let c = ctx2();
        let x = c.gen(0);
        let y = c.gen(1);
        let one = c.one();
        assert_eq!(x.div(&x).unwrap(), one);
        let a = x.pow(2).unwrap().add(&one).unwrap().div(&x.add(&one).unwrap()).unwrap();
        assert_eq!(a, x.add(&one).unwrap());
        assert_ne!(x, y);
        let nogcd = c.with_gcd(false);
        let xn = nogcd.gen(0);
        let on = nogcd.one();
        let b = xn.pow(2).unwrap().add(&on).unwrap().div(&xn.add(&on).unwrap()).unwrap();
        assert!(rf_eq(&b, &xn.add(&on).unwrap()).unwrap());
    }

    #[test]
    fn pth_roots() {
        let c = ctx2();
        let x = c.gen(0);
        let y = c.gen(1);
        let s = x.pow(2).unwrap().add(&y.pow(2).unwrap()).unwrap();
        assert_eq!(s.pth_root().unwrap(), x.add(&y).unwrap());
        assert_eq!(x.pth_root(), Err(Error::NotAPthPower));
        let q = x.pow(2).unwrap().mul(&y.pow(4).unwrap()).unwrap().div(&x.pow(4).unwrap()).unwrap();
        let r = q.pth_root().unwrap();
        assert_eq!(r, x.mul(&y.pow(2).unwrap()).unwrap().div(&x.pow(2).unwrap()).unwrap());
    }

    #[test]
    fn partials() {
        let c = ctx2();
        let x = c.gen(0);
        let y = c.gen(1);
        let f = x.pow(2).unwrap().mul(&y).unwrap().add(&x).unwrap();
        assert_eq!(f.partial(0).unwrap(), c.one());
        assert_eq!(x.inv().unwrap().partial(0).unwrap(), x.pow(-2).unwrap());
        assert!(y.partial(0).unwrap().is_zero());
        assert!(matches!(x.partial_named("z"), Err(Error::UnknownVariable(_))));
    }

    #[test]
    fn pclass_examples() {
        let c = FieldContext::with_names(2, 1, &["x"]).unwrap();
        let x = c.gen(0);
        let one = c.one();
        let a = x.pow(3).unwrap().add(&x.pow(2).unwrap()).unwrap().add(&one).unwrap();
        let parts = a.pclass_decompose().unwrap();
        assert_eq!(parts[&MultiIndex(vec![0])], x.pow(2).unwrap().add(&one).unwrap());
        assert_eq!(parts[&MultiIndex(vec![1])], x.pow(2).unwrap());
        let parts = x.inv().unwrap().pclass_decompose().unwrap();
        assert_eq!(parts.len(), 1);
        assert_eq!(parts[&MultiIndex(vec![1])], x.pow(-2).unwrap());
    }

    #[test]
    fn display_reparses_shape() {
        let c = FieldContext::with_names(2, 2, &["x", "y"]).unwrap();
        let x = c.gen(0);
        let y = c.gen(1);
        let w = c.constant(c.gf().generator());
        let a = x.pow(2).unwrap().add(&y).unwrap().div(&x.add(&c.one()).unwrap()).unwrap();
        assert_eq!(a.to_string(), "(x^2+y)/(x+1)");
        let b = w.add(&c.one()).unwrap().mul(&x).unwrap();
        assert_eq!(b.to_string(), "(w+1)*x");
        assert_eq!(x.mul(&y).unwrap().inv().unwrap().to_string(), "1/(x*y)");
    }

    #[test]
    fn degree_guard() {
        let c = FieldContext::with_names(3, 1, &["x"]).unwrap().with_max_degree(10);
        let x = c.gen(0);
        assert!(matches!(x.pow(11), Err(Error::DegreeOverflow { .. })));
        assert!(x.pow(10).is_ok());
    }

    #[test]
    fn trace_down_of_constant_extension() {
        let c = FieldContext::with_names(2, 1, &["x"]).unwrap();
        let e = c.extend_constants(3).unwrap();
        let x = e.gen(0);
        let w = e.constant(e.gf().generator());
        let t = w.mul(&x).unwrap().trace_down().unwrap();
        let tr = e.parent().unwrap().embedding.trace(e.gf().generator());
        assert_eq!(t, c.gen(0).scale(tr));
        let back = c.gen(0).restrict_to(&e).unwrap().trace_down().unwrap();
        assert_eq!(back, c.gen(0).scale_int(3));
    }
}

//! Differential forms over a framed extension F | k on the logarithmic basis.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::field::{FieldContext, FieldElement, MultiIndex};
use crate::linalg::{inverse, Matrix};
use crate::pbasis::{in_p_subfield, jacobian, p_independent};

/// A full p-basis of F over F^p split as `lower | upper`, with k = F^p(lower).
#[derive(Clone)]
pub struct Frame(Arc<FrameInner>);

struct FrameInner {
    ctx: FieldContext,
    lower: Vec<FieldElement>,
    upper: Vec<FieldElement>,
    // inverse Jacobian of (lower ++ upper) in the variables; None for the standard frame
    jinv: Option<Matrix>,
}

impl PartialEq for Frame {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0)
            || (self.0.ctx == other.0.ctx && self.0.lower == other.0.lower && self.0.upper == other.0.upper)
    }
}

impl fmt::Debug for Frame {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Frame(k = F^p({:?}); basis {:?})", self.0.lower, self.0.upper)
    }
}

impl Frame {
    /// k = F^p with the variables as p-basis.
    pub fn standard(ctx: &FieldContext) -> Self {
        Frame(Arc::new(FrameInner { ctx: ctx.clone(), lower: Vec::new(), upper: ctx.gens(), jinv: None }))
    }

    pub fn new(ctx: &FieldContext, lower: Vec<FieldElement>, upper: Vec<FieldElement>) -> Result<Self> {
        let mut all = lower.clone();
        all.extend(upper.iter().cloned());
        if all.len() != ctx.nvars() || all.iter().any(|e| e.ctx() != ctx) {
            return Err(Error::FrameMismatch);
        }
        if upper.len() > 16 {
            return Err(Error::FrameMismatch);
        }
        if lower.is_empty() && upper == ctx.gens() {
            return Ok(Self::standard(ctx));
        }
        if all.iter().any(|e| e.is_zero()) || !p_independent(&all)? {
            return Err(Error::NotPIndependent);
        }
        let jinv = inverse(&jacobian(&all)?).map_err(|e| match e {
            Error::NoSolution => Error::NotPIndependent,
            other => other,
        })?;
        Ok(Frame(Arc::new(FrameInner { ctx: ctx.clone(), lower, upper, jinv: Some(jinv) })))
    }

    pub fn ctx(&self) -> &FieldContext {
        &self.0.ctx
    }

    pub fn lower(&self) -> &[FieldElement] {
        &self.0.lower
    }

    pub fn pbasis(&self) -> &[FieldElement] {
        &self.0.upper
    }

    pub fn rank(&self) -> usize {
        self.0.upper.len()
    }

    pub fn is_standard(&self) -> bool {
        self.0.jinv.is_none()
    }

    pub fn top_mask(&self) -> u16 {
        ((1u32 << self.rank()) - 1) as u16
    }

    /// Whether both frames present the same lower field k.
    pub fn same_lower_field(&self, other: &Frame) -> Result<bool> {
        if self.ctx() != other.ctx() || self.0.lower.len() != other.0.lower.len() {
            return Ok(false);
        }
        if self.0.lower == other.0.lower {
            return Ok(true);
        }
        for a in &other.0.lower {
            if !in_p_subfield(a, &self.0.lower)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Partial derivatives with respect to the p-basis elements (upper part).
    pub fn partials(&self, f: &FieldElement) -> Result<Vec<FieldElement>> {
        let v = self.ctx().nvars();
        let dx: Vec<FieldElement> = (0..v).map(|l| f.partial(l)).collect::<Result<_>>()?;
        match &self.0.jinv {
            None => Ok(dx),
            Some(jinv) => {
                let off = self.0.lower.len();
                (0..self.rank())
                    .map(|j| {
                        let mut acc = self.ctx().zero();
                        for l in 0..v {
                            if !dx[l].is_zero() && !jinv[l][off + j].is_zero() {
                                acc = acc.add(&dx[l].mul(&jinv[l][off + j])?)?;
                            }
                        }
                        Ok(acc)
                    })
                    .collect()
            }
        }
    }

    /// The Euler operators b_j * d/db_j applied to `f`.
    pub fn thetas(&self, f: &FieldElement) -> Result<Vec<FieldElement>> {
        let parts = self.partials(f)?;
        parts.iter().zip(&self.0.upper).map(|(d, b)| if d.is_zero() { Ok(d.clone()) } else { d.mul(b) }).collect()
    }

    pub fn theta(&self, j: usize, f: &FieldElement) -> Result<FieldElement> {
        if self.is_standard() {
            return f.partial(j)?.mul(&self.0.upper[j]);
        }
        Ok(self.thetas(f)?.swap_remove(j))
    }

    /// The alpha-component of `f` in the decomposition F = sum of k * b^alpha.
    pub fn project(&self, f: &FieldElement, alpha: &MultiIndex) -> Result<FieldElement> {
        if alpha.0.len() != self.rank() {
            return Err(Error::FrameMismatch);
        }
        let p = self.ctx().p();
        let mut cur = f.clone();
        for (j, &a) in alpha.0.iter().enumerate() {
            if cur.is_zero() {
                break;
            }
            // 1 - (theta_j - a)^(p-1)
            let mut g = cur.clone();
            for _ in 0..p - 1 {
                g = self.theta(j, &g)?.sub(&g.scale_int(a as i64))?;
            }
            cur = cur.sub(&g)?;
        }
        Ok(cur)
    }

    /// The frame over GF(q^d) obtained by extending constants.
    pub fn restrict_constants(&self, ext: &FieldContext) -> Result<Frame> {
        let lower = self.0.lower.iter().map(|e| e.restrict_to(ext)).collect::<Result<Vec<_>>>()?;
        let upper = self.0.upper.iter().map(|e| e.restrict_to(ext)).collect::<Result<Vec<_>>>()?;
        let jinv = match &self.0.jinv {
            None => None,
            Some(m) => Some(
                m.iter()
                    .map(|row| row.iter().map(|e| e.restrict_to(ext)).collect::<Result<Vec<_>>>())
                    .collect::<Result<Vec<_>>>()?,
            ),
        };
        Ok(Frame(Arc::new(FrameInner { ctx: ext.clone(), lower, upper, jinv })))
    }

    /// The frame over the base constants, when all frame data is defined there.
    pub fn descend_constants(&self) -> Result<Frame> {
        let down = |e: &FieldElement| e.descend().map_err(|_| Error::FrameMismatch);
        let lower = self.0.lower.iter().map(down).collect::<Result<Vec<_>>>()?;
        let upper = self.0.upper.iter().map(down).collect::<Result<Vec<_>>>()?;
        let jinv = match &self.0.jinv {
            None => None,
            Some(m) => Some(m.iter().map(|row| row.iter().map(down).collect::<Result<Vec<_>>>()).collect::<Result<Vec<_>>>()?),
        };
        let ctx = self.ctx().parent().ok_or(Error::FrameMismatch)?.ctx.clone();
        Ok(Frame(Arc::new(FrameInner { ctx, lower, upper, jinv })))
    }

    /// db/b expressed on this frame's logarithmic basis.
    pub fn dlog(&self, b: &FieldElement) -> Result<DifferentialForm> {
        if b.is_zero() {
            return Err(Error::ZeroEntry);
        }
        if b.ctx() != self.ctx() {
            return Err(Error::ContextMismatch);
        }
        let th = self.thetas(b)?;
        let mut coeffs = BTreeMap::new();
        for (j, t) in th.into_iter().enumerate() {
            if !t.is_zero() {
                coeffs.insert(1u16 << j, t.div(b)?);
            }
        }
        Ok(DifferentialForm { frame: self.clone(), degree: 1, coeffs })
    }
}

pub fn mask_indices(mask: u16) -> Vec<usize> {
    (0..16).filter(|i| mask & (1 << i) != 0).collect()
}

pub fn indices_mask(idx: &[usize]) -> u16 {
    idx.iter().fold(0u16, |m, &i| m | (1 << i))
}

/// Sign of the permutation sorting the concatenation of `s` then `t`; zero on overlap.
pub fn wedge_sign(s: u16, t: u16) -> i64 {
    if s & t != 0 {
        return 0;
    }
    let mut inversions = 0u32;
    for j in mask_indices(t) {
        inversions += (s >> (j + 1)).count_ones();
    }
    if inversions % 2 == 0 {
        1
    } else {
        -1
    }
}

/// Lexicographic comparison of index tuples given as masks.
pub fn lex_cmp(a: u16, b: u16) -> std::cmp::Ordering {
    mask_indices(a).cmp(&mask_indices(b))
}

#[derive(Clone)]
pub struct DifferentialForm {
    frame: Frame,
    degree: usize,
    coeffs: BTreeMap<u16, FieldElement>,
}

impl PartialEq for DifferentialForm {
    fn eq(&self, other: &Self) -> bool {
        self.frame == other.frame && self.degree == other.degree && self.coeffs == other.coeffs
    }
}

impl fmt::Debug for DifferentialForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for DifferentialForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            return write!(f, "0");
        }
        let mut parts = Vec::new();
        for (m, c) in &self.coeffs {
            let idx = mask_indices(*m);
            let cs = c.to_string();
            let cs = if cs.contains('+') && !(cs.starts_with('(') && cs.ends_with(')') && !cs.contains(")/")) {
                format!("({cs})")
            } else {
                cs
            };
            if idx.is_empty() {
                parts.push(cs);
                continue;
            }
            let logs: Vec<String> = idx.iter().map(|&i| format!("dlog({})", self.frame.pbasis()[i])).collect();
            parts.push(format!("{}*{}", cs, logs.join("^")));
        }
        write!(f, "{}", parts.join(" + "))
    }
}

impl DifferentialForm {
    pub fn zero(frame: &Frame, degree: usize) -> Self {
        DifferentialForm { frame: frame.clone(), degree, coeffs: BTreeMap::new() }
    }

    pub fn scalar(frame: &Frame, c: FieldElement) -> Result<Self> {
        Self::term(frame, 0, c)
    }

    /// The form `c * omega_s` for the index set `mask`.
    pub fn term(frame: &Frame, mask: u16, c: FieldElement) -> Result<Self> {
        if c.ctx() != frame.ctx() {
            return Err(Error::ContextMismatch);
        }
        if (mask as u32) >> frame.rank() != 0 {
            return Err(Error::FrameMismatch);
        }
        let mut coeffs = BTreeMap::new();
        if !c.is_zero() {
            coeffs.insert(mask, c);
        }
        Ok(DifferentialForm { frame: frame.clone(), degree: mask.count_ones() as usize, coeffs })
    }

    pub fn from_coeffs(frame: &Frame, degree: usize, coeffs: BTreeMap<u16, FieldElement>) -> Result<Self> {
        for (m, c) in &coeffs {
            if m.count_ones() as usize != degree || (*m as u32) >> frame.rank() != 0 {
                return Err(Error::FrameMismatch);
            }
            if c.ctx() != frame.ctx() {
                return Err(Error::ContextMismatch);
            }
        }
        let coeffs = coeffs.into_iter().filter(|(_, c)| !c.is_zero()).collect();
        Ok(DifferentialForm { frame: frame.clone(), degree, coeffs })
    }

    pub fn frame(&self) -> &Frame {
        &self.frame
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn coeffs(&self) -> &BTreeMap<u16, FieldElement> {
        &self.coeffs
    }

    pub fn coeff(&self, mask: u16) -> FieldElement {
        self.coeffs.get(&mask).cloned().unwrap_or_else(|| self.frame.ctx().zero())
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    fn check(&self, other: &Self) -> Result<()> {
        if self.frame != other.frame {
            return Err(Error::FrameMismatch);
        }
        Ok(())
    }

    fn map_coeffs(&self, f: impl Fn(&FieldElement) -> Result<FieldElement>) -> Result<Self> {
        let mut coeffs = BTreeMap::new();
        for (m, c) in &self.coeffs {
            let v = f(c)?;
            if !v.is_zero() {
                coeffs.insert(*m, v);
            }
        }
        Ok(DifferentialForm { frame: self.frame.clone(), degree: self.degree, coeffs })
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        if self.degree != other.degree {
            if self.is_zero() {
                return Ok(other.clone());
            }
            if other.is_zero() {
                return Ok(self.clone());
            }
            return Err(Error::FrameMismatch);
        }
        let mut coeffs = self.coeffs.clone();
        for (m, c) in &other.coeffs {
            match coeffs.get(m) {
                Some(a) => {
                    let s = a.add(c)?;
                    if s.is_zero() {
                        coeffs.remove(m);
                    } else {
                        coeffs.insert(*m, s);
                    }
                }
                None => {
                    coeffs.insert(*m, c.clone());
                }
            }
        }
        Ok(DifferentialForm { frame: self.frame.clone(), degree: self.degree, coeffs })
    }

    pub fn neg(&self) -> Self {
        DifferentialForm {
            frame: self.frame.clone(),
            degree: self.degree,
            coeffs: self.coeffs.iter().map(|(m, c)| (*m, c.neg())).collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.neg())
    }

    pub fn scale(&self, c: &FieldElement) -> Result<Self> {
        if c.is_zero() {
            return Ok(Self::zero(&self.frame, self.degree));
        }
        self.map_coeffs(|a| a.mul(c))
    }

    pub fn scale_int(&self, n: i64) -> Self {
        let c = self.frame.ctx().gf().from_int(n);
        if c == 0 {
            return Self::zero(&self.frame, self.degree);
        }
        self.map_coeffs(|a| Ok(a.scale(c))).expect("scaling by a constant cannot fail")
    }

    pub fn wedge(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        let degree = self.degree + other.degree;
        let mut out = Self::zero(&self.frame, degree);
        if degree > self.frame.rank() {
            return Ok(out);
        }
        for (s, a) in &self.coeffs {
            for (t, b) in &other.coeffs {
                let sign = wedge_sign(*s, *t);
                if sign == 0 {
                    continue;
                }
                let c = a.mul(b)?;
                let c = if sign < 0 { c.neg() } else { c };
                let m = s | t;
                let v = match out.coeffs.get(&m) {
                    Some(old) => old.add(&c)?,
                    None => c,
                };
                if v.is_zero() {
                    out.coeffs.remove(&m);
                } else {
                    out.coeffs.insert(m, v);
                }
            }
        }
        Ok(out)
    }

    pub fn differential(&self) -> Result<Self> {
        let mut acc: BTreeMap<u16, FieldElement> = BTreeMap::new();
        for (s, c) in &self.coeffs {
            let th = self.frame.thetas(c)?;
            for (j, t) in th.into_iter().enumerate() {
                let bit = 1u16 << j;
                if t.is_zero() || s & bit != 0 {
                    continue;
                }
                let t = if wedge_sign(bit, *s) < 0 { t.neg() } else { t };
                let m = s | bit;
                let v = match acc.get(&m) {
                    Some(old) => old.add(&t)?,
                    None => t,
                };
                if v.is_zero() {
                    acc.remove(&m);
                } else {
                    acc.insert(m, v);
                }
            }
        }
        Ok(DifferentialForm { frame: self.frame.clone(), degree: self.degree + 1, coeffs: acc })
    }

    /// Re-expresses the form on the logarithmic basis of another frame with the same k.
    pub fn change_pbasis(&self, new_frame: &Frame) -> Result<Self> {
        if *new_frame == self.frame {
            return Ok(self.clone());
        }
        if !self.frame.same_lower_field(new_frame)? || new_frame.rank() != self.frame.rank() {
            return Err(Error::FrameMismatch);
        }
        self.change_pbasis_unchecked(new_frame)
    }

    pub(crate) fn change_pbasis_unchecked(&self, new_frame: &Frame) -> Result<Self> {
        let logs: Vec<DifferentialForm> =
            self.frame.pbasis().iter().map(|b| new_frame.dlog(b)).collect::<Result<_>>()?;
        let mut out = Self::zero(new_frame, self.degree);
        for (s, c) in &self.coeffs {
            let mut t = DifferentialForm::scalar(new_frame, c.clone())?;
            for i in mask_indices(*s) {
                t = t.wedge(&logs[i])?;
            }
            out = out.add(&t)?;
        }
        Ok(out)
    }

    /// The alpha-component of every coefficient, via spectral projectors of the Euler operators.
    pub fn component_project_via_operators(&self, alpha: &MultiIndex) -> Result<Self> {
        if alpha.0.len() != self.frame.rank() {
            return Err(Error::FrameMismatch);
        }
        self.map_coeffs(|c| self.frame.project(c, alpha))
    }

    /// The alpha-component on the standard frame, by bucketing exponents mod p.
    pub fn component_project_via_classes(&self, alpha: &MultiIndex) -> Result<Self> {
        if !self.frame.is_standard() {
            return Err(Error::FrameMismatch);
        }
        let ctx = self.frame.ctx().clone();
        self.map_coeffs(|c| {
            let parts = c.pclass_decompose()?;
            match parts.get(alpha) {
                Some(ca) => ca.mul(&FieldElement::basis_monomial(&ctx, alpha)),
                None => Ok(ctx.zero()),
            }
        })
    }

    pub fn component_project(&self, alpha: &MultiIndex) -> Result<Self> {
        if self.frame.is_standard() {
            self.component_project_via_classes(alpha)
        } else {
            self.component_project_via_operators(alpha)
        }
    }

    /// All nonzero components keyed by multi-index.
    pub fn components(&self) -> Result<BTreeMap<MultiIndex, DifferentialForm>> {
        let mut out: BTreeMap<MultiIndex, DifferentialForm> = BTreeMap::new();
        if self.frame.is_standard() {
            let ctx = self.frame.ctx().clone();
            for (s, c) in &self.coeffs {
                for (alpha, ca) in c.pclass_decompose()? {
                    let v = ca.mul(&FieldElement::basis_monomial(&ctx, &alpha))?;
                    let t = DifferentialForm::term(&self.frame, *s, v)?;
                    let entry = out.entry(alpha).or_insert_with(|| Self::zero(&self.frame, self.degree));
                    *entry = entry.add(&t)?;
                }
            }
        } else {
            for alpha in MultiIndex::all(self.frame.ctx().p(), self.frame.rank()) {
                let c = self.component_project_via_operators(&alpha)?;
                if !c.is_zero() {
                    out.insert(alpha, c);
                }
            }
        }
        Ok(out)
    }

    pub fn inverse_cartier(&self) -> Result<Self> {
        self.map_coeffs(|c| c.frobenius())
    }

    /// The form with the restriction of all coefficients to GF(q^d); the p-basis is unchanged.
    pub fn restrict_constants_to(&self, ext_frame: &Frame) -> Result<Self> {
        let ctx = ext_frame.ctx().clone();
        let coeffs = self.coeffs.iter().map(|(m, c)| Ok((*m, c.restrict_to(&ctx)?))).collect::<Result<_>>()?;
        Ok(DifferentialForm { frame: ext_frame.clone(), degree: self.degree, coeffs })
    }
}

pub fn wedge(u: &DifferentialForm, v: &DifferentialForm) -> Result<DifferentialForm> {
    u.wedge(v)
}

pub fn differential(u: &DifferentialForm) -> Result<DifferentialForm> {
    u.differential()
}

pub fn component_project(u: &DifferentialForm, alpha: &MultiIndex) -> Result<DifferentialForm> {
    u.component_project(alpha)
}

pub fn change_pbasis(u: &DifferentialForm, new_frame: &Frame) -> Result<DifferentialForm> {
    u.change_pbasis(new_frame)
}

pub fn inverse_cartier(u: &DifferentialForm) -> Result<DifferentialForm> {
    u.inverse_cartier()
}

/// Exactness: the 0-component vanishes and the form is closed.
pub fn is_exact(u: &DifferentialForm) -> Result<bool> {
    if u.degree() == 0 {
        return Err(Error::DegreeZero);
    }
    if u.is_zero() {
        return Ok(true);
    }
    let zero = MultiIndex::zero(u.frame().rank());
    Ok(u.component_project(&zero)?.is_zero() && u.differential()?.is_zero())
}

/// Membership in the kernel of the Artin-Schreier operator.
pub fn nu_member(u: &DifferentialForm) -> Result<bool> {
    let diff = u.inverse_cartier()?.sub(u)?;
    if u.degree() == 0 {
        return Ok(diff.is_zero());
    }
    is_exact(&diff)
}

/// The coordinate of the class of a top-degree form against the top logarithmic symbol.
pub fn top_class_coordinate(u: &DifferentialForm) -> Result<FieldElement> {
    let r = u.frame().rank();
    if u.degree() != r {
        return Err(Error::NotTopDegree { degree: u.degree(), top: r });
    }
    let zero = MultiIndex::zero(r);
    Ok(u.component_project(&zero)?.coeff(u.frame().top_mask()))
}

#[derive(Clone, PartialEq, Eq)]
pub struct PureSymbol {
    pub entries: Vec<FieldElement>,
}

impl PureSymbol {
    pub fn new(entries: Vec<FieldElement>) -> Result<Self> {
        if entries.iter().any(|e| e.is_zero()) {
            return Err(Error::ZeroEntry);
        }
        Ok(PureSymbol { entries })
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

impl fmt::Display for PureSymbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.entries.iter().map(|e| e.to_string()).collect();
        write!(f, "{{{}}}", parts.join(", "))
    }
}

impl fmt::Debug for PureSymbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

pub fn dlog_symbol(sigma: &PureSymbol, frame: &Frame) -> Result<DifferentialForm> {
    let mut acc = DifferentialForm::scalar(frame, frame.ctx().one())?;
    for b in &sigma.entries {
        acc = acc.wedge(&frame.dlog(b)?)?;
        if acc.is_zero() {
            return Ok(DifferentialForm::zero(frame, sigma.len()));
        }
    }
    Ok(acc)
}

fn check_prime_to_p(d: usize, p: u32) -> Result<()> {
    if d == 0 || d % p as usize == 0 {
        return Err(Error::NotPrimeToP { d, p });
    }
    Ok(())
}

/// Extends constants GF(q) -> GF(q^d); coefficients embed and the p-basis is unchanged.
pub fn restrict_constant_ext(u: &DifferentialForm, d: usize) -> Result<DifferentialForm> {
    check_prime_to_p(d, u.frame().ctx().p())?;
    if d == 1 {
        return Ok(u.clone());
    }
    let ext = u.frame().ctx().extend_constants(d)?;
    let frame = u.frame().restrict_constants(&ext)?;
    u.restrict_constants_to(&frame)
}

/// Trace of coefficients from GF(q^d) back down to GF(q).
pub fn transfer_constant_ext(u: &DifferentialForm, d: usize) -> Result<DifferentialForm> {
    let ctx = u.frame().ctx();
    check_prime_to_p(d, ctx.p())?;
    if d == 1 && ctx.parent().is_none() {
        return Ok(u.clone());
    }
    let par = ctx.parent().ok_or(Error::FrameMismatch)?;
    if par.embedding.degree() != d {
        return Err(Error::FrameMismatch);
    }
    let frame = u.frame().descend_constants()?;
    let mut coeffs = BTreeMap::new();
    for (m, c) in u.coeffs() {
        let t = c.trace_down()?;
        if !t.is_zero() {
            coeffs.insert(*m, t);
        }
    }
    Ok(DifferentialForm { frame, degree: u.degree(), coeffs })
}

//! Geometrically nonreduced hypersurfaces T_k^p - g over F = GF(q)(x_1, ..., x_v), their function
//! fields, and restriction of forms from F to F(X).

use std::collections::BTreeMap;
use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::field::{FieldContext, FieldElement};
use crate::forms::{dlog_symbol, mask_indices, DifferentialForm, Frame, PureSymbol};
use crate::pbasis::{in_p_subfield, independent_subset};
use crate::random;

/// A polynomial in the hypersurface variables with coefficients in the base field.
#[derive(Clone, Debug, PartialEq)]
pub struct HypersurfacePoly {
    base: FieldContext,
    tvars: Vec<String>,
    terms: BTreeMap<Vec<u32>, FieldElement>,
}

impl HypersurfacePoly {
    pub fn new(base: &FieldContext, tvars: Vec<String>, terms: Vec<(Vec<u32>, FieldElement)>) -> Result<Self> {
        for (i, t) in tvars.iter().enumerate() {
            if base.vars().contains(t) || tvars[..i].contains(t) {
                return Err(Error::InvalidField(format!("hypersurface variable `{t}` is not fresh")));
            }
        }
        let mut map: BTreeMap<Vec<u32>, FieldElement> = BTreeMap::new();
        for (exps, c) in terms {
            if exps.len() != tvars.len() {
                return Err(Error::InvalidField("exponent vector has the wrong length".into()));
            }
            if c.ctx() != base {
                return Err(Error::ContextMismatch);
            }
            let sum = match map.get(&exps) {
                Some(old) => old.add(&c)?,
                None => c,
            };
            if sum.is_zero() {
                map.remove(&exps);
            } else {
                map.insert(exps, sum);
            }
        }
        if map.is_empty() {
            return Err(Error::ZeroPolynomial);
        }
        Ok(HypersurfacePoly { base: base.clone(), tvars, terms: map })
    }

    pub fn base(&self) -> &FieldContext {
        &self.base
    }

    pub fn tvars(&self) -> &[String] {
        &self.tvars
    }

    pub fn terms(&self) -> &BTreeMap<Vec<u32>, FieldElement> {
        &self.terms
    }
}

impl fmt::Display for HypersurfacePoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        for (exps, c) in self.terms.iter().rev() {
            let mono: Vec<String> = exps
                .iter()
                .zip(&self.tvars)
                .filter(|(e, _)| **e > 0)
                .map(|(e, t)| if *e == 1 { t.clone() } else { format!("{t}^{e}") })
                .collect();
            let coeff = if c.is_one() && !mono.is_empty() { None } else { Some(format!("({c})")) };
            parts.push(coeff.into_iter().chain(mono).collect::<Vec<_>>().join("*"));
        }
        write!(f, "{}", parts.join(" + "))
    }
}

/// Invariants of a hypersurface, and its function field when the shape is supported.
#[derive(Clone, Debug)]
pub struct HypersurfaceAnalysis {
    pub poly: HypersurfacePoly,
    pub geom_nonreduced: bool,
    pub coeff_ratios: Vec<FieldElement>,
    pub norm_gens: Vec<FieldElement>,
    pub n: usize,
    pub fx: Option<QuotientField>,
    /// Why `fx` is absent.
    pub fx_error: Option<Error>,
}

pub fn analyze_hypersurface(f: &HypersurfacePoly) -> Result<HypersurfaceAnalysis> {
    let p = f.base.p();
    let geom_nonreduced = f.terms.keys().all(|e| e.iter().all(|x| x % p == 0));
    // highest T-exponent first, so a monic leading term yields the plain coefficients first
    let coeffs: Vec<&FieldElement> = f.terms.values().rev().collect();
    let mut ratios: Vec<FieldElement> = Vec::new();
    for (j, b) in coeffs.iter().enumerate() {
        for (i, a) in coeffs.iter().enumerate() {
            if i != j {
                let r = a.div(b)?;
                if !ratios.contains(&r) {
                    ratios.push(r);
                }
            }
        }
    }
    let norm_gens = independent_subset(&ratios)?;
    let (fx, fx_error) = match build_function_field(f) {
        Ok(q) => (Some(q), None),
        Err(e @ (Error::NotPMonic(_) | Error::Reducible | Error::NotGeometricallyNonreduced)) => (None, Some(e)),
        Err(e) => return Err(e),
    };
    Ok(HypersurfaceAnalysis {
        poly: f.clone(),
        geom_nonreduced,
        coeff_ratios: ratios,
        n: norm_gens.len(),
        norm_gens,
        fx,
        fx_error,
    })
}

/// F(X) = F(t_1, ..., t_{k-1})[s] / (s^p - g).
#[derive(Clone, Debug)]
pub struct QuotientField {
    base: FieldContext,
    ext: FieldContext,
    g: FieldElement,
    /// Index of the hypersurface variable that became s.
    s_var: usize,
    /// Index of the base variable whose differential is dependent: the last one occurring in the relation.
    pivot: usize,
    /// Coefficients of the relation sum_i r_i dx_i = 0.
    relation: Vec<FieldElement>,
    basis_names: Vec<String>,
}

pub fn build_function_field(f: &HypersurfacePoly) -> Result<QuotientField> {
    let base = &f.base;
    let p = base.p();
    if !f.terms.keys().all(|e| e.iter().all(|x| x % p == 0)) {
        return Err(Error::NotGeometricallyNonreduced);
    }
    let k = f.tvars.len();
    let s_var = (0..k)
        .find(|&j| {
            let with_j: Vec<_> = f.terms.iter().filter(|(e, _)| e[j] > 0).collect();
            with_j.len() == 1 && {
                let (e, c) = with_j[0];
                e[j] == p && e.iter().enumerate().all(|(i, x)| i == j || *x == 0) && c.constant_value().is_some()
            }
        })
        .ok_or_else(|| Error::NotPMonic(format!("no variable occurs only as c*T^{p} with a constant c")))?;
    let lead = f.terms.iter().find(|(e, _)| e[s_var] > 0).map(|(_, c)| c.clone()).expect("found above");
    let tnames: Vec<String> = (0..k).filter(|&j| j != s_var).map(|j| f.tvars[j].to_lowercase()).collect();
    let ext = base.with_extra_vars(&tnames)?;
    let v = base.nvars();
    let mut rest = ext.zero();
    for (e, c) in &f.terms {
        if e[s_var] > 0 {
            continue;
        }
        let mut exps = vec![0u32; v];
        exps.extend((0..k).filter(|&j| j != s_var).map(|j| e[j]));
        rest = rest.add(&c.lift_to(&ext)?.mul(&ext.monomial(&exps, 1)?)?)?;
    }
    // c*s^p + rest = 0
    let g = rest.div(&lead.lift_to(&ext)?)?.neg();
    if g.is_pth_power() {
        return Err(Error::Reducible);
    }
    let relation = (0..v).map(|i| g.partial(i)).collect::<Result<Vec<_>>>()?;
    let pivot = relation.iter().rposition(|r| !r.is_zero()).ok_or(Error::Reducible)?;
    let mut basis_names: Vec<String> = base.vars().iter().enumerate().filter(|(i, _)| *i != pivot).map(|(_, n)| n.clone()).collect();
    basis_names.extend(tnames);
    basis_names.push("s".into());
    Ok(QuotientField { base: base.clone(), ext, g, s_var, pivot, relation, basis_names })
}

impl QuotientField {
    pub fn base(&self) -> &FieldContext {
        &self.base
    }

    /// F(t_1, ..., t_{k-1}) as a rational function field.
    pub fn coefficient_field(&self) -> &FieldContext {
        &self.ext
    }

    pub fn g(&self) -> &FieldElement {
        &self.g
    }

    pub fn s_variable(&self) -> usize {
        self.s_var
    }

    /// The base variable dropped from the p-basis.
    pub fn pivot(&self) -> usize {
        self.pivot
    }

    pub fn relation(&self) -> &[FieldElement] {
        &self.relation
    }

    /// Names of the p-basis of F(X) over F(X)^p: the base variables except the pivot, the t's, and s.
    pub fn basis_names(&self) -> &[String] {
        &self.basis_names
    }

    pub fn rank(&self) -> usize {
        self.basis_names.len()
    }

    pub fn element(&self, coeffs: Vec<FieldElement>) -> Result<QfElement> {
        let p = self.base.p() as usize;
        if coeffs.len() > p || coeffs.iter().any(|c| c.ctx() != &self.ext) {
            return Err(Error::ContextMismatch);
        }
        let mut coeffs = coeffs;
        coeffs.resize(p, self.ext.zero());
        Ok(QfElement { g: self.g.clone(), coeffs })
    }

    pub fn from_coefficient(&self, c: &FieldElement) -> Result<QfElement> {
        self.element(vec![c.clone()])
    }

    pub fn from_base(&self, c: &FieldElement) -> Result<QfElement> {
        self.from_coefficient(&c.lift_to(&self.ext)?)
    }

    pub fn zero(&self) -> QfElement {
        self.from_coefficient(&self.ext.zero()).expect("same context")
    }

    pub fn one(&self) -> QfElement {
        self.from_coefficient(&self.ext.one()).expect("same context")
    }

    pub fn s(&self) -> QfElement {
        self.element(vec![self.ext.zero(), self.ext.one()]).expect("same context")
    }

    /// Images of dlog(x_i) for the base variables, as combinations of the F(X) basis dlogs.
    fn dlog_images(&self) -> Result<Vec<Vec<(usize, FieldElement)>>> {
        let v = self.base.nvars();
        let slot = |i: usize| if i < self.pivot { i } else { i - 1 };
        let xs = self.ext.gens();
        let denom = self.relation[self.pivot].mul(&xs[self.pivot])?;
        let mut out = Vec::with_capacity(v);
        for i in 0..v {
            if i != self.pivot {
                out.push(vec![(slot(i), self.ext.one())]);
                continue;
            }
            let mut img = Vec::new();
            for j in (0..v).filter(|&j| j != self.pivot) {
                if !self.relation[j].is_zero() {
                    img.push((slot(j), self.relation[j].mul(&xs[j])?.div(&denom)?.neg()));
                }
            }
            out.push(img);
        }
        Ok(out)
    }
}

/// An element sum_{i<p} c_i s^i of F(X) with c_i in F(t).
#[derive(Clone, Debug, PartialEq)]
pub struct QfElement {
    g: FieldElement,
    coeffs: Vec<FieldElement>,
}

impl QfElement {
    pub fn coeffs(&self) -> &[FieldElement] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    fn check(&self, other: &Self) -> Result<()> {
        if self.g != other.g {
            return Err(Error::ContextMismatch);
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        let coeffs = self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a.add(b)).collect::<Result<_>>()?;
        Ok(QfElement { g: self.g.clone(), coeffs })
    }

    pub fn neg(&self) -> Self {
        QfElement { g: self.g.clone(), coeffs: self.coeffs.iter().map(|c| c.neg()).collect() }
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        let p = self.coeffs.len();
        let ctx = self.g.ctx();
        let mut out = vec![ctx.zero(); p];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                if b.is_zero() {
                    continue;
                }
                let mut t = a.mul(b)?;
                if i + j >= p {
                    t = t.mul(&self.g)?;
                }
                let k = (i + j) % p;
                out[k] = out[k].add(&t)?;
            }
        }
        Ok(QfElement { g: self.g.clone(), coeffs: out })
    }

    pub fn pow(&self, k: u64) -> Result<Self> {
        let ctx = self.g.ctx();
        let mut one = vec![ctx.zero(); self.coeffs.len()];
        one[0] = ctx.one();
        let mut acc = QfElement { g: self.g.clone(), coeffs: one };
        let mut base = self.clone();
        let mut k = k;
        while k > 0 {
            if k & 1 == 1 {
                acc = acc.mul(&base)?;
            }
            base = base.mul(&base)?;
            k >>= 1;
        }
        Ok(acc)
    }

    /// z^p lies in F(t) because the extension is purely inseparable, so z^-1 = z^(p-1) / z^p.
    pub fn inv(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let p = self.coeffs.len() as u64;
        let norm = self.pow(p)?;
        if norm.coeffs[1..].iter().any(|c| !c.is_zero()) {
            return Err(Error::internal("p-th power left the coefficient field"));
        }
        let ninv = norm.coeffs[0].inv()?;
        let up = self.pow(p - 1)?;
        let coeffs = up.coeffs.iter().map(|c| c.mul(&ninv)).collect::<Result<_>>()?;
        Ok(QfElement { g: self.g.clone(), coeffs })
    }
}

impl fmt::Display for QfElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(i, c)| match i {
                0 => format!("{c}"),
                1 => format!("({c})*s"),
                _ => format!("({c})*s^{i}"),
            })
            .collect();
        if parts.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", parts.join(" + "))
        }
    }
}

/// A form over F(X) on the logarithmic basis of [`QuotientField::basis_names`].
#[derive(Clone, Debug, PartialEq)]
pub struct FxForm {
    degree: usize,
    coeffs: BTreeMap<u16, QfElement>,
}

impl FxForm {
    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn coeffs(&self) -> &BTreeMap<u16, QfElement> {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn format(&self, qf: &QuotientField) -> String {
        if self.coeffs.is_empty() {
            return "0".into();
        }
        let parts: Vec<String> = self
            .coeffs
            .iter()
            .map(|(mask, c)| {
                let dl: Vec<String> =
                    mask_indices(*mask).into_iter().map(|i| format!("dlog({})", qf.basis_names[i])).collect();
                if dl.is_empty() {
                    format!("({c})")
                } else {
                    format!("({c})*{}", dl.join("^"))
                }
            })
            .collect();
        parts.join(" + ")
    }
}

/// Restriction Omega_F -> Omega_F(X); dx at the pivot is rewritten through the relation sum_i r_i dx_i = 0.
pub fn restrict_form_to_fx(u: &DifferentialForm, qf: &QuotientField) -> Result<FxForm> {
    if u.frame().ctx() != &qf.base || !u.frame().is_standard() {
        return Err(Error::FrameMismatch);
    }
    let images = qf.dlog_images()?;
    let mut acc: BTreeMap<u16, FieldElement> = BTreeMap::new();
    for (mask, c) in u.coeffs() {
        let mut partial: BTreeMap<u16, FieldElement> = BTreeMap::new();
        partial.insert(0, c.lift_to(&qf.ext)?);
        for i in mask_indices(*mask) {
            let mut next: BTreeMap<u16, FieldElement> = BTreeMap::new();
            for (m, a) in &partial {
                for (pos, l) in &images[i] {
                    let bit = 1u16 << pos;
                    if m & bit != 0 {
                        continue;
                    }
                    // e_m ^ e_pos = (-1)^{#bits of m above pos} e_{m|pos}
                    let above = (m >> (pos + 1)).count_ones();
                    let mut t = a.mul(l)?;
                    if above % 2 == 1 {
                        t = t.neg();
                    }
                    let e = next.entry(m | bit).or_insert_with(|| qf.ext.zero());
                    *e = e.add(&t)?;
                }
            }
            partial = next;
        }
        for (m, a) in partial {
            let e = acc.entry(m).or_insert_with(|| qf.ext.zero());
            *e = e.add(&a)?;
        }
    }
    let mut coeffs = BTreeMap::new();
    for (m, a) in acc {
        if !a.is_zero() {
            coeffs.insert(m, qf.from_coefficient(&a)?);
        }
    }
    Ok(FxForm { degree: u.degree(), coeffs })
}

/// Whether N_F(X) is contained in F^p(entries), the description of symbols that die in F(X).
pub fn symbol_in_kernel_predicate(sigma: &PureSymbol, analysis: &HypersurfaceAnalysis) -> Result<bool> {
    if sigma.len() < analysis.n {
        return Ok(false);
    }
    for a in &analysis.norm_gens {
        if !in_p_subfield(a, &sigma.entries)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Outcome of randomized checks of the kernel description on one hypersurface.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct KernelReport {
    pub m: usize,
    pub n: usize,
    pub trials: usize,
    /// Symbols where the predicate holds, all of which must restrict to zero.
    pub predicate_true: usize,
    /// Symbols where the predicate fails and dlog is nonzero over F; all must restrict to nonzero.
    pub predicate_false: usize,
    /// Symbols skipped because their dlog already vanishes over F.
    pub zero_dlog: usize,
    /// Forms omega ^ eta checked to restrict to zero.
    pub inclusion_checked: usize,
    pub violations: Vec<String>,
}

impl KernelReport {
    pub fn ok(&self) -> bool {
        self.violations.is_empty()
    }
}

const MAX_DEGREE: u32 = 2;

/// A symbol of length m whose entries generate N_F(X) over F^p, or None when m < n.
fn kernel_symbol<R: Rng>(rng: &mut R, analysis: &HypersurfaceAnalysis, m: usize) -> Result<Option<PureSymbol>> {
    let ctx = analysis.poly.base();
    let n = analysis.n;
    if m < n {
        return Ok(None);
    }
    let mut entries = random::symbol(rng, ctx, m - n, MAX_DEGREE)?.entries;
    for a in &analysis.norm_gens {
        let h = random::nonzero_poly_element(rng, ctx, 1)?;
        let mut e = a.mul(&h.frobenius()?)?;
        if !entries.is_empty() && rng.gen_bool(0.5) {
            let j = rng.gen_range(0..entries.len());
            e = e.mul(&entries[j])?;
        }
        entries.push(e);
    }
    for i in (1..entries.len()).rev() {
        entries.swap(i, rng.gen_range(0..=i));
    }
    Ok(Some(PureSymbol::new(entries)?))
}

/// Checks the kernel description on `trials` targeted symbols of each kind and `trials` forms omega ^ eta.
pub fn kernel_verify_instance(analysis: &HypersurfaceAnalysis, m: usize, trials: usize, seed: u64) -> Result<KernelReport> {
    let qf = analysis.fx.as_ref().ok_or(Error::MissingFunctionField)?;
    let ctx = analysis.poly.base();
    let frame = Frame::standard(ctx);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut report = KernelReport { m, n: analysis.n, trials, ..KernelReport::default() };
    let classify = |sigma: &PureSymbol, report: &mut KernelReport| -> Result<()> {
        let dl = dlog_symbol(sigma, &frame)?;
        if dl.is_zero() {
            report.zero_dlog += 1;
            return Ok(());
        }
        let predicate = symbol_in_kernel_predicate(sigma, analysis)?;
        let restricted = restrict_form_to_fx(&dl, qf)?;
        if predicate {
            report.predicate_true += 1;
            if !restricted.is_zero() {
                report.violations.push(format!("predicate holds but {sigma:?} restricts to {}", restricted.format(qf)));
            }
        } else {
            report.predicate_false += 1;
            if restricted.is_zero() {
                report.violations.push(format!("predicate fails but {sigma:?} restricts to 0"));
            }
        }
        Ok(())
    };
    for _ in 0..trials {
        if let Some(sigma) = kernel_symbol(&mut rng, analysis, m)? {
            classify(&sigma, &mut report)?;
        }
        let sigma = random::symbol(&mut rng, ctx, m, MAX_DEGREE)?;
        classify(&sigma, &mut report)?;
    }
    if m >= analysis.n {
        let mut eta = DifferentialForm::scalar(&frame, ctx.one())?;
        for a in &analysis.norm_gens {
            eta = eta.wedge(&frame.dlog(a)?)?;
        }
        for _ in 0..trials {
            let omega = random::form(&mut rng, &frame, m - analysis.n, MAX_DEGREE)?;
            let restricted = restrict_form_to_fx(&omega.wedge(&eta)?, qf)?;
            report.inclusion_checked += 1;
            if !restricted.is_zero() {
                report.violations.push(format!("omega = {omega} gives omega ^ eta restricting to {}", restricted.format(qf)));
            }
        }
    }
    Ok(report)
}

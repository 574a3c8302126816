//! Sparse multivariate polynomials over GF(p^e).
//!
//! Terms are kept sorted in descending graded-lex order with no zero coefficients.
//! Polynomials do not carry their field; every operation takes it explicitly.

use std::cmp::Ordering;
use std::collections::BTreeMap;

use crate::gf::GaloisField;

pub const MAX_VARS: usize = 8;

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, Default)]
pub struct Mono(pub [u16; MAX_VARS]);

impl Mono {
    pub fn one() -> Self {
        Mono([0; MAX_VARS])
    }

    pub fn var(i: usize) -> Self {
        let mut m = [0; MAX_VARS];
        m[i] = 1;
        Mono(m)
    }

    pub fn from_exponents(exps: &[u32]) -> Self {
        let mut m = [0u16; MAX_VARS];
        for (i, &e) in exps.iter().enumerate() {
            m[i] = e as u16;
        }
        Mono(m)
    }

    pub fn total_degree(&self) -> u32 {
        self.0.iter().map(|&e| e as u32).sum()
    }

    pub fn mul(&self, other: &Mono) -> Mono {
        let mut m = self.0;
        for (a, b) in m.iter_mut().zip(other.0.iter()) {
            *a += *b;
        }
        Mono(m)
    }

    pub fn divides(&self, other: &Mono) -> bool {
        self.0.iter().zip(other.0.iter()).all(|(a, b)| a <= b)
    }

    /// `other / self`, assuming divisibility.
    pub fn div_of(&self, other: &Mono) -> Mono {
        let mut m = other.0;
        for (a, b) in m.iter_mut().zip(self.0.iter()) {
            *a -= *b;
        }
        Mono(m)
    }

    pub fn gcd_with(&self, other: &Mono) -> Mono {
        let mut m = self.0;
        for (a, b) in m.iter_mut().zip(other.0.iter()) {
            *a = (*a).min(*b);
        }
        Mono(m)
    }

    pub fn is_one(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }
}

impl Ord for Mono {
    fn cmp(&self, other: &Self) -> Ordering {
        self.total_degree()
            .cmp(&other.total_degree())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Mono {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct Poly {
    terms: Vec<(Mono, u32)>,
}

impl Poly {
    pub fn zero() -> Self {
        Poly { terms: Vec::new() }
    }

    pub fn constant(c: u32) -> Self {
        if c == 0 {
            Self::zero()
        } else {
            Poly { terms: vec![(Mono::one(), c)] }
        }
    }

    pub fn one() -> Self {
        Self::constant(1)
    }

    pub fn monomial(m: Mono, c: u32) -> Self {
        if c == 0 {
            Self::zero()
        } else {
            Poly { terms: vec![(m, c)] }
        }
    }

    pub fn var(i: usize) -> Self {
        Self::monomial(Mono::var(i), 1)
    }

    /// Builds a polynomial from arbitrary terms, merging duplicates.
    pub fn from_terms(gf: &GaloisField, mut terms: Vec<(Mono, u32)>) -> Self {
        terms.sort_by(|a, b| b.0.cmp(&a.0));
        let mut out: Vec<(Mono, u32)> = Vec::with_capacity(terms.len());
        for (m, c) in terms {
            match out.last_mut() {
                Some((lm, lc)) if *lm == m => *lc = gf.add(*lc, c),
                _ => out.push((m, c)),
            }
        }
        out.retain(|t| t.1 != 0);
        Poly { terms: out }
    }

    pub fn terms(&self) -> &[(Mono, u32)] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.is_empty() || (self.terms.len() == 1 && self.terms[0].0.is_one())
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1 && self.terms[0].0.is_one() && self.terms[0].1 == 1
    }

    pub fn is_monomial(&self) -> bool {
        self.terms.len() == 1
    }

    pub fn constant_value(&self) -> Option<u32> {
        if self.is_zero() {
            Some(0)
        } else if self.is_constant() {
            Some(self.terms[0].1)
        } else {
            None
        }
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn leading(&self) -> Option<&(Mono, u32)> {
        self.terms.first()
    }

    pub fn lc(&self) -> u32 {
        self.terms.first().map(|t| t.1).unwrap_or(0)
    }

    pub fn total_degree(&self) -> u32 {
        self.terms.first().map(|t| t.0.total_degree()).unwrap_or(0)
    }

    pub fn degree_in(&self, var: usize) -> u32 {
        self.terms.iter().map(|t| t.0 .0[var] as u32).max().unwrap_or(0)
    }

    pub fn uses_var(&self, var: usize) -> bool {
        self.terms.iter().any(|t| t.0 .0[var] > 0)
    }

    fn merge(gf: &GaloisField, a: &[(Mono, u32)], b: &[(Mono, u32)], negate_b: bool) -> Poly {
        let mut out = Vec::with_capacity(a.len() + b.len());
        let (mut i, mut j) = (0, 0);
        let fix = |c: u32| if negate_b { gf.neg(c) } else { c };
        while i < a.len() && j < b.len() {
            match a[i].0.cmp(&b[j].0) {
                Ordering::Greater => {
                    out.push(a[i]);
                    i += 1;
                }
                Ordering::Less => {
                    out.push((b[j].0, fix(b[j].1)));
                    j += 1;
                }
                Ordering::Equal => {
                    let c = gf.add(a[i].1, fix(b[j].1));
                    if c != 0 {
                        out.push((a[i].0, c));
                    }
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&a[i..]);
        out.extend(b[j..].iter().map(|&(m, c)| (m, fix(c))));
        Poly { terms: out }
    }

    pub fn add(&self, gf: &GaloisField, other: &Poly) -> Poly {
        Self::merge(gf, &self.terms, &other.terms, false)
    }

    pub fn sub(&self, gf: &GaloisField, other: &Poly) -> Poly {
        Self::merge(gf, &self.terms, &other.terms, true)
    }

    pub fn neg(&self, gf: &GaloisField) -> Poly {
        Poly { terms: self.terms.iter().map(|&(m, c)| (m, gf.neg(c))).collect() }
    }

    pub fn scale(&self, gf: &GaloisField, c: u32) -> Poly {
        if c == 0 {
            return Poly::zero();
        }
        if c == 1 {
            return self.clone();
        }
        Poly { terms: self.terms.iter().map(|&(m, d)| (m, gf.mul(c, d))).collect() }
    }

    pub fn mul_term(&self, gf: &GaloisField, m: &Mono, c: u32) -> Poly {
        if c == 0 {
            return Poly::zero();
        }
        Poly {
            terms: self.terms.iter().map(|(n, d)| (n.mul(m), gf.mul(c, *d))).collect(),
        }
    }

    pub fn mul(&self, gf: &GaloisField, other: &Poly) -> Poly {
        if self.is_zero() || other.is_zero() {
            return Poly::zero();
        }
        let (small, big) = if self.len() <= other.len() { (self, other) } else { (other, self) };
        if small.len() == 1 {
            let (m, c) = small.terms[0];
            return big.mul_term(gf, &m, c);
        }
        let mut acc: Vec<(Mono, u32)> = Vec::with_capacity(self.len() * other.len());
        for (m, c) in &self.terms {
            for (n, d) in &other.terms {
                acc.push((m.mul(n), gf.mul(*c, *d)));
            }
        }
        Self::from_terms(gf, acc)
    }

    pub fn pow(&self, gf: &GaloisField, mut k: u32) -> Poly {
        let mut base = self.clone();
        let mut acc = Poly::one();
        while k > 0 {
            if k & 1 == 1 {
                acc = acc.mul(gf, &base);
            }
            k >>= 1;
            if k > 0 {
                base = base.mul(gf, &base);
            }
        }
        acc
    }

    /// Raises to the p-th power using additivity of Frobenius.
    pub fn frobenius(&self, gf: &GaloisField) -> Poly {
        let p = gf.p() as u16;
        Poly {
            terms: self
                .terms
                .iter()
                .map(|(m, c)| {
                    let mut e = m.0;
                    for x in e.iter_mut() {
                        *x *= p;
                    }
                    (Mono(e), gf.pow(*c, gf.p() as u64))
                })
                .collect(),
        }
    }

    pub fn monic(&self, gf: &GaloisField) -> Poly {
        match self.lc() {
            0 | 1 => self.clone(),
            c => self.scale(gf, gf.inv(c).expect("nonzero")),
        }
    }

    pub fn map_coeffs(&self, gf: &GaloisField, f: impl Fn(u32) -> u32) -> Poly {
        Self::from_terms(gf, self.terms.iter().map(|&(m, c)| (m, f(c))).collect())
    }

    /// Exact quotient `self / divisor`, or `None` when the division leaves a remainder.
    pub fn div_exact(&self, gf: &GaloisField, divisor: &Poly) -> Option<Poly> {
        let (lm, lc) = *divisor.leading()?;
        if self.is_zero() {
            return Some(Poly::zero());
        }
        let inv = gf.inv(lc).ok()?;
        if divisor.len() == 1 {
            let mut out = Vec::with_capacity(self.len());
            for (m, c) in &self.terms {
                if !lm.divides(m) {
                    return None;
                }
                out.push((lm.div_of(m), gf.mul(*c, inv)));
            }
            return Some(Poly { terms: out });
        }
        if self.total_degree() < divisor.total_degree() {
            return None;
        }
        let mut rem: BTreeMap<std::cmp::Reverse<Mono>, u32> =
            self.terms.iter().map(|&(m, c)| (std::cmp::Reverse(m), c)).collect();
        let mut quot = Vec::new();
        let tail = &divisor.terms[1..];
        while let Some((&std::cmp::Reverse(m), &c)) = rem.iter().next() {
            if !lm.divides(&m) {
                return None;
            }
            let qm = lm.div_of(&m);
            let qc = gf.mul(c, inv);
            rem.remove(&std::cmp::Reverse(m));
            let nqc = gf.neg(qc);
            for (n, d) in tail {
                let key = std::cmp::Reverse(n.mul(&qm));
                let delta = gf.mul(nqc, *d);
                match rem.entry(key) {
                    std::collections::btree_map::Entry::Occupied(mut o) => {
                        let v = gf.add(*o.get(), delta);
                        if v == 0 {
                            o.remove();
                        } else {
                            *o.get_mut() = v;
                        }
                    }
                    std::collections::btree_map::Entry::Vacant(v) => {
                        v.insert(delta);
                    }
                }
            }
            quot.push((qm, qc));
        }
        Some(Poly { terms: quot })
    }

    /// Partial derivative with respect to variable `var`.
    pub fn partial(&self, gf: &GaloisField, var: usize) -> Poly {
        let mut out = Vec::new();
        for (m, c) in &self.terms {
            let e = m.0[var];
            if e == 0 {
                continue;
            }
            let f = gf.from_int(e as i64);
            if f == 0 {
                continue;
            }
            let mut n = *m;
            n.0[var] -= 1;
            out.push((n, gf.mul(f, *c)));
        }
        Poly { terms: out }
    }

    /// The p-th root when every exponent is divisible by p.
    pub fn pth_root(&self, gf: &GaloisField) -> Option<Poly> {
        let p = gf.p() as u16;
        let mut out = Vec::with_capacity(self.len());
        for (m, c) in &self.terms {
            let mut e = m.0;
            for x in e.iter_mut() {
                if *x % p != 0 {
                    return None;
                }
                *x /= p;
            }
            out.push((Mono(e), gf.pth_root(*c)));
        }
        Some(Poly { terms: out })
    }

    /// The m-th root with leading coefficient `lead_root`, when `self` is an m-th power (p does not divide m).
    pub fn nth_root(&self, gf: &GaloisField, m: u32, lead_root: u32) -> Option<Poly> {
        if self.is_zero() {
            return Some(Poly::zero());
        }
        if m == 1 {
            return Some(self.clone());
        }
        let (lm, lc) = *self.leading()?;
        if gf.pow(lead_root, m as u64) != lc || lm.0.iter().any(|&e| e as u32 % m != 0) {
            return None;
        }
        let mut top = lm;
        for e in top.0.iter_mut() {
            *e /= m as u16;
        }
        let min_degree = self.terms.iter().map(|t| t.0.total_degree()).min().unwrap_or(0);
        // t is found from lt(self - R^m) = m * lt(R)^(m-1) * t
        let mut shift = top;
        for e in shift.0.iter_mut() {
            *e *= (m - 1) as u16;
        }
        let denom = gf.mul(gf.from_int(m as i64), gf.pow(lead_root, (m - 1) as u64));
        let inv = gf.inv(denom).ok()?;
        let mut root = Poly::monomial(top, lead_root);
        let mut last = top;
        loop {
            let diff = self.sub(gf, &root.pow(gf, m));
            let Some(&(dm, dc)) = diff.leading() else { return Some(root) };
            if !shift.divides(&dm) {
                return None;
            }
            let t = shift.div_of(&dm);
            if t >= last || t.total_degree() * m < min_degree {
                return None;
            }
            root = root.add(gf, &Poly::monomial(t, gf.mul(dc, inv)));
            last = t;
        }
    }

    /// Greatest common monomial divisor of all terms.
    pub fn monomial_content(&self) -> Mono {
        let mut it = self.terms.iter();
        let first = match it.next() {
            Some(t) => t.0,
            None => return Mono::one(),
        };
        it.fold(first, |acc, t| acc.gcd_with(&t.0))
    }

    /// Coefficients with respect to `var`, indexed by degree; the variable is removed.
    pub fn coefficients_in(&self, gf: &GaloisField, var: usize) -> Vec<Poly> {
        let deg = self.degree_in(var) as usize;
        let mut buckets: Vec<Vec<(Mono, u32)>> = vec![Vec::new(); deg + 1];
        for (m, c) in &self.terms {
            let e = m.0[var] as usize;
            let mut n = *m;
            n.0[var] = 0;
            buckets[e].push((n, *c));
        }
        buckets.into_iter().map(|t| Poly::from_terms(gf, t)).collect()
    }

    fn lead_coeff_in(&self, gf: &GaloisField, var: usize) -> (u32, Poly) {
        let deg = self.degree_in(var);
        let mut t = Vec::new();
        for (m, c) in &self.terms {
            if m.0[var] as u32 == deg {
                let mut n = *m;
                n.0[var] = 0;
                t.push((n, *c));
            }
        }
        (deg, Poly::from_terms(gf, t))
    }

    /// Substitutes polynomials for variables; `images[i]` replaces variable `i`.
    pub fn substitute(&self, gf: &GaloisField, images: &[Poly]) -> Poly {
        let mut acc = Poly::zero();
        let mut cache: Vec<Vec<Poly>> = images.iter().map(|p| vec![Poly::one(), p.clone()]).collect();
        for (m, c) in &self.terms {
            let mut term = Poly::constant(*c);
            for (i, &e) in m.0.iter().enumerate() {
                if e == 0 {
                    continue;
                }
                let e = e as usize;
                while cache[i].len() <= e {
                    let next = cache[i].last().unwrap().mul(gf, &images[i]);
                    cache[i].push(next);
                }
                term = term.mul(gf, &cache[i][e]);
            }
            acc = acc.add(gf, &term);
        }
        acc
    }

    /// Renames variables: variable `i` of `self` becomes variable `map[i]`.
    pub fn remap_vars(&self, gf: &GaloisField, map: &[usize]) -> Poly {
        Self::from_terms(
            gf,
            self.terms
                .iter()
                .map(|(m, c)| {
                    let mut n = [0u16; MAX_VARS];
                    for (i, &e) in m.0.iter().enumerate() {
                        if e > 0 {
                            n[map[i]] += e;
                        }
                    }
                    (Mono(n), *c)
                })
                .collect(),
        )
    }
}

/// Greatest common divisor, normalized to leading coefficient one.
pub fn gcd(gf: &GaloisField, a: &Poly, b: &Poly) -> Poly {
    if a.is_zero() {
        return b.monic(gf);
    }
    if b.is_zero() {
        return a.monic(gf);
    }
    if a.is_constant() || b.is_constant() {
        return Poly::one();
    }
    let ca = a.monomial_content();
    let cb = b.monomial_content();
    let mono = ca.gcd_with(&cb);
    let a1 = if ca.is_one() { a.clone() } else { a.div_exact(gf, &Poly::monomial(ca, 1)).unwrap() };
    let b1 = if cb.is_one() { b.clone() } else { b.div_exact(gf, &Poly::monomial(cb, 1)).unwrap() };
    let core = match crate::mgcd::modular_gcd(gf, &a1, &b1) {
        Some(g) => g,
        None => gcd_no_monomial(gf, &a1, &b1),
    };
    core.mul_term(gf, &mono, 1).monic(gf)
}

fn gcd_no_monomial(gf: &GaloisField, a: &Poly, b: &Poly) -> Poly {
    if a.is_constant() || b.is_constant() {
        return Poly::one();
    }
    if a.is_monomial() || b.is_monomial() {
        // monomial content has been removed, so a monomial here is a constant multiple of 1
        return Poly::one();
    }
    let am = a.monic(gf);
    let bm = b.monic(gf);
    if am == bm {
        return am;
    }
    let var = (0..MAX_VARS)
        .rev()
        .find(|&v| a.uses_var(v) || b.uses_var(v))
        .expect("non-constant polynomial uses a variable");
    let ca = content_in(gf, &am, var);
    let cb = content_in(gf, &bm, var);
    let c = gcd(gf, &ca, &cb);
    let pa = am.div_exact(gf, &ca).expect("content divides");
    let pb = bm.div_exact(gf, &cb).expect("content divides");
    let g = prs_gcd(gf, pa, pb, var);
    c.mul(gf, &g).monic(gf)
}

fn content_in(gf: &GaloisField, a: &Poly, var: usize) -> Poly {
    let coeffs = a.coefficients_in(gf, var);
    let mut nonzero: Vec<Poly> = coeffs.into_iter().filter(|c| !c.is_zero()).collect();
    nonzero.sort_by_key(|c| (c.len(), c.total_degree()));
    let mut acc = Poly::zero();
    for c in nonzero {
        acc = gcd(gf, &acc, &c);
        if acc.is_one() {
            break;
        }
    }
    acc
}

fn primitive_part_in(gf: &GaloisField, a: &Poly, var: usize) -> Poly {
    let c = content_in(gf, a, var);
    a.div_exact(gf, &c).expect("content divides")
}

fn pseudo_rem(gf: &GaloisField, f: &Poly, g: &Poly, var: usize) -> Poly {
    let (n, lcg) = g.lead_coeff_in(gf, var);
    let mut r = f.clone();
    while !r.is_zero() {
        let (d, lcr) = r.lead_coeff_in(gf, var);
        if d < n {
            break;
        }
        let mut shift = Mono::one();
        shift.0[var] = (d - n) as u16;
        let t1 = r.mul(gf, &lcg);
        let t2 = g.mul(gf, &lcr).mul_term(gf, &shift, 1);
        r = t1.sub(gf, &t2);
    }
    r
}

/// GCD of two polynomials primitive in `var`, by the primitive remainder sequence.
fn prs_gcd(gf: &GaloisField, pa: Poly, pb: Poly, var: usize) -> Poly {
    let (mut f, mut g) = if pa.degree_in(var) >= pb.degree_in(var) { (pa, pb) } else { (pb, pa) };
    if g.degree_in(var) == 0 {
        return Poly::one();
    }
    loop {
        let r = pseudo_rem(gf, &f, &g, var);
        if r.is_zero() {
            return g.monic(gf);
        }
        if r.degree_in(var) == 0 {
            return Poly::one();
        }
        f = g;
        g = primitive_part_in(gf, &r, var).monic(gf);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gf2() -> GaloisField {
        GaloisField::new(2, 1).unwrap()
    }

    fn x() -> Poly {
        Poly::var(0)
    }
    fn y() -> Poly {
        Poly::var(1)
    }

    #[test]
    fn gcd_of_products() {
        let gf = GaloisField::new(3, 1).unwrap();
        let a = x().add(&gf, &y()).add(&gf, &Poly::one());
        let b = x().mul(&gf, &y()).add(&gf, &Poly::constant(2));
        let c = x().pow(&gf, 2).add(&gf, &y());
        let f = a.mul(&gf, &b);
        let g = a.mul(&gf, &c);
        assert_eq!(gcd(&gf, &f, &g), a.monic(&gf));
        assert!(gcd(&gf, &b, &c).is_one());
    }

    #[test]
    fn modular_gcd_matches_remainder_sequence() {
        use rand::{Rng, SeedableRng};
        for (p, e) in [(2, 1), (3, 1), (5, 1), (2, 2), (3, 2)] {
            let gf = GaloisField::new(p, e).unwrap();
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(p as u64 * 10 + e as u64);
            let mut random = |deg: u32| {
                let terms = (0..rng.gen_range(1..5))
                    .map(|_| {
                        let ex: Vec<u32> = (0..3).map(|_| rng.gen_range(0..=deg)).collect();
                        (Mono::from_exponents(&ex), rng.gen_range(1..gf.order()))
                    })
                    .collect();
                Poly::from_terms(&gf, terms)
            };
            for _ in 0..30 {
                let (c, f, g) = (random(2), random(3), random(3));
                if c.is_zero() || f.is_zero() || g.is_zero() {
                    continue;
                }
                let a = c.mul(&gf, &f);
                let b = c.mul(&gf, &g);
                let fast = gcd(&gf, &a, &b);
                let ca = a.monomial_content().gcd_with(&b.monomial_content());
                let strip = |x: &Poly| x.div_exact(&gf, &Poly::monomial(x.monomial_content(), 1)).unwrap();
                let slow = gcd_no_monomial(&gf, &strip(&a), &strip(&b)).mul_term(&gf, &ca, 1).monic(&gf);
                assert_eq!(fast, slow);
                assert!(a.div_exact(&gf, &fast).is_some() && b.div_exact(&gf, &fast).is_some());
            }
        }
    }

    #[test]
    fn gcd_with_monomial_content() {
        let gf = gf2();
        let xy = x().mul(&gf, &y());
        let f = xy.mul(&gf, &x().add(&gf, &Poly::one()));
        let g = x().pow(&gf, 2).mul(&gf, &x().add(&gf, &Poly::one()).pow(&gf, 2));
        let expected = x().mul(&gf, &x().add(&gf, &Poly::one()));
        assert_eq!(gcd(&gf, &f, &g), expected);
    }

    #[test]
    fn exact_division() {
        let gf = gf2();
        let a = x().add(&gf, &y());
        let b = x().add(&gf, &Poly::one());
        let prod = a.mul(&gf, &b);
        assert_eq!(prod.div_exact(&gf, &a), Some(b.clone()));
        assert_eq!(a.div_exact(&gf, &b), None);
    }

    #[test]
    fn frobenius_matches_power() {
        let gf = GaloisField::new(3, 2).unwrap();
        let w = gf.generator();
        let a = x().scale(&gf, w).add(&gf, &y().pow(&gf, 2)).add(&gf, &Poly::one());
        assert_eq!(a.frobenius(&gf), a.pow(&gf, 3));
        assert_eq!(a.frobenius(&gf).pth_root(&gf), Some(a));
    }

    #[test]
    fn square_roots_in_char_three() {
        let gf = GaloisField::new(3, 1).unwrap();
        let r = x().pow(&gf, 2).add(&gf, &y().scale(&gf, 2)).add(&gf, &Poly::one());
        let sq = r.pow(&gf, 2);
        assert_eq!(sq.nth_root(&gf, 2, 1), Some(r.clone()));
        assert_eq!(sq.add(&gf, &x()).nth_root(&gf, 2, 1), None);
        let cube = r.pow(&gf, 4);
        assert_eq!(cube.nth_root(&gf, 4, 1), Some(r));
    }

    #[test]
    fn partial_in_char_two() {
        let gf = gf2();
        let f = x().pow(&gf, 2).mul(&gf, &y()).add(&gf, &x());
        assert_eq!(f.partial(&gf, 0), Poly::one());
    }
}

//! Finite fields GF(p^e) in the polynomial basis of a generator `w`.
//!
//! Elements are encoded as integers `Σ c_i p^i` where `c_i` is the coefficient of
//! `w^i`. Multiplication goes through discrete log tables, so the field order is
//! capped at [`MAX_ORDER`].

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};

/// Largest supported field order.
pub const MAX_ORDER: u64 = 1 << 16;

const ADD_TABLE_LIMIT: u32 = 1024;

#[derive(Clone)]
pub struct GaloisField(Arc<Inner>);

struct Inner {
    p: u32,
    e: usize,
    modulus: Vec<u32>,
    q: u32,
    exp: Vec<u32>,
    log: Vec<u32>,
    ppow: Vec<u32>,
    add_table: Option<Vec<u16>>,
}

impl PartialEq for GaloisField {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || (self.0.p == other.0.p && self.0.modulus == other.0.modulus)
    }
}

impl Eq for GaloisField {}

impl fmt::Debug for GaloisField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GF({}^{}) mod {}", self.0.p, self.0.e, self.modulus_string())
    }
}

fn is_supported_prime(p: u32) -> bool {
    matches!(p, 2 | 3 | 5)
}

/// Multiplies two polynomials over GF(p) given as coefficient vectors (low degree first).
fn fp_poly_mul(a: &[u32], b: &[u32], p: u32) -> Vec<u32> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![0u32; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            out[i + j] = (out[i + j] + x * y) % p;
        }
    }
    trim(&mut out);
    out
}

fn trim(v: &mut Vec<u32>) {
    while v.last() == Some(&0) {
        v.pop();
    }
}

/// Remainder of `a` modulo the monic polynomial `m` over GF(p).
fn fp_poly_rem(a: &[u32], m: &[u32], p: u32) -> Vec<u32> {
    let mut r = a.to_vec();
    trim(&mut r);
    let dm = m.len() - 1;
    while r.len() > dm {
        let lead = *r.last().unwrap();
        let shift = r.len() - 1 - dm;
        for (i, &c) in m.iter().enumerate() {
            let sub = lead * c % p;
            r[shift + i] = (r[shift + i] + p - sub) % p;
        }
        trim(&mut r);
    }
    r
}

fn monic_polys_of_degree(p: u32, d: usize) -> impl Iterator<Item = Vec<u32>> {
    let count = (p as u64).pow(d as u32);
    (0..count).map(move |mut idx| {
        let mut v = Vec::with_capacity(d + 1);
        for _ in 0..d {
            v.push((idx % p as u64) as u32);
            idx /= p as u64;
        }
        v.push(1);
        v
    })
}

/// Irreducibility over GF(p) by trial division against all monic polynomials of degree
/// at most half the degree.
pub fn is_irreducible_fp(m: &[u32], p: u32) -> bool {
    let deg = m.len().saturating_sub(1);
    if deg == 0 || m.last() != Some(&1) {
        return false;
    }
    for d in 1..=deg / 2 {
        for div in monic_polys_of_degree(p, d) {
            if fp_poly_rem(m, &div, p).is_empty() {
                return false;
            }
        }
    }
    true
}

/// The default modulus: the first monic irreducible polynomial of degree `e` when the
/// lower coefficients are read as a base-p integer.
pub fn default_modulus(p: u32, e: usize) -> Vec<u32> {
    if e == 1 {
        return vec![0, 1];
    }
    monic_polys_of_degree(p, e)
        .find(|m| is_irreducible_fp(m, p))
        .expect("irreducible polynomials exist in every degree")
}

impl GaloisField {
    pub fn new(p: u32, e: usize) -> Result<Self> {
        if !is_supported_prime(p) {
            return Err(Error::InvalidField(format!("characteristic {p} is not one of 2, 3, 5")));
        }
        if e == 0 {
            return Err(Error::InvalidField("extension degree must be at least 1".into()));
        }
        Self::with_modulus(p, default_modulus(p, e))
    }

    /// Builds GF(p)[w]/(modulus); `modulus` lists coefficients from the constant term up and
    /// must be monic and irreducible.
    pub fn with_modulus(p: u32, modulus: Vec<u32>) -> Result<Self> {
        if !is_supported_prime(p) {
            return Err(Error::InvalidField(format!("characteristic {p} is not one of 2, 3, 5")));
        }
        if modulus.iter().any(|&c| c >= p) {
            return Err(Error::InvalidField(format!("modulus coefficients must lie in 0..{p}")));
        }
        let mut modulus = modulus;
        trim(&mut modulus);
        let e = modulus.len().saturating_sub(1);
        if e == 0 {
            return Err(Error::InvalidField("modulus must have positive degree".into()));
        }
        if modulus[e] != 1 {
            return Err(Error::InvalidField("modulus must be monic".into()));
        }
        let order = (p as u64).checked_pow(e as u32).unwrap_or(u64::MAX);
        if order > MAX_ORDER {
            return Err(Error::InvalidField(format!("field order {p}^{e} is too large")));
        }
        if !is_irreducible_fp(&modulus, p) {
            return Err(Error::InvalidField("modulus is reducible".into()));
        }
        let q = order as u32;
        let ppow: Vec<u32> = (0..e).map(|i| p.pow(i as u32)).collect();
        let decode = |idx: u32| -> Vec<u32> {
            let mut v: Vec<u32> = (0..e).map(|i| (idx / ppow[i]) % p).collect();
            trim(&mut v);
            v
        };
        let encode = |v: &[u32]| -> u32 { v.iter().enumerate().map(|(i, c)| c * ppow[i]).sum() };
        let slow_mul = |a: u32, b: u32| -> u32 {
            let prod = fp_poly_mul(&decode(a), &decode(b), p);
            encode(&fp_poly_rem(&prod, &modulus, p))
        };

        let mut exp = Vec::new();
        let mut log = vec![0u32; q as usize];
        if q == 2 {
            exp.push(1);
        } else {
            for g in 2..q {
                let mut powers = Vec::with_capacity(q as usize - 1);
                let mut x = 1u32;
                loop {
                    powers.push(x);
                    x = slow_mul(x, g);
                    if x == 1 {
                        break;
                    }
                }
                if powers.len() == q as usize - 1 {
                    exp = powers;
                    break;
                }
            }
        }
        for (i, &x) in exp.iter().enumerate() {
            log[x as usize] = i as u32;
        }

        let add_digits = |a: u32, b: u32| -> u32 {
            if p == 2 {
                return a ^ b;
            }
            let mut out = 0;
            for &pp in &ppow {
                out += ((a / pp % p + b / pp % p) % p) * pp;
            }
            out
        };
        let add_table = (q <= ADD_TABLE_LIMIT && p != 2).then(|| {
            let mut t = vec![0u16; (q * q) as usize];
            for a in 0..q {
                for b in 0..q {
                    t[(a * q + b) as usize] = add_digits(a, b) as u16;
                }
            }
            t
        });

        Ok(GaloisField(Arc::new(Inner { p, e, modulus, q, exp, log, ppow, add_table })))
    }

    pub fn p(&self) -> u32 {
        self.0.p
    }

    pub fn degree(&self) -> usize {
        self.0.e
    }

    pub fn order(&self) -> u32 {
        self.0.q
    }

    pub fn modulus(&self) -> &[u32] {
        &self.0.modulus
    }

    pub fn modulus_string(&self) -> String {
        let mut parts = Vec::new();
        for (i, &c) in self.0.modulus.iter().enumerate().rev() {
            if c == 0 {
                continue;
            }
            let mono = match i {
                0 => String::new(),
                1 => "w".to_string(),
                _ => format!("w^{i}"),
            };
            parts.push(match (c, mono.is_empty()) {
                (_, true) => c.to_string(),
                (1, false) => mono,
                (_, false) => format!("{c}*{mono}"),
            });
        }
        parts.join("+")
    }

    #[inline]
    pub fn add(&self, a: u32, b: u32) -> u32 {
        let inner = &*self.0;
        if inner.p == 2 {
            return a ^ b;
        }
        if inner.e == 1 {
            return (a + b) % inner.p;
        }
        if let Some(t) = &inner.add_table {
            return t[(a * inner.q + b) as usize] as u32;
        }
        let mut out = 0;
        for &pp in &inner.ppow {
            out += ((a / pp % inner.p + b / pp % inner.p) % inner.p) * pp;
        }
        out
    }

    #[inline]
    pub fn neg(&self, a: u32) -> u32 {
        let inner = &*self.0;
        if inner.p == 2 || a == 0 {
            return a;
        }
        if inner.e == 1 {
            return (inner.p - a) % inner.p;
        }
        let mut out = 0;
        for &pp in &inner.ppow {
            out += ((inner.p - a / pp % inner.p) % inner.p) * pp;
        }
        out
    }

    #[inline]
    pub fn sub(&self, a: u32, b: u32) -> u32 {
        self.add(a, self.neg(b))
    }

    #[inline]
    pub fn mul(&self, a: u32, b: u32) -> u32 {
        if a == 0 || b == 0 {
            return 0;
        }
        let inner = &*self.0;
        let n = inner.q - 1;
        let s = (inner.log[a as usize] + inner.log[b as usize]) % n;
        inner.exp[s as usize]
    }

    pub fn inv(&self, a: u32) -> Result<u32> {
        if a == 0 {
            return Err(Error::DivisionByZero);
        }
        let inner = &*self.0;
        let n = inner.q - 1;
        let l = inner.log[a as usize];
        Ok(inner.exp[((n - l) % n) as usize])
    }

    pub fn pow(&self, a: u32, k: u64) -> u32 {
        if k == 0 {
            return 1;
        }
        if a == 0 {
            return 0;
        }
        let inner = &*self.0;
        let n = (inner.q - 1) as u64;
        let s = (inner.log[a as usize] as u64 * (k % n)) % n;
        inner.exp[s as usize]
    }

    /// The unique p-th root (GF(q) is perfect).
    pub fn pth_root(&self, a: u32) -> u32 {
        self.pow(a, (self.0.p as u64).pow(self.0.e as u32 - 1))
    }

    /// The element `n · 1`.
    pub fn from_int(&self, n: i64) -> u32 {
        n.rem_euclid(self.0.p as i64) as u32
    }

    /// Returns the integer value when `a` lies in the prime field.
    pub fn as_prime_field(&self, a: u32) -> Option<u32> {
        (a < self.0.p).then_some(a)
    }

    pub fn generator(&self) -> u32 {
        if self.0.e == 1 {
            // GF(p)[w]/(w): the generator is zero.
            0
        } else {
            self.0.p
        }
    }

    pub fn coeffs(&self, a: u32) -> Vec<u32> {
        let inner = &*self.0;
        inner.ppow.iter().map(|&pp| (a / pp) % inner.p).collect()
    }

    pub fn from_coeffs(&self, coeffs: &[u32]) -> u32 {
        let inner = &*self.0;
        // reduce modulo the modulus so longer vectors are accepted
        let mut v: Vec<u32> = coeffs.iter().map(|c| c % inner.p).collect();
        trim(&mut v);
        let r = fp_poly_rem(&v, &inner.modulus, inner.p);
        r.iter().enumerate().map(|(i, c)| c * inner.ppow[i]).sum()
    }

    pub fn elements(&self) -> impl Iterator<Item = u32> {
        0..self.0.q
    }

    /// Σ_{j<d} a^(q0^j) with q0 = p^sub_degree, d = e / sub_degree.
    pub fn trace(&self, a: u32, sub_degree: usize) -> Result<u32> {
        let e = self.0.e;
        if sub_degree == 0 || e % sub_degree != 0 {
            return Err(Error::InvalidSubfield { sub: sub_degree, degree: e });
        }
        let q0 = (self.0.p as u64).pow(sub_degree as u32);
        let d = e / sub_degree;
        let mut acc = 0;
        let mut x = a;
        for _ in 0..d {
            acc = self.add(acc, x);
            x = self.pow(x, q0);
        }
        Ok(acc)
    }

    /// Some m-th root of `a` in this field, if one exists.
    pub fn nth_root(&self, a: u32, m: u32) -> Option<u32> {
        if a == 0 || m == 1 {
            return Some(a);
        }
        self.elements().find(|&x| self.pow(x, m as u64) == a)
    }

    /// Textual form as a polynomial in `w`, e.g. `w+1`, `2*w^2`.
    pub fn format(&self, a: u32) -> String {
        if a == 0 {
            return "0".into();
        }
        let c = self.coeffs(a);
        let mut parts = Vec::new();
        for (i, &ci) in c.iter().enumerate().rev() {
            if ci == 0 {
                continue;
            }
            let mono = match i {
                0 => String::new(),
                1 => "w".to_string(),
                _ => format!("w^{i}"),
            };
            parts.push(match (ci, mono.is_empty()) {
                (_, true) => ci.to_string(),
                (1, false) => mono,
                (_, false) => format!("{ci}*{mono}"),
            });
        }
        parts.join("+")
    }

    /// Builds GF(q^d) together with the embedding of this field into it.
    pub fn extension(&self, d: usize) -> Result<ConstantEmbedding> {
        if d == 0 {
            return Err(Error::InvalidField("extension degree must be positive".into()));
        }
        if d == 1 {
            return Ok(ConstantEmbedding::identity(self.clone()));
        }
        let big = GaloisField::with_modulus(self.0.p, default_modulus(self.0.p, self.0.e * d))?;
        let root = if self.0.e == 1 {
            0
        } else {
            let m = &self.0.modulus;
            big.elements()
                .find(|&x| {
                    let mut acc = 0;
                    for &c in m.iter().rev() {
                        acc = big.add(big.mul(acc, x), c);
                    }
                    acc == 0
                })
                .ok_or_else(|| Error::internal("modulus has no root in the extension"))?
        };
        let table: Vec<u32> = self
            .elements()
            .map(|a| {
                let mut acc = 0;
                for &c in self.coeffs(a).iter().rev() {
                    acc = big.add(big.mul(acc, root), c);
                }
                acc
            })
            .collect();
        Ok(ConstantEmbedding::new(self.clone(), big, table))
    }
}

/// An embedding GF(q) → GF(q^d) fixed at construction.
#[derive(Clone, Debug)]
pub struct ConstantEmbedding {
    small: GaloisField,
    big: GaloisField,
    forward: Vec<u32>,
    backward: Vec<Option<u32>>,
}

impl ConstantEmbedding {
    fn new(small: GaloisField, big: GaloisField, forward: Vec<u32>) -> Self {
        let mut backward = vec![None; big.order() as usize];
        for (a, &b) in forward.iter().enumerate() {
            backward[b as usize] = Some(a as u32);
        }
        ConstantEmbedding { small, big, forward, backward }
    }

    pub fn identity(field: GaloisField) -> Self {
        let forward: Vec<u32> = field.elements().collect();
        Self::new(field.clone(), field, forward)
    }

    pub fn small(&self) -> &GaloisField {
        &self.small
    }

    pub fn big(&self) -> &GaloisField {
        &self.big
    }

    pub fn degree(&self) -> usize {
        self.big.degree() / self.small.degree()
    }

    pub fn embed(&self, a: u32) -> u32 {
        self.forward[a as usize]
    }

    /// Preimage of `b` if it lies in the image of the small field.
    pub fn descend(&self, b: u32) -> Option<u32> {
        self.backward[b as usize]
    }

    /// Relative trace GF(q^d) → GF(q).
    pub fn trace(&self, b: u32) -> u32 {
        let t = self
            .big
            .trace(b, self.small.degree())
            .expect("small field degree divides the big one");
        self.descend(t).expect("trace lands in the subfield")
    }

    /// The q-power Frobenius of the big field, which generates Gal(GF(q^d)/GF(q)).
    pub fn frobenius(&self, b: u32) -> u32 {
        self.big.pow(b, self.small.order() as u64)
    }
}

/// A field element paired with its field.
#[derive(Clone, PartialEq, Eq)]
pub struct GfElement {
    field: GaloisField,
    idx: u32,
}

impl fmt::Debug for GfElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.field.format(self.idx))
    }
}

impl fmt::Display for GfElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.field.format(self.idx))
    }
}

impl GfElement {
    pub fn new(field: &GaloisField, idx: u32) -> Self {
        assert!(idx < field.order());
        GfElement { field: field.clone(), idx }
    }

    pub fn from_coeffs(field: &GaloisField, coeffs: &[u32]) -> Self {
        GfElement { field: field.clone(), idx: field.from_coeffs(coeffs) }
    }

    pub fn zero(field: &GaloisField) -> Self {
        Self::new(field, 0)
    }

    pub fn one(field: &GaloisField) -> Self {
        Self::new(field, 1)
    }

    pub fn field(&self) -> &GaloisField {
        &self.field
    }

    pub fn index(&self) -> u32 {
        self.idx
    }

    pub fn coeffs(&self) -> Vec<u32> {
        self.field.coeffs(self.idx)
    }

    pub fn is_zero(&self) -> bool {
        self.idx == 0
    }

    pub fn add(&self, other: &Self) -> Self {
        GfElement { field: self.field.clone(), idx: self.field.add(self.idx, other.idx) }
    }

    pub fn mul(&self, other: &Self) -> Self {
        GfElement { field: self.field.clone(), idx: self.field.mul(self.idx, other.idx) }
    }

    pub fn pow(&self, k: u64) -> Self {
        GfElement { field: self.field.clone(), idx: self.field.pow(self.idx, k) }
    }

    pub fn inv(&self) -> Result<Self> {
        Ok(GfElement { field: self.field.clone(), idx: self.field.inv(self.idx)? })
    }

    pub fn pth_root(&self) -> Self {
        GfElement { field: self.field.clone(), idx: self.field.pth_root(self.idx) }
    }

    pub fn trace(&self, sub_degree: usize) -> Result<Self> {
        Ok(GfElement { field: self.field.clone(), idx: self.field.trace(self.idx, sub_degree)? })
    }
}

pub fn gf_inv(a: &GfElement) -> Result<GfElement> {
    a.inv()
}

pub fn gf_pth_root(a: &GfElement) -> GfElement {
    a.pth_root()
}

pub fn gf_trace(a: &GfElement, sub_degree: usize) -> Result<GfElement> {
    a.trace(sub_degree)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gf4() -> GaloisField {
        GaloisField::new(2, 2).unwrap()
    }

    #[test]
    fn default_moduli() {
        assert_eq!(gf4().modulus(), &[1, 1, 1]);
        assert_eq!(GaloisField::new(2, 3).unwrap().modulus(), &[1, 1, 0, 1]);
        assert_eq!(GaloisField::new(3, 2).unwrap().modulus(), &[1, 0, 1]);
    }

    #[test]
    fn inverse_examples() {
        let f2 = GaloisField::new(2, 1).unwrap();
        assert_eq!(gf_inv(&GfElement::one(&f2)).unwrap(), GfElement::one(&f2));
        let f = gf4();
        let w = GfElement::from_coeffs(&f, &[0, 1]);
        let w1 = GfElement::from_coeffs(&f, &[1, 1]);
        assert_eq!(gf_inv(&w).unwrap(), w1);
        assert_eq!(gf_inv(&GfElement::zero(&f)), Err(Error::DivisionByZero));
    }

    #[test]
    fn pth_root_examples() {
        let f = gf4();
        let w = GfElement::from_coeffs(&f, &[0, 1]);
        let w1 = GfElement::from_coeffs(&f, &[1, 1]);
        assert_eq!(gf_pth_root(&w), w1);
        assert_eq!(gf_pth_root(&GfElement::zero(&f)), GfElement::zero(&f));
        assert_eq!(gf_pth_root(&GfElement::one(&f)), GfElement::one(&f));
    }

    #[test]
    fn trace_examples() {
        let f = gf4();
        let w = GfElement::from_coeffs(&f, &[0, 1]);
        assert_eq!(gf_trace(&w, 1).unwrap(), GfElement::one(&f));
        assert_eq!(gf_trace(&GfElement::one(&f), 1).unwrap(), GfElement::zero(&f));
        assert_eq!(gf_trace(&w, 2).unwrap(), w);
        let f8 = GaloisField::new(2, 3).unwrap();
        assert!(matches!(
            gf_trace(&GfElement::one(&f8), 2),
            Err(Error::InvalidSubfield { .. })
        ));
    }

    #[test]
    fn field_axioms_exhaustive_small() {
        for (p, e) in [(2, 1), (2, 2), (3, 1), (3, 2), (5, 1), (5, 2), (2, 4)] {
            let f = GaloisField::new(p, e).unwrap();
            for a in f.elements() {
                assert_eq!(f.pow(f.pth_root(a), p as u64), a);
                if a != 0 {
                    assert_eq!(f.mul(a, f.inv(a).unwrap()), 1);
                }
                assert_eq!(f.add(a, f.neg(a)), 0);
            }
        }
    }

    #[test]
    fn trace_is_additive_and_frobenius_invariant() {
        let f = GaloisField::new(3, 4).unwrap();
        for sub in [1, 2, 4] {
            let q0 = 3u64.pow(sub as u32);
            for a in f.elements().step_by(7) {
                for b in f.elements().step_by(13) {
                    let lhs = f.trace(f.add(a, b), sub).unwrap();
                    let rhs = f.add(f.trace(a, sub).unwrap(), f.trace(b, sub).unwrap());
                    assert_eq!(lhs, rhs);
                }
                let t = f.trace(a, sub).unwrap();
                assert_eq!(f.pow(t, q0), t);
                assert_eq!(f.trace(f.pow(a, q0), sub).unwrap(), t);
            }
        }
    }

    #[test]
    fn rejects_bad_moduli() {
        assert!(GaloisField::with_modulus(2, vec![1, 0, 1]).is_err());
        assert!(GaloisField::with_modulus(2, vec![1, 1, 2]).is_err());
        assert!(GaloisField::new(7, 1).is_err());
    }

    #[test]
    fn extension_embedding_is_a_ring_map() {
        let f4 = gf4();
        let emb = f4.extension(3).unwrap();
        assert_eq!(emb.big().order(), 64);
        for a in f4.elements() {
            for b in f4.elements() {
                assert_eq!(emb.embed(f4.mul(a, b)), emb.big().mul(emb.embed(a), emb.embed(b)));
                assert_eq!(emb.embed(f4.add(a, b)), emb.big().add(emb.embed(a), emb.embed(b)));
            }
        }
        for b in emb.big().elements() {
            let t = emb.trace(b);
            assert_eq!(emb.embed(t), emb.big().trace(b, 2).unwrap());
        }
    }

    #[test]
    fn gf8_trace_formula() {
        let f2 = GaloisField::new(2, 1).unwrap();
        let emb = f2.extension(3).unwrap();
        let big = emb.big();
        let w = big.generator();
        let expected = big.add(big.add(w, big.pow(w, 2)), big.pow(w, 4));
        assert_eq!(emb.embed(emb.trace(w)), expected);
    }
}

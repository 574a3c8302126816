//! Multivariate GCD by evaluation and dense interpolation over a large extension of the
//! constant field, one variable at a time.

use std::collections::{BTreeMap, HashMap};
use std::sync::{Mutex, OnceLock};

use crate::gf::{ConstantEmbedding, GaloisField};
use crate::poly::{Mono, Poly, MAX_VARS};

const EVAL_FIELD_LIMIT: u64 = 1 << 16;
/// Extra evaluation points allowed past the degree bound before giving up.
const SLACK: usize = 24;

fn eval_embedding(gf: &GaloisField) -> Option<ConstantEmbedding> {
    static CACHE: OnceLock<Mutex<HashMap<(u32, Vec<u32>), Option<ConstantEmbedding>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let key = (gf.p(), gf.modulus().to_vec());
    if let Some(e) = cache.lock().expect("cache lock").get(&key) {
        return e.clone();
    }
    let q = gf.order() as u64;
    let mut d = 1;
    while q.pow(d as u32 + 1) <= EVAL_FIELD_LIMIT {
        d += 1;
    }
    let emb = if q.pow(d as u32) < 256 { None } else { gf.extension(d).ok() };
    cache.lock().expect("cache lock").insert(key, emb.clone());
    emb
}

// dense univariate polynomials, lowest degree first, no trailing zeros

fn trim(v: &mut Vec<u32>) {
    while v.last() == Some(&0) {
        v.pop();
    }
}

fn uni_eval(k: &GaloisField, a: &[u32], t: u32) -> u32 {
    a.iter().rev().fold(0, |acc, &c| k.add(k.mul(acc, t), c))
}

fn uni_scale(k: &GaloisField, a: &[u32], c: u32) -> Vec<u32> {
    let mut out: Vec<u32> = a.iter().map(|&x| k.mul(x, c)).collect();
    trim(&mut out);
    out
}

fn uni_mul(k: &GaloisField, a: &[u32], b: &[u32]) -> Vec<u32> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![0u32; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            out[i + j] = k.add(out[i + j], k.mul(x, y));
        }
    }
    trim(&mut out);
    out
}

fn uni_add(k: &GaloisField, a: &[u32], b: &[u32]) -> Vec<u32> {
    let n = a.len().max(b.len());
    let mut out: Vec<u32> = (0..n)
        .map(|i| k.add(a.get(i).copied().unwrap_or(0), b.get(i).copied().unwrap_or(0)))
        .collect();
    trim(&mut out);
    out
}

fn uni_divrem(k: &GaloisField, a: &[u32], b: &[u32]) -> (Vec<u32>, Vec<u32>) {
    let mut r = a.to_vec();
    trim(&mut r);
    let db = b.len() - 1;
    let inv = k.inv(b[db]).expect("nonzero leading coefficient");
    if r.len() <= db {
        return (Vec::new(), r);
    }
    let mut q = vec![0u32; r.len() - db];
    while r.len() > db {
        let shift = r.len() - 1 - db;
        let c = k.mul(*r.last().expect("nonempty"), inv);
        q[shift] = c;
        for (i, &bi) in b.iter().enumerate() {
            r[shift + i] = k.sub(r[shift + i], k.mul(c, bi));
        }
        trim(&mut r);
    }
    trim(&mut q);
    (q, r)
}

fn uni_monic(k: &GaloisField, a: &[u32]) -> Vec<u32> {
    match a.last() {
        None => Vec::new(),
        Some(&lc) => uni_scale(k, a, k.inv(lc).expect("nonzero")),
    }
}

fn uni_gcd(k: &GaloisField, a: &[u32], b: &[u32]) -> Vec<u32> {
    let (mut f, mut g) = (a.to_vec(), b.to_vec());
    trim(&mut f);
    trim(&mut g);
    while !g.is_empty() {
        let (_, r) = uni_divrem(k, &f, &g);
        f = g;
        g = r;
    }
    uni_monic(k, &f)
}

fn uses(a: &Poly, v: usize) -> bool {
    a.terms().iter().any(|(m, _)| m.0[v] != 0)
}

/// Coefficients of `a` as univariate polynomials in `v`, keyed by the remaining monomial.
fn split_var(a: &Poly, v: usize) -> BTreeMap<Mono, Vec<u32>> {
    let mut out: BTreeMap<Mono, Vec<u32>> = BTreeMap::new();
    for (m, c) in a.terms() {
        let mut rest = *m;
        let e = rest.0[v] as usize;
        rest.0[v] = 0;
        let entry = out.entry(rest).or_default();
        if entry.len() <= e {
            entry.resize(e + 1, 0);
        }
        entry[e] = *c;
    }
    out
}

fn join_var(k: &GaloisField, parts: &BTreeMap<Mono, Vec<u32>>, v: usize) -> Poly {
    let mut terms = Vec::new();
    for (m, coeffs) in parts {
        for (e, &c) in coeffs.iter().enumerate() {
            if c != 0 {
                let mut mm = *m;
                mm.0[v] = e as u16;
                terms.push((mm, c));
            }
        }
    }
    Poly::from_terms(k, terms)
}

fn eval_var(k: &GaloisField, a: &Poly, v: usize, t: u32) -> Poly {
    let terms = a
        .terms()
        .iter()
        .map(|(m, c)| {
            let mut mm = *m;
            let e = mm.0[v] as u64;
            mm.0[v] = 0;
            (mm, k.mul(*c, k.pow(t, e)))
        })
        .collect();
    Poly::from_terms(k, terms)
}

/// Lexicographic key over `vars`, last variable most significant.
fn lex_key(m: &Mono, vars: &[usize]) -> [u16; MAX_VARS] {
    let mut key = [0u16; MAX_VARS];
    for (i, &v) in vars.iter().rev().enumerate() {
        key[i] = m.0[v];
    }
    key
}

fn lex_lead(a: &Poly, vars: &[usize]) -> Option<(Mono, u32)> {
    a.terms().iter().max_by_key(|(m, _)| lex_key(m, vars)).copied()
}

fn lex_monic(k: &GaloisField, a: &Poly, vars: &[usize]) -> Poly {
    match lex_lead(a, vars) {
        None => Poly::zero(),
        Some((_, c)) => a.scale(k, k.inv(c).expect("nonzero")),
    }
}

fn content_in(k: &GaloisField, parts: &BTreeMap<Mono, Vec<u32>>) -> Vec<u32> {
    let mut acc: Vec<u32> = Vec::new();
    for c in parts.values() {
        acc = if acc.is_empty() { uni_monic(k, c) } else { uni_gcd(k, &acc, c) };
        if acc.len() == 1 {
            break;
        }
    }
    acc
}

fn divide_parts(k: &GaloisField, parts: &mut BTreeMap<Mono, Vec<u32>>, c: &[u32]) {
    if c.len() <= 1 {
        return;
    }
    for coeffs in parts.values_mut() {
        let (q, r) = uni_divrem(k, coeffs, c);
        debug_assert!(r.is_empty());
        *coeffs = q;
    }
}

/// Leading coefficient (a polynomial in `v`) of `parts` for the lex order on `rest`.
fn lead_coefficient(parts: &BTreeMap<Mono, Vec<u32>>, rest: &[usize]) -> Vec<u32> {
    parts.iter().max_by_key(|(m, _)| lex_key(m, rest)).map(|(_, c)| c.clone()).unwrap_or_default()
}

/// GCD of nonzero `a`, `b` in the variables `vars`, monic for the lex order on `vars`.
fn gcd_rec(k: &GaloisField, a: &Poly, b: &Poly, vars: &[usize]) -> Option<Poly> {
    let (&v, rest) = vars.split_last()?;
    if rest.is_empty() {
        let ua = split_var(a, v).remove(&Mono::one()).unwrap_or_default();
        let ub = split_var(b, v).remove(&Mono::one()).unwrap_or_default();
        let g = uni_gcd(k, &ua, &ub);
        let mut parts = BTreeMap::new();
        parts.insert(Mono::one(), g);
        return Some(join_var(k, &parts, v));
    }
    let mut pa = split_var(a, v);
    let mut pb = split_var(b, v);
    let ca = content_in(k, &pa);
    let cb = content_in(k, &pb);
    let c = uni_gcd(k, &ca, &cb);
    divide_parts(k, &mut pa, &ca);
    divide_parts(k, &mut pb, &cb);
    let content_poly = |c: &[u32]| {
        let mut parts = BTreeMap::new();
        parts.insert(Mono::one(), c.to_vec());
        join_var(k, &parts, v)
    };
    let a1 = join_var(k, &pa, v);
    let b1 = join_var(k, &pb, v);
    if !rest.iter().any(|&r| uses(&a1, r)) || !rest.iter().any(|&r| uses(&b1, r)) {
        return Some(lex_monic(k, &content_poly(&c), vars));
    }
    let la = lead_coefficient(&pa, rest);
    let lb = lead_coefficient(&pb, rest);
    let gamma = uni_gcd(k, &la, &lb);
    let deg = |p: &BTreeMap<Mono, Vec<u32>>| p.values().map(|c| c.len().saturating_sub(1)).max().unwrap_or(0);
    let bound = gamma.len().saturating_sub(1) + deg(&pa).min(deg(&pb));

    let mut interp: BTreeMap<Mono, Vec<u32>> = BTreeMap::new();
    let mut modulus: Vec<u32> = vec![1];
    let mut current: Option<[u16; MAX_VARS]> = None;
    let mut points = 0usize;
    let mut tried = 0usize;
    for t in 1..k.order() {
        if uni_eval(k, &la, t) == 0 || uni_eval(k, &lb, t) == 0 {
            continue;
        }
        tried += 1;
        if tried > 4 * (bound + SLACK) {
            return None;
        }
        let g = gcd_rec(k, &eval_var(k, &a1, v, t), &eval_var(k, &b1, v, t), rest)?;
        let lm = lex_key(&lex_lead(&g, rest)?.0, rest);
        match current {
            Some(cur) if lm > cur => continue,
            Some(cur) if lm == cur => {}
            _ => {
                interp.clear();
                modulus = vec![1];
                points = 0;
                current = Some(lm);
            }
        }
        let g = g.scale(k, uni_eval(k, &gamma, t));
        let mt = uni_eval(k, &modulus, t);
        let minv = k.inv(mt).ok()?;
        let mut changed = false;
        let image = split_var(&g, v);
        let keys: Vec<Mono> = interp.keys().chain(image.keys()).copied().collect();
        for m in keys {
            let old = interp.get(&m).map(|c| uni_eval(k, c, t)).unwrap_or(0);
            let new = image.get(&m).map(|c| c.first().copied().unwrap_or(0)).unwrap_or(0);
            let delta = k.mul(k.sub(new, old), minv);
            if delta != 0 {
                changed = true;
                let entry = interp.entry(m).or_default();
                *entry = uni_add(k, entry, &uni_scale(k, &modulus, delta));
            }
        }
        interp.retain(|_, c| !c.is_empty());
        modulus = uni_mul(k, &modulus, &[k.neg(t), 1]);
        points += 1;
        if (points >= 2 && !changed) || points == bound + 1 || (points > bound + 1 && (points - bound) % 4 == 0) {
            let mut parts = interp.clone();
            let cc = content_in(k, &parts);
            divide_parts(k, &mut parts, &cc);
            let h = join_var(k, &parts, v);
            if a1.div_exact(k, &h).is_some() && b1.div_exact(k, &h).is_some() {
                return Some(lex_monic(k, &h.mul(k, &content_poly(&c)), vars));
            }
        }
        if points > bound + SLACK {
            return None;
        }
    }
    None
}

/// Monic GCD of two nonzero polynomials, or `None` when the modular method cannot be applied.
pub(crate) fn modular_gcd(gf: &GaloisField, a: &Poly, b: &Poly) -> Option<Poly> {
    let vars: Vec<usize> = (0..MAX_VARS).filter(|&v| uses(a, v) || uses(b, v)).collect();
    if vars.len() <= 1 {
        let v = vars.first().copied().unwrap_or(0);
        return gcd_rec(gf, a, b, &[v]).map(|g| g.monic(gf));
    }
    let emb = eval_embedding(gf)?;
    let k = emb.big();
    let lift = |p: &Poly| p.map_coeffs(k, |c| emb.embed(c));
    let g = gcd_rec(k, &lift(a), &lift(b), &vars)?.monic(k);
    let mut terms = Vec::with_capacity(g.len());
    for (m, c) in g.terms() {
        terms.push((*m, emb.descend(*c)?));
    }
    Some(Poly::from_terms(gf, terms))
}

use milnor_forms::pbasis::p_independent;
use milnor_forms::{random, FieldContext, FieldElement, GaloisField, MultiIndex};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn ctx(p: u32, r: usize) -> FieldContext {
    FieldContext::with_names(p, 1, &["x", "y", "z"][..r]).unwrap()
}

#[test]
fn gf_roots_and_inverses_exhaustive() {
    for p in [2, 3, 5] {
        for e in [1, 2] {
            let gf = GaloisField::new(p, e).unwrap();
            for a in gf.elements() {
                assert_eq!(gf.pow(gf.pth_root(a), p as u64), a);
                if a != 0 {
                    assert_eq!(gf.mul(a, gf.inv(a).unwrap()), 1);
                }
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn gf_roots_and_inverses_large(p in prop::sample::select(vec![2u32, 3]), e in 3usize..6, seed: u64) {
        let gf = GaloisField::new(p, e).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = rng.gen_range(1..gf.order());
        prop_assert_eq!(gf.pow(gf.pth_root(a), p as u64), a);
        prop_assert_eq!(gf.mul(a, gf.inv(a).unwrap()), 1);
    }

    #[test]
    fn gf_trace_laws(p in prop::sample::select(vec![2u32, 3]), seed: u64) {
        let gf = GaloisField::new(p, 4).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for sub in [1usize, 2] {
            let q0 = (p as u64).pow(sub as u32);
            let (a, b) = (rng.gen_range(0..gf.order()), rng.gen_range(0..gf.order()));
            let ta = gf.trace(a, sub).unwrap();
            prop_assert_eq!(gf.trace(gf.add(a, b), sub).unwrap(), gf.add(ta, gf.trace(b, sub).unwrap()));
            prop_assert_eq!(gf.trace(gf.pow(a, q0), sub).unwrap(), ta);
            // traces lie in the subfield, so they serve as scalars
            let c = gf.trace(rng.gen_range(0..gf.order()), sub).unwrap();
            prop_assert_eq!(gf.pow(c, q0), c);
            prop_assert_eq!(gf.trace(gf.mul(c, a), sub).unwrap(), gf.mul(c, ta));
        }
    }

    #[test]
    fn pth_root_of_pth_power(p in prop::sample::select(vec![2u32, 3]), r in 1usize..4, seed: u64) {
        let c = ctx(p, r);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = random::element(&mut rng, &c, 3).unwrap();
        prop_assert_eq!(a.pow(p as i64).unwrap().pth_root().unwrap(), a);
    }

    #[test]
    fn class_decomposition_reconstructs(p in prop::sample::select(vec![2u32, 3]), r in 1usize..4, seed: u64) {
        let c = ctx(p, r);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = random::element(&mut rng, &c, 4).unwrap();
        let mut sum = c.zero();
        for (alpha, bucket) in a.pclass_decompose().unwrap() {
            prop_assert!(bucket.pth_root().is_ok());
            sum = sum.add(&bucket.mul(&FieldElement::basis_monomial(&c, &alpha)).unwrap()).unwrap();
        }
        prop_assert_eq!(sum, a);
    }

    #[test]
    fn partial_derivatives(p in prop::sample::select(vec![2u32, 3]), seed: u64) {
        let c = ctx(p, 2);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let f = random::element(&mut rng, &c, 3).unwrap();
        let g = random::element(&mut rng, &c, 3).unwrap();
        for j in 0..2 {
            let lhs = f.mul(&g).unwrap().partial(j).unwrap();
            let rhs = f.mul(&g.partial(j).unwrap()).unwrap().add(&g.mul(&f.partial(j).unwrap()).unwrap()).unwrap();
            prop_assert_eq!(lhs, rhs);
        }
        prop_assert_eq!(f.partial(0).unwrap().partial(1).unwrap(), f.partial(1).unwrap().partial(0).unwrap());
    }

    #[test]
    fn constants_for_derivation_are_pth_powers(p in prop::sample::select(vec![2u32, 3]), power: bool, seed: u64) {
        let c = ctx(p, 2);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut a = random::element(&mut rng, &c, 2).unwrap();
        if power {
            a = a.frobenius().unwrap();
        }
        let killed = (0..2).all(|j| a.partial(j).unwrap().is_zero());
        prop_assert_eq!(killed, a.is_pth_power());
        prop_assert_eq!(killed, a.pth_root().is_ok());
    }

    #[test]
    fn p_independence_of_monomials(p in prop::sample::select(vec![2u32, 3]), k in 1usize..4, seed: u64) {
        let c = ctx(p, 3);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let exps: Vec<Vec<u32>> = (0..k).map(|_| (0..3).map(|_| rng.gen_range(0..5)).collect()).collect();
        let elts: Vec<FieldElement> = exps.iter().map(|e| c.monomial(e, 1).unwrap()).collect();
        prop_assert_eq!(p_independent(&elts).unwrap(), rank_mod_p(&exps, p) == k);
    }
}

/// Rank over GF(p) of exponent vectors reduced mod p.
fn rank_mod_p(rows: &[Vec<u32>], p: u32) -> usize {
    let mut m: Vec<Vec<u32>> = rows.iter().map(|r| r.iter().map(|x| x % p).collect()).collect();
    let cols = m.first().map_or(0, |r| r.len());
    let mut rank = 0;
    for col in 0..cols {
        let Some(piv) = (rank..m.len()).find(|&i| m[i][col] != 0) else { continue };
        m.swap(rank, piv);
        let inv = (1..p).find(|b| m[rank][col] * b % p == 1).unwrap();
        let pivot: Vec<u32> = m[rank].iter().map(|x| x * inv % p).collect();
        for (i, row) in m.iter_mut().enumerate() {
            if i != rank {
                let f = row[col];
                for (x, y) in row.iter_mut().zip(&pivot) {
                    *x = (*x + p * p - f * y % p) % p;
                }
            }
        }
        m[rank] = pivot;
        rank += 1;
    }
    rank
}

#[test]
fn multi_indices_enumerate_all_classes() {
    assert_eq!(MultiIndex::all(3, 2).len(), 9);
    assert!(MultiIndex::all(2, 3).iter().any(|a| a.is_zero()));
}

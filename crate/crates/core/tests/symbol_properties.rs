use milnor_forms::forms::{
    dlog_symbol, nu_member, restrict_constant_ext, top_class_coordinate, DifferentialForm, Frame, PureSymbol,
};
use milnor_forms::pbasis::{in_p_subfield, p_independent};
use milnor_forms::symbols::{apply_functional, cartier_preimage, lemma32_annihilator, prop41_decompose, thm14_decompose};
use milnor_forms::{random, Error, FieldContext, FieldElement};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn ctx(p: u32, r: usize) -> FieldContext {
    FieldContext::with_names(p, 1, &["x", "y", "z"][..r]).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn top_degree_round_trip_char_two(r in 1usize..3, count in 1usize..4, seed: u64) {
        let c = ctx(2, r);
        let f = Frame::standard(&c);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (_, u) = random::symbol_combination(&mut rng, &f, r, count, 2).unwrap();
        let dec = prop41_decompose(&u).unwrap();
        prop_assert_eq!(dec.extension.d, 1);
        prop_assert_eq!(dec.dlog_sum().unwrap(), u);
    }

    #[test]
    fn top_degree_round_trip_char_three(seed: u64) {
        let c = ctx(3, 1);
        let f = Frame::standard(&c);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (_, u) = random::symbol_combination(&mut rng, &f, 1, 2, 2).unwrap();
        match prop41_decompose(&u) {
            Ok(dec) => {
                prop_assert!(dec.extension.d % 3 != 0);
                prop_assert_eq!(dec.dlog_sum().unwrap(), restrict_constant_ext(&u, dec.extension.d).unwrap());
            }
            Err(e) => prop_assert!(matches!(e, Error::UnsupportedExtension(_)), "{:?}", e),
        }
    }

    #[test]
    fn cartier_preimage_inverts_dlog(p in prop::sample::select(vec![2u32, 3]), seed: u64) {
        let c = ctx(p, 2);
        let f = Frame::new(&c, vec![c.gen(1)], vec![c.gen(0)]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let y = random::nonzero_poly_element(&mut rng, &c, 3).unwrap();
        let target = f.dlog(&y).unwrap();
        let coeff = target.coeff(1);
        prop_assert!(nu_member(&target).unwrap());
        let z = cartier_preimage(&coeff, &f).unwrap();
        prop_assert_eq!(f.dlog(&z).unwrap(), target);
    }

    #[test]
    fn annihilator_kills_powers(p in prop::sample::select(vec![2u32, 3]), seed: u64) {
        let c = ctx(p, 2);
        let f = Frame::new(&c, vec![c.gen(1)], vec![c.gen(0)]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let y = random::nonzero_poly_element(&mut rng, &c, 3).unwrap();
        let u = f.dlog(&y).unwrap();
        // the functional h -> class of h*u on the basis 1, x, ..., x^(p-1)
        let g: Vec<_> = (0..p as i64).map(|i| top_class_coordinate(&u.scale(&c.gen(0).pow(i).unwrap()).unwrap()).unwrap()).collect();
        prop_assume!(g.iter().any(|e| !e.is_zero()));
        let (cert, a) = match lemma32_annihilator(&g, &f) {
            Ok(v) => v,
            Err(Error::UnsupportedExtension(_)) => return Ok(()),
            Err(e) => return Err(TestCaseError::fail(format!("{e:?}"))),
        };
        prop_assert!(p == 3 || cert.d == 1);
        let ext = if cert.d == 1 { c.clone() } else { c.extend_constants(cert.d).unwrap() };
        let fe = f.restrict_constants(&ext).unwrap();
        let ge: Vec<_> = g.iter().map(|e| e.restrict_to(&ext).unwrap()).collect();
        prop_assert!(!a.is_zero());
        for i in 1..p as i64 {
            prop_assert!(apply_functional(&ge, &fe, &a.pow(i).unwrap()).unwrap().is_zero());
        }
    }

    #[test]
    fn wedge_ideal_inputs_decompose(shape in prop::sample::select(vec![(1usize, 1usize), (2, 1), (2, 2), (3, 2)]), seed: u64) {
        let (m, n) = shape;
        let c = ctx(2, 3);
        let f = Frame::standard(&c);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = tail(&mut rng, &c, n);
        let mut u = DifferentialForm::zero(&f, m);
        for _ in 0..rng.gen_range(1..=3) {
            let mut e = random::symbol(&mut rng, &c, m - n, 2).unwrap().entries;
            e.extend(a.iter().cloned());
            u = u.add(&dlog_symbol(&PureSymbol::new(e).unwrap(), &f).unwrap()).unwrap();
        }
        let dec = thm14_decompose(&u, &a).unwrap();
        prop_assert_eq!(dec.dlog_sum().unwrap(), u);
        for s in &dec.symbols {
            for ai in &a {
                prop_assert!(in_p_subfield(ai, &s.entries).unwrap());
            }
            // killed by every dlog(a_i), hence divisible by their wedge
            let ds = dlog_symbol(s, &f).unwrap();
            for ai in &a {
                prop_assert!(ds.wedge(&f.dlog(ai).unwrap()).unwrap().is_zero());
            }
        }
    }
}

fn tail<R: Rng>(rng: &mut R, c: &FieldContext, n: usize) -> Vec<FieldElement> {
    loop {
        let a: Vec<_> = (0..n).map(|_| random::nonzero_poly_element(rng, c, 2).unwrap()).collect();
        if p_independent(&a).unwrap() {
            return a;
        }
    }
}

#[test]
fn non_members_are_rejected() {
    let c = ctx(2, 2);
    let f = Frame::standard(&c);
    let u = DifferentialForm::term(&f, 3, c.gen(0)).unwrap();
    assert_eq!(prop41_decompose(&u).unwrap_err(), Error::NotInNu);
    let a = vec![c.gen(1)];
    let v = f.dlog(&c.gen(0)).unwrap();
    assert_eq!(thm14_decompose(&v, &a).unwrap_err(), Error::NotInWedgeIdeal);
}

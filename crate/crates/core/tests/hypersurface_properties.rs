use milnor_forms::forms::{dlog_symbol, DifferentialForm, Frame, PureSymbol};
use milnor_forms::hypersurface::{
    analyze_hypersurface, build_function_field, restrict_form_to_fx, symbol_in_kernel_predicate, HypersurfaceAnalysis,
    HypersurfacePoly,
};
use milnor_forms::pbasis::independent_subset;
use milnor_forms::{random, Error, FieldContext, FieldElement};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn ctx(r: usize) -> FieldContext {
    FieldContext::with_names(2, 1, &["x", "y", "z"][..r]).unwrap()
}

/// T1^2 + c_2 T2^2 + ... + c_k Tk^2 + c_0 with random coefficients, when it defines a function field.
fn random_instance<R: Rng>(rng: &mut R, c: &FieldContext) -> Option<HypersurfaceAnalysis> {
    let k = rng.gen_range(1..=2);
    let mut terms = vec![(exps(k, 0), c.one())];
    for j in 1..k {
        terms.push((exps(k, j), random::nonzero_poly_element(rng, c, 2).ok()?));
    }
    terms.push((vec![0; k], random::nonzero_poly_element(rng, c, 2).ok()?));
    let tvars = (1..=k).map(|i| format!("T{i}")).collect();
    let f = HypersurfacePoly::new(c, tvars, terms).ok()?;
    let an = analyze_hypersurface(&f).ok()?;
    an.fx.is_some().then_some(an)
}

fn exps(k: usize, j: usize) -> Vec<u32> {
    (0..k).map(|i| if i == j { 2 } else { 0 }).collect()
}

fn eta(frame: &Frame, gens: &[FieldElement]) -> DifferentialForm {
    let mut acc = DifferentialForm::scalar(frame, frame.ctx().one()).unwrap();
    for a in gens {
        acc = acc.wedge(&frame.dlog(a).unwrap()).unwrap();
    }
    acc
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn norm_wedge_dies(r in 1usize..4, seed: u64) {
        let c = ctx(r);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let an = random_instance(&mut rng, &c);
        prop_assume!(an.is_some());
        let an = an.unwrap();
        let qf = an.fx.as_ref().unwrap();
        let frame = Frame::standard(&c);
        let e = eta(&frame, &an.norm_gens);
        prop_assert!(restrict_form_to_fx(&e, qf).unwrap().is_zero());
        if an.n == 1 {
            prop_assert!(restrict_form_to_fx(&frame.dlog(&an.norm_gens[0]).unwrap(), qf).unwrap().is_zero());
        }
        let k = rng.gen_range(0..=r - an.n);
        let omega = random::form(&mut rng, &frame, k, 2).unwrap();
        prop_assert!(restrict_form_to_fx(&omega.wedge(&e).unwrap(), qf).unwrap().is_zero());
    }

    #[test]
    fn norm_rank_is_well_defined(r in 1usize..4, seed: u64) {
        let c = ctx(r);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let an = random_instance(&mut rng, &c);
        prop_assume!(an.is_some());
        let an = an.unwrap();
        prop_assert!(an.n <= r);
        let coeffs: Vec<FieldElement> = an.poly.terms().values().cloned().collect();
        for den in &coeffs {
            let ratios: Vec<FieldElement> = coeffs.iter().map(|a| a.div(den).unwrap()).collect();
            prop_assert_eq!(independent_subset(&ratios).unwrap().len(), an.n);
        }
        // scaling the polynomial leaves the ratios alone
        let s = random::nonzero_element(&mut rng, &c, 2).unwrap();
        let scaled: Vec<_> = an.poly.terms().iter().map(|(e, a)| (e.clone(), a.mul(&s).unwrap())).collect();
        let g = HypersurfacePoly::new(&c, an.poly.tvars().to_vec(), scaled).unwrap();
        prop_assert_eq!(analyze_hypersurface(&g).unwrap().n, an.n);
    }

    #[test]
    fn predicate_ignores_order_and_pth_powers(r in 2usize..4, seed: u64) {
        let c = ctx(r);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let an = random_instance(&mut rng, &c);
        prop_assume!(an.is_some());
        let an = an.unwrap();
        let len = rng.gen_range(1..=r);
        let mut entries = random::symbol(&mut rng, &c, len, 2).unwrap().entries;
        if rng.gen_bool(0.5) && len >= an.n {
            for (slot, a) in an.norm_gens.iter().enumerate() {
                entries[slot] = a.clone();
            }
        }
        let base = symbol_in_kernel_predicate(&PureSymbol::new(entries.clone()).unwrap(), &an).unwrap();
        let mut shuffled = entries.clone();
        shuffled.reverse();
        prop_assert_eq!(symbol_in_kernel_predicate(&PureSymbol::new(shuffled).unwrap(), &an).unwrap(), base);
        let slot = rng.gen_range(0..len);
        let h = random::nonzero_element(&mut rng, &c, 2).unwrap();
        entries[slot] = entries[slot].mul(&h.frobenius().unwrap()).unwrap();
        prop_assert_eq!(symbol_in_kernel_predicate(&PureSymbol::new(entries).unwrap(), &an).unwrap(), base);
    }

    #[test]
    fn predicate_matches_restriction(r in 1usize..4, seed: u64) {
        let c = ctx(r);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let an = random_instance(&mut rng, &c);
        prop_assume!(an.is_some());
        let an = an.unwrap();
        let qf = an.fx.as_ref().unwrap();
        let frame = Frame::standard(&c);
        let len = rng.gen_range(1..=r);
        let s = random::symbol(&mut rng, &c, len, 2).unwrap();
        let u = dlog_symbol(&s, &frame).unwrap();
        prop_assume!(!u.is_zero());
        let dies = restrict_form_to_fx(&u, qf).unwrap().is_zero();
        prop_assert_eq!(dies, symbol_in_kernel_predicate(&s, &an).unwrap());
    }

    #[test]
    fn quotient_field_arithmetic(r in 1usize..3, seed: u64) {
        let c = ctx(r);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let an = random_instance(&mut rng, &c);
        prop_assume!(an.is_some());
        let an = an.unwrap();
        let qf = an.fx.as_ref().unwrap();
        let ext = qf.coefficient_field();
        prop_assert_eq!(qf.s().pow(2).unwrap(), qf.from_coefficient(qf.g()).unwrap());
        let z = qf
            .element(vec![random::element(&mut rng, ext, 2).unwrap(), random::element(&mut rng, ext, 2).unwrap()])
            .unwrap();
        prop_assume!(!z.is_zero());
        prop_assert_eq!(z.mul(&z.inv().unwrap()).unwrap(), qf.one());
    }
}

#[test]
fn unsupported_shapes_report_why() {
    let c = ctx(2);
    let (x, y) = (c.gen(0), c.gen(1));
    let t = |e: Vec<u32>, a: FieldElement| (e, a);
    let reduced = HypersurfacePoly::new(&c, vec!["T1".into()], vec![t(vec![1], c.one()), t(vec![0], x.clone())]).unwrap();
    assert_eq!(build_function_field(&reduced).unwrap_err(), Error::NotGeometricallyNonreduced);
    let square = HypersurfacePoly::new(&c, vec!["T1".into()], vec![t(vec![2], c.one()), t(vec![0], x.pow(2).unwrap())]).unwrap();
    assert_eq!(build_function_field(&square).unwrap_err(), Error::Reducible);
    let not_monic =
        HypersurfacePoly::new(&c, vec!["T1".into(), "T2".into()], vec![t(vec![2, 2], c.one()), t(vec![0, 0], y)]).unwrap();
    assert!(matches!(build_function_field(&not_monic).unwrap_err(), Error::NotPMonic(_)));
    let an = analyze_hypersurface(&not_monic).unwrap();
    assert!(an.fx.is_none() && an.fx_error.is_some());
}

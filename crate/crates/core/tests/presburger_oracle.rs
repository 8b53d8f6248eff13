use std::collections::BTreeMap;

use fbp_core::formula::AdditiveFormula;
use fbp_core::presburger::{decide, eval, qe};
use fbp_core::testing::{random_open_formula, random_sentence, stabilized_eval, GenConfig};
use num_bigint::BigInt;
use rand::{Rng, SeedableRng};

#[test]
fn decide_matches_stabilized_bounded_search() {
    let mut rng = rand::rngs::StdRng::seed_from_u64(11);
    let cfg = GenConfig::default();
    for _ in 0..100 {
        let f = random_sentence(&mut rng, &cfg);
        let oracle = stabilized_eval(&f, &[], 4, 64, 6).unwrap_or_else(|| panic!("unstable: {f}"));
        assert_eq!(decide(&f).unwrap(), oracle, "{f}");
    }
}

#[test]
fn qe_matches_bounded_expansion_on_open_formulas() {
    let mut rng = rand::rngs::StdRng::seed_from_u64(12);
    let cfg = GenConfig { max_depth: 2, ..GenConfig::default() };
    for _ in 0..200 {
        let f = random_open_formula(&mut rng, &["a", "b"], &cfg);
        let g = qe(&f);
        assert!(g.is_quantifier_free());
        assert!(g.free_vars().is_subset(&f.free_vars()));
        for _ in 0..30 {
            let (a, b) = (rng.gen_range(-50..=50), rng.gen_range(-50..=50));
            let asg: BTreeMap<String, BigInt> =
                [("a".to_string(), BigInt::from(a)), ("b".to_string(), BigInt::from(b))].into();
            let oracle = stabilized_eval(&f, &[("a", a), ("b", b)], 16, 1024, 10).unwrap_or_else(|| panic!("unstable: {f}"));
            assert_eq!(eval(&g, &asg).unwrap(), oracle, "{f} at a={a}, b={b}");
        }
    }
}

#[test]
fn negation_and_contradiction() {
    let mut rng = rand::rngs::StdRng::seed_from_u64(13);
    for _ in 0..100 {
        let f = random_sentence(&mut rng, &GenConfig::default());
        let d = decide(&f).unwrap();
        assert_eq!(decide(&AdditiveFormula::not(f.clone())).unwrap(), !d);
        assert!(!decide(&AdditiveFormula::and(f.clone(), AdditiveFormula::not(f.clone()))).unwrap());
        assert_eq!(decide(&qe(&f)).unwrap(), d);
    }
}

#[test]
fn qe_is_idempotent_on_closed_instances() {
    let mut rng = rand::rngs::StdRng::seed_from_u64(14);
    let cfg = GenConfig { max_depth: 2, ..GenConfig::default() };
    for _ in 0..50 {
        let f = random_open_formula(&mut rng, &["a"], &cfg);
        let g = qe(&f);
        assert_eq!(qe(&g), g);
        for a in -6..=6 {
            let inst = |h: &AdditiveFormula| h.substitute("a", &fbp_core::formula::LinearTerm::constant(a));
            assert_eq!(decide(&inst(&f)).unwrap(), decide(&inst(&g)).unwrap(), "{f} at a={a}");
        }
    }
}

use std::collections::BTreeSet;

use fbp_core::formula::{parse_additive, parse_formula, AdditiveFormula, Formula, Term};
use fbp_core::presburger::decide;
use proptest::prelude::*;

const NAMES: [&str; 4] = ["x", "y", "z", "w"];

fn arb_term() -> impl Strategy<Value = Term> {
    let leaf = prop_oneof![
        4 => prop::sample::select(&NAMES[..]).prop_map(Term::var),
        1 => Just(Term::One),
        1 => Just(Term::Tau),
    ];
    leaf.prop_recursive(3, 12, 2, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Term::mul(a, b)),
            inner.clone().prop_map(Term::inv),
            (inner, -3i64..=3).prop_map(|(a, k)| Term::Pow(Box::new(a), k)),
        ]
    })
}

fn arb_formula() -> impl Strategy<Value = Formula> {
    let atom = prop_oneof![
        (arb_term(), arb_term()).prop_map(|(a, b)| Formula::Eq(a, b)),
        (arb_term(), arb_term()).prop_map(|(a, b)| Formula::Leq(a, b)),
        (2u64..=5, arb_term()).prop_map(|(n, t)| Formula::Pn(n, t)),
        Just(Formula::True),
        Just(Formula::False),
    ];
    atom.prop_recursive(4, 16, 2, |inner| {
        let name = prop::sample::select(&NAMES[..]);
        prop_oneof![
            inner.clone().prop_map(Formula::not),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::and(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::or(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::implies(a, b)),
            (name.clone(), inner.clone()).prop_map(|(x, a)| Formula::exists(x, a)),
            (name, inner).prop_map(|(x, a)| Formula::forall(x, a)),
        ]
    })
}

/// Locally nameless form: bound variables become their binder depth.
#[derive(Debug, Clone, PartialEq, Eq)]
enum DTerm {
    Free(String),
    Bound(usize),
    One,
    Tau,
    Mul(Box<DTerm>, Box<DTerm>),
    Inv(Box<DTerm>),
    Pow(Box<DTerm>, i64),
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum DFormula {
    True,
    False,
    Eq(DTerm, DTerm),
    Leq(DTerm, DTerm),
    Pn(u64, DTerm),
    Not(Box<DFormula>),
    And(Box<DFormula>, Box<DFormula>),
    Or(Box<DFormula>, Box<DFormula>),
    Implies(Box<DFormula>, Box<DFormula>),
    Exists(Box<DFormula>),
    Forall(Box<DFormula>),
}

fn dterm(t: &Term, scope: &[String]) -> DTerm {
    match t {
        Term::Var(x) => match scope.iter().rposition(|b| b == x) {
            Some(i) => DTerm::Bound(scope.len() - 1 - i),
            None => DTerm::Free(x.clone()),
        },
        Term::One => DTerm::One,
        Term::Tau => DTerm::Tau,
        Term::Mul(a, b) => DTerm::Mul(Box::new(dterm(a, scope)), Box::new(dterm(b, scope))),
        Term::Inv(a) => DTerm::Inv(Box::new(dterm(a, scope))),
        Term::Pow(a, k) => DTerm::Pow(Box::new(dterm(a, scope)), *k),
    }
}

fn dformula(f: &Formula, scope: &mut Vec<String>) -> DFormula {
    let bin = |a: &Formula, b: &Formula, scope: &mut Vec<String>| (Box::new(dformula(a, scope)), Box::new(dformula(b, scope)));
    match f {
        Formula::True => DFormula::True,
        Formula::False => DFormula::False,
        Formula::Eq(a, b) => DFormula::Eq(dterm(a, scope), dterm(b, scope)),
        Formula::Leq(a, b) => DFormula::Leq(dterm(a, scope), dterm(b, scope)),
        Formula::Pn(n, t) => DFormula::Pn(*n, dterm(t, scope)),
        Formula::Not(a) => DFormula::Not(Box::new(dformula(a, scope))),
        Formula::And(a, b) => {
            let (a, b) = bin(a, b, scope);
            DFormula::And(a, b)
        }
        Formula::Or(a, b) => {
            let (a, b) = bin(a, b, scope);
            DFormula::Or(a, b)
        }
        Formula::Implies(a, b) => {
            let (a, b) = bin(a, b, scope);
            DFormula::Implies(a, b)
        }
        Formula::Exists(x, a) | Formula::Forall(x, a) => {
            scope.push(x.clone());
            let body = Box::new(dformula(a, scope));
            scope.pop();
            if matches!(f, Formula::Exists(..)) {
                DFormula::Exists(body)
            } else {
                DFormula::Forall(body)
            }
        }
    }
}

/// Replaces the free name `x`; bound occurrences are indices, so nothing can be captured.
fn dsubst_term(t: &DTerm, x: &str, r: &DTerm) -> DTerm {
    match t {
        DTerm::Free(y) if y == x => r.clone(),
        DTerm::Free(_) | DTerm::Bound(_) | DTerm::One | DTerm::Tau => t.clone(),
        DTerm::Mul(a, b) => DTerm::Mul(Box::new(dsubst_term(a, x, r)), Box::new(dsubst_term(b, x, r))),
        DTerm::Inv(a) => DTerm::Inv(Box::new(dsubst_term(a, x, r))),
        DTerm::Pow(a, k) => DTerm::Pow(Box::new(dsubst_term(a, x, r)), *k),
    }
}

fn dsubst(f: &DFormula, x: &str, r: &DTerm) -> DFormula {
    let s = |a: &DFormula| Box::new(dsubst(a, x, r));
    match f {
        DFormula::True | DFormula::False => f.clone(),
        DFormula::Eq(a, b) => DFormula::Eq(dsubst_term(a, x, r), dsubst_term(b, x, r)),
        DFormula::Leq(a, b) => DFormula::Leq(dsubst_term(a, x, r), dsubst_term(b, x, r)),
        DFormula::Pn(n, t) => DFormula::Pn(*n, dsubst_term(t, x, r)),
        DFormula::Not(a) => DFormula::Not(s(a)),
        DFormula::And(a, b) => DFormula::And(s(a), s(b)),
        DFormula::Or(a, b) => DFormula::Or(s(a), s(b)),
        DFormula::Implies(a, b) => DFormula::Implies(s(a), s(b)),
        DFormula::Exists(a) => DFormula::Exists(s(a)),
        DFormula::Forall(a) => DFormula::Forall(s(a)),
    }
}

fn term_vars(t: &Term) -> BTreeSet<String> {
    let mut out = BTreeSet::new();
    t.vars(&mut out);
    out
}

/// Universal closure of `a <-> b`.
fn equivalent(a: &AdditiveFormula, b: &AdditiveFormula) -> bool {
    let mut free = a.free_vars();
    free.extend(b.free_vars());
    let mut f = AdditiveFormula::and(
        AdditiveFormula::implies(a.clone(), b.clone()),
        AdditiveFormula::implies(b.clone(), a.clone()),
    );
    for x in free {
        f = AdditiveFormula::forall(x, f);
    }
    decide(&f).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn render_then_parse_is_normalization(f in arb_formula()) {
        let text = f.to_string();
        prop_assert_eq!(parse_formula(&text).unwrap(), f.normalize(), "{}", text);
    }

    #[test]
    fn substitution_matches_locally_nameless(f in arb_formula(), x in prop::sample::select(&NAMES[..]), r in arb_term()) {
        let got = dformula(&f.substitute(x, &r), &mut Vec::new());
        let want = dsubst(&dformula(&f, &mut Vec::new()), x, &dterm(&r, &[]));
        prop_assert_eq!(got, want);
    }

    #[test]
    fn substitution_free_variables(f in arb_formula(), x in prop::sample::select(&NAMES[..]), r in arb_term()) {
        let before = f.free_vars();
        let mut want: BTreeSet<String> = before.iter().filter(|v| *v != x).cloned().collect();
        if before.contains(x) {
            want.extend(term_vars(&r));
        }
        prop_assert_eq!(f.substitute(x, &r).free_vars(), want);
    }

    #[test]
    fn translation_preserves_free_variables(f in arb_formula()) {
        prop_assert_eq!(f.to_additive().free_vars().is_subset(&f.free_vars()), true);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn translation_commutes_with_substitution(f in arb_formula(), x in prop::sample::select(&NAMES[..]), r in arb_term()) {
        let left = f.substitute(x, &r).to_additive();
        let right = f.to_additive().substitute(x, &r.to_linear());
        prop_assert!(equivalent(&left, &right), "{} vs {}", left, right);
    }

    #[test]
    fn additive_render_round_trip(f in arb_formula()) {
        let a = f.to_additive();
        let text = a.to_string();
        let back = parse_additive(&text).unwrap();
        prop_assert!(equivalent(&a, &back), "{}", text);
    }
}

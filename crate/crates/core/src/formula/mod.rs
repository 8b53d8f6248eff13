//! First-order formulas over the multiplicative pre-ordered group language
//! `{·, 1, ⁻¹, ≤, τ, P_n}` and their additive (Presburger) counterpart.
//!
//! Group words are written multiplicatively (`x * y^-1`, `t` for τ) and
//! translate into linear terms over the integers (`x - y`, constant `1`).

mod linear;
mod parse;
mod render;

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

pub use linear::LinearTerm;
pub use parse::{parse_additive, parse_formula, parse_linear_term, parse_term};

/// A group word.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Term {
    Var(String),
    One,
    Tau,
    Mul(Box<Term>, Box<Term>),
    Inv(Box<Term>),
    Pow(Box<Term>, i64),
}

impl Term {
    pub fn var(name: impl Into<String>) -> Term {
        Term::Var(name.into())
    }

    pub fn mul(a: Term, b: Term) -> Term {
        Term::Mul(Box::new(a), Box::new(b))
    }

    pub fn inv(a: Term) -> Term {
        Term::Inv(Box::new(a))
    }

    /// `a^k` with the exponents 0, 1 and -1 folded into `One`, `a` and `Inv(a)`.
    pub fn pow(a: Term, k: i64) -> Term {
        match k {
            0 => Term::One,
            1 => a,
            -1 => Term::inv(a),
            _ => Term::Pow(Box::new(a), k),
        }
    }

    /// Rebuilds the term bottom-up through the folding constructors.
    pub fn normalize(&self) -> Term {
        match self {
            Term::Var(_) | Term::One | Term::Tau => self.clone(),
            Term::Mul(a, b) => Term::mul(a.normalize(), b.normalize()),
            Term::Inv(a) => Term::inv(a.normalize()),
            Term::Pow(a, k) => Term::pow(a.normalize(), *k),
        }
    }

    pub fn vars(&self, out: &mut BTreeSet<String>) {
        match self {
            Term::Var(x) => {
                out.insert(x.clone());
            }
            Term::One | Term::Tau => {}
            Term::Mul(a, b) => {
                a.vars(out);
                b.vars(out);
            }
            Term::Inv(a) | Term::Pow(a, _) => a.vars(out),
        }
    }

    pub fn substitute(&self, var: &str, replacement: &Term) -> Term {
        match self {
            Term::Var(x) if x == var => replacement.clone(),
            Term::Var(_) | Term::One | Term::Tau => self.clone(),
            Term::Mul(a, b) => Term::Mul(
                Box::new(a.substitute(var, replacement)),
                Box::new(b.substitute(var, replacement)),
            ),
            Term::Inv(a) => Term::Inv(Box::new(a.substitute(var, replacement))),
            Term::Pow(a, k) => Term::Pow(Box::new(a.substitute(var, replacement)), *k),
        }
    }

    /// Additive reading: `·` is `+`, `1` is `0`, `τ` is the constant `1`.
    pub fn to_linear(&self) -> LinearTerm {
        match self {
            Term::Var(x) => LinearTerm::var(x.clone()),
            Term::One => LinearTerm::zero(),
            Term::Tau => LinearTerm::constant(BigInt::one()),
            Term::Mul(a, b) => a.to_linear() + b.to_linear(),
            Term::Inv(a) => -a.to_linear(),
            Term::Pow(a, k) => a.to_linear().scale(&BigInt::from(*k)),
        }
    }
}

/// A formula of the multiplicative language.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Formula {
    True,
    False,
    Eq(Term, Term),
    Leq(Term, Term),
    /// `P_n(t)`: `t` is an `n`-th power, `n >= 2`.
    Pn(u64, Term),
    Not(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Implies(Box<Formula>, Box<Formula>),
    Exists(String, Box<Formula>),
    Forall(String, Box<Formula>),
}

impl Formula {
    pub fn not(f: Formula) -> Formula {
        Formula::Not(Box::new(f))
    }

    pub fn and(a: Formula, b: Formula) -> Formula {
        Formula::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: Formula, b: Formula) -> Formula {
        Formula::Or(Box::new(a), Box::new(b))
    }

    pub fn implies(a: Formula, b: Formula) -> Formula {
        Formula::Implies(Box::new(a), Box::new(b))
    }

    pub fn exists(x: impl Into<String>, body: Formula) -> Formula {
        Formula::Exists(x.into(), Box::new(body))
    }

    pub fn forall(x: impl Into<String>, body: Formula) -> Formula {
        Formula::Forall(x.into(), Box::new(body))
    }

    pub fn normalize(&self) -> Formula {
        self.map_terms(&|t| t.normalize())
    }

    fn map_terms(&self, g: &dyn Fn(&Term) -> Term) -> Formula {
        match self {
            Formula::True | Formula::False => self.clone(),
            Formula::Eq(a, b) => Formula::Eq(g(a), g(b)),
            Formula::Leq(a, b) => Formula::Leq(g(a), g(b)),
            Formula::Pn(n, t) => Formula::Pn(*n, g(t)),
            Formula::Not(a) => Formula::not(a.map_terms(g)),
            Formula::And(a, b) => Formula::and(a.map_terms(g), b.map_terms(g)),
            Formula::Or(a, b) => Formula::or(a.map_terms(g), b.map_terms(g)),
            Formula::Implies(a, b) => Formula::implies(a.map_terms(g), b.map_terms(g)),
            Formula::Exists(x, a) => Formula::exists(x.clone(), a.map_terms(g)),
            Formula::Forall(x, a) => Formula::forall(x.clone(), a.map_terms(g)),
        }
    }

    pub fn free_vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_free(&mut Vec::new(), &mut out);
        out
    }

    fn collect_free(&self, bound: &mut Vec<String>, out: &mut BTreeSet<String>) {
        let mut add_term = |t: &Term, bound: &Vec<String>| {
            let mut vs = BTreeSet::new();
            t.vars(&mut vs);
            out.extend(vs.into_iter().filter(|v| !bound.contains(v)));
        };
        match self {
            Formula::True | Formula::False => {}
            Formula::Eq(a, b) | Formula::Leq(a, b) => {
                add_term(a, bound);
                add_term(b, bound);
            }
            Formula::Pn(_, t) => add_term(t, bound),
            Formula::Not(a) => a.collect_free(bound, out),
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) => {
                a.collect_free(bound, out);
                b.collect_free(bound, out);
            }
            Formula::Exists(x, a) | Formula::Forall(x, a) => {
                bound.push(x.clone());
                a.collect_free(bound, out);
                bound.pop();
            }
        }
    }

    pub fn is_sentence(&self) -> bool {
        self.free_vars().is_empty()
    }

    /// Number of quantifier nodes.
    pub fn quantifier_count(&self) -> usize {
        match self {
            Formula::Not(a) => a.quantifier_count(),
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) => {
                a.quantifier_count() + b.quantifier_count()
            }
            Formula::Exists(_, a) | Formula::Forall(_, a) => 1 + a.quantifier_count(),
            _ => 0,
        }
    }

    /// Capture-avoiding substitution of `replacement` for the free occurrences of `var`.
    pub fn substitute(&self, var: &str, replacement: &Term) -> Formula {
        let mut repl_vars = BTreeSet::new();
        replacement.vars(&mut repl_vars);
        self.subst_inner(var, replacement, &repl_vars)
    }

    fn subst_inner(&self, var: &str, r: &Term, rv: &BTreeSet<String>) -> Formula {
        match self {
            Formula::True | Formula::False => self.clone(),
            Formula::Eq(a, b) => Formula::Eq(a.substitute(var, r), b.substitute(var, r)),
            Formula::Leq(a, b) => Formula::Leq(a.substitute(var, r), b.substitute(var, r)),
            Formula::Pn(n, t) => Formula::Pn(*n, t.substitute(var, r)),
            Formula::Not(a) => Formula::not(a.subst_inner(var, r, rv)),
            Formula::And(a, b) => Formula::and(a.subst_inner(var, r, rv), b.subst_inner(var, r, rv)),
            Formula::Or(a, b) => Formula::or(a.subst_inner(var, r, rv), b.subst_inner(var, r, rv)),
            Formula::Implies(a, b) => {
                Formula::implies(a.subst_inner(var, r, rv), b.subst_inner(var, r, rv))
            }
            Formula::Exists(x, body) | Formula::Forall(x, body) => {
                let rebuild = |x: String, body: Formula| match self {
                    Formula::Exists(..) => Formula::exists(x, body),
                    _ => Formula::forall(x, body),
                };
                if x == var || !body.free_vars().contains(var) {
                    return self.clone();
                }
                if rv.contains(x) {
                    let mut avoid = rv.clone();
                    avoid.extend(body.free_vars());
                    avoid.insert(var.to_string());
                    let fresh = fresh_name(x, &avoid);
                    let renamed = body.substitute(x, &Term::Var(fresh.clone()));
                    rebuild(fresh, renamed.subst_inner(var, r, rv))
                } else {
                    rebuild(x.clone(), body.subst_inner(var, r, rv))
                }
            }
        }
    }

    /// Dictionary translation into the additive language.
    pub fn to_additive(&self) -> AdditiveFormula {
        match self {
            Formula::True => AdditiveFormula::True,
            Formula::False => AdditiveFormula::False,
            Formula::Eq(a, b) => AdditiveFormula::Eq(a.to_linear(), b.to_linear()),
            Formula::Leq(a, b) => AdditiveFormula::Leq(a.to_linear(), b.to_linear()),
            Formula::Pn(n, t) => AdditiveFormula::Div(BigInt::from(*n), t.to_linear()),
            Formula::Not(a) => AdditiveFormula::not(a.to_additive()),
            Formula::And(a, b) => AdditiveFormula::and(a.to_additive(), b.to_additive()),
            Formula::Or(a, b) => AdditiveFormula::or(a.to_additive(), b.to_additive()),
            Formula::Implies(a, b) => AdditiveFormula::implies(a.to_additive(), b.to_additive()),
            Formula::Exists(x, a) => AdditiveFormula::exists(x.clone(), a.to_additive()),
            Formula::Forall(x, a) => AdditiveFormula::forall(x.clone(), a.to_additive()),
        }
    }
}

/// First of `base_1`, `base_2`, ... not in `avoid`.
pub fn fresh_name(base: &str, avoid: &BTreeSet<String>) -> String {
    let mut name = format!("{base}_1");
    let mut i = 1;
    while avoid.contains(&name) {
        i += 1;
        name = format!("{base}_{i}");
    }
    name
}

/// Presburger formula over the integers with `≤`, `=`, `+`, constants and
/// divisibility atoms.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum AdditiveFormula {
    True,
    False,
    Leq(LinearTerm, LinearTerm),
    Eq(LinearTerm, LinearTerm),
    /// `d | t` with `d >= 2`.
    Div(#[serde(serialize_with = "linear::serialize_bigint")] BigInt, LinearTerm),
    Not(Box<AdditiveFormula>),
    And(Box<AdditiveFormula>, Box<AdditiveFormula>),
    Or(Box<AdditiveFormula>, Box<AdditiveFormula>),
    Implies(Box<AdditiveFormula>, Box<AdditiveFormula>),
    Exists(String, Box<AdditiveFormula>),
    Forall(String, Box<AdditiveFormula>),
}

impl AdditiveFormula {
    /// Divisibility atom; a modulus of absolute value 1 is trivially true.
    ///
    /// # Panics
    /// If `d` is zero.
    pub fn div(d: BigInt, t: LinearTerm) -> AdditiveFormula {
        assert!(!d.is_zero(), "divisibility modulus must be non-zero");
        let d = d.abs();
        if d.is_one() {
            AdditiveFormula::True
        } else {
            AdditiveFormula::Div(d, t)
        }
    }

    pub fn not(f: AdditiveFormula) -> AdditiveFormula {
        AdditiveFormula::Not(Box::new(f))
    }

    pub fn and(a: AdditiveFormula, b: AdditiveFormula) -> AdditiveFormula {
        AdditiveFormula::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: AdditiveFormula, b: AdditiveFormula) -> AdditiveFormula {
        AdditiveFormula::Or(Box::new(a), Box::new(b))
    }

    pub fn implies(a: AdditiveFormula, b: AdditiveFormula) -> AdditiveFormula {
        AdditiveFormula::Implies(Box::new(a), Box::new(b))
    }

    pub fn exists(x: impl Into<String>, body: AdditiveFormula) -> AdditiveFormula {
        AdditiveFormula::Exists(x.into(), Box::new(body))
    }

    pub fn forall(x: impl Into<String>, body: AdditiveFormula) -> AdditiveFormula {
        AdditiveFormula::Forall(x.into(), Box::new(body))
    }

    pub fn is_quantifier_free(&self) -> bool {
        match self {
            AdditiveFormula::Exists(..) | AdditiveFormula::Forall(..) => false,
            AdditiveFormula::Not(a) => a.is_quantifier_free(),
            AdditiveFormula::And(a, b)
            | AdditiveFormula::Or(a, b)
            | AdditiveFormula::Implies(a, b) => a.is_quantifier_free() && b.is_quantifier_free(),
            _ => true,
        }
    }

    pub fn free_vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_free(&mut Vec::new(), &mut out);
        out
    }

    fn collect_free(&self, bound: &mut Vec<String>, out: &mut BTreeSet<String>) {
        let mut add = |t: &LinearTerm, bound: &Vec<String>| {
            out.extend(t.vars().filter(|v| !bound.contains(*v)).cloned());
        };
        match self {
            AdditiveFormula::True | AdditiveFormula::False => {}
            AdditiveFormula::Leq(a, b) | AdditiveFormula::Eq(a, b) => {
                add(a, bound);
                add(b, bound);
            }
            AdditiveFormula::Div(_, t) => add(t, bound),
            AdditiveFormula::Not(a) => a.collect_free(bound, out),
            AdditiveFormula::And(a, b)
            | AdditiveFormula::Or(a, b)
            | AdditiveFormula::Implies(a, b) => {
                a.collect_free(bound, out);
                b.collect_free(bound, out);
            }
            AdditiveFormula::Exists(x, a) | AdditiveFormula::Forall(x, a) => {
                bound.push(x.clone());
                a.collect_free(bound, out);
                bound.pop();
            }
        }
    }

    /// Node count, atoms counting as one node each.
    pub fn size(&self) -> usize {
        match self {
            AdditiveFormula::Not(a) | AdditiveFormula::Exists(_, a) | AdditiveFormula::Forall(_, a) => {
                1 + a.size()
            }
            AdditiveFormula::And(a, b)
            | AdditiveFormula::Or(a, b)
            | AdditiveFormula::Implies(a, b) => 1 + a.size() + b.size(),
            _ => 1,
        }
    }

    /// Capture-avoiding substitution of a linear term for `var`.
    pub fn substitute(&self, var: &str, replacement: &LinearTerm) -> AdditiveFormula {
        match self {
            AdditiveFormula::True | AdditiveFormula::False => self.clone(),
            AdditiveFormula::Leq(a, b) => {
                AdditiveFormula::Leq(a.substitute(var, replacement), b.substitute(var, replacement))
            }
            AdditiveFormula::Eq(a, b) => {
                AdditiveFormula::Eq(a.substitute(var, replacement), b.substitute(var, replacement))
            }
            AdditiveFormula::Div(d, t) => AdditiveFormula::Div(d.clone(), t.substitute(var, replacement)),
            AdditiveFormula::Not(a) => AdditiveFormula::not(a.substitute(var, replacement)),
            AdditiveFormula::And(a, b) => {
                AdditiveFormula::and(a.substitute(var, replacement), b.substitute(var, replacement))
            }
            AdditiveFormula::Or(a, b) => {
                AdditiveFormula::or(a.substitute(var, replacement), b.substitute(var, replacement))
            }
            AdditiveFormula::Implies(a, b) => AdditiveFormula::implies(
                a.substitute(var, replacement),
                b.substitute(var, replacement),
            ),
            AdditiveFormula::Exists(x, body) | AdditiveFormula::Forall(x, body) => {
                let rebuild = |x: String, body: AdditiveFormula| match self {
                    AdditiveFormula::Exists(..) => AdditiveFormula::exists(x, body),
                    _ => AdditiveFormula::forall(x, body),
                };
                if x == var || !body.free_vars().contains(var) {
                    return self.clone();
                }
                let rv: BTreeSet<String> = replacement.vars().cloned().collect();
                if rv.contains(x) {
                    let mut avoid = rv;
                    avoid.extend(body.free_vars());
                    avoid.insert(var.to_string());
                    let fresh = fresh_name(x, &avoid);
                    let renamed = body.substitute(x, &LinearTerm::var(fresh.clone()));
                    rebuild(fresh, renamed.substitute(var, replacement))
                } else {
                    rebuild(x.clone(), body.substitute(var, replacement))
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(x: &str) -> Term {
        Term::var(x)
    }

    #[test]
    fn pow_folding() {
        assert_eq!(Term::pow(v("x"), 0), Term::One);
        assert_eq!(Term::pow(v("x"), 1), v("x"));
        assert_eq!(Term::pow(v("x"), -1), Term::inv(v("x")));
        assert_eq!(
            Term::Pow(Box::new(v("x")), 0).normalize(),
            Term::One
        );
    }

    #[test]
    fn to_additive_dictionary() {
        let f = Formula::Eq(Term::mul(v("x"), v("x")), Term::Tau);
        assert_eq!(
            f.to_additive(),
            AdditiveFormula::Eq(
                LinearTerm::var("x").scale(&BigInt::from(2)),
                LinearTerm::constant(BigInt::one())
            )
        );

        let f = Formula::Pn(3, Term::mul(v("x"), Term::inv(v("y"))));
        assert_eq!(
            f.to_additive(),
            AdditiveFormula::Div(BigInt::from(3), LinearTerm::var("x") - LinearTerm::var("y"))
        );

        let f = Formula::Leq(Term::One, Term::pow(v("x"), -2));
        assert_eq!(
            f.to_additive(),
            AdditiveFormula::Leq(LinearTerm::zero(), LinearTerm::var("x").scale(&BigInt::from(-2)))
        );
    }

    #[test]
    fn free_vars_and_substitution() {
        let f = Formula::exists("x", Formula::Eq(v("x"), v("y")));
        assert_eq!(f.free_vars(), BTreeSet::from(["y".to_string()]));

        let g = Formula::Eq(v("x"), Term::One);
        assert_eq!(g.substitute("x", &Term::Tau), Formula::Eq(Term::Tau, Term::One));

        // y := x must not be captured by the binder on x.
        let h = Formula::exists("x", Formula::Eq(v("x"), v("y")));
        let s = h.substitute("y", &v("x"));
        match &s {
            Formula::Exists(b, body) => {
                assert_ne!(b, "x");
                assert_eq!(**body, Formula::Eq(v(b), v("x")));
            }
            other => panic!("unexpected {other:?}"),
        }
        assert_eq!(s.free_vars(), BTreeSet::from(["x".to_string()]));
    }

    #[test]
    fn div_modulus_one_is_true() {
        assert_eq!(AdditiveFormula::div(BigInt::one(), LinearTerm::var("x")), AdditiveFormula::True);
        assert_eq!(
            AdditiveFormula::div(BigInt::from(-3), LinearTerm::var("x")),
            AdditiveFormula::Div(BigInt::from(3), LinearTerm::var("x"))
        );
    }
}

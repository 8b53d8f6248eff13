//! Presburger arithmetic over `Z`: Cooper-style quantifier elimination,
//! decision of sentences and evaluation of quantifier-free formulas.
//!
//! Formulas are first brought to negation normal form over the literals
//! `t <= 0`, `t = 0`, `t != 0`, `d | t` and `!(d | t)`. Universal quantifiers
//! are eliminated as `!E x. !φ`.

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::formula::{AdditiveFormula, LinearTerm};

/// Values for the free variables of a formula.
pub type PresburgerAssignment = BTreeMap<String, BigInt>;

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
enum Lit {
    /// `t <= 0`
    Le(LinearTerm),
    /// `t = 0`
    Eq(LinearTerm),
    /// `t != 0`
    Ne(LinearTerm),
    /// `d | t`, `d >= 2`
    Div(BigInt, LinearTerm),
    /// `!(d | t)`, `d >= 2`
    NDiv(BigInt, LinearTerm),
}

impl Lit {
    fn term(&self) -> &LinearTerm {
        match self {
            Lit::Le(t) | Lit::Eq(t) | Lit::Ne(t) | Lit::Div(_, t) | Lit::NDiv(_, t) => t,
        }
    }

    fn map_term(&self, f: impl Fn(&LinearTerm) -> LinearTerm) -> Lit {
        match self {
            Lit::Le(t) => Lit::Le(f(t)),
            Lit::Eq(t) => Lit::Eq(f(t)),
            Lit::Ne(t) => Lit::Ne(f(t)),
            Lit::Div(d, t) => Lit::Div(d.clone(), f(t)),
            Lit::NDiv(d, t) => Lit::NDiv(d.clone(), f(t)),
        }
    }

    fn negate(&self) -> Lit {
        match self {
            Lit::Le(t) => Lit::Le((-t.clone()).add_constant(&BigInt::one())),
            Lit::Eq(t) => Lit::Ne(t.clone()),
            Lit::Ne(t) => Lit::Eq(t.clone()),
            Lit::Div(d, t) => Lit::NDiv(d.clone(), t.clone()),
            Lit::NDiv(d, t) => Lit::Div(d.clone(), t.clone()),
        }
    }
}

/// Quantifier-free formula in negation normal form.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
enum Qf {
    True,
    False,
    Lit(Lit),
    And(Vec<Qf>),
    Or(Vec<Qf>),
}

fn gcd_of_coeffs(t: &LinearTerm) -> BigInt {
    t.coeffs().fold(BigInt::zero(), |g, (_, c)| g.gcd(c))
}

fn ceil_div(a: &BigInt, b: &BigInt) -> BigInt {
    -((-a).div_floor(b))
}

fn truth(b: bool) -> Qf {
    if b {
        Qf::True
    } else {
        Qf::False
    }
}

/// Normalises a literal; ground literals collapse to `True`/`False`.
fn lit(l: Lit) -> Qf {
    match l {
        Lit::Le(t) => {
            if t.is_constant() {
                return truth(!t.constant_part().is_positive());
            }
            let g = gcd_of_coeffs(&t);
            if g.is_one() {
                return Qf::Lit(Lit::Le(t));
            }
            let c = t.constant_part().clone();
            let vars = t.add_constant(&-&c).map_coefficients(|k| k / &g);
            Qf::Lit(Lit::Le(vars.add_constant(&ceil_div(&c, &g))))
        }
        Lit::Eq(_) | Lit::Ne(_) => {
            let is_eq = matches!(l, Lit::Eq(_));
            let (Lit::Eq(t) | Lit::Ne(t)) = l else { unreachable!() };
            if t.is_constant() {
                return truth(t.constant_part().is_zero() == is_eq);
            }
            let g = gcd_of_coeffs(&t);
            if !t.constant_part().is_multiple_of(&g) {
                return truth(!is_eq);
            }
            let mut t = t.map_coefficients(|k| k / &g);
            if t.coeffs().next().is_some_and(|(_, c)| c.is_negative()) {
                t = -t;
            }
            Qf::Lit(if is_eq { Lit::Eq(t) } else { Lit::Ne(t) })
        }
        Lit::Div(..) | Lit::NDiv(..) => {
            let positive = matches!(l, Lit::Div(..));
            let (Lit::Div(d, t) | Lit::NDiv(d, t)) = l else { unreachable!() };
            let d = d.abs();
            if d.is_zero() {
                return lit(if positive { Lit::Eq(t) } else { Lit::Ne(t) });
            }
            let t = t.map_coefficients(|k| k.mod_floor(&d));
            if t.is_constant() {
                return truth(t.constant_part().is_zero() == positive);
            }
            let g = gcd_of_coeffs(&t).gcd(t.constant_part()).gcd(&d);
            let (d, t) = if g.is_one() {
                (d, t)
            } else {
                (&d / &g, t.map_coefficients(|k| k / &g))
            };
            if d.is_one() {
                return truth(positive);
            }
            Qf::Lit(if positive { Lit::Div(d, t) } else { Lit::NDiv(d, t) })
        }
    }
}

fn and(children: Vec<Qf>) -> Qf {
    let mut flat = Vec::with_capacity(children.len());
    for c in children {
        match c {
            Qf::True => {}
            Qf::False => return Qf::False,
            Qf::And(cs) => flat.extend(cs),
            other => flat.push(other),
        }
    }
    flat.sort();
    flat.dedup();
    if has_complementary_literals(&flat) {
        return Qf::False;
    }
    match flat.len() {
        0 => Qf::True,
        1 => flat.pop().expect("one element"),
        _ => Qf::And(flat),
    }
}

fn or(children: Vec<Qf>) -> Qf {
    let mut flat = Vec::with_capacity(children.len());
    for c in children {
        match c {
            Qf::False => {}
            Qf::True => return Qf::True,
            Qf::Or(cs) => flat.extend(cs),
            other => flat.push(other),
        }
    }
    flat.sort();
    flat.dedup();
    if has_complementary_literals(&flat) {
        return Qf::True;
    }
    match flat.len() {
        0 => Qf::False,
        1 => flat.pop().expect("one element"),
        _ => Qf::Or(flat),
    }
}

/// `flat` must be sorted.
fn has_complementary_literals(flat: &[Qf]) -> bool {
    flat.iter().any(|c| match c {
        Qf::Lit(l) => match lit(l.negate()) {
            neg @ Qf::Lit(_) => flat.binary_search(&neg).is_ok(),
            _ => false,
        },
        _ => false,
    })
}

fn negate(q: &Qf) -> Qf {
    match q {
        Qf::True => Qf::False,
        Qf::False => Qf::True,
        Qf::Lit(l) => lit(l.negate()),
        Qf::And(cs) => or(cs.iter().map(negate).collect()),
        Qf::Or(cs) => and(cs.iter().map(negate).collect()),
    }
}

fn mentions(q: &Qf, x: &str) -> bool {
    match q {
        Qf::True | Qf::False => false,
        Qf::Lit(l) => l.term().mentions(x),
        Qf::And(cs) | Qf::Or(cs) => cs.iter().any(|c| mentions(c, x)),
    }
}

fn map_lits(q: &Qf, f: &mut dyn FnMut(&Lit) -> Qf) -> Qf {
    match q {
        Qf::True | Qf::False => q.clone(),
        Qf::Lit(l) => f(l),
        Qf::And(cs) => and(cs.iter().map(|c| map_lits(c, f)).collect()),
        Qf::Or(cs) => or(cs.iter().map(|c| map_lits(c, f)).collect()),
    }
}

fn visit_lits<'a>(q: &'a Qf, f: &mut dyn FnMut(&'a Lit)) {
    match q {
        Qf::True | Qf::False => {}
        Qf::Lit(l) => f(l),
        Qf::And(cs) | Qf::Or(cs) => cs.iter().for_each(|c| visit_lits(c, f)),
    }
}

fn subst(q: &Qf, x: &str, s: &LinearTerm) -> Qf {
    map_lits(q, &mut |l| {
        if l.term().mentions(x) {
            lit(l.map_term(|t| t.substitute(x, s)))
        } else {
            Qf::Lit(l.clone())
        }
    })
}

fn eliminate_exists(x: &str, q: Qf) -> Qf {
    if !mentions(&q, x) {
        return q;
    }
    match q {
        Qf::Or(cs) => or(cs.into_iter().map(|c| eliminate_exists(x, c)).collect()),
        Qf::And(cs) => {
            let (with, without): (Vec<Qf>, Vec<Qf>) = cs.into_iter().partition(|c| mentions(c, x));
            let inner = if with.len() == 1 {
                eliminate_exists(x, with.into_iter().next().expect("one element"))
            } else {
                cooper(x, Qf::And(with))
            };
            let mut all = without;
            all.push(inner);
            and(all)
        }
        other => cooper(x, other),
    }
}

/// Eliminates `x` from `E x. phi` where `phi` mentions `x`.
fn cooper(x: &str, phi: Qf) -> Qf {
    // Scale every literal so that x occurs with coefficient ±l, then read l·x as x.
    let mut l = BigInt::one();
    visit_lits(&phi, &mut |lt| {
        let c = lt.term().coeff(x);
        if !c.is_zero() {
            l = l.lcm(&c);
        }
    });
    let unit = map_lits(&phi, &mut |lt| {
        let c = lt.term().coeff(x);
        if c.is_zero() {
            return Qf::Lit(lt.clone());
        }
        let m = &l / c.abs();
        let rescale = |t: &LinearTerm| {
            t.without(x).scale(&m) + LinearTerm::monomial(x, c.signum())
        };
        match lt {
            Lit::Div(d, t) => lit(Lit::Div(d * &m, rescale(t))),
            Lit::NDiv(d, t) => lit(Lit::NDiv(d * &m, rescale(t))),
            other => lit(other.map_term(rescale)),
        }
    });
    let phi = and(vec![unit, lit(Lit::Div(l, LinearTerm::var(x)))]);

    // A top-level equation pins x down.
    let conjuncts: &[Qf] = match &phi {
        Qf::And(cs) => cs,
        other => std::slice::from_ref(other),
    };
    for c in conjuncts {
        if let Qf::Lit(Lit::Eq(t)) = c {
            let a = t.coeff(x);
            if a.abs().is_one() {
                let solution = t.without(x).scale(&-a);
                return subst(&phi, x, &solution);
            }
        }
    }

    let mut lower = BTreeSet::new();
    let mut upper = BTreeSet::new();
    let mut delta = BigInt::one();
    visit_lits(&phi, &mut |lt| {
        let a = lt.term().coeff(x);
        if a.is_zero() {
            return;
        }
        let rest = lt.term().without(x);
        let one = BigInt::one();
        match lt {
            Lit::Le(_) => {
                if a.is_positive() {
                    upper.insert((-rest).add_constant(&one));
                } else {
                    lower.insert(rest.add_constant(&-&one));
                }
            }
            Lit::Eq(_) => {
                let s = rest.scale(&-&a);
                lower.insert(s.add_constant(&-&one));
                upper.insert(s.add_constant(&one));
            }
            Lit::Ne(_) => {
                let s = rest.scale(&-&a);
                lower.insert(s.clone());
                upper.insert(s);
            }
            Lit::Div(d, _) | Lit::NDiv(d, _) => delta = delta.lcm(d),
        }
    });

    let from_below = lower.len() <= upper.len();
    let infinite = map_lits(&phi, &mut |lt| {
        let a = lt.term().coeff(x);
        if a.is_zero() {
            return Qf::Lit(lt.clone());
        }
        match lt {
            Lit::Le(_) => truth(a.is_positive() == from_below),
            Lit::Eq(_) => Qf::False,
            Lit::Ne(_) => Qf::True,
            _ => Qf::Lit(lt.clone()),
        }
    });
    let bounds = if from_below { lower } else { upper };

    let mut disjuncts = Vec::new();
    let mut j = BigInt::one();
    while j <= delta {
        let shift = if from_below { j.clone() } else { -j.clone() };
        let candidates = std::iter::once(subst(&infinite, x, &LinearTerm::constant(shift.clone())))
            .chain(bounds.iter().map(|b| subst(&phi, x, &b.add_constant(&shift))));
        for d in candidates {
            if d == Qf::True {
                return Qf::True;
            }
            disjuncts.push(d);
        }
        j += 1;
    }
    or(disjuncts)
}

fn to_qf(f: &AdditiveFormula) -> Qf {
    match f {
        AdditiveFormula::True => Qf::True,
        AdditiveFormula::False => Qf::False,
        AdditiveFormula::Leq(a, b) => lit(Lit::Le(a.clone() - b.clone())),
        AdditiveFormula::Eq(a, b) => lit(Lit::Eq(a.clone() - b.clone())),
        AdditiveFormula::Div(d, t) => lit(Lit::Div(d.clone(), t.clone())),
        AdditiveFormula::Not(a) => negate(&to_qf(a)),
        AdditiveFormula::And(a, b) => and(vec![to_qf(a), to_qf(b)]),
        AdditiveFormula::Or(a, b) => or(vec![to_qf(a), to_qf(b)]),
        AdditiveFormula::Implies(a, b) => or(vec![negate(&to_qf(a)), to_qf(b)]),
        AdditiveFormula::Exists(x, a) => eliminate_exists(x, to_qf(a)),
        AdditiveFormula::Forall(x, a) => negate(&eliminate_exists(x, negate(&to_qf(a)))),
    }
}

fn split_constant(t: &LinearTerm) -> (LinearTerm, LinearTerm) {
    let c = t.constant_part().clone();
    (t.add_constant(&-&c), LinearTerm::constant(-c))
}

fn from_qf(q: &Qf) -> AdditiveFormula {
    let fold = |cs: &[Qf], join: fn(AdditiveFormula, AdditiveFormula) -> AdditiveFormula| {
        let mut it = cs.iter().map(from_qf);
        let first = it.next().expect("connectives have at least two children");
        it.fold(first, join)
    };
    match q {
        Qf::True => AdditiveFormula::True,
        Qf::False => AdditiveFormula::False,
        Qf::Lit(Lit::Le(t)) => {
            let (vars, rhs) = split_constant(t);
            AdditiveFormula::Leq(vars, rhs)
        }
        Qf::Lit(Lit::Eq(t)) => {
            let (vars, rhs) = split_constant(t);
            AdditiveFormula::Eq(vars, rhs)
        }
        Qf::Lit(Lit::Ne(t)) => {
            let (vars, rhs) = split_constant(t);
            AdditiveFormula::not(AdditiveFormula::Eq(vars, rhs))
        }
        Qf::Lit(Lit::Div(d, t)) => AdditiveFormula::Div(d.clone(), t.clone()),
        Qf::Lit(Lit::NDiv(d, t)) => AdditiveFormula::not(AdditiveFormula::Div(d.clone(), t.clone())),
        Qf::And(cs) => fold(cs, AdditiveFormula::and),
        Qf::Or(cs) => fold(cs, AdditiveFormula::or),
    }
}

/// Quantifier elimination: an equivalent quantifier-free formula whose free
/// variables are among those of `f`.
pub fn qe(f: &AdditiveFormula) -> AdditiveFormula {
    from_qf(&to_qf(f))
}

/// Truth value of a sentence in `(Z, <=, +, 1, divisibility)`.
pub fn decide(f: &AdditiveFormula) -> Result<bool> {
    let free = f.free_vars();
    if !free.is_empty() {
        return Err(Error::FreeVariables(free.into_iter().collect()));
    }
    match to_qf(f) {
        Qf::True => Ok(true),
        Qf::False => Ok(false),
        other => eval(&from_qf(&other), &PresburgerAssignment::new()),
    }
}

/// Evaluates a quantifier-free formula under `a`.
pub fn eval(f: &AdditiveFormula, a: &PresburgerAssignment) -> Result<bool> {
    let val = |t: &LinearTerm| t.eval(|x| a.get(x).cloned());
    Ok(match f {
        AdditiveFormula::True => true,
        AdditiveFormula::False => false,
        AdditiveFormula::Leq(s, t) => val(s)? <= val(t)?,
        AdditiveFormula::Eq(s, t) => val(s)? == val(t)?,
        AdditiveFormula::Div(d, t) => {
            let v = val(t)?;
            if d.is_zero() {
                v.is_zero()
            } else {
                v.is_multiple_of(d)
            }
        }
        AdditiveFormula::Not(g) => !eval(g, a)?,
        AdditiveFormula::And(g, h) => eval(g, a)? && eval(h, a)?,
        AdditiveFormula::Or(g, h) => eval(g, a)? || eval(h, a)?,
        AdditiveFormula::Implies(g, h) => !eval(g, a)? || eval(h, a)?,
        AdditiveFormula::Exists(..) | AdditiveFormula::Forall(..) => return Err(Error::NotQuantifierFree),
    })
}

//! Sentences over `H × Z` with the preorder read off the `Z` component.
//!
//! A product variable splits into an `H` part, enumerated, and a `Z` part,
//! left to the Presburger engine. [`check_axioms`] runs the axiom checks on
//! any structure implementing [`FbpStructure`].

use std::collections::{BTreeMap, HashMap};
use std::fmt::Debug;
use std::hash::Hash;

use num_bigint::BigInt;
use serde::Serialize;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::fingroup::{decompose, iso_check, FinAbGroup, GroupElem};
use crate::formula::{AdditiveFormula, Formula, LinearTerm, Term};
use crate::presburger;
use crate::report::{Check, Status};

/// Default bound on the number of `H`-assignments a translation may explore.
pub const DEFAULT_CAP_WORK: u128 = 1_000_000;

/// Default half-width of the `Z` window used by [`check_axioms`].
pub const DEFAULT_WINDOW: i64 = 3;

const MAX_WITNESSES: usize = 5;

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct ProductElem {
    pub h: GroupElem,
    pub z: i64,
}

/// `H × Z` with `(h, z) <= (h', z')` iff `z <= z'`.
#[derive(Debug, Clone)]
pub struct FbpModel {
    pub h: FinAbGroup,
    /// Interpretation of `τ`; `(0, 1)` in the standard model.
    pub tau: ProductElem,
}

impl FbpModel {
    pub fn standard(h: FinAbGroup) -> FbpModel {
        let tau = ProductElem { h: h.identity(), z: 1 };
        FbpModel { h, tau }
    }

    pub fn exponent(&self) -> u64 {
        self.h.exponent()
    }

    fn h_value(&self, t: &Term, env: &BTreeMap<String, GroupElem>) -> Result<GroupElem> {
        let h = &self.h;
        Ok(match t {
            Term::Var(x) => env.get(x).cloned().ok_or_else(|| Error::MissingVariable(x.clone()))?,
            Term::One => h.identity(),
            Term::Tau => self.tau.h.clone(),
            Term::Mul(a, b) => h.add(&self.h_value(a, env)?, &self.h_value(b, env)?),
            Term::Inv(a) => h.neg(&self.h_value(a, env)?),
            Term::Pow(a, k) => h.scale(&self.h_value(a, env)?, *k),
        })
    }

    fn z_value(&self, t: &Term) -> LinearTerm {
        let lin = t.to_linear();
        let tau_part = lin.constant_part().clone();
        lin.add_constant(&(&tau_part * BigInt::from(self.tau.z) - &tau_part))
    }

    fn value(&self, t: &Term, env: &BTreeMap<String, ProductElem>) -> Result<ProductElem> {
        let h = &self.h;
        Ok(match t {
            Term::Var(x) => env.get(x).cloned().ok_or_else(|| Error::MissingVariable(x.clone()))?,
            Term::One => ProductElem { h: h.identity(), z: 0 },
            Term::Tau => self.tau.clone(),
            Term::Mul(a, b) => {
                let (a, b) = (self.value(a, env)?, self.value(b, env)?);
                ProductElem {
                    h: h.add(&a.h, &b.h),
                    z: a.z.wrapping_add(b.z),
                }
            }
            Term::Inv(a) => {
                let a = self.value(a, env)?;
                ProductElem {
                    h: h.neg(&a.h),
                    z: a.z.wrapping_neg(),
                }
            }
            Term::Pow(a, k) => {
                let a = self.value(a, env)?;
                ProductElem {
                    h: h.scale(&a.h, *k),
                    z: a.z.wrapping_mul(*k),
                }
            }
        })
    }
}

#[derive(Debug, Clone, Copy)]
pub struct DecideConfig {
    pub element_cap: u128,
    pub work_cap: u128,
}

impl Default for DecideConfig {
    fn default() -> Self {
        DecideConfig {
            element_cap: crate::fingroup::DEFAULT_CAP_ELEMENTS,
            work_cap: DEFAULT_CAP_WORK,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Decision {
    pub result: bool,
    /// Node count of the closed additive sentence handed to the Presburger engine.
    pub translated_presburger_size: usize,
    pub h_assignments_explored: u128,
}

/// `Σ |H|^d` over quantifier nodes at nesting depth `d >= 1`.
fn worst_case_work(f: &Formula, order: u128, depth: u32) -> u128 {
    match f {
        Formula::Not(a) => worst_case_work(a, order, depth),
        Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) => {
            worst_case_work(a, order, depth).saturating_add(worst_case_work(b, order, depth))
        }
        Formula::Exists(_, a) | Formula::Forall(_, a) => order
            .saturating_pow(depth + 1)
            .saturating_add(worst_case_work(a, order, depth + 1)),
        _ => 0,
    }
}

fn fold_not(a: AdditiveFormula) -> AdditiveFormula {
    match a {
        AdditiveFormula::True => AdditiveFormula::False,
        AdditiveFormula::False => AdditiveFormula::True,
        a => AdditiveFormula::not(a),
    }
}

fn fold_and(a: AdditiveFormula, b: AdditiveFormula) -> AdditiveFormula {
    match (a, b) {
        (AdditiveFormula::False, _) | (_, AdditiveFormula::False) => AdditiveFormula::False,
        (AdditiveFormula::True, x) | (x, AdditiveFormula::True) => x,
        (a, b) => AdditiveFormula::and(a, b),
    }
}

fn fold_or(a: AdditiveFormula, b: AdditiveFormula) -> AdditiveFormula {
    match (a, b) {
        (AdditiveFormula::True, _) | (_, AdditiveFormula::True) => AdditiveFormula::True,
        (AdditiveFormula::False, x) | (x, AdditiveFormula::False) => x,
        (a, b) => AdditiveFormula::or(a, b),
    }
}

struct Translator<'a> {
    model: &'a FbpModel,
    elements: Vec<GroupElem>,
    explored: u128,
}

impl Translator<'_> {
    fn run(&mut self, f: &Formula, env: &mut BTreeMap<String, GroupElem>) -> Result<AdditiveFormula> {
        let m = self.model;
        Ok(match f {
            Formula::True => AdditiveFormula::True,
            Formula::False => AdditiveFormula::False,
            Formula::Eq(a, b) => {
                if m.h_value(a, env)? != m.h_value(b, env)? {
                    AdditiveFormula::False
                } else {
                    AdditiveFormula::Eq(m.z_value(a), m.z_value(b))
                }
            }
            Formula::Leq(a, b) => {
                m.h_value(a, env)?;
                m.h_value(b, env)?;
                AdditiveFormula::Leq(m.z_value(a), m.z_value(b))
            }
            Formula::Pn(n, t) => {
                if m.h.is_nth_power(&m.h_value(t, env)?, *n) {
                    AdditiveFormula::div(BigInt::from(*n), m.z_value(t))
                } else {
                    AdditiveFormula::False
                }
            }
            Formula::Not(a) => fold_not(self.run(a, env)?),
            Formula::And(a, b) => fold_and(self.run(a, env)?, self.run(b, env)?),
            Formula::Or(a, b) => fold_or(self.run(a, env)?, self.run(b, env)?),
            Formula::Implies(a, b) => fold_or(fold_not(self.run(a, env)?), self.run(b, env)?),
            Formula::Exists(x, a) | Formula::Forall(x, a) => {
                let exists = matches!(f, Formula::Exists(..));
                let saved = env.get(x).cloned();
                let mut acc = if exists { AdditiveFormula::False } else { AdditiveFormula::True };
                for i in 0..self.elements.len() {
                    self.explored += 1;
                    env.insert(x.clone(), self.elements[i].clone());
                    let body = self.run(a, env)?;
                    let quantified = match body {
                        AdditiveFormula::True | AdditiveFormula::False => body,
                        b if exists => AdditiveFormula::exists(x.clone(), b),
                        b => AdditiveFormula::forall(x.clone(), b),
                    };
                    acc = if exists { fold_or(acc, quantified) } else { fold_and(acc, quantified) };
                    if acc == AdditiveFormula::True && exists || acc == AdditiveFormula::False && !exists {
                        break;
                    }
                }
                match saved {
                    Some(v) => env.insert(x.clone(), v),
                    None => env.remove(x),
                };
                acc
            }
        })
    }
}

/// Translates a sentence into one closed Presburger sentence; also returns
/// the number of `H`-assignments explored.
pub fn translate(model: &FbpModel, f: &Formula, cfg: &DecideConfig) -> Result<(AdditiveFormula, u128)> {
    let free = f.free_vars();
    if !free.is_empty() {
        return Err(Error::FreeVariables(free.into_iter().collect()));
    }
    let order = model.h.order();
    let work = worst_case_work(f, order, 0);
    if work > cfg.work_cap {
        return Err(Error::cap("H-assignments", work, cfg.work_cap));
    }
    let mut t = Translator {
        model,
        elements: model.h.enumerate(cfg.element_cap)?,
        explored: 0,
    };
    let out = t.run(f, &mut BTreeMap::new())?;
    Ok((out, t.explored))
}

/// Decides `f` in the model.
pub fn decide_th(model: &FbpModel, f: &Formula, cfg: &DecideConfig) -> Result<Decision> {
    let (g, explored) = translate(model, f, cfg)?;
    Ok(Decision {
        result: presburger::decide(&g)?,
        translated_presburger_size: g.size(),
        h_assignments_explored: explored,
    })
}

/// Truth of `f` with every quantifier ranging over `H × [-bound, bound]`.
pub fn eval_bounded(model: &FbpModel, f: &Formula, bound: i64) -> Result<bool> {
    let free = f.free_vars();
    if !free.is_empty() {
        return Err(Error::FreeVariables(free.into_iter().collect()));
    }
    let hs = model.h.enumerate(u128::MAX)?;
    let mut env = BTreeMap::new();
    eval_rec(model, f, &mut env, &hs, bound)
}

fn eval_rec(
    m: &FbpModel,
    f: &Formula,
    env: &mut BTreeMap<String, ProductElem>,
    hs: &[GroupElem],
    bound: i64,
) -> Result<bool> {
    Ok(match f {
        Formula::True => true,
        Formula::False => false,
        Formula::Eq(a, b) => m.value(a, env)? == m.value(b, env)?,
        Formula::Leq(a, b) => m.value(a, env)?.z <= m.value(b, env)?.z,
        Formula::Pn(n, t) => {
            let v = m.value(t, env)?;
            m.h.is_nth_power(&v.h, *n) && v.z.rem_euclid(*n as i64) == 0
        }
        Formula::Not(a) => !eval_rec(m, a, env, hs, bound)?,
        Formula::And(a, b) => eval_rec(m, a, env, hs, bound)? && eval_rec(m, b, env, hs, bound)?,
        Formula::Or(a, b) => eval_rec(m, a, env, hs, bound)? || eval_rec(m, b, env, hs, bound)?,
        Formula::Implies(a, b) => !eval_rec(m, a, env, hs, bound)? || eval_rec(m, b, env, hs, bound)?,
        Formula::Exists(x, a) | Formula::Forall(x, a) => {
            let exists = matches!(f, Formula::Exists(..));
            let saved = env.get(x).cloned();
            let mut result = !exists;
            'outer: for z in -bound..=bound {
                for h in hs {
                    env.insert(x.clone(), ProductElem { h: h.clone(), z });
                    if eval_rec(m, a, env, hs, bound)? == exists {
                        result = exists;
                        break 'outer;
                    }
                }
            }
            match saved {
                Some(v) => env.insert(x.clone(), v),
                None => env.remove(x),
            };
            result
        }
    })
}

/// A pre-ordered abelian group whose `∼`-classes are indexed by integers.
pub trait FbpStructure {
    type Elem: Clone + Eq + Hash + Debug;

    fn identity(&self) -> Self::Elem;
    fn op(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn inv(&self, a: &Self::Elem) -> Self::Elem;
    fn leq(&self, a: &Self::Elem, b: &Self::Elem) -> bool;
    fn tau(&self) -> Self::Elem;
    /// Elements of the `∼`-classes within `w` steps of the class of 1, in a fixed order.
    fn window(&self, w: i64) -> Vec<Self::Elem>;
    /// Order of `g`, or `None` when it is infinite.
    fn order(&self, g: &Self::Elem) -> Option<u64>;
    /// The finite group the torsion is supposed to be isomorphic to.
    fn expected_torsion(&self) -> &FinAbGroup;
    fn describe(&self, g: &Self::Elem) -> Value;
}

impl FbpStructure for FbpModel {
    type Elem = ProductElem;

    fn identity(&self) -> ProductElem {
        ProductElem {
            h: self.h.identity(),
            z: 0,
        }
    }

    fn op(&self, a: &ProductElem, b: &ProductElem) -> ProductElem {
        ProductElem {
            h: self.h.add(&a.h, &b.h),
            z: a.z + b.z,
        }
    }

    fn inv(&self, a: &ProductElem) -> ProductElem {
        ProductElem {
            h: self.h.neg(&a.h),
            z: -a.z,
        }
    }

    fn leq(&self, a: &ProductElem, b: &ProductElem) -> bool {
        a.z <= b.z
    }

    fn tau(&self) -> ProductElem {
        self.tau.clone()
    }

    fn window(&self, w: i64) -> Vec<ProductElem> {
        let hs = self.h.enumerate(u128::MAX).expect("no cap");
        (-w..=w)
            .flat_map(|z| hs.iter().map(move |h| ProductElem { h: h.clone(), z }))
            .collect()
    }

    fn order(&self, g: &ProductElem) -> Option<u64> {
        (g.z == 0).then(|| self.h.order_of(&g.h))
    }

    fn expected_torsion(&self) -> &FinAbGroup {
        &self.h
    }

    fn describe(&self, g: &ProductElem) -> Value {
        json!({ "h": g.h, "z": g.z })
    }
}

fn push_witness(list: &mut Vec<Value>, v: impl FnOnce() -> Value) {
    if list.len() < MAX_WITNESSES {
        list.push(v());
    }
}

/// At most `limit` elements of `all`, evenly spread, always including `extra`.
fn spread<T: Clone + Eq>(all: &[T], limit: usize, extra: &[T]) -> Vec<T> {
    let step = all.len().div_ceil(limit).max(1);
    let mut out: Vec<T> = all.iter().step_by(step).cloned().collect();
    for e in extra {
        if !out.contains(e) {
            out.push(e.clone());
        }
    }
    out
}

/// Checks the preorder axioms and axioms (i)–(vi) on the classes within
/// `window` steps of the class of 1.
pub fn check_axioms<S: FbpStructure>(s: &S, window: i64) -> Vec<Check> {
    let id = s.identity();
    let tau = s.tau();
    let lt = |a: &S::Elem, b: &S::Elem| s.leq(a, b) && !s.leq(b, a);
    let sim = |a: &S::Elem, b: &S::Elem| s.leq(a, b) && s.leq(b, a);
    let elements = s.window(window);
    let h = s.expected_torsion();
    let m = h.exponent();
    let mut checks = Vec::new();

    // Preorder axioms on a spread sample of the window.
    let sample = spread(&elements, 24, &[id.clone(), tau.clone()]);
    let mut bad = Vec::new();
    for a in &sample {
        if !s.leq(a, a) {
            push_witness(&mut bad, || json!({ "reflexivity": s.describe(a) }));
        }
        for b in &sample {
            if !s.leq(a, b) && !s.leq(b, a) {
                push_witness(&mut bad, || json!({ "totality": [s.describe(a), s.describe(b)] }));
            }
            for c in &sample {
                if s.leq(a, b) && s.leq(b, c) && !s.leq(a, c) {
                    push_witness(&mut bad, || json!({ "transitivity": [s.describe(a), s.describe(b), s.describe(c)] }));
                }
                if s.leq(a, b) && !s.leq(&s.op(a, c), &s.op(b, c)) {
                    push_witness(&mut bad, || json!({ "translation": [s.describe(a), s.describe(b), s.describe(c)] }));
                }
            }
        }
    }
    checks.push(Check::pass_if(
        "reflexive, transitive, total and translation-invariant preorder",
        "preorder",
        bad.is_empty(),
        if bad.is_empty() { vec![json!({ "sample_size": sample.len() })] } else { bad },
    ));

    // (i)
    let mut bad = Vec::new();
    if !lt(&id, &tau) {
        bad.push(json!({ "tau_not_positive": s.describe(&tau) }));
    }
    for g in &elements {
        if lt(&id, g) && lt(g, &tau) {
            push_witness(&mut bad, || s.describe(g));
        }
    }
    checks.push(Check::pass_if(
        "tau is positive and no element lies strictly between 1 and tau",
        "axiom-i",
        bad.is_empty(),
        bad,
    ));
    let is_order = elements.iter().all(|g| !sim(g, &id) || *g == id);
    checks.push(Check::new(
        "literal reading: tau = 1 unless the preorder is an order",
        "axiom-i-literal",
        Status::Reported,
        vec![json!({ "preorder_is_order": is_order, "tau_is_identity": tau == id })],
    ));

    // (ii)
    let torsion: Vec<S::Elem> = elements.iter().filter(|g| s.order(g).is_some()).cloned().collect();
    let mut bad = Vec::new();
    for g in &torsion {
        let o = s.order(g).expect("torsion");
        if !m.is_multiple_of(o) {
            push_witness(&mut bad, || json!({ "element": s.describe(g), "order": o, "m": m }));
        }
    }
    let mut wit = vec![json!({ "m": m, "torsion_elements": torsion.len() })];
    let ok = bad.is_empty();
    wit.extend(bad);
    checks.push(Check::pass_if("every element of finite order has order dividing m", "axiom-ii", ok, wit));

    // (iii)
    let index: HashMap<S::Elem, usize> = torsion.iter().cloned().enumerate().map(|(i, g)| (g, i)).collect();
    let closed = torsion.iter().all(|a| index.contains_key(&s.inv(a)));
    let computed = if closed {
        decompose(torsion.len(), |a, b| {
            index.get(&s.op(&torsion[a], &torsion[b])).copied().unwrap_or(usize::MAX)
        })
        .ok()
    } else {
        None
    };
    let (ok, wit) = match &computed {
        Some(d) => (
            iso_check(&d.group, h),
            json!({ "computed": d.group.invariant_factors(), "expected": h.invariant_factors() }),
        ),
        None => (
            false,
            json!({ "computed": null, "expected": h.invariant_factors(), "closed_under_operation": closed }),
        ),
    };
    checks.push(Check::pass_if("torsion subgroup is isomorphic to H", "axiom-iii", ok, vec![wit]));

    // (iv)
    let mut bad = Vec::new();
    for g in &elements {
        if sim(g, &id) && s.order(g).is_none() {
            push_witness(&mut bad, || s.describe(g));
        }
    }
    checks.push(Check::pass_if("every element equivalent to 1 is torsion", "axiom-iv", bad.is_empty(), bad));

    // (v)
    let mut reps: Vec<S::Elem> = Vec::new();
    let mut members: Vec<usize> = Vec::new();
    let mut bad = Vec::new();
    for g in &elements {
        match reps.iter().position(|r| sim(r, g)) {
            Some(i) => {
                members[i] += 1;
                if s.order(&s.op(g, &s.inv(&reps[i]))).is_none() {
                    push_witness(&mut bad, || json!({ "not_a_torsion_coset": [s.describe(g), s.describe(&reps[i])] }));
                }
            }
            None => {
                reps.push(g.clone());
                members.push(1);
            }
        }
    }
    for (r, &k) in reps.iter().zip(&members) {
        if k as u128 != h.order() {
            push_witness(&mut bad, || json!({ "class_size": k, "class_of": s.describe(r) }));
        }
    }
    for (i, a) in reps.iter().enumerate() {
        for b in &reps[i + 1..] {
            if lt(a, b) == lt(b, a) {
                push_witness(&mut bad, || json!({ "incomparable_classes": [s.describe(a), s.describe(b)] }));
            }
        }
    }
    let min_positive = reps
        .iter()
        .filter(|r| lt(&id, r))
        .fold(None::<&S::Elem>, |best, r| match best {
            Some(b) if s.leq(b, r) => Some(b),
            _ => Some(r),
        });
    match min_positive {
        Some(r) if sim(r, &tau) => {}
        other => bad.push(json!({ "minimal_positive_class": other.map(|r| s.describe(r)), "tau": s.describe(&tau) })),
    }
    let mut tau_powers = vec![id.clone()];
    let (mut up, mut down) = (id.clone(), id.clone());
    let tau_inv = s.inv(&tau);
    for _ in 0..window {
        up = s.op(&up, &tau);
        down = s.op(&down, &tau_inv);
        tau_powers.push(up.clone());
        tau_powers.push(down.clone());
    }
    for r in &reps {
        if !tau_powers.iter().any(|t| sim(t, r)) {
            push_witness(&mut bad, || json!({ "class_not_a_tau_power": s.describe(r) }));
        }
    }
    checks.push(Check::pass_if(
        "classes modulo torsion are totally ordered, generated by tau, with tau's class minimal positive",
        "axiom-v",
        bad.is_empty(),
        if bad.is_empty() { vec![json!({ "classes_in_window": reps.len() })] } else { bad },
    ));

    // (vi)
    let mut bad = Vec::new();
    let pairwise = torsion.len() <= 2000;
    for a in &torsion {
        if pairwise {
            for b in &torsion {
                if !s.leq(a, b) {
                    push_witness(&mut bad, || json!([s.describe(a), s.describe(b)]));
                }
            }
        } else if !sim(a, &id) {
            push_witness(&mut bad, || s.describe(a));
        }
    }
    let ok = bad.is_empty();
    let mut wit = vec![json!({ "method": if pairwise { "all pairs" } else { "against 1, with translation invariance" } })];
    wit.extend(bad);
    checks.push(Check::pass_if("the preorder is trivial on H", "axiom-vi", ok, wit));
    checks
}

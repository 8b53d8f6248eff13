//! Random formula generators and brute-force oracles for property harnesses.
//!
//! Nothing here goes through quantifier elimination: the oracles evaluate
//! quantifiers by enumeration over bounded integer windows, so they can be
//! used to cross-check [`crate::presburger`] and [`crate::thdecide`].

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::ToPrimitive;
use rand::seq::SliceRandom;
use rand::Rng;

use crate::formula::{AdditiveFormula, Formula, LinearTerm, Term};

/// Knobs for the random generators.
#[derive(Debug, Clone)]
pub struct GenConfig {
    pub max_depth: usize,
    pub max_coeff: i64,
    pub max_const: i64,
    pub max_modulus: i64,
    /// Boolean connectives allowed between two quantifiers.
    pub max_connective_depth: usize,
}

impl Default for GenConfig {
    fn default() -> Self {
        GenConfig {
            max_depth: 3,
            max_coeff: 5,
            max_const: 5,
            max_modulus: 5,
            max_connective_depth: 2,
        }
    }
}

const BOUND_NAMES: [&str; 6] = ["x", "y", "z", "u", "v", "w"];

fn random_linear<R: Rng>(rng: &mut R, vars: &[String], cfg: &GenConfig) -> LinearTerm {
    let mut t = LinearTerm::constant(rng.gen_range(-cfg.max_const..=cfg.max_const));
    if vars.is_empty() {
        return t;
    }
    let k = rng.gen_range(1..=vars.len().min(2));
    for x in vars.choose_multiple(rng, k) {
        let mut c = 0;
        while c == 0 {
            c = rng.gen_range(-cfg.max_coeff..=cfg.max_coeff);
        }
        t = t + LinearTerm::monomial(x.clone(), BigInt::from(c));
    }
    t
}

fn random_atom<R: Rng>(rng: &mut R, vars: &[String], cfg: &GenConfig) -> AdditiveFormula {
    let t = random_linear(rng, vars, cfg);
    let atom = match rng.gen_range(0..5) {
        0 | 1 => AdditiveFormula::Leq(t, LinearTerm::zero()),
        2 => AdditiveFormula::Eq(t, LinearTerm::zero()),
        _ => AdditiveFormula::Div(BigInt::from(rng.gen_range(2..=cfg.max_modulus)), t),
    };
    if rng.gen_bool(0.25) {
        AdditiveFormula::not(atom)
    } else {
        atom
    }
}

fn random_body<R: Rng>(
    rng: &mut R,
    vars: &mut Vec<String>,
    depth_left: usize,
    conn_left: usize,
    cfg: &GenConfig,
) -> AdditiveFormula {
    let quantify = depth_left > 0 && (conn_left == 0 || rng.gen_bool(0.45));
    if quantify {
        let x = BOUND_NAMES[vars.len() % BOUND_NAMES.len()].to_string();
        vars.push(x.clone());
        let body = random_body(rng, vars, depth_left - 1, cfg.max_connective_depth, cfg);
        vars.pop();
        return if rng.gen_bool(0.5) {
            AdditiveFormula::exists(x, body)
        } else {
            AdditiveFormula::forall(x, body)
        };
    }
    if conn_left == 0 || rng.gen_bool(0.35) {
        return random_atom(rng, vars, cfg);
    }
    let a = random_body(rng, vars, depth_left, conn_left - 1, cfg);
    let b = random_body(rng, vars, depth_left, conn_left - 1, cfg);
    match rng.gen_range(0..4) {
        0 | 1 => AdditiveFormula::and(a, b),
        2 => AdditiveFormula::or(a, b),
        _ => AdditiveFormula::implies(a, b),
    }
}

/// A sentence of quantifier depth at most `cfg.max_depth` (at least one quantifier).
pub fn random_sentence<R: Rng>(rng: &mut R, cfg: &GenConfig) -> AdditiveFormula {
    let mut vars = Vec::new();
    let x = BOUND_NAMES[0].to_string();
    vars.push(x.clone());
    let body = random_body(rng, &mut vars, cfg.max_depth.saturating_sub(1), cfg.max_connective_depth, cfg);
    if rng.gen_bool(0.5) {
        AdditiveFormula::exists(x, body)
    } else {
        AdditiveFormula::forall(x, body)
    }
}

/// A formula over the free variables `free` with quantifier depth at most
/// `cfg.max_depth` and at least one quantifier.
pub fn random_open_formula<R: Rng>(rng: &mut R, free: &[&str], cfg: &GenConfig) -> AdditiveFormula {
    let mut vars: Vec<String> = free.iter().map(|s| s.to_string()).collect();
    let x = BOUND_NAMES[0].to_string();
    vars.push(x.clone());
    let body = random_body(rng, &mut vars, cfg.max_depth.saturating_sub(1), cfg.max_connective_depth, cfg);
    let q = if rng.gen_bool(0.5) {
        AdditiveFormula::exists(x, body)
    } else {
        AdditiveFormula::forall(x, body)
    };
    match rng.gen_range(0..3) {
        0 => q,
        1 => AdditiveFormula::and(random_atom(rng, &vars[..free.len()], cfg), q),
        _ => AdditiveFormula::or(q, random_atom(rng, &vars[..free.len()], cfg)),
    }
}

/// A random multiplicative sentence over `{·, 1, ⁻¹, ≤, τ, P_n}`.
pub fn random_group_sentence<R: Rng>(rng: &mut R, max_depth: usize) -> Formula {
    fn word<R: Rng>(rng: &mut R, vars: &[String]) -> Term {
        let mut acc = Term::One;
        let pieces = rng.gen_range(1..=2);
        for _ in 0..pieces {
            let base = if !vars.is_empty() && rng.gen_bool(0.75) {
                Term::Var(vars.choose(rng).expect("non-empty").clone())
            } else {
                Term::Tau
            };
            let k = *[1i64, 1, 2, -1, 3, -2].choose(rng).expect("non-empty");
            let piece = Term::pow(base, k);
            acc = if acc == Term::One { piece } else { Term::mul(acc, piece) };
        }
        acc
    }
    fn atom<R: Rng>(rng: &mut R, vars: &[String]) -> Formula {
        let a = word(rng, vars);
        let f = match rng.gen_range(0..5) {
            0 | 1 => Formula::Leq(a, word(rng, vars)),
            2 | 3 => Formula::Eq(a, word(rng, vars)),
            _ => Formula::Pn(rng.gen_range(2..=4), a),
        };
        if rng.gen_bool(0.25) {
            Formula::not(f)
        } else {
            f
        }
    }
    fn body<R: Rng>(rng: &mut R, vars: &mut Vec<String>, depth: usize, conn: usize) -> Formula {
        if depth > 0 && (conn == 0 || rng.gen_bool(0.45)) {
            let x = BOUND_NAMES[vars.len() % BOUND_NAMES.len()].to_string();
            vars.push(x.clone());
            let b = body(rng, vars, depth - 1, 2);
            vars.pop();
            return if rng.gen_bool(0.5) { Formula::exists(x, b) } else { Formula::forall(x, b) };
        }
        if conn == 0 || rng.gen_bool(0.35) {
            return atom(rng, vars);
        }
        let a = body(rng, vars, depth, conn - 1);
        let b = body(rng, vars, depth, conn - 1);
        match rng.gen_range(0..4) {
            0 | 1 => Formula::and(a, b),
            2 => Formula::or(a, b),
            _ => Formula::implies(a, b),
        }
    }
    let mut vars = vec![BOUND_NAMES[0].to_string()];
    let b = body(rng, &mut vars, max_depth.saturating_sub(1), 2);
    if rng.gen_bool(0.5) {
        Formula::exists(BOUND_NAMES[0], b)
    } else {
        Formula::forall(BOUND_NAMES[0], b)
    }
}

/// The 100-sentence regression suite: fixed sentences followed by seeded
/// random ones.
pub fn regression_sentences() -> Vec<Formula> {
    const FIXED: [&str; 16] = [
        "A x. E y. (y*y = x | y*y = x*t)",
        "E x. x*x = t",
        "A x. x <= x",
        "A x. E y. !(y <= x)",
        "E x. A y. x <= y",
        "A x. A y. (x <= y | y <= x)",
        "A x. (1 <= x & !(x <= 1) -> t <= x)",
        "E g. !(g = 1) & g*g = 1 & g <= 1 & 1 <= g",
        "A x. P[2](x) | P[2](x*t)",
        "A x. P[3](x^3)",
        "E x. P[2](x) & !(P[4](x))",
        "A x. E y. y^3 = x | y^3 = x*t | y^3 = x*t^2",
        "A x. A y. x*y = y*x",
        "E x. x <= 1 & 1 <= x & !(x = 1)",
        "A x. (x <= 1 & 1 <= x) -> x^6 = 1",
        "E x. E y. x*y^-1 = t^5 & x^2 = y^3",
    ];
    let mut out: Vec<Formula> = FIXED
        .iter()
        .map(|s| crate::formula::parse_formula(s).expect("fixed sentence parses"))
        .collect();
    let mut rng = <rand::rngs::StdRng as rand::SeedableRng>::seed_from_u64(0x5eed);
    while out.len() < 100 {
        out.push(random_group_sentence(&mut rng, 3));
    }
    out
}

/// Additive formula compiled for fast bounded evaluation (variables by slot).
#[derive(Debug, Clone)]
enum Compiled {
    Const(bool),
    Leq(Vec<(usize, i64)>, i64),
    Eq(Vec<(usize, i64)>, i64),
    Div(i64, Vec<(usize, i64)>, i64),
    Not(Box<Compiled>),
    And(Box<Compiled>, Box<Compiled>),
    Or(Box<Compiled>, Box<Compiled>),
    Implies(Box<Compiled>, Box<Compiled>),
    Exists(usize, Box<Compiled>),
    Forall(usize, Box<Compiled>),
}

fn compile(f: &AdditiveFormula, scope: &mut Vec<String>, max_slots: &mut usize) -> Compiled {
    let lin = |t: &LinearTerm, scope: &Vec<String>| -> (Vec<(usize, i64)>, i64) {
        let coeffs = t
            .coeffs()
            .map(|(x, c)| {
                let slot = scope.iter().rposition(|s| s == x).expect("variable in scope");
                (slot, c.to_i64().expect("small coefficient"))
            })
            .collect();
        (coeffs, t.constant_part().to_i64().expect("small constant"))
    };
    match f {
        AdditiveFormula::True => Compiled::Const(true),
        AdditiveFormula::False => Compiled::Const(false),
        AdditiveFormula::Leq(a, b) => {
            let (c, k) = lin(&(a.clone() - b.clone()), scope);
            Compiled::Leq(c, k)
        }
        AdditiveFormula::Eq(a, b) => {
            let (c, k) = lin(&(a.clone() - b.clone()), scope);
            Compiled::Eq(c, k)
        }
        AdditiveFormula::Div(d, t) => {
            let (c, k) = lin(t, scope);
            Compiled::Div(d.to_i64().expect("small modulus"), c, k)
        }
        AdditiveFormula::Not(a) => Compiled::Not(Box::new(compile(a, scope, max_slots))),
        AdditiveFormula::And(a, b) => Compiled::And(
            Box::new(compile(a, scope, max_slots)),
            Box::new(compile(b, scope, max_slots)),
        ),
        AdditiveFormula::Or(a, b) => Compiled::Or(
            Box::new(compile(a, scope, max_slots)),
            Box::new(compile(b, scope, max_slots)),
        ),
        AdditiveFormula::Implies(a, b) => Compiled::Implies(
            Box::new(compile(a, scope, max_slots)),
            Box::new(compile(b, scope, max_slots)),
        ),
        AdditiveFormula::Exists(x, a) | AdditiveFormula::Forall(x, a) => {
            scope.push(x.clone());
            let slot = scope.len() - 1;
            *max_slots = (*max_slots).max(scope.len());
            let body = Box::new(compile(a, scope, max_slots));
            scope.pop();
            if matches!(f, AdditiveFormula::Exists(..)) {
                Compiled::Exists(slot, body)
            } else {
                Compiled::Forall(slot, body)
            }
        }
    }
}

struct Window {
    /// Half-width of the window for the quantifier at each nesting depth.
    radius: Vec<i64>,
}

fn dot(c: &[(usize, i64)], k: i64, env: &[i64]) -> i64 {
    c.iter().fold(k, |acc, &(s, a)| acc + a * env[s])
}

impl Compiled {
    fn is_quantifier_free(&self) -> bool {
        match self {
            Compiled::Const(_) | Compiled::Leq(..) | Compiled::Eq(..) | Compiled::Div(..) => true,
            Compiled::Not(a) => a.is_quantifier_free(),
            Compiled::And(a, b) | Compiled::Or(a, b) | Compiled::Implies(a, b) => a.is_quantifier_free() && b.is_quantifier_free(),
            Compiled::Exists(..) | Compiled::Forall(..) => false,
        }
    }
}

/// Zero crossings of the linear atoms in `slot` and the lcm of the moduli
/// of divisibility atoms that mention it.
fn critical_points(c: &Compiled, slot: usize, env: &[i64], points: &mut Vec<i64>, period: &mut i64) {
    let split = |cs: &[(usize, i64)], k: i64| {
        let a: i64 = cs.iter().filter(|(s, _)| *s == slot).map(|(_, a)| a).sum();
        let rest = cs.iter().filter(|(s, _)| *s != slot).fold(k, |acc, &(s, b)| acc + b * env[s]);
        (a, rest)
    };
    match c {
        Compiled::Const(_) => {}
        Compiled::Leq(cs, k) | Compiled::Eq(cs, k) => {
            let (a, rest) = split(cs, *k);
            if a != 0 {
                points.push(Integer::div_floor(&-rest, &a));
                points.push(Integer::div_ceil(&-rest, &a));
            }
        }
        Compiled::Div(d, cs, k) => {
            if split(cs, *k).0 != 0 {
                *period = period.lcm(d);
            }
        }
        Compiled::Not(a) => critical_points(a, slot, env, points, period),
        Compiled::And(a, b) | Compiled::Or(a, b) | Compiled::Implies(a, b) => {
            critical_points(a, slot, env, points, period);
            critical_points(b, slot, env, points, period);
        }
        Compiled::Exists(..) | Compiled::Forall(..) => unreachable!("quantifier-free body"),
    }
}

/// A quantifier over a quantifier-free body, decided over all of Z: between
/// consecutive critical points the body depends only on the residue modulo
/// the period, so one period on each side of every critical point suffices.
fn scan_exact(body: &Compiled, slot: usize, exists: bool, env: &mut Vec<i64>) -> bool {
    let mut points = Vec::new();
    let mut period = 1i64;
    critical_points(body, slot, env, &mut points, &mut period);
    if points.is_empty() {
        points.push(0);
    }
    points.sort_unstable();
    points.dedup();
    let mut last = i64::MIN;
    for &p in &points {
        for v in (p - period).max(last.saturating_add(1))..=p + period {
            env[slot] = v;
            if run(body, env, 0, &Window { radius: Vec::new() }) == exists {
                return exists;
            }
            last = v;
        }
    }
    !exists
}

/// 0, 1, -1, 2, -2, ... up to `r`.
fn centred(r: i64) -> impl Iterator<Item = i64> {
    std::iter::once(0).chain((1..=r).flat_map(|i| [i, -i]))
}

fn run(c: &Compiled, env: &mut Vec<i64>, depth: usize, w: &Window) -> bool {
    match c {
        Compiled::Const(b) => *b,
        Compiled::Leq(cs, k) => dot(cs, *k, env) <= 0,
        Compiled::Eq(cs, k) => dot(cs, *k, env) == 0,
        Compiled::Div(d, cs, k) => dot(cs, *k, env).rem_euclid(*d) == 0,
        Compiled::Not(a) => !run(a, env, depth, w),
        Compiled::And(a, b) => run(a, env, depth, w) && run(b, env, depth, w),
        Compiled::Or(a, b) => run(a, env, depth, w) || run(b, env, depth, w),
        Compiled::Implies(a, b) => !run(a, env, depth, w) || run(b, env, depth, w),
        Compiled::Exists(slot, a) | Compiled::Forall(slot, a) => {
            let exists = matches!(c, Compiled::Exists(..));
            if a.is_quantifier_free() {
                return scan_exact(a, *slot, exists, env);
            }
            let r = w.radius[depth.min(w.radius.len() - 1)];
            for v in centred(r) {
                env[*slot] = v;
                if run(a, env, depth + 1, w) == exists {
                    return exists;
                }
            }
            !exists
        }
    }
}

/// Evaluates `f` with every non-innermost quantifier restricted to a finite window.
///
/// `free` assigns the free variables. A quantifier at nesting depth `d`
/// ranges over `[-R_d, R_d]` with `R_d = growth^d · (bound + growth · M)`,
/// `M` the largest free value, so inner witnesses may be a fixed factor
/// larger than the values they depend on. A quantifier whose body is
/// quantifier-free is decided exactly over all integers.
pub fn bounded_eval(f: &AdditiveFormula, free: &[(&str, i64)], bound: i64, growth: i64) -> bool {
    let mut scope: Vec<String> = free.iter().map(|(x, _)| x.to_string()).collect();
    let mut slots = scope.len();
    let compiled = compile(f, &mut scope, &mut slots);
    let mut env = vec![0i64; slots];
    for (i, (_, v)) in free.iter().enumerate() {
        env[i] = *v;
    }
    let m = free.iter().map(|(_, v)| v.abs()).max().unwrap_or(0);
    let mut radius = Vec::new();
    let mut r = bound + growth * m;
    for _ in 0..=slots {
        radius.push(r);
        r = r.saturating_mul(growth);
    }
    run(&compiled, &mut env, 0, &Window { radius })
}

/// Bounded evaluation at `B, 2B, 4B, ...` until three consecutive bounds
/// agree; `None` if that does not happen by `max_bound`.
pub fn stabilized_eval(
    f: &AdditiveFormula,
    free: &[(&str, i64)],
    start: i64,
    max_bound: i64,
    growth: i64,
) -> Option<bool> {
    let mut history = Vec::new();
    let mut b = start;
    while b <= max_bound {
        history.push(bounded_eval(f, free, b, growth));
        if let [.., x, y, z] = history[..] {
            if x == y && y == z {
                return Some(z);
            }
        }
        b *= 2;
    }
    None
}

//! Finite abelian groups given by invariant factors, with the trivial preorder.

use std::collections::BTreeMap;
use std::fmt;

use num_integer::Integer;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::formula::{Formula, Term};

/// Default bound on the number of elements any enumeration may touch.
pub const DEFAULT_CAP_ELEMENTS: u128 = 1_000_000;

/// The element cap, taken from `FBP_CAP_ELEMENTS` when set and valid.
pub fn cap_from_env() -> u128 {
    std::env::var("FBP_CAP_ELEMENTS")
        .ok()
        .and_then(|v| v.trim().parse::<u128>().ok())
        .filter(|&c| c > 0)
        .unwrap_or(DEFAULT_CAP_ELEMENTS)
}

/// Prime factorization by trial division, primes ascending.
pub fn factorize(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut p = 2u64;
    while p.saturating_mul(p) <= n {
        if n.is_multiple_of(p) {
            let mut e = 0;
            while n.is_multiple_of(p) {
                n /= p;
                e += 1;
            }
            out.push((p, e));
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

/// Residue tuple `(x_1, ..., x_r)` with `0 <= x_i < d_i`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct GroupElem(pub Vec<u64>);

/// `Z/d_1 × ... × Z/d_r` with `d_i >= 2` and `d_i | d_{i+1}`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawGroup")]
pub struct FinAbGroup {
    invariant_factors: Vec<u64>,
}

#[derive(Deserialize)]
struct RawGroup {
    invariant_factors: Vec<u64>,
}

impl TryFrom<RawGroup> for FinAbGroup {
    type Error = Error;

    fn try_from(raw: RawGroup) -> Result<Self> {
        FinAbGroup::new(raw.invariant_factors)
    }
}

impl fmt::Display for FinAbGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.invariant_factors.is_empty() {
            return f.write_str("Z/1");
        }
        let parts: Vec<String> = self.invariant_factors.iter().map(|d| format!("Z/{d}")).collect();
        f.write_str(&parts.join("x"))
    }
}

impl FinAbGroup {
    /// Validates an invariant factor list.
    pub fn new(invariant_factors: Vec<u64>) -> Result<Self> {
        if let Some(d) = invariant_factors.iter().find(|&&d| d < 2) {
            return Err(Error::InvalidGroup(format!("invariant factor {d} is below 2")));
        }
        for w in invariant_factors.windows(2) {
            if w[1] % w[0] != 0 {
                return Err(Error::InvalidGroup(format!("{} does not divide {}", w[0], w[1])));
            }
        }
        Ok(FinAbGroup { invariant_factors })
    }

    pub fn trivial() -> Self {
        FinAbGroup {
            invariant_factors: Vec::new(),
        }
    }

    pub fn cyclic(n: u64) -> Self {
        Self::from_cyclic_orders(&[n])
    }

    /// Normal form of `Z/n_1 × ... × Z/n_s` for arbitrary `n_i >= 1`.
    pub fn from_cyclic_orders(orders: &[u64]) -> Self {
        let mut by_prime: BTreeMap<u64, Vec<u32>> = BTreeMap::new();
        for &n in orders {
            for (p, e) in factorize(n) {
                by_prime.entry(p).or_default().push(e);
            }
        }
        let rank = by_prime.values().map(Vec::len).max().unwrap_or(0);
        let mut factors = vec![1u64; rank];
        for (p, mut exps) in by_prime {
            exps.sort_unstable_by(|a, b| b.cmp(a));
            for (i, e) in exps.into_iter().enumerate() {
                factors[rank - 1 - i] *= p.pow(e);
            }
        }
        FinAbGroup {
            invariant_factors: factors,
        }
    }

    /// Parses `Z/6`, `Z/2xZ/4` and the like; factors need not be in normal form.
    pub fn parse(text: &str) -> Result<Self> {
        let mut orders = Vec::new();
        for (i, part) in text.split(['x', 'X', '×']).enumerate() {
            let part = part.trim();
            let n = part
                .strip_prefix("Z/")
                .and_then(|s| s.trim().parse::<u64>().ok())
                .filter(|&n| n >= 1)
                .ok_or_else(|| Error::InvalidGroup(format!("cannot read factor {} `{part}` of `{text}`", i + 1)))?;
            orders.push(n);
        }
        Ok(Self::from_cyclic_orders(&orders))
    }

    pub fn invariant_factors(&self) -> &[u64] {
        &self.invariant_factors
    }

    pub fn rank(&self) -> usize {
        self.invariant_factors.len()
    }

    pub fn order(&self) -> u128 {
        self.invariant_factors.iter().map(|&d| d as u128).product()
    }

    /// The exponent `m`: the largest invariant factor, or 1 for the trivial group.
    pub fn exponent(&self) -> u64 {
        self.invariant_factors.last().copied().unwrap_or(1)
    }

    pub fn identity(&self) -> GroupElem {
        GroupElem(vec![0; self.rank()])
    }

    pub fn contains(&self, g: &GroupElem) -> bool {
        g.0.len() == self.rank() && g.0.iter().zip(&self.invariant_factors).all(|(x, d)| x < d)
    }

    pub fn add(&self, a: &GroupElem, b: &GroupElem) -> GroupElem {
        GroupElem(
            a.0.iter()
                .zip(&b.0)
                .zip(&self.invariant_factors)
                .map(|((x, y), d)| (x + y) % d)
                .collect(),
        )
    }

    /// `k·g` for any integer `k`.
    pub fn scale(&self, g: &GroupElem, k: i64) -> GroupElem {
        GroupElem(
            g.0.iter()
                .zip(&self.invariant_factors)
                .map(|(&x, &d)| {
                    let k = k.rem_euclid(d as i64) as u128;
                    ((x as u128 * k) % d as u128) as u64
                })
                .collect(),
        )
    }

    pub fn neg(&self, g: &GroupElem) -> GroupElem {
        self.scale(g, -1)
    }

    /// Position of `g` in [`FinAbGroup::enumerate`] order.
    pub fn index_of(&self, g: &GroupElem) -> usize {
        g.0.iter()
            .zip(&self.invariant_factors)
            .fold(0usize, |acc, (&x, &d)| acc * d as usize + x as usize)
    }

    pub fn element_at(&self, mut index: usize) -> GroupElem {
        let mut xs = vec![0u64; self.rank()];
        for (slot, &d) in xs.iter_mut().zip(&self.invariant_factors).rev() {
            *slot = (index % d as usize) as u64;
            index /= d as usize;
        }
        GroupElem(xs)
    }

    /// All elements in lexicographic order.
    pub fn enumerate(&self, cap: u128) -> Result<Vec<GroupElem>> {
        let n = self.order();
        if n > cap {
            return Err(Error::cap("group elements", n, cap));
        }
        Ok((0..n as usize).map(|i| self.element_at(i)).collect())
    }

    pub fn order_of(&self, g: &GroupElem) -> u64 {
        g.0.iter()
            .zip(&self.invariant_factors)
            .fold(1u64, |acc, (&x, &d)| acc.lcm(&(d / d.gcd(&x))))
    }

    /// Whether `g = n·h` for some `h`.
    pub fn is_nth_power(&self, g: &GroupElem, n: u64) -> bool {
        g.0.iter()
            .zip(&self.invariant_factors)
            .all(|(&x, &d)| x % n.gcd(&d) == 0)
    }

    /// Value of a group word; `τ` is read as the identity, its component in `H`.
    pub fn eval_term(&self, t: &Term, env: &BTreeMap<String, GroupElem>) -> Result<GroupElem> {
        Ok(match t {
            Term::Var(x) => env.get(x).cloned().ok_or_else(|| Error::MissingVariable(x.clone()))?,
            Term::One | Term::Tau => self.identity(),
            Term::Mul(a, b) => self.add(&self.eval_term(a, env)?, &self.eval_term(b, env)?),
            Term::Inv(a) => self.neg(&self.eval_term(a, env)?),
            Term::Pow(a, k) => self.scale(&self.eval_term(a, env)?, *k),
        })
    }

    /// Tarski semantics with the trivial preorder: every `<=` atom holds.
    pub fn eval_formula(&self, f: &Formula, env: &BTreeMap<String, GroupElem>, cap: u128) -> Result<bool> {
        let elements = self.enumerate(cap)?;
        let mut env = env.clone();
        self.eval_in(f, &mut env, &elements)
    }

    fn eval_in(&self, f: &Formula, env: &mut BTreeMap<String, GroupElem>, elements: &[GroupElem]) -> Result<bool> {
        Ok(match f {
            Formula::True => true,
            Formula::False => false,
            Formula::Eq(a, b) => self.eval_term(a, env)? == self.eval_term(b, env)?,
            Formula::Leq(a, b) => {
                self.eval_term(a, env)?;
                self.eval_term(b, env)?;
                true
            }
            Formula::Pn(n, t) => self.is_nth_power(&self.eval_term(t, env)?, *n),
            Formula::Not(a) => !self.eval_in(a, env, elements)?,
            Formula::And(a, b) => self.eval_in(a, env, elements)? && self.eval_in(b, env, elements)?,
            Formula::Or(a, b) => self.eval_in(a, env, elements)? || self.eval_in(b, env, elements)?,
            Formula::Implies(a, b) => !self.eval_in(a, env, elements)? || self.eval_in(b, env, elements)?,
            Formula::Exists(x, a) | Formula::Forall(x, a) => {
                let exists = matches!(f, Formula::Exists(..));
                let saved = env.get(x).cloned();
                let mut result = !exists;
                for g in elements {
                    env.insert(x.clone(), g.clone());
                    if self.eval_in(a, env, elements)? == exists {
                        result = exists;
                        break;
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
}

/// Isomorphism test by comparison of invariant factors.
pub fn iso_check(a: &FinAbGroup, b: &FinAbGroup) -> bool {
    a.invariant_factors == b.invariant_factors
}

/// An abelian group on `0..n` identified with its invariant-factor normal form.
#[derive(Debug, Clone)]
pub struct Decomposition {
    pub group: FinAbGroup,
    pub identity: usize,
    /// Element indices generating the cyclic factors, one per invariant factor.
    pub generators: Vec<usize>,
    /// Coordinates of each element.
    pub coords: Vec<GroupElem>,
    /// Element at each coordinate index (inverse of `coords`).
    pub elements: Vec<usize>,
}

fn pow_by<F: Fn(usize, usize) -> usize>(op: &F, identity: usize, g: usize, mut k: u64) -> usize {
    let (mut acc, mut base) = (identity, g);
    while k > 0 {
        if k & 1 == 1 {
            acc = op(acc, base);
        }
        base = op(base, base);
        k >>= 1;
    }
    acc
}

/// Decomposes the abelian group `(0..n, op)` into cyclic factors.
///
/// `op` is trusted to be associative and commutative; the result is checked
/// to be a bijection onto the normal form compatible with multiplication by
/// every generator, which fails loudly if `op` is not an abelian group law.
pub fn decompose<F: Fn(usize, usize) -> usize>(n: usize, op: F) -> Result<Decomposition> {
    let bad = |m: &str| Error::InvalidGroup(m.to_string());
    if n == 0 {
        return Err(bad("empty carrier"));
    }
    let escaped = std::cell::Cell::new(false);
    let op = |a: usize, b: usize| -> usize {
        let c = op(a, b);
        if c < n {
            c
        } else {
            escaped.set(true);
            0
        }
    };
    let result = decompose_checked(n, &op);
    if escaped.get() {
        return Err(bad("operation leaves the carrier"));
    }
    result
}

fn decompose_checked<F: Fn(usize, usize) -> usize>(n: usize, op: &F) -> Result<Decomposition> {
    let bad = |m: &str| Error::InvalidGroup(m.to_string());
    let identity = (0..n)
        .find(|&e| op(e, 0) == 0 && (0..n).all(|x| op(e, x) == x))
        .ok_or_else(|| bad("no identity element"))?;
    let primes = factorize(n as u64);
    let order_of = |g: usize| -> u64 {
        let mut o = n as u64;
        for &(p, _) in &primes {
            while o.is_multiple_of(p) && pow_by(op, identity, g, o / p) == identity {
                o /= p;
            }
        }
        o
    };
    let orders: Vec<u64> = (0..n).map(order_of).collect();
    if (0..n).any(|g| pow_by(op, identity, g, orders[g]) != identity) {
        return Err(bad("element orders do not divide the group order"));
    }

    // Basis of each primary component, built greedily by maximal quotient order.
    let mut primary: Vec<(u64, Vec<(usize, u32)>)> = Vec::new();
    for &(p, _) in &primes {
        let part: Vec<usize> = (0..n).filter(|&g| factorize(orders[g]).iter().all(|&(q, _)| q == p)).collect();
        let mut in_sub = vec![false; n];
        in_sub[identity] = true;
        let mut sub = vec![identity];
        let mut basis = Vec::new();
        while sub.len() < part.len() {
            let quotient_exp = |g: usize| -> (u32, usize) {
                let (mut t, mut h) = (0u32, g);
                while !in_sub[h] {
                    h = pow_by(op, identity, h, p);
                    t += 1;
                }
                (t, h)
            };
            let (g, t, h) = part
                .iter()
                .map(|&g| {
                    let (t, h) = quotient_exp(g);
                    (g, t, h)
                })
                .max_by_key(|&(g, t, _)| (t, std::cmp::Reverse(g)))
                .expect("non-empty primary part");
            let pt = p.pow(t);
            let a = sub
                .iter()
                .copied()
                .find(|&a| pow_by(op, identity, a, pt) == h)
                .ok_or_else(|| bad("greedy basis step failed"))?;
            let a_inv = pow_by(op, identity, a, orders[a] - 1);
            let b = op(g, a_inv);
            if orders[b] != pt {
                return Err(bad("basis element has unexpected order"));
            }
            let mut grown = Vec::with_capacity(sub.len() * pt as usize);
            for &s in &sub {
                let mut x = s;
                for _ in 0..pt {
                    grown.push(x);
                    x = op(x, b);
                }
            }
            let mut fresh = 0;
            for &x in &grown {
                if !in_sub[x] {
                    in_sub[x] = true;
                    fresh += 1;
                }
            }
            if fresh + sub.len() != grown.len() {
                return Err(bad("subgroup growth overlapped"));
            }
            sub = grown;
            basis.push((b, t));
        }
        basis.sort_by(|x, y| y.1.cmp(&x.1));
        primary.push((p, basis));
    }

    // Invariant factors: combine the i-th largest primary cyclic factors.
    let rank = primary.iter().map(|(_, b)| b.len()).max().unwrap_or(0);
    let mut factors = vec![1u64; rank];
    let mut generators = vec![identity; rank];
    for (p, basis) in &primary {
        for (i, &(b, t)) in basis.iter().enumerate() {
            let slot = rank - 1 - i;
            factors[slot] *= p.pow(t);
            generators[slot] = op(generators[slot], b);
        }
    }
    let group = FinAbGroup::new(factors)?;
    if group.order() != n as u128 {
        return Err(bad("decomposition does not account for every element"));
    }

    let mut elements = vec![identity];
    for (&g, &d) in generators.iter().zip(group.invariant_factors()) {
        let mut next = Vec::with_capacity(elements.len() * d as usize);
        for &x in &elements {
            let mut y = x;
            for _ in 0..d {
                next.push(y);
                y = op(y, g);
            }
        }
        elements = next;
    }
    let mut coords: Vec<Option<GroupElem>> = vec![None; n];
    for (i, &x) in elements.iter().enumerate() {
        if coords[x].is_some() {
            return Err(bad("generators are not independent"));
        }
        coords[x] = Some(group.element_at(i));
    }
    let coords: Vec<GroupElem> = coords.into_iter().map(|c| c.expect("bijective")).collect();
    for (i, &g) in generators.iter().enumerate() {
        let mut unit = group.identity();
        unit.0[i] = 1;
        for x in 0..n {
            if coords[op(x, g)] != group.add(&coords[x], &unit) {
                return Err(bad("operation is not compatible with the coordinates"));
            }
        }
    }
    Ok(Decomposition {
        group,
        identity,
        generators,
        coords,
        elements,
    })
}

/// Invariant factors of a group given by its full operation table.
///
/// The table is validated: closure, identity, inverses, associativity and
/// commutativity.
pub fn invariant_factors_of(table: &[Vec<usize>]) -> Result<FinAbGroup> {
    let n = table.len();
    let bad = |m: String| Error::InvalidGroup(m);
    if n == 0 {
        return Err(bad("empty table".into()));
    }
    for (a, row) in table.iter().enumerate() {
        if row.len() != n {
            return Err(bad(format!("row {a} has {} entries, expected {n}", row.len())));
        }
        if let Some(&c) = row.iter().find(|&&c| c >= n) {
            return Err(bad(format!("entry {c} in row {a} is outside the carrier")));
        }
    }
    let e = (0..n)
        .find(|&e| (0..n).all(|x| table[e][x] == x && table[x][e] == x))
        .ok_or_else(|| bad("no identity element".into()))?;
    for a in 0..n {
        if !(0..n).any(|b| table[a][b] == e) {
            return Err(bad(format!("element {a} has no inverse")));
        }
        for b in 0..n {
            if table[a][b] != table[b][a] {
                return Err(bad(format!("not abelian: {a}*{b} != {b}*{a}")));
            }
        }
    }
    for a in 0..n {
        for b in 0..n {
            let ab = table[a][b];
            for c in 0..n {
                if table[ab][c] != table[a][table[b][c]] {
                    return Err(bad(format!("not associative at ({a}, {b}, {c})")));
                }
            }
        }
    }
    Ok(decompose(n, |a, b| table[a][b])?.group)
}

use std::fmt;

use serde::{Deserialize, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::fingroup::factorize;

/// Default bound on `q^N` for a field spec.
pub const DEFAULT_RING_CAP: u128 = 100_000;

/// One coefficient of the Eisenstein polynomial: an integer, or an element
/// of the unramified ring written low-to-high in `y`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Coefficient {
    Int(i64),
    Poly(Vec<i64>),
}

impl Coefficient {
    fn to_vec(&self) -> Vec<i64> {
        match self {
            Coefficient::Int(c) => vec![*c],
            Coefficient::Poly(v) => v.clone(),
        }
    }
}

/// Spec as written in JSON or TOML: `{"p":3, "u":[0,1], "E":[-3,1], "k":1}`.
///
/// `u` and `E` list coefficients low-to-high including the leading 1.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FieldSpecInput {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub p: u64,
    pub u: Vec<i64>,
    #[serde(rename = "E")]
    pub e_poly: Vec<Coefficient>,
    pub k: u32,
}

/// A validated finite extension of `Q_p` at level `k`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FieldSpec {
    pub name: Option<String>,
    pub p: u64,
    /// Monic, irreducible modulo `p`; degree `f`.
    pub u: Vec<i64>,
    /// Monic Eisenstein over the unramified ring; each entry has `f` coefficients.
    pub e_poly: Vec<Vec<i64>>,
    pub k: u32,
}

fn is_prime(p: u64) -> bool {
    p >= 2 && factorize(p) == vec![(p, 1)]
}

/// Remainder of `a` modulo the monic `b` over `F_p`.
fn poly_rem_mod_p(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    let mut r = a.to_vec();
    let db = b.len() - 1;
    while r.len() > db {
        let lead = r.pop().expect("non-empty");
        let shift = r.len() - db;
        for (i, &c) in b[..db].iter().enumerate() {
            r[shift + i] = (r[shift + i] + (p - c) * lead % p) % p;
        }
    }
    r
}

/// Irreducibility over `F_p` by trial division with monic polynomials of degree up to half.
pub fn irreducible_mod_p(coeffs: &[i64], p: u64) -> bool {
    let a: Vec<u64> = coeffs.iter().map(|&c| c.rem_euclid(p as i64) as u64).collect();
    let deg = a.len() - 1;
    for d in 1..=deg / 2 {
        let count = p.pow(d as u32);
        for idx in 0..count {
            let mut b = Vec::with_capacity(d + 1);
            let mut x = idx;
            for _ in 0..d {
                b.push(x % p);
                x /= p;
            }
            b.push(1);
            if poly_rem_mod_p(&a, &b, p).iter().all(|&c| c == 0) {
                return false;
            }
        }
    }
    true
}

impl FieldSpec {
    pub fn from_input(input: FieldSpecInput, ring_cap: u128) -> Result<FieldSpec> {
        let bad = |m: String| Error::InvalidSpec(m);
        let p = input.p;
        if !is_prime(p) {
            return Err(bad(format!("p = {p} is not prime")));
        }
        if input.u.len() < 2 || *input.u.last().expect("non-empty") != 1 {
            return Err(bad("u must be monic of degree at least 1".into()));
        }
        let f = input.u.len() - 1;
        if !irreducible_mod_p(&input.u, p) {
            return Err(bad(format!("u reducible modulo {p}")));
        }
        let e_poly: Vec<Vec<i64>> = input.e_poly.iter().map(Coefficient::to_vec).collect();
        if e_poly.len() < 2 {
            return Err(bad("E must have degree at least 1".into()));
        }
        let lead = e_poly.last().expect("non-empty");
        if lead.first() != Some(&1) || lead.iter().skip(1).any(|&c| c != 0) {
            return Err(bad("E must be monic".into()));
        }
        let mut padded = Vec::with_capacity(e_poly.len());
        for (i, c) in e_poly.iter().enumerate() {
            if c.len() > f {
                return Err(bad(format!("coefficient {i} of E has more than f = {f} entries")));
            }
            let mut c = c.clone();
            c.resize(f, 0);
            padded.push(c);
        }
        let pi = p as i64;
        for (i, c) in padded[..padded.len() - 1].iter().enumerate() {
            if c.iter().any(|&a| a.rem_euclid(pi) != 0) {
                return Err(bad(format!("E not Eisenstein: coefficient {i} is not divisible by {p}")));
            }
        }
        if padded[0].iter().all(|&a| (a / pi).rem_euclid(pi) == 0) {
            return Err(bad(format!("E not Eisenstein: constant term is divisible by {p}^2")));
        }
        let spec = FieldSpec {
            name: input.name,
            p,
            u: input.u,
            e_poly: padded,
            k: input.k,
        };
        let size = spec.ring_size();
        if size.is_none_or(|s| s > ring_cap) {
            return Err(Error::cap("q^N", size.unwrap_or(u128::MAX), ring_cap));
        }
        Ok(spec)
    }

    /// The input this spec was validated from, with integer coefficients where possible.
    pub fn to_input(&self) -> FieldSpecInput {
        FieldSpecInput {
            name: self.name.clone(),
            p: self.p,
            u: self.u.clone(),
            e_poly: self
                .e_poly
                .iter()
                .map(|c| {
                    if c.iter().skip(1).all(|&a| a == 0) {
                        Coefficient::Int(c[0])
                    } else {
                        Coefficient::Poly(c.clone())
                    }
                })
                .collect(),
            k: self.k,
        }
    }

    pub fn parse_json(text: &str, ring_cap: u128) -> Result<FieldSpec> {
        let input: FieldSpecInput =
            serde_json::from_str(text).map_err(|e| Error::InvalidSpec(format!("bad JSON field spec: {e}")))?;
        FieldSpec::from_input(input, ring_cap)
    }

    pub fn parse_toml(text: &str, ring_cap: u128) -> Result<FieldSpec> {
        let input: FieldSpecInput =
            toml::from_str(text).map_err(|e| Error::InvalidSpec(format!("bad TOML field spec: {e}")))?;
        FieldSpec::from_input(input, ring_cap)
    }

    /// The standard spec for `(p, f, e, k)`: `u` a fixed irreducible of degree
    /// `f` and `E = x^e - p`.
    pub fn standard(p: u64, f: usize, e: usize, k: u32) -> Result<FieldSpec> {
        let u = match (f, p) {
            (1, _) => vec![0, 1],
            (2, 2) => vec![1, 1, 1],
            (2, 3) => vec![1, 0, 1],
            (2, 5) => vec![2, 0, 1],
            _ => return Err(Error::InvalidSpec(format!("no standard u for p = {p}, f = {f}"))),
        };
        let mut e_poly = vec![Coefficient::Int(0); e + 1];
        e_poly[0] = Coefficient::Int(-(p as i64));
        e_poly[e] = Coefficient::Int(1);
        FieldSpec::from_input(
            FieldSpecInput {
                name: None,
                p,
                u,
                e_poly,
                k,
            },
            u128::MAX,
        )
    }

    pub fn f(&self) -> usize {
        self.u.len() - 1
    }

    pub fn e(&self) -> usize {
        self.e_poly.len() - 1
    }

    /// Size of the residue field.
    pub fn q(&self) -> u64 {
        self.p.pow(self.f() as u32)
    }

    /// Truncation length `N = k·e + 1`.
    pub fn big_n(&self) -> u32 {
        self.k * self.e() as u32 + 1
    }

    pub fn degree(&self) -> usize {
        self.e() * self.f()
    }

    /// `q^N`, if it fits.
    pub fn ring_size(&self) -> Option<u128> {
        (self.q() as u128).checked_pow(self.big_n())
    }

    pub fn label(&self) -> String {
        match &self.name {
            Some(n) => n.clone(),
            None => format!("p={} f={} e={} k={}", self.p, self.f(), self.e(), self.k),
        }
    }
}

impl fmt::Display for FieldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}

impl Serialize for FieldSpec {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        #[serde(untagged)]
        enum Out<'a> {
            Int(i64),
            Poly(&'a [i64]),
        }
        #[derive(Serialize)]
        struct Spec<'a> {
            p: u64,
            u: &'a [i64],
            #[serde(rename = "E")]
            e_poly: Vec<Out<'a>>,
            k: u32,
            f: usize,
            e: usize,
            q: u64,
            #[serde(rename = "N")]
            big_n: u32,
        }
        let e_poly = self
            .e_poly
            .iter()
            .map(|c| {
                if c.iter().skip(1).all(|&a| a == 0) {
                    Out::Int(c[0])
                } else {
                    Out::Poly(c)
                }
            })
            .collect();
        Spec {
            p: self.p,
            u: &self.u,
            e_poly,
            k: self.k,
            f: self.f(),
            e: self.e(),
            q: self.q(),
            big_n: self.big_n(),
        }
        .serialize(s)
    }
}

/// `p ∈ {2, 3, 5}`, `f, e ∈ {1, 2}`, `k ∈ {0, 1}`, in that nesting order.
pub fn default_grid() -> Vec<FieldSpec> {
    let mut out = Vec::new();
    for p in [2, 3, 5] {
        for f in [1, 2] {
            for e in [1, 2] {
                for k in [0, 1] {
                    out.push(FieldSpec::standard(p, f, e, k).expect("standard specs are valid"));
                }
            }
        }
    }
    out
}

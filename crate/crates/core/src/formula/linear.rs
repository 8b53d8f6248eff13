use std::collections::BTreeMap;
use std::ops::{Add, Neg, Sub};

use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};
use serde::ser::SerializeMap;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};

/// `Σ c_x·x + c` over the integers. Zero coefficients are never stored.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LinearTerm {
    coeffs: BTreeMap<String, BigInt>,
    constant: BigInt,
}

impl LinearTerm {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn constant(c: impl Into<BigInt>) -> Self {
        LinearTerm {
            coeffs: BTreeMap::new(),
            constant: c.into(),
        }
    }

    pub fn var(name: impl Into<String>) -> Self {
        Self::monomial(name, BigInt::from(1))
    }

    pub fn monomial(name: impl Into<String>, c: BigInt) -> Self {
        let mut coeffs = BTreeMap::new();
        if !c.is_zero() {
            coeffs.insert(name.into(), c);
        }
        LinearTerm {
            coeffs,
            constant: BigInt::zero(),
        }
    }

    pub fn coeff(&self, var: &str) -> BigInt {
        self.coeffs.get(var).cloned().unwrap_or_default()
    }

    pub fn constant_part(&self) -> &BigInt {
        &self.constant
    }

    pub fn coeffs(&self) -> impl Iterator<Item = (&String, &BigInt)> {
        self.coeffs.iter()
    }

    pub fn vars(&self) -> impl Iterator<Item = &String> {
        self.coeffs.keys()
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn mentions(&self, var: &str) -> bool {
        self.coeffs.contains_key(var)
    }

    pub fn scale(&self, k: &BigInt) -> LinearTerm {
        if k.is_zero() {
            return LinearTerm::zero();
        }
        LinearTerm {
            coeffs: self.coeffs.iter().map(|(x, c)| (x.clone(), c * k)).collect(),
            constant: &self.constant * k,
        }
    }

    pub fn add_constant(&self, k: &BigInt) -> LinearTerm {
        LinearTerm {
            coeffs: self.coeffs.clone(),
            constant: &self.constant + k,
        }
    }

    /// The term with `var` dropped.
    pub fn without(&self, var: &str) -> LinearTerm {
        let mut out = self.clone();
        out.coeffs.remove(var);
        out
    }

    pub fn substitute(&self, var: &str, replacement: &LinearTerm) -> LinearTerm {
        match self.coeffs.get(var) {
            None => self.clone(),
            Some(c) => self.without(var) + replacement.scale(c),
        }
    }

    /// Applies `f` to every coefficient and to the constant, dropping zeros.
    pub fn map_coefficients(&self, f: impl Fn(&BigInt) -> BigInt) -> LinearTerm {
        LinearTerm {
            coeffs: self
                .coeffs
                .iter()
                .map(|(x, c)| (x.clone(), f(c)))
                .filter(|(_, c)| !c.is_zero())
                .collect(),
            constant: f(&self.constant),
        }
    }

    pub fn eval(&self, value: impl Fn(&str) -> Option<BigInt>) -> Result<BigInt> {
        let mut acc = self.constant.clone();
        for (x, c) in &self.coeffs {
            let v = value(x).ok_or_else(|| Error::MissingVariable(x.clone()))?;
            acc += c * v;
        }
        Ok(acc)
    }

    fn add_monomial(&mut self, x: &str, c: &BigInt) {
        let entry = self.coeffs.entry(x.to_string()).or_default();
        *entry += c;
        if entry.is_zero() {
            self.coeffs.remove(x);
        }
    }
}

impl Add for LinearTerm {
    type Output = LinearTerm;

    fn add(mut self, rhs: LinearTerm) -> LinearTerm {
        for (x, c) in &rhs.coeffs {
            self.add_monomial(x, c);
        }
        self.constant += rhs.constant;
        self
    }
}

impl Sub for LinearTerm {
    type Output = LinearTerm;

    fn sub(self, rhs: LinearTerm) -> LinearTerm {
        self + (-rhs)
    }
}

impl Neg for LinearTerm {
    type Output = LinearTerm;

    fn neg(self) -> LinearTerm {
        LinearTerm {
            coeffs: self.coeffs.into_iter().map(|(x, c)| (x, -c)).collect(),
            constant: -self.constant,
        }
    }
}

/// Integers that fit in `i64` as JSON numbers, larger ones as decimal strings.
pub(crate) fn serialize_bigint<S: Serializer>(n: &BigInt, s: S) -> std::result::Result<S::Ok, S::Error> {
    match n.to_i64() {
        Some(v) => s.serialize_i64(v),
        None => s.serialize_str(&n.to_string()),
    }
}

struct JsonInt<'a>(&'a BigInt);

impl Serialize for JsonInt<'_> {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        serialize_bigint(self.0, s)
    }
}

struct Coeffs<'a>(&'a BTreeMap<String, BigInt>);

impl Serialize for Coeffs<'_> {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut map = s.serialize_map(Some(self.0.len()))?;
        for (x, c) in self.0 {
            map.serialize_entry(x, &JsonInt(c))?;
        }
        map.end()
    }
}

impl Serialize for LinearTerm {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut map = s.serialize_map(Some(2))?;
        map.serialize_entry("coeffs", &Coeffs(&self.coeffs))?;
        map.serialize_entry("constant", &JsonInt(&self.constant))?;
        map.end()
    }
}

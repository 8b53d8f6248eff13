//! Higher residue rings `O_{K,k}`, multiplicative congruence groups `G_{K,k}`,
//! the relation `Θ_k` and the digit interpretation, built exhaustively for a
//! finite extension `K = Q_p(y, x)` with `u(y) = 0` unramified and `E(x) = 0`
//! Eisenstein.

use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::fingroup::{cap_from_env, FinAbGroup};
use crate::thdecide::FbpStructure;

pub mod checks;
pub mod digits;
pub mod group;
pub mod interpret;
pub mod predicates;
pub mod ring;
pub mod spec;
pub mod suite;
pub mod theta;

pub use digits::{teichmuller, Digit, Digits};
pub use group::{g_inv, g_mul, g_pow, GElem, UnitGroup};
pub use ring::{ResidueElem, ResidueRing};
pub use spec::{default_grid, FieldSpec, DEFAULT_RING_CAP};

pub const DEFAULT_LIFT_CAP: u128 = 1_000_000;
pub const DEFAULT_EXHAUSTIVE_CAP: u128 = 10_000;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PadicConfig {
    /// Bound on `q^N`.
    pub ring_cap: u128,
    /// Bound on enumerated unit groups.
    pub element_cap: u128,
    /// Rings of lifts at precision `π^{2N}` are enumerated in full up to this size.
    pub lift_cap: u128,
    /// Pairwise and triple checks run exhaustively when `q^N` is at most this.
    pub exhaustive_cap: u128,
    /// Guard exponent override for ring arithmetic.
    pub guard: Option<u32>,
    /// Seed for sampled checks above the caps.
    pub seed: u64,
}

impl Default for PadicConfig {
    fn default() -> Self {
        PadicConfig {
            ring_cap: DEFAULT_RING_CAP,
            element_cap: cap_from_env(),
            lift_cap: DEFAULT_LIFT_CAP,
            exhaustive_cap: DEFAULT_EXHAUSTIVE_CAP,
            guard: None,
            seed: 0x7061_6469,
        }
    }
}

/// Everything built for one field spec.
#[derive(Debug, Clone)]
pub struct PadicModel {
    pub spec: FieldSpec,
    pub config: PadicConfig,
    /// `O_{K,k} = O_K / π^N`.
    pub ring: ResidueRing,
    pub digits: Digits,
    pub units: UnitGroup,
    /// `O_K / π^{N+e}`, where `p` is still visible as `π^e` times a unit.
    pub wide: ResidueRing,
    pub wide_digits: Digits,
    /// The class of `p` in `G_{K,k}`.
    pub p_class: GElem,
}

impl PadicModel {
    pub fn build(spec: &FieldSpec, config: &PadicConfig) -> Result<PadicModel> {
        let size = spec.ring_size().unwrap_or(u128::MAX);
        if size > config.ring_cap {
            return Err(Error::cap("q^N", size, config.ring_cap));
        }
        let n = spec.big_n();
        let ring = ResidueRing::new(spec, n, config.guard)?;
        let digits = Digits::new(spec, &ring)?;
        let units = UnitGroup::new(&ring, config.element_cap)?;
        let wide = ResidueRing::new(spec, n + spec.e() as u32, None)?;
        let wide_digits = Digits::new(spec, &wide)?;
        let mut model = PadicModel {
            spec: spec.clone(),
            config: config.clone(),
            ring,
            digits,
            units,
            wide,
            wide_digits,
            p_class: GElem { m: 0, unit: 0 },
        };
        let p = model.wide.from_int(spec.p as i64);
        model.p_class = model
            .class_in(&model.wide, &model.wide_digits, &p)
            .ok_or_else(|| Error::InvalidSpec("p vanishes modulo π^(N+e)".into()))?;
        Ok(model)
    }

    pub fn n(&self) -> u32 {
        self.ring.len()
    }

    pub fn e(&self) -> usize {
        self.ring.e()
    }

    pub fn q(&self) -> u64 {
        self.digits.q()
    }

    pub fn one(&self) -> GElem {
        GElem {
            m: 0,
            unit: self.units.one(),
        }
    }

    /// The class in `G_{K,k}` of an element `z` of a ring `big` of length
    /// at least `v(z) + N`, read off its digits; `None` for zero.
    pub fn class_in(&self, big: &ResidueRing, big_digits: &Digits, z: &ResidueElem) -> Option<GElem> {
        let v = big.valuation(z)?;
        let n = self.n();
        if v + n > big.len() {
            return None;
        }
        let d = big_digits.to_digits(big, z);
        let w = self.digits.from_digits(&self.ring, &d[v as usize..(v + n) as usize]);
        let unit = self.units.unit_of(&self.ring, &w).expect("leading digit is nonzero");
        Some(GElem { m: v as i64, unit })
    }

    /// `ρ(r)`: the class of the digit representative of a nonzero `r ∈ O_{K,k}`.
    pub fn rho(&self, r: &ResidueElem) -> Option<GElem> {
        let v = self.ring.valuation(r)?;
        let mut d = self.digits.to_digits(&self.ring, r);
        d.drain(..v as usize);
        d.resize(self.n() as usize, None);
        let w = self.digits.from_digits(&self.ring, &d);
        let unit = self.units.unit_of(&self.ring, &w).expect("leading digit is nonzero");
        Some(GElem { m: v as i64, unit })
    }

    /// `θ(g) = π^m·u mod π^N`, the residue paired with `g` by `Θ_k`;
    /// `None` when `v(g) < 0`.
    pub fn theta_value(&self, g: GElem) -> Option<ResidueElem> {
        if g.m < 0 {
            return None;
        }
        if g.m >= self.n() as i64 {
            return Some(self.ring.zero());
        }
        Some(self.ring.mul(&self.digits.pi_powers()[g.m as usize], &self.units.units[g.unit]))
    }

    pub fn mul(&self, a: GElem, b: GElem) -> GElem {
        g_mul(&self.ring, &self.units, a, b)
    }

    pub fn inverse(&self, a: GElem) -> GElem {
        g_inv(&self.units, a)
    }

    pub fn pow(&self, a: GElem, n: u64) -> GElem {
        g_pow(&self.ring, &self.units, a, n)
    }

    pub(crate) fn describe_g(&self, g: GElem) -> Value {
        g.describe(&self.units)
    }

    pub fn summary(&self) -> Value {
        json!({
            "spec": self.spec,
            "ring_size": self.ring.size().to_string(),
            "units": self.units.len(),
            "unit_group": self.units.group().to_string(),
            "invariant_factors": self.units.group().invariant_factors(),
            "mu": self.digits.mu().coords(),
            "pi": self.ring.pi().coords(),
            "p_class": self.p_class.describe(&self.units),
        })
    }
}

impl FbpStructure for PadicModel {
    type Elem = GElem;

    fn identity(&self) -> GElem {
        self.one()
    }

    fn op(&self, a: &GElem, b: &GElem) -> GElem {
        self.mul(*a, *b)
    }

    fn inv(&self, a: &GElem) -> GElem {
        self.inverse(*a)
    }

    fn leq(&self, a: &GElem, b: &GElem) -> bool {
        a.m <= b.m
    }

    fn tau(&self) -> GElem {
        GElem {
            m: 1,
            unit: self.units.one(),
        }
    }

    fn window(&self, w: i64) -> Vec<GElem> {
        (-w..=w)
            .flat_map(|m| (0..self.units.len()).map(move |unit| GElem { m, unit }))
            .collect()
    }

    fn order(&self, g: &GElem) -> Option<u64> {
        (g.m == 0).then(|| self.units.order_of(g.unit))
    }

    fn expected_torsion(&self) -> &FinAbGroup {
        self.units.group()
    }

    fn describe(&self, g: &GElem) -> Value {
        g.describe(&self.units)
    }
}

//! Units of `O_{K,k}` and the group `G_{K,k} ≅ Z × U` split by the fixed uniformizer.

use serde::Serialize;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::fingroup::{decompose, Decomposition, FinAbGroup, GroupElem};
use crate::padic::ring::{ResidueElem, ResidueRing};

const NOT_A_UNIT: u32 = u32::MAX;

#[derive(Debug, Clone)]
pub struct UnitGroup {
    /// Units in ring-index order.
    pub units: Vec<ResidueElem>,
    /// Ring index to position in `units`.
    position: Vec<u32>,
    pub decomposition: Decomposition,
    one: usize,
}

impl UnitGroup {
    pub fn new(ring: &ResidueRing, cap: u128) -> Result<UnitGroup> {
        let size = ring.size();
        if size > cap {
            return Err(Error::cap("ring elements", size, cap));
        }
        let mut units = Vec::new();
        let mut position = vec![NOT_A_UNIT; size as usize];
        for i in 0..size as usize {
            let a = ring.element_at(i);
            if ring.is_unit(&a) {
                position[i] = units.len() as u32;
                units.push(a);
            }
        }
        let lookup = |a: &ResidueElem| position[ring.index_of(a)] as usize;
        let decomposition = decompose(units.len(), |a, b| lookup(&ring.mul(&units[a], &units[b])))?;
        let one = lookup(&ring.one());
        Ok(UnitGroup {
            units,
            position,
            decomposition,
            one,
        })
    }

    pub fn len(&self) -> usize {
        self.units.len()
    }

    pub fn is_empty(&self) -> bool {
        self.units.is_empty()
    }

    pub fn group(&self) -> &FinAbGroup {
        &self.decomposition.group
    }

    pub fn one(&self) -> usize {
        self.one
    }

    /// Position of a ring element among the units.
    pub fn unit_of(&self, ring: &ResidueRing, a: &ResidueElem) -> Option<usize> {
        let p = self.position[ring.index_of(a)];
        (p != NOT_A_UNIT).then_some(p as usize)
    }

    pub fn mul(&self, ring: &ResidueRing, a: usize, b: usize) -> usize {
        self.unit_of(ring, &ring.mul(&self.units[a], &self.units[b])).expect("units are closed")
    }

    pub fn inv(&self, a: usize) -> usize {
        let d = &self.decomposition;
        let g = d.group.neg(&d.coords[a]);
        d.elements[d.group.index_of(&g)]
    }

    pub fn order_of(&self, a: usize) -> u64 {
        let d = &self.decomposition;
        d.group.order_of(&d.coords[a])
    }

    pub fn coords(&self, a: usize) -> &GroupElem {
        &self.decomposition.coords[a]
    }
}

/// `(m, u)`: the class of `π^m · u` in `K^* / (1 + M_{K,k})`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct GElem {
    pub m: i64,
    /// Position in `UnitGroup::units`.
    pub unit: usize,
}

impl GElem {
    pub fn describe(&self, units: &UnitGroup) -> Value {
        json!({ "m": self.m, "unit": units.units[self.unit].coords() })
    }
}

/// Group operations on `G_{K,k}`.
pub fn g_mul(ring: &ResidueRing, units: &UnitGroup, a: GElem, b: GElem) -> GElem {
    GElem {
        m: a.m + b.m,
        unit: units.mul(ring, a.unit, b.unit),
    }
}

pub fn g_inv(units: &UnitGroup, a: GElem) -> GElem {
    GElem {
        m: -a.m,
        unit: units.inv(a.unit),
    }
}

pub fn g_pow(ring: &ResidueRing, units: &UnitGroup, a: GElem, n: u64) -> GElem {
    let u = ring.pow(&units.units[a.unit], n);
    GElem {
        m: a.m * n as i64,
        unit: units.unit_of(ring, &u).expect("units are closed"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::padic::spec::FieldSpec;

    fn unit_group(json: &str) -> (ResidueRing, UnitGroup) {
        let s = FieldSpec::parse_json(json, u128::MAX).unwrap();
        let r = ResidueRing::new(&s, s.big_n(), None).unwrap();
        let u = UnitGroup::new(&r, u128::MAX).unwrap();
        (r, u)
    }

    #[test]
    fn small_unit_groups() {
        let (_, u) = unit_group(r#"{"p":3,"u":[0,1],"E":[-3,1],"k":1}"#);
        assert_eq!(u.group().invariant_factors(), &[6]);
        let (_, u) = unit_group(r#"{"p":2,"u":[1,1,1],"E":[-2,1],"k":0}"#);
        assert_eq!(u.group().invariant_factors(), &[3]);
        let (_, u) = unit_group(r#"{"p":2,"u":[0,1],"E":[-2,0,1],"k":1}"#);
        assert_eq!(u.len(), 4);
        // units of Z_2[√2] / (√2)^3: 1 + √2 has order 4
        assert_eq!(u.group().invariant_factors(), &[4]);
    }

    #[test]
    fn inverse_and_powers() {
        let (r, u) = unit_group(r#"{"p":5,"u":[0,1],"E":[-5,1],"k":1}"#);
        for a in 0..u.len() {
            assert_eq!(u.mul(&r, a, u.inv(a)), u.one());
            let g = GElem { m: 2, unit: a };
            let o = u.order_of(a);
            assert_eq!(g_pow(&r, &u, g, o), GElem { m: 2 * o as i64, unit: u.one() });
            assert_eq!(g_mul(&r, &u, g, g_inv(&u, g)), GElem { m: 0, unit: u.one() });
        }
    }
}

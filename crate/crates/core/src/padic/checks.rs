//! Per-spec verification: ring, digits, torsion, axioms, and the full report.

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use serde::Serialize;
use serde_json::{json, Value};

use crate::fingroup::FinAbGroup;
use crate::padic::interpret::{interpretation_checks, Interpretation};
use crate::padic::predicates::predicate_checks;
use crate::padic::theta::{build_theta, theta_checks};
use crate::padic::PadicModel;
use crate::report::{any_failed, Check, Status};
use crate::thdecide::{check_axioms, FbpModel};
use crate::Result;

const MAX_WITNESSES: usize = 5;
const SAMPLED_PAIRS: usize = 20_000;
/// Window of `∼`-classes used for axiom checks.
pub const AXIOM_WINDOW: i64 = 2;

pub fn ring_checks(model: &PadicModel) -> Vec<Check> {
    let ring = &model.ring;
    let size = ring.size() as usize;
    let mut checks = Vec::new();

    let roundtrip = (0..size).all(|i| ring.index_of(&ring.element_at(i)) == i);
    let expected = (model.q() as u128).pow(model.n());
    checks.push(Check::pass_if(
        "O_{K,k} has q^N elements",
        "ring-size",
        roundtrip && ring.size() == expected,
        vec![json!({ "enumerated": size, "q": model.q(), "N": model.n() })],
    ));

    let n = model.n();
    let exhaustive = ring.size() <= model.config.exhaustive_cap;
    let mut bad = Vec::new();
    let test = |a: usize, b: usize, bad: &mut Vec<Value>| {
        let (x, y) = (ring.element_at(a), ring.element_at(b));
        let (vx, vy) = (ring.valuation(&x), ring.valuation(&y));
        let vp = ring.valuation(&ring.mul(&x, &y));
        let expect = match (vx, vy) {
            (Some(i), Some(j)) if i + j < n => Some(i + j),
            _ => None,
        };
        let vs = ring.valuation(&ring.add(&x, &y));
        let ultra = match (vx, vy, vs) {
            (_, _, None) => true,
            (Some(i), Some(j), Some(s)) => s >= i.min(j),
            (None, Some(j), Some(s)) => s >= j,
            (Some(i), None, Some(s)) => s >= i,
            (None, None, Some(_)) => false,
        };
        if (vp != expect || !ultra) && bad.len() < MAX_WITNESSES {
            bad.push(json!({ "a": x.coords(), "b": y.coords() }));
        }
    };
    let pairs = if exhaustive {
        for a in 0..size {
            for b in 0..size {
                test(a, b, &mut bad);
            }
        }
        size * size
    } else {
        let mut rng = StdRng::seed_from_u64(model.config.seed);
        for _ in 0..SAMPLED_PAIRS {
            test(rng.gen_range(0..size), rng.gen_range(0..size), &mut bad);
        }
        SAMPLED_PAIRS
    };
    let ok = bad.is_empty();
    let mut wit = vec![json!({ "pairs": pairs, "exhaustive": exhaustive })];
    wit.extend(bad);
    checks.push(Check::pass_if(
        "v(ab) = v(a) + v(b) below N and v(a + b) >= min(v(a), v(b))",
        "valuation-multiplicative",
        ok,
        wit,
    ));
    checks
}

pub fn digit_checks(model: &PadicModel) -> Vec<Check> {
    let ring = &model.ring;
    let digits = &model.digits;
    let q = model.q();
    let mut checks = Vec::new();

    let mu = digits.mu();
    let mut order = 1u64;
    let mut x = mu.clone();
    while x != ring.one() && order <= q {
        x = ring.mul(&x, mu);
        order += 1;
    }
    let teich = digits.teichmuller_powers();
    let fixed = teich.iter().all(|t| ring.pow(t, q) == *t && ring.valuation(t) == Some(0));
    let residues: std::collections::BTreeSet<_> = teich.iter().map(|t| ring.reduce(t, &digits.field)).collect();
    checks.push(Check::pass_if(
        "mu has order q - 1 and its powers are fixed by the q-th power map",
        "teichmuller-order",
        order == q - 1 && fixed && residues.len() as u64 == q - 1,
        vec![json!({ "mu": mu.coords(), "order": order, "q_minus_1": q - 1, "fixpoints": fixed })],
    ));

    let size = ring.size() as usize;
    let mut bad = Vec::new();
    for i in 0..size {
        let z = ring.element_at(i);
        let d = digits.to_digits(ring, &z);
        let valid = d.iter().all(|c| c.is_none_or(|c| (c as u64) < q - 1));
        if (!valid || digits.from_digits(ring, &d) != z) && bad.len() < MAX_WITNESSES {
            bad.push(json!({ "element": z.coords(), "digits": d }));
        }
        let dv = digits.digits_at(model.n(), i);
        if digits.to_digits(ring, &digits.from_digits(ring, &dv)) != dv && bad.len() < MAX_WITNESSES {
            bad.push(json!({ "digits": dv }));
        }
    }
    checks.push(Check::pass_if(
        "to_digits and from_digits are inverse bijections",
        "digit-bijection",
        bad.is_empty(),
        if bad.is_empty() { vec![json!({ "elements": size })] } else { bad },
    ));
    checks
}

/// Output of `padic torsion`.
#[derive(Debug, Clone, Serialize)]
pub struct TorsionReport {
    pub order: u128,
    pub invariant_factors: Vec<u64>,
    pub formula_order: u128,
    pub status: Status,
}

/// `(p^f - 1)(p^f)^{ke}`.
pub fn formula_order(model: &PadicModel) -> u128 {
    let q = model.q() as u128;
    (q - 1) * q.pow(model.spec.k * model.e() as u32)
}

pub fn torsion_checks(model: &PadicModel) -> (TorsionReport, Vec<Check>) {
    let h = model.units.group();
    let order = h.order();
    let formula = formula_order(model);
    let mut checks = vec![Check::pass_if(
        "the torsion of G_{K,k} has order (p^f - 1)(p^f)^{ke}",
        "torsion-order",
        order == formula && order == model.units.len() as u128,
        vec![json!({ "enumerated": order.to_string(), "formula": formula.to_string(), "invariant_factors": h.invariant_factors() })],
    )];
    if model.spec.k == 0 {
        let expected = FinAbGroup::cyclic(model.q() - 1);
        checks.push(Check::pass_if(
            "for k = 0 the torsion is the multiplicative group of the residue field, cyclic of order q - 1",
            "k0-exact-sequence",
            *h == expected,
            vec![json!({ "computed": h.invariant_factors(), "expected": expected.invariant_factors() })],
        ));
    }
    let report = TorsionReport {
        order,
        invariant_factors: h.invariant_factors().to_vec(),
        formula_order: formula,
        status: if any_failed(&checks) { Status::Fail } else { Status::Pass },
    };
    (report, checks)
}

fn prefixed(prefix: &str, checks: Vec<Check>) -> impl Iterator<Item = Check> + '_ {
    checks.into_iter().map(move |mut c| {
        c.paper_ref = format!("{prefix}/{}", c.paper_ref);
        c
    })
}

/// Axioms on `H × Z` for the computed unit group `H`, the same axioms on
/// `G_{K,k}` itself, and the exponent claim.
pub fn axiom_checks(model: &PadicModel) -> Vec<Check> {
    let h = model.units.group().clone();
    let mut checks: Vec<Check> = prefixed("hz", check_axioms(&FbpModel::standard(h.clone()), AXIOM_WINDOW)).collect();
    checks.extend(prefixed("g", check_axioms(model, AXIOM_WINDOW)));

    let q = model.q();
    let bound = (q - 1) * model.spec.p.pow(model.spec.k);
    let divides = bound.is_multiple_of(h.exponent());
    let wit = vec![json!({ "exponent": h.exponent(), "claimed_multiple": bound, "divides": divides, "e": model.e() })];
    checks.push(if model.e() == 1 {
        Check::pass_if("the exponent of H divides (p^f - 1) p^k", "exponent-claim", divides, wit)
    } else {
        Check::new("the exponent of H divides (p^f - 1) p^k", "exponent-claim", Status::Reported, wit)
    });
    checks
}

/// Every check for one model, in a fixed order.
pub fn all_checks(model: &PadicModel) -> Result<Vec<Check>> {
    let mut checks = ring_checks(model);
    checks.extend(digit_checks(model));
    checks.extend(torsion_checks(model).1);
    let theta = build_theta(model)?;
    checks.extend(theta_checks(model, &theta));
    let interp = Interpretation::new(model);
    checks.extend(interpretation_checks(model, &interp, &theta));
    checks.extend(predicate_checks(model));
    checks.extend(axiom_checks(model));
    Ok(checks)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::padic::{FieldSpec, PadicConfig};

    #[test]
    fn torsion_examples() {
        for (json, order, factors) in [
            (r#"{"p":3,"u":[0,1],"E":[3,1],"k":1}"#, 6, vec![6]),
            (r#"{"p":2,"u":[1,1,1],"E":[2,1],"k":0}"#, 3, vec![3]),
            (r#"{"p":2,"u":[0,1],"E":[-2,0,1],"k":1}"#, 4, vec![4]),
        ] {
            let s = FieldSpec::parse_json(json, u128::MAX).unwrap();
            let m = PadicModel::build(&s, &PadicConfig::default()).unwrap();
            let (r, checks) = torsion_checks(&m);
            assert_eq!((r.order, r.formula_order, r.invariant_factors), (order, order, factors));
            assert_eq!(r.status, Status::Pass);
            assert!(!any_failed(&checks));
        }
    }

    #[test]
    fn everything_passes_on_small_fields() {
        for json in [r#"{"p":3,"u":[0,1],"E":[-3,1],"k":1}"#, r#"{"p":2,"u":[0,1],"E":[-2,0,1],"k":1}"#] {
            let s = FieldSpec::parse_json(json, u128::MAX).unwrap();
            let m = PadicModel::build(&s, &PadicConfig::default()).unwrap();
            for c in all_checks(&m).unwrap() {
                assert_ne!(c.status, Status::Fail, "{c:?}");
            }
        }
    }
}

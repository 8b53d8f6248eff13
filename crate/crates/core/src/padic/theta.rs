//! `Θ_k` from its definition: `(g, α)` is related when some `z ∈ O_K` has
//! multiplicative class `g` and residue `α`. Lifts are taken modulo `π^{2N}`,
//! which fixes both the class (for `v(z) < N`) and the residue.

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use serde_json::{json, Value};

use crate::error::Result;
use crate::padic::digits::Digits;
use crate::padic::group::GElem;
use crate::padic::ring::{ResidueElem, ResidueRing};
use crate::padic::PadicModel;
use crate::report::{Check, Status};

const MAX_WITNESSES: usize = 5;
const SAMPLES_PER_CLASS: usize = 2;
const TAIL_SAMPLES: usize = 200;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LiftMethod {
    Exhaustive,
    Sampled,
}

#[derive(Debug, Clone)]
pub struct ThetaTable {
    n: u32,
    units: usize,
    /// Ring index of the residue paired with `(m, u)`, at `m·|U| + u`.
    alpha: Vec<Option<usize>>,
    pub method: LiftMethod,
    pub lifts_examined: u64,
    /// Classes seen with two different residues.
    pub conflicts: Vec<Value>,
    /// Lifts with `v(z) >= N` and nonzero residue.
    pub tail_violations: Vec<Value>,
    /// Sampled lifts whose class came out different from the one they were built from.
    pub class_mismatches: Vec<Value>,
    /// Lifts with `v(z) >= N` examined.
    pub tail_lifts: u64,
}

impl ThetaTable {
    pub fn alpha(&self, g: GElem) -> Option<usize> {
        if g.m < 0 || g.m >= self.n as i64 {
            return None;
        }
        self.alpha[g.m as usize * self.units + g.unit]
    }

    /// Recorded pairs with `0 <= v(g) < N`, in class order.
    pub fn entries(&self) -> impl Iterator<Item = (GElem, Option<usize>)> + '_ {
        self.alpha.iter().enumerate().map(move |(i, a)| {
            (
                GElem {
                    m: (i / self.units) as i64,
                    unit: i % self.units,
                },
                *a,
            )
        })
    }

    fn record(&mut self, model: &PadicModel, g: GElem, a: usize) {
        let slot = &mut self.alpha[g.m as usize * self.units + g.unit];
        match *slot {
            None => *slot = Some(a),
            Some(b) if b != a
                && self.conflicts.len() < MAX_WITNESSES => {
                    let ring = &model.ring;
                    self.conflicts.push(json!({
                        "g": model.describe_g(g),
                        "alphas": [ring.element_at(b).coords(), ring.element_at(a).coords()],
                    }));
                }
            _ => {}
        }
    }

    fn record_tail(&mut self, model: &PadicModel, big: &ResidueRing, z: &ResidueElem) {
        self.tail_lifts += 1;
        let a = big.reduce(z, &model.ring);
        if !model.ring.is_zero(&a) && self.tail_violations.len() < MAX_WITNESSES {
            self.tail_violations.push(json!({ "lift": z.coords(), "alpha": a.coords() }));
        }
    }
}

/// Builds the table by enumerating every lift modulo `π^{2N}` when there are
/// at most `lift_cap` of them, and otherwise from seeded random lifts of each class.
pub fn build_theta(model: &PadicModel) -> Result<ThetaTable> {
    let n = model.n();
    let big = ResidueRing::new(&model.spec, 2 * n, None)?;
    let big_digits = Digits::new(&model.spec, &big)?;
    let units = model.units.len();
    let exhaustive = big.size() <= model.config.lift_cap;
    let mut table = ThetaTable {
        n,
        units,
        alpha: vec![None; n as usize * units],
        method: if exhaustive { LiftMethod::Exhaustive } else { LiftMethod::Sampled },
        lifts_examined: 0,
        conflicts: Vec::new(),
        tail_violations: Vec::new(),
        class_mismatches: Vec::new(),
        tail_lifts: 0,
    };
    let classify = |table: &mut ThetaTable, z: &ResidueElem| -> Option<GElem> {
        table.lifts_examined += 1;
        match big.valuation(z) {
            Some(v) if v < n => {
                let g = model.class_in(&big, &big_digits, z).expect("v(z) + N <= 2N");
                let a = model.ring.index_of(&big.reduce(z, &model.ring));
                table.record(model, g, a);
                Some(g)
            }
            _ => {
                table.record_tail(model, &big, z);
                None
            }
        }
    };
    if exhaustive {
        for i in 0..big.size() as usize {
            classify(&mut table, &big.element_at(i));
        }
    } else {
        let mut rng = StdRng::seed_from_u64(model.config.seed);
        let size = big.size() as usize;
        let pi_n = big_digits.pi_powers()[n as usize].clone();
        for m in 0..n {
            let pi_m = &big_digits.pi_powers()[m as usize];
            for unit in 0..units {
                let w = big.lift(&model.units.units[unit]);
                for _ in 0..SAMPLES_PER_CLASS {
                    let noise = big.mul(&pi_n, &big.element_at(rng.gen_range(0..size)));
                    let z = big.mul(pi_m, &big.add(&w, &noise));
                    let want = GElem { m: m as i64, unit };
                    let got = classify(&mut table, &z);
                    if got != Some(want) && table.class_mismatches.len() < MAX_WITNESSES {
                        table.class_mismatches.push(json!({ "lift": z.coords(), "built_from": model.describe_g(want) }));
                    }
                }
            }
        }
        for _ in 0..TAIL_SAMPLES {
            let z = big.mul(&pi_n, &big.element_at(rng.gen_range(0..size)));
            classify(&mut table, &z);
        }
    }
    Ok(table)
}

fn method_name(m: LiftMethod) -> &'static str {
    match m {
        LiftMethod::Exhaustive => "all lifts modulo pi^(2N)",
        LiftMethod::Sampled => "seeded lifts of every class modulo pi^(2N)",
    }
}

/// Table invariants and the comparison with the valuation-only description of `Θ_k`.
pub fn theta_checks(model: &PadicModel, table: &ThetaTable) -> Vec<Check> {
    let ring = &model.ring;
    let n = model.n() as i64;
    let method = json!({ "method": method_name(table.method), "lifts": table.lifts_examined });
    let mut checks = Vec::new();

    let mut wit = vec![method.clone()];
    wit.extend(table.conflicts.iter().cloned());
    wit.extend(table.class_mismatches.iter().cloned());
    checks.push(Check::pass_if(
        "Theta restricted to 0 <= v(g) < N is single-valued",
        "theta-single-valued",
        table.conflicts.is_empty() && table.class_mismatches.is_empty(),
        wit,
    ));

    let missing: Vec<Value> = table
        .entries()
        .filter(|(_, a)| a.is_none())
        .take(MAX_WITNESSES)
        .map(|(g, _)| model.describe_g(g))
        .collect();
    let mut wit = vec![json!({ "classes": table.alpha.len() })];
    let ok = missing.is_empty();
    wit.extend(missing);
    checks.push(Check::pass_if("every class with 0 <= v(g) < N has a lift", "theta-total", ok, wit));

    let mut wit = vec![json!({ "tail_lifts": table.tail_lifts })];
    wit.extend(table.tail_violations.iter().cloned());
    checks.push(Check::pass_if(
        "lifts with v(z) >= N have residue 0, and no class with v(g) < 0 has a lift",
        "theta-tail",
        table.tail_violations.is_empty(),
        wit,
    ));

    // The residue recorded for (m, u) is π^m·u.
    let mut bad = Vec::new();
    for (g, a) in table.entries() {
        if let Some(a) = a {
            let expect = model.theta_value(g).expect("m >= 0");
            if ring.index_of(&expect) != a && bad.len() < MAX_WITNESSES {
                bad.push(json!({ "g": model.describe_g(g), "alpha": ring.element_at(a).coords() }));
            }
        }
    }
    checks.push(Check::pass_if(
        "the residue paired with (m, u) is pi^m * u mod pi^N",
        "theta-projection",
        bad.is_empty(),
        bad,
    ));

    // RHS set: (α = 0 ∧ v(g) >= N) ∨ (α != 0 ∧ v(g) <= N - 1).
    let rhs = |m: i64, alpha_zero: bool, bound: i64| (alpha_zero && m >= bound) || (!alpha_zero && m < bound);
    let mut bad = Vec::new();
    for (g, a) in table.entries() {
        if let Some(a) = a {
            if !rhs(g.m, a == 0, n) && bad.len() < MAX_WITNESSES {
                bad.push(json!({ "g": model.describe_g(g), "alpha": ring.element_at(a).coords() }));
            }
        }
    }
    let ok = bad.is_empty() && table.tail_violations.is_empty();
    checks.push(Check::pass_if(
        "Theta is contained in {(g, a) : (a = 0 and v(g) >= N) or (a != 0 and v(g) <= N - 1)}",
        "lemma-theta-containment",
        ok,
        bad,
    ));

    // Equality: count RHS pairs outside Θ for v(g) in [-1, N - 1].
    let nonzero = ring.size() - 1;
    let mut counterexamples = Vec::new();
    let one = model.units.one();
    counterexamples.push(json!({
        "g": model.describe_g(GElem { m: -1, unit: one }),
        "alpha": ring.one().coords(),
        "reason": "v(g) < 0 has no integral lift",
    }));
    for (g, a) in table.entries() {
        if counterexamples.len() >= MAX_WITNESSES {
            break;
        }
        if let Some(a) = a {
            if let Some(b) = (1..ring.size() as usize).find(|&b| b != a) {
                counterexamples.push(json!({
                    "g": model.describe_g(g),
                    "alpha": ring.element_at(b).coords(),
                    "theta_alpha": ring.element_at(a).coords(),
                }));
            }
        }
    }
    let extra_nonnegative = table.alpha.len() as u128 * (nonzero - 1);
    checks.push(Check::new(
        "Theta equals the valuation-condition set",
        "lemma-theta-equality",
        Status::Reported,
        vec![
            json!({
                "equal": false,
                "equal_on_nonnegative_valuations": extra_nonnegative == 0,
                "rhs_pairs_per_class": nonzero.to_string(),
                "theta_pairs_per_class": 1,
                "extra_pairs_with_0_le_v_lt_N": extra_nonnegative.to_string(),
            }),
            json!({ "counterexamples": counterexamples }),
        ],
    ));

    // The same condition with k + 1 in place of N.
    let k1 = model.spec.k as i64 + 1;
    let mut bad = Vec::new();
    let mut violations = 0u64;
    for (g, a) in table.entries() {
        if let Some(a) = a {
            if !rhs(g.m, a == 0, k1) {
                violations += 1;
                if bad.len() < MAX_WITNESSES {
                    bad.push(json!({ "g": model.describe_g(g), "alpha": ring.element_at(a).coords() }));
                }
            }
        }
    }
    let mut wit = vec![json!({
        "k_plus_1": k1,
        "N": n,
        "coincides_with_N": k1 == n,
        "theta_pairs_outside": violations,
    })];
    wit.extend(bad);
    checks.push(Check::new(
        "containment with v(g) <= k and v(g) >= k + 1 read literally",
        "lemma-theta-literal",
        Status::Reported,
        wit,
    ));
    checks
}

/// The table as a JSON list of `{g, alpha}` plus the tail rule.
pub fn theta_json(model: &PadicModel, table: &ThetaTable) -> Value {
    let entries: Vec<Value> = table
        .entries()
        .map(|(g, a)| {
            json!({
                "m": g.m,
                "unit": model.units.units[g.unit].coords(),
                "alpha": a.map(|a| model.ring.element_at(a).coords().to_vec()),
            })
        })
        .collect();
    json!({
        "method": method_name(table.method),
        "lifts_examined": table.lifts_examined,
        "entries": entries,
        "tail": format!("v(g) >= {} pairs with 0", model.n()),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::padic::{FieldSpec, PadicConfig};

    fn model(json: &str) -> PadicModel {
        PadicModel::build(&FieldSpec::parse_json(json, u128::MAX).unwrap(), &PadicConfig::default()).unwrap()
    }

    #[test]
    fn three_adic_level_zero() {
        let m = model(r#"{"p":3,"u":[0,1],"E":[-3,1],"k":0}"#);
        let t = build_theta(&m).unwrap();
        assert_eq!(t.method, LiftMethod::Exhaustive);
        assert_eq!(t.lifts_examined, 9);
        let one = m.units.unit_of(&m.ring, &m.ring.one()).unwrap();
        let two = m.units.unit_of(&m.ring, &m.ring.from_int(2)).unwrap();
        assert_eq!(t.alpha(GElem { m: 0, unit: one }), Some(1));
        assert_eq!(t.alpha(GElem { m: 0, unit: two }), Some(2));
        assert_eq!(t.tail_lifts, 3);
        let checks = theta_checks(&m, &t);
        for c in &checks {
            assert_ne!(c.status, Status::Fail, "{c:?}");
        }
        let eq = checks.iter().find(|c| c.paper_ref == "lemma-theta-equality").unwrap();
        assert_eq!(eq.status, Status::Reported);
    }

    #[test]
    fn sampled_and_exhaustive_agree() {
        let m = model(r#"{"p":2,"u":[0,1],"E":[-2,0,1],"k":1}"#);
        let full = build_theta(&m).unwrap();
        let mut cfg = m.config.clone();
        cfg.lift_cap = 1;
        let sampled_model = PadicModel { config: cfg, ..m.clone() };
        let sampled = build_theta(&sampled_model).unwrap();
        assert_eq!(sampled.method, LiftMethod::Sampled);
        assert_eq!(full.alpha, sampled.alpha);
        assert!(full.conflicts.is_empty() && sampled.class_mismatches.is_empty());
        let literal = theta_checks(&m, &full).into_iter().find(|c| c.paper_ref == "lemma-theta-literal").unwrap();
        assert_eq!(literal.witnesses[0]["theta_pairs_outside"], 4);
    }
}

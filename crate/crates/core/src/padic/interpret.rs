//! The digit representatives `R ⊂ G_{K,k}` with `⊕` and `⊙`, and the
//! relation `Θ⁺` defined from valuations alone.

use std::collections::HashMap;

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use serde_json::{json, Value};

use crate::padic::group::GElem;
use crate::padic::theta::ThetaTable;
use crate::padic::PadicModel;
use crate::report::{Check, Status};

const MAX_WITNESSES: usize = 5;
const SAMPLED_PAIRS: usize = 20_000;
const SAMPLED_TRIPLES: usize = 20_000;
/// Addition is tabulated up to this many ring elements.
const ADD_TABLE_LIMIT: usize = 4096;

/// `R` with `ρ` and its partial inverse, indexed by ring index; index 0 is the zero residue.
#[derive(Debug, Clone)]
pub struct Interpretation {
    /// Ring indices of the nonzero digit representatives, in digit-vector order.
    pub reps: Vec<usize>,
    /// `ρ` at each ring index; `None` at zero.
    pub rho: Vec<Option<GElem>>,
    /// Ring index of `θ(g)` for `g = (m, u)` with `0 <= m < N`, at `m·|U| + u`.
    theta_index: Vec<usize>,
    units: usize,
    n: u32,
}

impl Interpretation {
    pub fn new(model: &PadicModel) -> Interpretation {
        let ring = &model.ring;
        let size = ring.size() as usize;
        let reps: Vec<usize> = (1..size)
            .map(|i| ring.index_of(&model.digits.from_digits(ring, &model.digits.digits_at(model.n(), i))))
            .collect();
        let rho = (0..size).map(|i| model.rho(&ring.element_at(i))).collect();
        let units = model.units.len();
        let theta_index = (0..model.n() as usize * units)
            .map(|i| {
                let g = GElem {
                    m: (i / units) as i64,
                    unit: i % units,
                };
                ring.index_of(&model.theta_value(g).expect("m >= 0"))
            })
            .collect();
        Interpretation {
            reps,
            rho,
            theta_index,
            units,
            n: model.n(),
        }
    }

    /// Ring index of the residue named by `g`; zero for `v(g) >= N`.
    pub fn back(&self, g: GElem) -> Option<usize> {
        if g.m < 0 {
            None
        } else if g.m >= self.n as i64 {
            Some(0)
        } else {
            Some(self.theta_index[g.m as usize * self.units + g.unit])
        }
    }

    /// `[r_1] ⊙ [r_2]`: product in `G_{K,k}`, read back in `R ∪ {zero}`.
    pub fn odot(&self, model: &PadicModel, a: usize, b: usize) -> usize {
        match (self.rho[a], self.rho[b]) {
            (Some(x), Some(y)) => self.back(model.mul(x, y)).expect("valuations add"),
            _ => 0,
        }
    }
}

fn add_index(model: &PadicModel, a: usize, b: usize) -> usize {
    let ring = &model.ring;
    ring.index_of(&ring.add(&ring.element_at(a), &ring.element_at(b)))
}

pub fn interpretation_checks(model: &PadicModel, interp: &Interpretation, theta: &ThetaTable) -> Vec<Check> {
    let ring = &model.ring;
    let size = ring.size() as usize;
    let exhaustive = ring.size() <= model.config.exhaustive_cap;
    let mut checks = Vec::new();
    let mut rng = StdRng::seed_from_u64(model.config.seed ^ 0x5eed);

    let mut seen = vec![false; size];
    let mut dup = 0;
    for &r in &interp.reps {
        if r == 0 || seen[r] {
            dup += 1;
        }
        seen[r] = true;
    }
    checks.push(Check::pass_if(
        "R has q^N - 1 elements",
        "rep-set-size",
        interp.reps.len() as u128 == ring.size() - 1 && dup == 0,
        vec![json!({ "size": interp.reps.len(), "expected": (ring.size() - 1).to_string() })],
    ));

    let mut images: HashMap<GElem, usize> = HashMap::new();
    let mut bad = Vec::new();
    for &r in &interp.reps {
        let g = interp.rho[r].expect("nonzero");
        if let Some(other) = images.insert(g, r) {
            if bad.len() < MAX_WITNESSES {
                bad.push(json!({
                    "r1": ring.element_at(other).coords(),
                    "r2": ring.element_at(r).coords(),
                    "g": model.describe_g(g),
                }));
            }
        }
    }
    checks.push(Check::pass_if(
        "rho: R -> G is injective",
        "rho-injective",
        bad.is_empty() && images.len() == interp.reps.len(),
        bad,
    ));

    let mut bad = Vec::new();
    for &r in &interp.reps {
        let g = interp.rho[r].expect("nonzero");
        let recorded = theta.alpha(g);
        if (interp.back(g) != Some(r) || recorded != Some(r)) && bad.len() < MAX_WITNESSES {
            bad.push(json!({ "r": ring.element_at(r).coords(), "g": model.describe_g(g) }));
        }
    }
    checks.push(Check::pass_if(
        "(rho(r), r) lies in Theta for every r in R",
        "rho-section",
        bad.is_empty(),
        bad,
    ));

    // ⊙ against ring multiplication, and the unit and zero elements.
    let one = ring.index_of(&ring.one());
    let zero_class = GElem {
        m: model.n() as i64,
        unit: model.units.one(),
    };
    let mut bad = Vec::new();
    if interp.back(zero_class) != Some(0) {
        bad.push(json!({ "zero": "class of pi^N does not read back as 0" }));
    }
    let compare = |a: usize, b: usize, bad: &mut Vec<Value>| {
        let prod = ring.index_of(&ring.mul(&ring.element_at(a), &ring.element_at(b)));
        if interp.odot(model, a, b) != prod && bad.len() < MAX_WITNESSES {
            bad.push(json!({ "r1": ring.element_at(a).coords(), "r2": ring.element_at(b).coords() }));
        }
    };
    for a in 0..size {
        if interp.odot(model, one, a) != a && bad.len() < MAX_WITNESSES {
            bad.push(json!({ "unit_element_fails_at": ring.element_at(a).coords() }));
        }
    }
    let pairs = if exhaustive {
        for a in 0..size {
            for b in 0..size {
                compare(a, b, &mut bad);
            }
        }
        size * size
    } else {
        for _ in 0..SAMPLED_PAIRS {
            compare(rng.gen_range(0..size), rng.gen_range(0..size), &mut bad);
        }
        SAMPLED_PAIRS
    };
    let ok = bad.is_empty();
    let mut wit = vec![json!({ "pairs": pairs, "exhaustive": exhaustive })];
    wit.extend(bad);
    checks.push(Check::pass_if(
        "[r1] odot [r2] matches the ring product, [1] is its unit and [pi^N] reads back as 0",
        "odot-matches-ring-product",
        ok,
        wit,
    ));

    checks.push(distributivity(model, interp, exhaustive, &mut rng));
    checks.extend(theta_plus(model, interp, theta));
    checks
}

/// `([r1] ⊕ [r2]) ⊙ [r3] = ([r1] ⊙ [r3]) ⊕ ([r2] ⊙ [r3])` over `R ∪ {zero}`.
fn distributivity(model: &PadicModel, interp: &Interpretation, exhaustive: bool, rng: &mut StdRng) -> Check {
    let ring = &model.ring;
    let size = ring.size() as usize;
    let table: Option<Vec<u32>> = (size <= ADD_TABLE_LIMIT).then(|| {
        (0..size * size)
            .map(|i| add_index(model, i / size, i % size) as u32)
            .collect()
    });
    let add = |a: usize, b: usize| match &table {
        Some(t) => t[a * size + b] as usize,
        None => add_index(model, a, b),
    };
    let mut bad = Vec::new();
    let mut triples = 0u64;
    if exhaustive {
        for c in 0..size {
            let col: Vec<usize> = (0..size).map(|a| interp.odot(model, a, c)).collect();
            for a in 0..size {
                for b in 0..size {
                    if col[add(a, b)] != add(col[a], col[b]) && bad.len() < MAX_WITNESSES {
                        bad.push(json!([ring.element_at(a).coords(), ring.element_at(b).coords(), ring.element_at(c).coords()]));
                    }
                }
            }
            triples += (size * size) as u64;
        }
    } else {
        for _ in 0..SAMPLED_TRIPLES {
            let (a, b, c) = (rng.gen_range(0..size), rng.gen_range(0..size), rng.gen_range(0..size));
            let lhs = interp.odot(model, add(a, b), c);
            let rhs = add(interp.odot(model, a, c), interp.odot(model, b, c));
            if lhs != rhs && bad.len() < MAX_WITNESSES {
                bad.push(json!([ring.element_at(a).coords(), ring.element_at(b).coords(), ring.element_at(c).coords()]));
            }
            triples += 1;
        }
    }
    let ok = bad.is_empty();
    let mut wit = vec![json!({ "triples": triples, "exhaustive": exhaustive })];
    wit.extend(bad);
    Check::pass_if(
        "([r1] oplus [r2]) odot [r3] = ([r1] odot [r3]) oplus ([r2] odot [r3]) on R with zero",
        "distributivity",
        ok,
        wit,
    )
}

/// `Θ⁺ = {(g, zero) : v(g) >= N} ∪ {(g, [s]) : 0 <= v(g) <= N-1, v([s]) = v(g)}`,
/// compared with `Θ` carried over by the digit bijection.
fn theta_plus(model: &PadicModel, interp: &Interpretation, theta: &ThetaTable) -> Vec<Check> {
    let ring = &model.ring;
    let n = model.n() as usize;
    let mut by_valuation = vec![0u128; n];
    for &r in &interp.reps {
        by_valuation[interp.rho[r].expect("nonzero").m as usize] += 1;
    }
    let mut bad = Vec::new();
    for (g, a) in theta.entries() {
        if let Some(a) = a {
            let in_plus = a != 0 && interp.rho[a].map(|s| s.m) == Some(g.m);
            if !in_plus && bad.len() < MAX_WITNESSES {
                bad.push(json!({ "g": model.describe_g(g), "alpha": ring.element_at(a).coords() }));
            }
        }
    }
    let contained = Check::pass_if(
        "Theta, carried to G x (R with zero), is contained in Theta-plus",
        "theta-plus-contains-theta",
        bad.is_empty(),
        bad,
    );
    let units = model.units.len() as u128;
    let theta_pairs = units * n as u128;
    let plus_pairs: u128 = by_valuation.iter().map(|c| c * units).sum();
    let unique = by_valuation.iter().all(|&c| c == 1);
    let comparison = Check::new(
        "Theta-plus agrees with Theta on classes with 0 <= v(g) <= N - 1",
        "theta-plus-comparison",
        Status::Reported,
        vec![json!({
            "equal": plus_pairs == theta_pairs,
            "s_unique": unique,
            "theta_pairs": theta_pairs.to_string(),
            "theta_plus_pairs": plus_pairs.to_string(),
            "representatives_per_valuation": by_valuation.iter().map(|c| c.to_string()).collect::<Vec<_>>(),
        })],
    );
    vec![contained, comparison]
}

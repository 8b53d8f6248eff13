//! Valuation predicates expressed with the group operation and the class of `p`:
//! `c` is in the maximal ideal iff `c^e p^{-1}` is integral, and a uniformizer
//! iff moreover `c^{-e} p` is integral.

use serde_json::json;

use crate::padic::group::GElem;
use crate::padic::PadicModel;
use crate::report::Check;

const MAX_WITNESSES: usize = 5;

fn integral(g: GElem) -> bool {
    g.m >= 0
}

pub fn in_max_ideal(model: &PadicModel, c: GElem) -> bool {
    let ce = model.pow(c, model.e() as u64);
    integral(model.mul(ce, model.inverse(model.p_class)))
}

pub fn is_uniformizer(model: &PadicModel, c: GElem) -> bool {
    let ce = model.pow(c, model.e() as u64);
    in_max_ideal(model, c) && integral(model.mul(model.inverse(ce), model.p_class))
}

/// Monic polynomial over `K` with non-leading coefficients `coeffs` (low to
/// high, `None` for zero): all in the maximal ideal, constant a uniformizer.
pub fn is_eisenstein(model: &PadicModel, coeffs: &[Option<GElem>]) -> bool {
    match coeffs.split_first() {
        Some((Some(c0), rest)) => {
            is_uniformizer(model, *c0) && rest.iter().all(|c| c.is_none_or(|c| in_max_ideal(model, c)))
        }
        _ => false,
    }
}

pub fn predicate_checks(model: &PadicModel) -> Vec<Check> {
    let e = model.e() as i64;
    let units = model.units.len();
    let mut checks = Vec::new();

    let mut bad_max = Vec::new();
    let mut bad_unif = Vec::new();
    let mut tested = 0u64;
    for m in -2 * e..=2 * e {
        for unit in 0..units {
            let c = GElem { m, unit };
            tested += 1;
            if in_max_ideal(model, c) != (m >= 1) && bad_max.len() < MAX_WITNESSES {
                bad_max.push(model.describe_g(c));
            }
            if is_uniformizer(model, c) != (m == 1) && bad_unif.len() < MAX_WITNESSES {
                bad_unif.push(model.describe_g(c));
            }
        }
    }
    let range = json!({ "valuations": [-2 * e, 2 * e], "elements": tested });
    let ok = bad_max.is_empty();
    let mut wit = vec![range.clone()];
    wit.extend(bad_max);
    checks.push(Check::pass_if("c^e p^-1 integral iff v(c) >= 1", "in-max-ideal", ok, wit));
    let ok = bad_unif.is_empty();
    let mut wit = vec![range];
    wit.extend(bad_unif);
    checks.push(Check::pass_if(
        "c^e p^-1 and c^-e p integral iff v(c) = 1",
        "is-uniformizer",
        ok,
        wit,
    ));

    // Degree-2 and degree-3 monic polynomials over a small coefficient set.
    let one = model.units.one();
    let mut pool: Vec<Option<GElem>> = vec![None];
    for m in -1..=3 {
        pool.push(Some(GElem { m, unit: one }));
    }
    for unit in 0..units.min(4) {
        pool.push(Some(GElem { m: 1, unit }));
    }
    let reference = |cs: &[Option<GElem>]| cs[0].is_some_and(|c| c.m == 1) && cs[1..].iter().all(|c| c.is_none_or(|c| c.m >= 1));
    let mut bad = Vec::new();
    let mut polys = 0u64;
    for a in &pool {
        for b in &pool {
            let quad = [*a, *b];
            polys += 1;
            if is_eisenstein(model, &quad) != reference(&quad) && bad.len() < MAX_WITNESSES {
                bad.push(json!({ "coefficients": quad.iter().map(|c| c.map(|c| model.describe_g(c))).collect::<Vec<_>>() }));
            }
            for c in &pool {
                let cubic = [*a, *b, *c];
                polys += 1;
                if is_eisenstein(model, &cubic) != reference(&cubic) && bad.len() < MAX_WITNESSES {
                    bad.push(json!({ "coefficients": cubic.iter().map(|c| c.map(|c| model.describe_g(c))).collect::<Vec<_>>() }));
                }
            }
        }
    }
    let ok = bad.is_empty();
    let mut wit = vec![json!({ "polynomials": polys })];
    wit.extend(bad);
    checks.push(Check::pass_if(
        "is_eisenstein: non-leading coefficients in the maximal ideal, constant a uniformizer",
        "is-eisenstein",
        ok,
        wit,
    ));

    // v(p) is the e-th positive class: the classes strictly between 1 and p are τ, ..., τ^{e-1}.
    let p = model.p_class;
    let v_wide = model.wide.valuation(&model.wide.from_int(model.spec.p as i64));
    let ok = p.m == e && v_wide == Some(e as u32);
    checks.push(Check::pass_if(
        "v(p) is the e-th positive element, p = pi^e times a unit",
        "valuation-p",
        ok,
        vec![json!({
            "v_p": p.m,
            "e": e,
            "unit": model.units.units[p.unit].coords(),
            "valuation_in_wide_ring": v_wide,
        })],
    ));
    checks
}

//! Acceptance suite: one line per criterion, nonzero exit if any fails.

use std::collections::{BTreeMap, HashSet};
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use fbp_core::fingroup::FinAbGroup;
use fbp_core::padic::checks::{axiom_checks, digit_checks, torsion_checks};
use fbp_core::padic::interpret::{interpretation_checks, Interpretation};
use fbp_core::padic::predicates::{in_max_ideal, is_uniformizer, predicate_checks};
use fbp_core::padic::theta::{build_theta, theta_checks};
use fbp_core::padic::{default_grid, GElem, PadicConfig, PadicModel};
use fbp_core::presburger::{decide, eval, qe, PresburgerAssignment};
use fbp_core::report::{Check, Status};
use fbp_core::testing::{random_open_formula, random_sentence, regression_sentences, stabilized_eval, GenConfig};
use fbp_core::thdecide::{check_axioms, decide_th, DecideConfig, FbpModel, DEFAULT_WINDOW};
use num_bigint::BigInt;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

type Outcome = Result<String, String>;

fn find<'a>(checks: &'a [Check], key: &str) -> Result<&'a Check, String> {
    checks.iter().find(|c| c.paper_ref == key).ok_or_else(|| format!("no `{key}` check"))
}

fn expect(checks: &[Check], key: &str, status: Status, label: &str) -> Result<(), String> {
    let c = find(checks, key)?;
    if c.status == status {
        Ok(())
    } else {
        Err(format!("{label}: `{key}` is {:?}: {}", c.status, serde_json::to_string(&c.witnesses).unwrap_or_default()))
    }
}

fn within(start: Instant, limit: Duration, detail: String) -> Outcome {
    let t = start.elapsed();
    if t <= limit {
        Ok(format!("{detail}, {:.1}s", t.as_secs_f64()))
    } else {
        Err(format!("{detail}, but took {:.1}s (limit {}s)", t.as_secs_f64(), limit.as_secs()))
    }
}

fn unit_order(model: &PadicModel, i: usize) -> u64 {
    let ring = &model.ring;
    let u = &model.units.units[i];
    let (mut x, mut k) = (u.clone(), 1);
    while x != ring.one() {
        x = ring.mul(&x, u);
        k += 1;
    }
    k
}

fn torsion_formula(models: &[PadicModel]) -> Outcome {
    let start = Instant::now();
    let grid = default_grid();
    let mut built = 0;
    for spec in &grid {
        let model = PadicModel::build(spec, &PadicConfig::default()).map_err(|e| format!("{spec}: {e}"))?;
        let (report, _) = torsion_checks(&model);
        let q = (spec.p as u128).pow(spec.f() as u32);
        let expected = (q - 1) * q.pow(spec.k * spec.e() as u32);
        let ring = &model.ring;
        let direct = (0..ring.size() as usize)
            .filter(|&i| ring.element_at(i).coords()[..spec.f()].iter().any(|&c| c % spec.p != 0))
            .count() as u128;
        if report.order != expected || direct != expected {
            return Err(format!("{spec}: enumerated {}, coordinates {direct}, formula {expected}", report.order));
        }
        built += 1;
    }
    debug_assert_eq!(built, models.len());
    within(start, Duration::from_secs(60), format!("{built} specs"))
}

fn k0_cyclic(models: &[PadicModel]) -> Outcome {
    let mut n = 0;
    for m in models.iter().filter(|m| m.spec.k == 0) {
        let q = m.q();
        let (report, _) = torsion_checks(m);
        let max_order = (0..m.units.len()).map(|i| unit_order(m, i)).max().unwrap_or(1);
        let factors_ok = report.invariant_factors.len() <= 1 && report.invariant_factors.iter().product::<u64>() == q - 1;
        if report.order != (q - 1) as u128 || max_order != q - 1 || !factors_ok {
            return Err(format!(
                "{}: order {}, factors {:?}, largest element order {max_order}, q - 1 = {}",
                m.spec,
                report.order,
                report.invariant_factors,
                q - 1
            ));
        }
        n += 1;
    }
    Ok(format!("{n} specs with k = 0"))
}

fn presburger_engine() -> Outcome {
    let start = Instant::now();
    let mut rng = StdRng::seed_from_u64(0xacce_0003);
    let cfg = GenConfig::default();
    for i in 0..200 {
        let f = random_sentence(&mut rng, &cfg);
        let oracle = stabilized_eval(&f, &[], 16, 1024, 10).ok_or_else(|| format!("sentence {i}: oracle did not stabilize on {f}"))?;
        let got = decide(&f).map_err(|e| format!("{f}: {e}"))?;
        if got != oracle {
            return Err(format!("sentence {i}: decide {got}, oracle {oracle}: {f}"));
        }
    }
    let open_cfg = GenConfig { max_depth: 2, ..GenConfig::default() };
    for i in 0..200 {
        let f = random_open_formula(&mut rng, &["a", "b"], &open_cfg);
        let g = qe(&f);
        if !g.is_quantifier_free() {
            return Err(format!("formula {i}: qe left a quantifier: {g}"));
        }
        for _ in 0..100 {
            let (a, b) = (rng.gen_range(-50..=50i64), rng.gen_range(-50..=50i64));
            let asg: PresburgerAssignment = [("a".to_string(), BigInt::from(a)), ("b".to_string(), BigInt::from(b))].into();
            let got = eval(&g, &asg).map_err(|e| e.to_string())?;
            let oracle = stabilized_eval(&f, &[("a", a), ("b", b)], 16, 1024, 10)
                .ok_or_else(|| format!("formula {i} at a={a}, b={b}: oracle did not stabilize on {f}"))?;
            if got != oracle {
                return Err(format!("formula {i} at a={a}, b={b}: qe gives {got}, oracle {oracle}: {f}"));
            }
        }
    }
    within(start, Duration::from_secs(120), "200 sentences, 200 formulas x 100 assignments".into())
}

fn trivial_h() -> Outcome {
    let model = FbpModel::standard(FinAbGroup::parse("Z/1").map_err(|e| e.to_string())?);
    let cfg = DecideConfig::default();
    let suite = regression_sentences();
    for f in &suite {
        let th = decide_th(&model, f, &cfg).map_err(|e| format!("{f}: {e}"))?.result;
        let direct = decide(&f.to_additive()).map_err(|e| format!("{f}: {e}"))?;
        if th != direct {
            return Err(format!("{f}: decide_th {th}, decide {direct}"));
        }
    }
    Ok(format!("{} sentences", suite.len()))
}

const AXIOM_KEYS: [&str; 7] = ["preorder", "axiom-i", "axiom-ii", "axiom-iii", "axiom-iv", "axiom-v", "axiom-vi"];

fn axioms(models: &[PadicModel]) -> Outcome {
    for h in ["Z/2", "Z/6", "Z/2xZ/4"] {
        let model = FbpModel::standard(FinAbGroup::parse(h).map_err(|e| e.to_string())?);
        let checks = check_axioms(&model, DEFAULT_WINDOW);
        for key in AXIOM_KEYS {
            expect(&checks, key, Status::Pass, h)?;
        }
    }
    for m in models {
        let checks = axiom_checks(m);
        let label = m.spec.to_string();
        for key in AXIOM_KEYS {
            expect(&checks, &format!("hz/{key}"), Status::Pass, &label)?;
            expect(&checks, &format!("g/{key}"), Status::Pass, &label)?;
        }
        let exponent = if m.e() > 1 { Status::Reported } else { Status::Pass };
        expect(&checks, "exponent-claim", exponent, &label)?;
    }
    Ok(format!("3 groups, {} grid specs", models.len()))
}

fn digits(models: &[PadicModel]) -> Outcome {
    let mut elements = 0u128;
    for m in models {
        let ring = &m.ring;
        let size = ring.size() as usize;
        let mut seen = HashSet::with_capacity(size);
        for i in 0..size {
            let z = ring.element_at(i);
            let d = m.digits.to_digits(ring, &z);
            if m.digits.from_digits(ring, &d) != z || !seen.insert(d) {
                return Err(format!("{}: digits of {:?} do not round-trip", m.spec, z.coords()));
            }
        }
        for i in 0..size {
            let d = m.digits.digits_at(m.n(), i);
            if m.digits.to_digits(ring, &m.digits.from_digits(ring, &d)) != d {
                return Err(format!("{}: digit vector {d:?} does not round-trip", m.spec));
            }
        }
        let q = m.q();
        let mu = m.digits.mu();
        let (mut x, mut order) = (mu.clone(), 1);
        while x != ring.one() && order <= q {
            x = ring.mul(&x, mu);
            order += 1;
        }
        if order != q - 1 {
            return Err(format!("{}: mu has order {order}, expected {}", m.spec, q - 1));
        }
        let checks = digit_checks(m);
        for c in &checks {
            if c.status == Status::Fail {
                return Err(format!("{}: `{}` failed", m.spec, c.paper_ref));
            }
        }
        elements += size as u128;
    }
    Ok(format!("{elements} ring elements over {} specs", models.len()))
}

fn theta(models: &[PadicModel]) -> Outcome {
    let mut sampled = 0;
    for m in models {
        let table = build_theta(m).map_err(|e| format!("{}: {e}", m.spec))?;
        let checks = theta_checks(m, &table);
        let label = m.spec.to_string();
        expect(&checks, "theta-single-valued", Status::Pass, &label)?;
        expect(&checks, "lemma-theta-containment", Status::Pass, &label)?;
        expect(&checks, "lemma-theta-equality", Status::Reported, &label)?;
        // Independent: every class with 0 <= v(g) < N has exactly one value.
        for (g, a) in table.entries() {
            if g.m >= 0 && (g.m as u32) < m.n() && a.is_none() {
                return Err(format!("{label}: no value at {g:?}"));
            }
        }
        if !table.conflicts.is_empty() {
            return Err(format!("{label}: conflicting lifts {:?}", table.conflicts));
        }
        if format!("{:?}", table.method) != "Exhaustive" {
            sampled += 1;
        }
    }
    Ok(format!("{} specs ({sampled} by sampled lifts)", models.len()))
}

fn interpretation(models: &[PadicModel]) -> Outcome {
    let mut exhaustive = 0;
    for m in models {
        let table = build_theta(m).map_err(|e| format!("{}: {e}", m.spec))?;
        let interp = Interpretation::new(m);
        let checks = interpretation_checks(m, &interp, &table);
        let label = m.spec.to_string();
        expect(&checks, "rho-injective", Status::Pass, &label)?;
        expect(&checks, "rep-set-size", Status::Pass, &label)?;
        let images: HashSet<GElem> = interp.reps.iter().map(|&r| interp.rho[r].expect("nonzero")).collect();
        if interp.reps.len() as u128 != m.ring.size() - 1 || images.len() != interp.reps.len() {
            return Err(format!("{label}: |R| = {}, |rho(R)| = {}", interp.reps.len(), images.len()));
        }
        if m.ring.size() <= 10_000 {
            let d = find(&checks, "distributivity")?;
            if d.status != Status::Pass || d.witnesses[0]["exhaustive"] != true {
                return Err(format!("{label}: distributivity {:?} {}", d.status, d.witnesses[0]));
            }
            exhaustive += 1;
        }
    }
    Ok(format!("{} specs, distributivity exhaustive on {exhaustive}", models.len()))
}

fn predicates(models: &[PadicModel]) -> Outcome {
    let mut classes = 0;
    for m in models {
        let label = m.spec.to_string();
        let e = m.e() as i64;
        for v in -2 * e..=2 * e {
            for unit in 0..m.units.len() {
                let g = GElem { m: v, unit };
                if in_max_ideal(m, g) != (v >= 1) || is_uniformizer(m, g) != (v == 1) {
                    return Err(format!("{label}: predicates wrong at v = {v}"));
                }
                classes += 1;
            }
        }
        if m.p_class.m != e {
            return Err(format!("{label}: v(p) = {}", m.p_class.m));
        }
        let checks = predicate_checks(m);
        for key in ["in-max-ideal", "is-uniformizer", "valuation-p"] {
            expect(&checks, key, Status::Pass, &label)?;
        }
    }
    Ok(format!("{classes} classes"))
}

fn determinism() -> Outcome {
    let run = || -> Result<(String, BTreeMap<String, u64>), String> {
        let out = Command::new(env!("CARGO_BIN_EXE_fbp"))
            .arg("suite")
            .env_remove("FBP_CAP_ELEMENTS")
            .output()
            .map_err(|e| e.to_string())?;
        if out.status.code() != Some(0) {
            return Err(format!("fbp suite exited with {:?}", out.status.code()));
        }
        let doc: serde_json::Value = serde_json::from_slice(&out.stdout).map_err(|e| e.to_string())?;
        let totals = doc["payload"]["totals"]
            .as_object()
            .map(|t| t.iter().map(|(k, v)| (k.clone(), v.as_u64().unwrap_or(0))).collect())
            .unwrap_or_default();
        Ok((serde_json::to_string(&doc["payload"]).map_err(|e| e.to_string())?, totals))
    };
    let (a, totals) = run()?;
    let (b, _) = run()?;
    if a != b {
        return Err("payloads differ".into());
    }
    Ok(format!("{} bytes, totals {totals:?}", a.len()))
}

fn main() -> ExitCode {
    let start = Instant::now();
    let models: Vec<PadicModel> = default_grid()
        .iter()
        .map(|s| PadicModel::build(s, &PadicConfig::default()).expect("grid spec builds"))
        .collect();
    let criteria: Vec<(&str, Box<dyn Fn() -> Outcome + '_>)> = vec![
        ("torsion order formula over the grid", Box::new(|| torsion_formula(&models))),
        ("k = 0 torsion is cyclic of order q - 1", Box::new(|| k0_cyclic(&models))),
        ("Presburger decide and qe against bounded oracles", Box::new(presburger_engine)),
        ("trivial H reduces to Presburger on the regression suite", Box::new(trivial_h)),
        ("axioms on H x Z and on the grid groups", Box::new(|| axioms(&models))),
        ("digit bijection and Teichmuller order", Box::new(|| digits(&models))),
        ("Theta single-valued and contained in the valuation set", Box::new(|| theta(&models))),
        ("rho injective, |R| = q^N - 1, distributivity", Box::new(|| interpretation(&models))),
        ("predicates and v(p) = e", Box::new(|| predicates(&models))),
        ("suite payload is deterministic", Box::new(determinism)),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let outcome = std::panic::catch_unwind(std::panic::AssertUnwindSafe(check)).unwrap_or_else(|_| Err("panicked".into()));
        match outcome {
            Ok(detail) => println!("[PASS] {:>2} {name}: {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("[FAIL] {:>2} {name}: {why}", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed in {:.1}s", criteria.len() - failed, criteria.len(), start.elapsed().as_secs_f64());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

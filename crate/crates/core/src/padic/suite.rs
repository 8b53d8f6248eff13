//! Runs every check over a grid of field specs and aggregates the reports.

use serde::Deserialize;
use serde_json::{json, Map, Value};

use crate::error::{Error, Result};
use crate::padic::checks::all_checks;
use crate::padic::spec::{default_grid, FieldSpec, FieldSpecInput};
use crate::padic::{PadicConfig, PadicModel};
use crate::report::{Check, Status};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum GridFile {
    List(Vec<FieldSpecInput>),
    Table { specs: Vec<FieldSpecInput> },
}

/// Grid from JSON (`[...]` or `{"specs": [...]}`) or TOML (`[[specs]]`).
pub fn parse_grid(text: &str) -> Result<Vec<FieldSpecInput>> {
    let parsed = match serde_json::from_str::<GridFile>(text) {
        Ok(g) => g,
        Err(json_err) => toml::from_str::<GridFile>(text)
            .map_err(|toml_err| Error::InvalidSpec(format!("grid is neither JSON ({json_err}) nor TOML ({toml_err})")))?,
    };
    Ok(match parsed {
        GridFile::List(v) | GridFile::Table { specs: v } => v,
    })
}

/// A single field spec from JSON or TOML.
pub fn parse_spec(text: &str, ring_cap: u128) -> Result<FieldSpec> {
    if text.trim_start().starts_with('{') {
        FieldSpec::parse_json(text, ring_cap)
    } else {
        FieldSpec::parse_toml(text, ring_cap)
    }
}

pub fn default_grid_inputs() -> Vec<FieldSpecInput> {
    default_grid().iter().map(FieldSpec::to_input).collect()
}

fn input_label(input: &FieldSpecInput) -> String {
    match &input.name {
        Some(n) => n.clone(),
        None => format!("p={} u={:?} E={} k={}", input.p, input.u, serde_json::to_string(&input.e_poly).unwrap_or_default(), input.k),
    }
}

fn counts(checks: &[Check]) -> Value {
    let n = |s: Status| checks.iter().filter(|c| c.status == s).count();
    json!({ "pass": n(Status::Pass), "fail": n(Status::Fail), "reported": n(Status::Reported) })
}

/// Report for one spec; errors become an `"error: ..."` status.
pub fn run_entry(input: &FieldSpecInput, config: &PadicConfig) -> (Value, bool) {
    let built = FieldSpec::from_input(input.clone(), config.ring_cap)
        .and_then(|spec| PadicModel::build(&spec, config))
        .and_then(|model| all_checks(&model).map(|c| (model, c)));
    match built {
        Ok((model, checks)) => {
            let failed = checks.iter().any(|c| c.status == Status::Fail);
            let mut entry = Map::new();
            entry.insert("label".into(), json!(model.spec.label()));
            entry.insert("spec".into(), json!(model.spec));
            entry.insert("status".into(), json!(if failed { "fail" } else { "pass" }));
            entry.insert("unit_group".into(), json!(model.units.group().invariant_factors()));
            entry.insert("counts".into(), counts(&checks));
            entry.insert("checks".into(), json!(checks));
            (Value::Object(entry), failed)
        }
        Err(e) => {
            let message = match e {
                Error::InvalidSpec(m) => m,
                other => other.to_string(),
            };
            (
            json!({
                "label": input_label(input),
                "spec": input,
                "status": format!("error: {message}"),
                "checks": [],
            }),
            false,
            )
        }
    }
}

/// The comparison payload: entries in grid order plus totals. Contains no
/// timing or host information.
pub fn run_suite(grid: &[FieldSpecInput], config: &PadicConfig) -> (Value, bool) {
    run_suite_with(grid, config, |_| {})
}

/// `run_suite`, calling `progress` with each finished entry.
pub fn run_suite_with(grid: &[FieldSpecInput], config: &PadicConfig, mut progress: impl FnMut(&Value)) -> (Value, bool) {
    let mut entries = Vec::with_capacity(grid.len());
    let mut any_failed = false;
    let (mut pass, mut fail, mut error) = (0, 0, 0);
    for input in grid {
        let (entry, failed) = run_entry(input, config);
        match entry["status"].as_str() {
            Some("pass") => pass += 1,
            Some("fail") => fail += 1,
            _ => error += 1,
        }
        any_failed |= failed;
        progress(&entry);
        entries.push(entry);
    }
    let payload = json!({
        "entries": entries,
        "totals": { "specs": grid.len(), "pass": pass, "fail": fail, "error": error },
    });
    (payload, any_failed)
}

/// `{schema, metadata, payload}`.
pub fn document(metadata: Value, payload: Value) -> Value {
    json!({ "schema": SCHEMA_VERSION, "metadata": metadata, "payload": payload })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reducible_u_is_an_error_entry() {
        let grid = parse_grid(r#"[{"p":2,"u":[1,0,1],"E":[2,1],"k":0},{"p":2,"u":[0,1],"E":[2,1],"k":0}]"#).unwrap();
        let (payload, failed) = run_suite(&grid, &PadicConfig::default());
        assert!(!failed);
        let status = payload["entries"][0]["status"].as_str().unwrap();
        assert!(status.starts_with("error: u reducible"), "{status}");
        assert_eq!(payload["entries"][1]["status"], "pass");
        assert_eq!(payload["totals"]["error"], 1);
    }

    #[test]
    fn empty_grid() {
        let (payload, failed) = run_suite(&[], &PadicConfig::default());
        assert!(!failed);
        assert_eq!(payload["entries"], json!([]));
    }

    #[test]
    fn toml_grid_and_spec() {
        let g = parse_grid("[[specs]]\np = 3\nu = [0, 1]\nE = [3, 1]\nk = 1\n").unwrap();
        assert_eq!(g.len(), 1);
        let s = parse_spec("p = 3\nu = [0, 1]\nE = [3, 1]\nk = 1\n", 100).unwrap();
        assert_eq!(s.ring_size(), Some(9));
        assert_eq!(default_grid_inputs().len(), 24);
    }
}

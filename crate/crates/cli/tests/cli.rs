use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn fbp(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fbp"))
        .args(args)
        .env_remove("FBP_CAP_ELEMENTS")
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&out.stdout)))
}

fn scratch(name: &str, contents: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("fbp-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join(name);
    std::fs::write(&path, contents).unwrap();
    path
}

const Q9: &str = r#"{"p": 3, "u": [0, 1], "E": [-3, 1], "k": 1}"#;

#[test]
fn decide_parity_sentence_trivial_h() {
    let out = fbp(&["decide", "--group", "Z/1", "--sentence", "A x. E y. (y*y = x | y*y = x*t)"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["result"], true);
}

#[test]
fn decide_reports_sizes() {
    let out = fbp(&["decide", "--group", "Z/6", "--sentence", "E x. (x*x*x = 1 & x != 1)"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["result"], true);
    assert!(v["translated_presburger_size"].as_u64().is_some());
    assert!(v["h_assignments_explored"].as_u64().unwrap() >= 1);
}

#[test]
fn decide_respects_element_cap() {
    let out = fbp(&["--cap-elements", "3", "decide", "--group", "Z/6", "--sentence", "E x. x = x"]);
    assert_eq!(out.status.code(), Some(2));
    let out = Command::new(env!("CARGO_BIN_EXE_fbp"))
        .args(["decide", "--group", "Z/6", "--sentence", "E x. x = x"])
        .env("FBP_CAP_ELEMENTS", "3")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn qe_divisibility() {
    let out = fbp(&["qe", "E y. y + y = x"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(String::from_utf8(out.stdout).unwrap().trim(), "div[2](x)");
}

#[test]
fn torsion_q9_from_file() {
    let path = scratch("q9.json", Q9);
    let out = fbp(&["padic", "torsion", "--spec", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["schema"], 1);
    assert_eq!(v["order"], 6);
    assert_eq!(v["invariant_factors"], serde_json::json!([6]));
    assert_eq!(v["formula_order"], 6);
    assert_eq!(v["status"], "pass");
}

#[test]
fn padic_subcommands_pass_on_q9() {
    for sub in ["build", "theta", "interpret", "axioms", "predicates"] {
        let out = fbp(&["padic", sub, "--spec", Q9]);
        assert_eq!(out.status.code(), Some(0), "{sub}: {}", String::from_utf8_lossy(&out.stderr));
        let v = json(&out);
        assert_eq!(v["schema"], 1);
        assert!(!v["checks"].as_array().unwrap().is_empty(), "{sub}");
    }
    let plain = json(&fbp(&["padic", "theta", "--spec", Q9]));
    let lemma = json(&fbp(&["padic", "theta", "--check-lemma", "--spec", Q9]));
    assert!(lemma["checks"].as_array().unwrap().len() > plain["checks"].as_array().unwrap().len());
}

#[test]
fn toml_spec_file() {
    let path = scratch("q9.toml", "p = 3\nu = [0, 1]\nE = [-3, 1]\nk = 1\n");
    let out = fbp(&["padic", "torsion", "--spec", path.to_str().unwrap()]);
    assert_eq!(json(&out)["order"], 6);
}

#[test]
fn usage_and_input_errors_exit_2() {
    assert_eq!(fbp(&["nonsense"]).status.code(), Some(2));
    assert_eq!(fbp(&["decide", "--group", "Z/0", "--sentence", "E x. x = x"]).status.code(), Some(2));
    assert_eq!(fbp(&["decide", "--group", "Z/2", "--sentence", "E x. x ="]).status.code(), Some(2));
    assert_eq!(fbp(&["decide", "--group", "Z/2", "--sentence", "x = x"]).status.code(), Some(2));
    let out = fbp(&["padic", "torsion", "--spec", r#"{"p":2,"u":[1,0,1],"E":[-2,1],"k":0}"#]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("u reducible modulo 2"));
    assert_eq!(fbp(&["padic", "build", "--spec", "/nonexistent/spec.json"]).status.code(), Some(2));
    assert_eq!(fbp(&["--help"]).status.code(), Some(0));
}

#[test]
fn grid_with_reducible_u_is_an_error_entry() {
    let grid = scratch(
        "bad.json",
        r#"[{"p":2,"u":[1,0,1],"E":[-2,1],"k":0},{"p":3,"u":[0,1],"E":[-3,1],"k":0}]"#,
    );
    let out = fbp(&["suite", "--grid", grid.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    let entries = v["payload"]["entries"].as_array().unwrap();
    assert_eq!(entries[0]["status"], "error: u reducible modulo 2");
    assert_eq!(entries[1]["status"], "pass");
}

#[test]
fn empty_grid_and_out_file() {
    let grid = scratch("empty.json", "[]");
    let out_path = grid.with_file_name("empty-report.json");
    let out = fbp(&["suite", "--grid", grid.to_str().unwrap(), "--out", out_path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let v: Value = serde_json::from_str(&std::fs::read_to_string(out_path).unwrap()).unwrap();
    assert_eq!(v["schema"], 1);
    assert_eq!(v["payload"]["entries"], serde_json::json!([]));
    assert_eq!(v["payload"]["totals"]["specs"], 0);
}

#[test]
fn small_grid_is_deterministic() {
    let grid = scratch(
        "small.toml",
        "[[specs]]\np = 2\nu = [1, 1, 1]\nE = [-2, 1]\nk = 1\n\n[[specs]]\np = 3\nu = [0, 1]\nE = [-3, 0, 1]\nk = 1\n",
    );
    let run = || json(&fbp(&["suite", "--grid", grid.to_str().unwrap()]))["payload"].to_string();
    let first = run();
    assert_eq!(first, run());
    assert!(first.contains("\"fail\":0"));
}

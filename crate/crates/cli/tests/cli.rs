use std::process::{Command, Output};

use clifford_index::Scalar;
use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_clifford-index")).args(args).output().expect("binary runs")
}

fn json(args: &[&str]) -> Value {
    let out = run(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("valid JSON")
}

#[test]
fn classify_examples() {
    assert_eq!(json(&["cl-classify", "--dim", "2"])["factors"], serde_json::json!([["C", 2]]));
    assert_eq!(json(&["cl-classify", "--dim", "2", "--real"])["factors"], serde_json::json!([["H", 1]]));
    assert_eq!(
        json(&["cl-classify", "--dim", "1", "--real", "--minus", "1"])["factors"],
        serde_json::json!([["R", 1], ["R", 1]])
    );
}

#[test]
fn abs_groups() {
    assert_eq!(json(&["abs-group", "--k", "1"])["group"], "0");
    assert_eq!(json(&["abs-group", "--k", "2"])["group"], "Z");
}

#[test]
fn torus_index() {
    let r = json(&["index-torus", "--N", "12", "--d", "1"]);
    assert_eq!(r["index"], 1);
    assert_eq!(r["N"], 12);
    assert_eq!(json(&["index-torus", "--N", "8", "--d", "-2"])["index"], -2);
}

#[test]
fn windings_and_flow() {
    let w = json(&["abs-winding", "--k", "2", "--module", "spinor"])["winding"].as_i64().unwrap();
    assert_eq!(w.abs(), 1);
    assert_eq!(json(&["abs-winding", "--module", "spinor-flipped"])["winding"].as_i64().unwrap(), -w);
    assert_eq!(json(&["spectral-flow", "--family", "shift", "--t0", "0.5", "--t1", "1.5"])["flow"], 1);
    assert_eq!(json(&["spectral-flow", "--t0", "1.5", "--t1", "0.5"])["flow"], -1);
}

#[test]
fn multiplication_table() {
    let t = json(&["cl-table", "--dim", "2", "--signs", "+-"]);
    // e1·e1 = −q(e1) = −1, e2·e2 = +1.
    assert_eq!(t["table"][1][1]["sign"], -1);
    assert_eq!(t["table"][2][2]["sign"], 1);
    let human = run(&["cl-table", "--dim", "2", "--format", "human"]);
    assert!(String::from_utf8(human.stdout).unwrap().contains("e12"));
}

#[test]
fn spin_round_trip() {
    let lift = json(&["spin-lift", "--n", "3", "--i", "1", "--j", "2", "--theta", "0.5"]);
    let r = &lift["rotation"];
    assert!((r[0][0].as_f64().unwrap() - 0.5f64.cos()).abs() < 1e-12);
    assert!((r[1][0].as_f64().unwrap() - 0.5f64.sin()).abs() < 1e-12);
    let element = r#"{"dim":2,"signs":[1,1],"terms":[{"blade":[1,2],"re":"1","im":"0"}]}"#;
    let cover = json(&["spin-cover", "--element", element]);
    // e1e2 covers the rotation by π.
    let minus = serde_json::to_value(Scalar::int(-1)).unwrap();
    let zero = serde_json::to_value(Scalar::int(0)).unwrap();
    assert_eq!(cover["rotation"], serde_json::json!([[minus, zero], [zero, minus]]));
}

#[test]
fn symbol_ellipticity() {
    assert_eq!(json(&["symbol", "--op", "laplacian"])["ellipticity"]["elliptic"], true);
    assert_eq!(json(&["symbol", "--op", "dalembert"])["ellipticity"]["elliptic"], false);
    assert_eq!(json(&["symbol", "--op", "dirac", "--dim", "3"])["ellipticity"]["elliptic"], true);
}

#[test]
fn exit_codes() {
    assert_eq!(run(&["bogus"]).status.code(), Some(2));
    assert_eq!(run(&["spin-cover", "--element", "{not json"]).status.code(), Some(2));
    assert_eq!(run(&["index-torus", "--N", "4", "--d", "9"]).status.code(), Some(2));
    assert_eq!(run(&["spectral-flow", "--t0", "0", "--t1", "1"]).status.code(), Some(3));
    let not_spin = r#"{"dim":2,"signs":[1,1],"terms":[{"blade":[1],"re":"1","im":"0"}]}"#;
    assert_eq!(run(&["spin-cover", "--element", not_spin]).status.code(), Some(2));
}

#[test]
fn output_is_deterministic_and_written_to_file() {
    let args = ["index-torus", "--N", "6", "--d", "1"];
    assert_eq!(run(&args).stdout, run(&args).stdout);
    let dir = std::env::temp_dir().join(format!("clifford-index-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("abs.json");
    let out = run(&["abs-group", "--k", "4", "--out", path.to_str().unwrap()]);
    assert!(out.status.success());
    let written: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(written["group"], "Z");
    std::fs::remove_dir_all(dir).unwrap();
}

#[test]
fn acceptance_subset() {
    let out = run(&["acceptance", "--only", "abs-", "--format", "human"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.lines().filter(|l| l.starts_with("PASS")).count() >= 2);
}

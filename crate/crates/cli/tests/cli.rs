use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

const BIN: &str = env!("CARGO_BIN_EXE_latticetodd");

fn corpus(name: &str) -> String {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../corpus").join(name).display().to_string()
}

fn run(args: &[&str]) -> Output {
    Command::new(BIN).args(args).output().expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn result<'a>(doc: &'a Value, name: &str) -> &'a Value {
    doc["results"].as_array().unwrap().iter().find(|r| r["name"] == name).unwrap_or_else(|| panic!("no result {name}"))
}

fn scratch(tag: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("latticetodd-{tag}-{}", std::process::id()));
    let _ = fs::remove_dir_all(&dir);
    fs::create_dir_all(&dir).unwrap();
    dir
}

#[test]
fn count_of_the_unit_square_is_four() {
    let out = run(&["count", &corpus("unit_square.json")]);
    assert_eq!(out.status.code(), Some(0));
    let doc = json(&out);
    assert_eq!(result(&doc, "count")["value"], "4");
    assert_eq!(result(&doc, "count")["provenance"], "exact");
    assert_eq!(doc["passed"], true);
}

#[test]
fn weighted_count_of_a_box_lists_face_strata() {
    let doc = json(&run(&["weighted-count", &corpus("box_3x2.json")]));
    let w = result(&doc, "weighted");
    assert_eq!(w["variable"], "1+y");
    assert_eq!(w["value"], serde_json::json!(["4", "6", "2"]));
}

#[test]
fn local_identity_at_the_origin_vertex_passes() {
    let out = run(&["em-verify", &corpus("unit_square.json"), "--identity", "local", "--vertex", "0", "--z", "-1/3,-1/5"]);
    assert_eq!(out.status.code(), Some(0));
    let doc = json(&out);
    assert_eq!(doc["checks"][0]["backend"], "complex");
    assert_eq!(doc["checks"][0]["computed"]["provenance"], "approx:1e-8");
}

#[test]
fn exact_em_report_has_zero_residual() {
    let doc = json(&run(&["em-verify", &corpus("unit_square.json"), "--identity", "embv"]));
    assert_eq!(doc["checks"][0]["residual"]["value"], "0");
    assert_eq!(doc["passed"], true);
}

#[test]
fn malformed_document_exits_with_schema_code() {
    let dir = scratch("schema");
    let file = dir.join("bad.json");
    fs::write(&file, r#"{"dim": 2, "vertices": [[0, 0]], "colour": "red"}"#).unwrap();
    let out = run(&["count", file.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(!out.stderr.is_empty());
}

#[test]
fn missing_file_exits_with_schema_code() {
    assert_eq!(run(&["count", "/nonexistent/p.json"]).status.code(), Some(2));
}

#[test]
fn rational_vertex_exits_with_geometry_code() {
    let dir = scratch("geometry");
    let file = dir.join("half.json");
    fs::write(&file, r#"{"dim": 2, "facets": [{"u": [1, 0], "c": 0}, {"u": [0, 1], "c": 0}, {"u": [-1, -2], "c": 1}]}"#).unwrap();
    let out = run(&["em-verify", file.to_str().unwrap(), "--identity", "embv"]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn report_on_empty_directory_succeeds() {
    let dir = scratch("empty");
    let out = run(&["report", dir.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let doc = json(&out);
    assert_eq!(doc["entries"].as_array().unwrap().len(), 0);
}

#[test]
fn report_keeps_going_past_a_corrupt_file() {
    let dir = scratch("partial");
    fs::copy(corpus("unit_square.json"), dir.join("a.json")).unwrap();
    fs::write(dir.join("b.json"), "{ not json").unwrap();
    let out = run(&["report", dir.to_str().unwrap()]);
    assert_ne!(out.status.code(), Some(0));
    let doc = json(&out);
    let entries = doc["entries"].as_array().unwrap();
    assert_eq!(entries.len(), 2);
    assert_eq!(entries[0]["status"], "ok");
    assert_ne!(entries[1]["status"], "ok");
    assert!(entries[1]["error"].is_string());
}

#[test]
fn timing_is_opt_in() {
    let plain = json(&run(&["count", &corpus("unit_square.json")]));
    assert!(plain.get("timing_ms").is_none());
    let timed = json(&run(&["--timing", "count", &corpus("unit_square.json")]));
    assert!(timed["timing_ms"].is_u64());
}

#[test]
fn unbounded_region_exits_with_geometry_code() {
    let dir = scratch("unbounded");
    let file = dir.join("quadrant.json");
    fs::write(&file, r#"{"dim": 2, "facets": [{"u": [1, 0], "c": 0}, {"u": [0, 1], "c": 0}]}"#).unwrap();
    assert_eq!(run(&["count", file.to_str().unwrap()]).status.code(), Some(3));
}

#[test]
fn oracle_cap_comes_from_the_environment() {
    let out = Command::new(BIN).env("LATTICETODD_CAP", "3").args(["count", &corpus("box_3x2.json")]).output().unwrap();
    assert_eq!(out.status.code(), Some(4));
}

use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn hypergroup(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hypergroup"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!("{e}: {}", String::from_utf8_lossy(&out.stdout))
    })
}

const SUBGROUP: &str = r#"{"subgroup":["e","(12)"]}"#;

#[test]
fn double_coset_report_passes() {
    let out = hypergroup(&[
        "report", "--group", "S3", "--expectation", "double_coset", "--params", SUBGROUP, "--samples", "32",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let doc = json(&out);
    assert_eq!(doc["summary"]["points"], 2);
    assert_eq!(doc["summary"]["is_cp"], true);
    assert_eq!(doc["status"], "ok");
}

#[test]
fn cyclic_identity_report_passes() {
    let out = hypergroup(&["report", "--group", "Z4", "--expectation", "id", "--samples", "16"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["summary"]["points"], 4);
}

#[test]
fn skewed_weights_fail_the_construction_hypotheses() {
    let spec = r#"{"group":"S3",
        "expectation":{"blocks":[[0,3,4],[1,2,5]],"weights":[["1/3","1/3","1/3"],["1/2","1/4","1/4"]]}}"#;
    let out = hypergroup(&["report", "--spec", spec]);
    assert_eq!(out.status.code(), Some(3));
    let doc = json(&out);
    assert_eq!(doc["failed_stage"], "verify_hypergroup_conditions");
    assert!(doc.get("hypergroup").is_none());
}

#[test]
fn unknown_names_exit_with_parse_code() {
    assert_eq!(hypergroup(&["validate", "--group", "S9"]).status.code(), Some(2));
    let out = hypergroup(&["validate", "--group", "S3", "--expectation", "bogus"]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(json(&out)["status"], "unknown_name");
    let out = hypergroup(&["report", "--group", "Z3", "--checks", "djs,nope"]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(hypergroup(&["validate", "--spec", "{not json"]).status.code(), Some(2));
}

#[test]
fn output_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let run = |name: &str| {
        let path = dir.path().join(name);
        let out = hypergroup(&[
            "report", "--group", "S3", "--expectation", "conjugation", "--seed", "11", "--samples", "24",
            "--out", path.to_str().unwrap(),
        ]);
        assert_eq!(out.status.code(), Some(0));
        std::fs::read(path).unwrap()
    };
    assert_eq!(run("a.json"), run("b.json"));
}

fn construct_to(dir: &Path, args: &[&str]) -> String {
    let path = dir.join("table.json");
    let mut all = vec!["construct"];
    all.extend_from_slice(args);
    all.extend_from_slice(&["--out", path.to_str().unwrap()]);
    assert_eq!(hypergroup(&all).status.code(), Some(0));
    path.to_str().unwrap().to_string()
}

#[test]
fn class_hypergroup_of_s3_round_trips_through_verify() {
    let dir = tempfile::tempdir().unwrap();
    let path = construct_to(dir.path(), &["--group", "S3", "--expectation", "conjugation"]);
    let doc: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(doc["size"], 3);
    assert_eq!(doc["haar"], serde_json::json!(["1", "3", "2"]));
    let out = hypergroup(&["verify", "--table", &path]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
}

#[test]
fn cyclic_group_is_its_own_hypergroup() {
    let dir = tempfile::tempdir().unwrap();
    let path = construct_to(dir.path(), &["--group", "Z3"]);
    let doc: Value = serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap();
    assert_eq!(doc["involution"], serde_json::json!([0, 2, 1]));
    assert_eq!(doc["c"][1][1], serde_json::json!(["0", "0", "1"]));
    assert_eq!(doc["modular"], serde_json::json!(["1", "1", "1"]));
}

#[test]
fn hand_authored_table_with_bad_haar_fails_verification() {
    let base = r#""size":2,"identity":0,"involution":[0,1],"c":[[["1","0"],["0","1"]],[["0","1"],["1/3","2/3"]]]"#;
    let out = hypergroup(&["verify", "--table", &format!(r#"{{{base},"haar":["1","1"]}}"#)]);
    assert_eq!(out.status.code(), Some(1));
    let solved = hypergroup(&["verify", "--table", &format!("{{{base}}}")]);
    assert_eq!(solved.status.code(), Some(0), "{}", String::from_utf8_lossy(&solved.stdout));
}

#[test]
fn cp_check_and_norms_documents() {
    let out = hypergroup(&["cp-check", "--group", "S3", "--expectation", "double_coset", "--params", SUBGROUP]);
    assert_eq!(out.status.code(), Some(0));
    let doc = json(&out);
    assert_eq!(doc["is_cp"], true);
    assert_eq!(doc["matrix_dim"], 8);
    let out = hypergroup(&["norms", "--group", "Z5", "--expectation", "automorphism_orbit",
        "--params", r#"{"autos":"all"}"#, "--samples", "16", "--seed", "4"]);
    assert_eq!(out.status.code(), Some(0));
    let doc = json(&out);
    assert_eq!(doc["seed"], 4);
    assert!(doc["worst_submult_ratio"].as_f64().unwrap() <= 1.0 + 1e-9);
}

#[test]
fn catalog_and_reps() {
    let doc = json(&hypergroup(&["catalog"]));
    assert_eq!(doc["groups"].as_array().unwrap().len(), 15);
    let doc = json(&hypergroup(&["reps", "--group", "S3", "--expectation", "conjugation"]));
    assert_eq!(doc["left"].as_array().unwrap().len(), 3);
    assert_eq!(doc["characters"].as_array().unwrap().len(), 3);
}

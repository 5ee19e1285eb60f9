use std::path::PathBuf;
use std::process::{Command, Output};

fn scene(name: &str) -> String {
    let root = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../scenes").join(name);
    root.to_string_lossy().into_owned()
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_transversal")).args(args).output().expect("binary runs")
}

fn json(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).expect("json report")
}

#[test]
fn distance_report() {
    let s = scene("scalar_points.json");
    let out = run(&["distance", "--scene", &s, "--which", "d2"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["command"], "distance");
    assert_eq!(v["status"], "ok");
    assert_eq!(v["results"]["value"], 2.5);
    assert_eq!(v["scene_digest"].as_str().unwrap().len(), 64);
}

#[test]
fn reports_are_byte_identical() {
    let s = scene("perpendicular_lines.json");
    let a = run(&["modulus", "--scene", &s, "--param", "samples=500"]);
    let b = run(&["modulus", "--scene", &s, "--param", "samples=500"]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let c = run(&["modulus", "--scene", &s, "--param", "samples=500", "--seed", "8"]);
    assert_ne!(a.stdout, c.stdout);
}

#[test]
fn certificate_found_and_not_found() {
    let s = scene("perpendicular_lines.json");
    let found = run(&["certify", "--scene", &s, "--form", "D2", "--param", "eps=0.6"]);
    assert_eq!(found.status.code(), Some(0));
    assert_eq!(json(&found)["results"]["bundle"]["residual"], 0.5);
    let missing = run(&["certify", "--scene", &s, "--form", "D2", "--param", "eps=0.4"]);
    assert_eq!(missing.status.code(), Some(3));
    assert_eq!(json(&missing)["status"], "not-found-at-budget");
}

#[test]
fn error_exit_codes() {
    let s = scene("tangent_disks.json");
    let bad = run(&["certify", "--scene", &s, "--param", "alpha=-1"]);
    assert_eq!(bad.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&bad.stderr).contains("alpha"));
    let pre = run(&[
        "translate",
        "--scene",
        &s,
        "--param",
        "mode=reversal",
        "--param",
        "tau=1.5",
        "--param",
        "points=[[0,0],[0,0]]",
        "--param",
        "duals=[[0.5,0],[-0.5,0]]",
    ]);
    assert_eq!(pre.status.code(), Some(2));
    let missing = run(&["distance", "--scene", "no-such-scene.json"]);
    assert_eq!(missing.status.code(), Some(1));
}

#[test]
fn schema_violation_names_the_path() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("bad.json");
    std::fs::write(&p, r#"{"dimension": 1, "norm": {"kind": "euclidean"}, "sets": [{"name": "a", "set": {"variant": "point_cloud", "points": [["x"]]}}]}"#).unwrap();
    let out = run(&["distance", "--scene", p.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("sets[0]"));
}

#[test]
fn csv_plot_and_out_directory() {
    let s = scene("scalar_points.json");
    let csv = run(&["distance", "--scene", &s, "--which", "all", "--format", "csv"]);
    let text = String::from_utf8(csv.stdout).unwrap();
    assert!(text.starts_with("path,value\n"));
    assert!(text.contains("results.all_hold,true"));
    let dir = tempfile::tempdir().unwrap();
    let out = run(&["distance", "--scene", &s, "--which", "d1", "--format", "plot", "--out", dir.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let plot = std::fs::read_to_string(dir.path().join("distance.dat")).unwrap();
    assert!(plot.starts_with("# results.witness"));
}

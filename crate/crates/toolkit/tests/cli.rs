use std::fs;
use std::path::Path;
use std::process::Command;

use serde_json::Value;

fn run(args: &[&str]) -> (i32, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_newton-circle")).args(args).output().expect("binary runs");
    (out.status.code().unwrap_or(-1), String::from_utf8_lossy(&out.stderr).into_owned())
}

fn read_json(path: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn newton_report_lists_vertices_and_normals() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("out.json");
    let (code, _) = run(&["newton", "--poly", "m1^3*m2 + m1*m2^3", "--json", path.to_str().unwrap()]);
    assert_eq!(code, 0);
    let report = read_json(&path);
    assert_eq!(report["command"], "newton");
    let row = &report["results"][0];
    assert_eq!(row["vertices"], serde_json::json!([[1, 3], [3, 1]]));
    assert_eq!(row["normals"], serde_json::json!([[0, 1], [1, 1], [1, 0]]));
    assert!(report["checks"].as_array().unwrap().iter().all(|c| c["pass"] == true));
}

#[test]
fn iw_suite_passes() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("iw.json");
    let (code, err) = run(&["verify", "--suite", "iw", "--rho", "1/2", "--lmax", "3", "--json", path.to_str().unwrap()]);
    assert_eq!(code, 0, "{err}");
    assert!(!read_json(&path)["checks"].as_array().unwrap().is_empty());
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(run(&["expsum", "--poly", "bogus(", "--xi", "1", "--m1", "2", "--m2", "2"]).0, 2);
    assert_eq!(run(&["frobnicate"]).0, 2);
    assert_eq!(run(&["verify", "--suite", "nope"]).0, 2);
    let (code, err) = run(&["newton", "--poly", "m1*m2 + 7"]);
    assert_eq!(code, 2);
    assert!(err.contains("P(0,0) = 0"), "{err}");
}

#[test]
fn gauss_sweep_has_one_row_per_modulus() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("g.csv");
    let (code, _) = run(&["gauss", "--poly", "m1^2*m2^3", "--qmax", "50", "--results-csv", path.to_str().unwrap()]);
    assert_eq!(code, 0);
    let text = fs::read_to_string(&path).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("q,a_count,max_abs_G"));
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 50);
    assert!(rows[0].starts_with("1,1,"));
    assert!(rows[49].starts_with("50,20,"));
}

#[test]
fn reports_without_timing_are_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let args = |p: &Path| {
        vec!["verify".to_string(), "--suite".into(), "osc".into(), "--no-timing".into(), "--json".into(), p.to_str().unwrap().into()]
    };
    let (a, b) = (dir.path().join("a.json"), dir.path().join("b.json"));
    for p in [&a, &b] {
        let owned = args(p);
        let refs: Vec<&str> = owned.iter().map(String::as_str).collect();
        assert_eq!(run(&refs).0, 0);
    }
    assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());
    assert_eq!(read_json(&a)["runtime_ms"], 0);
}

#[test]
fn average_reads_function_files() {
    let dir = tempfile::tempdir().unwrap();
    let f = dir.path().join("f.json");
    fs::write(&f, r#"{"2": [1.0, 0.0]}"#).unwrap();
    let out = dir.path().join("avg.json");
    let (code, err) = run(&[
        "average", "--poly", "m1*m2", "--f", f.to_str().unwrap(), "--m1", "2", "--m2", "2", "--x", "4", "--json", out.to_str().unwrap(),
    ]);
    assert_eq!(code, 0, "{err}");
    // 4 - m1 m2 hits 2 twice on [2]^2.
    let v = read_json(&out)["results"][0]["re"].as_f64().unwrap();
    assert!((v - 0.5).abs() < 1e-15);
}

#[test]
fn arcs_with_defaults_carry_the_scale_warning() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("arcs.json");
    let (code, _) = run(&["arcs", "--poly", "m1^2*m2^3", "--m1", "64", "--m2", "64", "--xi", "1/3", "--json", out.to_str().unwrap()]);
    assert_eq!(code, 0);
    let report = read_json(&out);
    assert!(report["params"]["warning"].is_string());
    assert_eq!(report["results"][0]["center"], "1/3");
    let (code, _) = run(&["arcs", "--poly", "m1^2*m2^3", "--m1", "64", "--m2", "64", "--beta", "4", "--rho", "1/100"]);
    assert_eq!(code, 2);
}

use std::fs;
use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_diastasis")).args(args).output().expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is json")
}

#[test]
fn diastasis_at_origin_matches_log() {
    let out = run(&["diastasis", "--space", "ball2", "--w", "0,0,0,0", "--z", "0.5,0,0,0"]);
    assert!(out.status.success());
    let d = json(&out)["diastasis"].as_f64().unwrap();
    // -log(1 - 0.25)
    assert!((d - (4.0f64 / 3.0).ln()).abs() < 1e-12, "{d}");
}

#[test]
fn distance_accepts_negative_coordinates() {
    let out = run(&["distance", "--space", "ball1", "--w", "0,0", "--z", "-0.5,0"]);
    assert!(out.status.success());
    let d = json(&out)["distance"].as_f64().unwrap();
    assert!((d - 0.5f64.atanh()).abs() < 1e-12);
}

#[test]
fn point_outside_domain_exits_2() {
    let out = run(&["diastasis", "--space", "ball2", "--w", "0,0,0,0", "--z", "1.5,0,0,0"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(out.stdout.is_empty());
    assert!(String::from_utf8_lossy(&out.stderr).contains("error"));
}

#[test]
fn malformed_numbers_and_spaces_exit_2() {
    assert_eq!(run(&["distance", "--space", "ball2", "--w", "0,x", "--z", "0,0"]).status.code(), Some(2));
    assert_eq!(run(&["distance", "--space", "sphere2", "--w", "0,0", "--z", "0,0"]).status.code(), Some(2));
    assert_eq!(run(&["distance", "--space", "ball2", "--w", "0,0", "--z", "0,0"]).status.code(), Some(2));
}

#[test]
fn matrix_ball_distance_of_diagonal_point() {
    let out = run(&["distance", "--space", "omega1-2", "--w", "0,0,0,0,0,0,0,0", "--z", "0.5,0,0,0,0,0,0.5,0"]);
    assert!(out.status.success());
    let d = json(&out)["distance"].as_f64().unwrap();
    assert!((d - 2f64.sqrt() * 0.5f64.atanh()).abs() < 1e-12);
}

#[test]
fn one_atom_barycentre_returns_the_atom() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("p.json");
    fs::write(&path, r#"{"atoms": [{"z": [[0.3, -0.1], [0.0, 0.2]], "w": 1.5}]}"#).unwrap();
    let out = run(&["barycentre", "--problem", path.to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let v = json(&out);
    let got: Vec<f64> = v["point"]
        .as_array()
        .unwrap()
        .iter()
        .flat_map(|p| p.as_array().unwrap().iter().map(|x| x.as_f64().unwrap()))
        .collect();
    for (a, b) in got.iter().zip([0.3, -0.1, 0.0, 0.2]) {
        assert!((a - b).abs() < 1e-12);
    }
    assert!(v["residual"].as_f64().unwrap() <= 1e-10);
}

#[test]
fn barycentre_rejects_unknown_fields_and_missing_files() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("p.json");
    fs::write(&path, r#"{"atoms": [{"z": [[0.3, 0.0]], "w": 1.0, "mass": 2}]}"#).unwrap();
    assert_eq!(run(&["barycentre", "--problem", path.to_str().unwrap()]).status.code(), Some(2));
    let missing = dir.path().join("none.json");
    assert_eq!(run(&["barycentre", "--problem", missing.to_str().unwrap()]).status.code(), Some(2));
}

#[test]
fn entropy_of_ball2_is_four() {
    let out = run(&["entropy", "--space", "ball2", "--tol", "0.05"]);
    assert!(out.status.success());
    let v = json(&out);
    assert!((v["entropy"].as_f64().unwrap() - 4.0).abs() <= 0.1);
    assert!((v["critical_exponent"].as_f64().unwrap() - 2.0).abs() <= 0.05);
    assert_eq!(v["x_constant"].as_f64().unwrap(), 2.0);
}

#[test]
fn entropy_rejects_matrix_ball_and_tiny_tolerance() {
    assert_eq!(run(&["entropy", "--space", "omega1-2"]).status.code(), Some(2));
    assert_eq!(run(&["entropy", "--space", "ball2", "--tol", "1e-6"]).status.code(), Some(2));
}

#[test]
fn verify_is_deterministic_for_a_seed() {
    let strip = |mut v: Value| {
        v.as_object_mut().unwrap().remove("wall_time_s");
        v
    };
    let a = run(&["verify", "hyperbolic", "--seed", "7", "--samples", "200"]);
    let b = run(&["verify", "hyperbolic", "--seed", "7", "--samples", "200"]);
    assert_eq!(a.status.code(), Some(0));
    let (a, b) = (strip(json(&a)), strip(json(&b)));
    assert_eq!(a, b);
    assert_eq!(a["seed"], 7);
    assert_eq!(a["pass"], true);
    assert!(!a["records"].as_array().unwrap().is_empty());
}

#[test]
fn verify_unknown_suite_exits_2() {
    let out = run(&["verify", "nonsense"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(out.stdout.is_empty());
}

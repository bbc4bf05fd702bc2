use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

use torus_orbit_core::mcg_algebra::{classify_nilpotent_subgroup, ClosureCaps, IntMatrix2, McgClassification};

fn data(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("data").join(name)
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_torus-orbit")).args(args).output().expect("binary runs")
}

fn run_data(cmd: &str, file: &str, extra: &[&str]) -> (i32, Value) {
    let path = data(file);
    let fast = data("fast.json");
    let mut args = vec![cmd, path.to_str().unwrap(), "--config", fast.to_str().unwrap()];
    args.extend_from_slice(extra);
    let out = run(&args);
    let doc: Value = serde_json::from_slice(&out.stdout).expect("json report");
    (out.status.code().unwrap(), doc)
}

fn matrix(v: &Value) -> IntMatrix2 {
    let rows: [[i64; 2]; 2] = serde_json::from_value(v.clone()).unwrap();
    IntMatrix2::from_rows(rows).unwrap()
}

#[test]
fn reports_embed_config_and_version() {
    let (code, doc) = run_data("lefschetz", "cyclic.json", &["--seed", "9"]);
    assert_eq!(code, 0);
    assert_eq!(doc["format_version"], "torus-orbit-report/1");
    assert_eq!(doc["config"]["seed"], 9);
    assert_eq!(doc["config"]["birkhoff_n"], 2000);
    assert_eq!(doc["result"]["entries"][0]["lefschetz"], -1);
    assert_eq!(doc["result"]["entries"][0]["type"], "hyperbolic");
}

#[test]
fn classify_matches_the_library() {
    let (code, doc) = run_data("classify", "cyclic.json", &[]);
    assert_eq!(code, 0);
    let lib = classify_nilpotent_subgroup(&[IntMatrix2::new(0, 1, 1, 1).unwrap()], ClosureCaps::default()).unwrap();
    let McgClassification::Cyclic { root, .. } = lib else { panic!("{lib:?}") };
    assert_eq!(doc["result"]["classification"]["tag"], "cyclic");
    assert_eq!(matrix(&doc["result"]["classification"]["root"]), root);

    let (code, doc) = run_data("classify", "dihedral.json", &[]);
    assert_eq!(code, 0);
    let c = &doc["result"]["classification"];
    assert_eq!(c["tag"], "dihedral-h");
    assert_eq!(c["table"].as_array().unwrap().len(), 8);

    let (code, doc) = run_data("classify", "not_nilpotent.json", &[]);
    assert_eq!(code, 0);
    let c = &doc["result"]["classification"];
    assert_eq!(c["tag"], "not-nilpotent");
    // [g1, g2] = g1 g2 g1^-1 g2^-1 in signed 1-based letters
    let gens = [IntMatrix2::new(2, 1, 1, 1).unwrap(), IntMatrix2::new(1, 1, 0, 1).unwrap()];
    let value = c["witness"].as_array().unwrap().iter().fold(IntMatrix2::IDENTITY, |acc, l| {
        let l = l.as_i64().unwrap();
        let g = gens[(l.unsigned_abs() - 1) as usize];
        acc.checked_mul(&if l < 0 { g.inverse() } else { g }).unwrap()
    });
    assert_eq!(value, matrix(&c["value"]));
}

#[test]
fn verify_exit_codes() {
    let (code, doc) = run_data("verify", "ghat.json", &[]);
    assert_eq!(code, 0);
    assert_eq!(doc["result"]["orbit_size"], 4);
    assert_eq!(doc["result"]["classification"]["tag"], "cyclic");
    assert_eq!(doc["result"]["lefschetz"], 4);
    assert!(doc["result"]["generator_residuals"].as_array().unwrap().iter().all(|r| r.as_f64().unwrap() <= 1e-9));

    let (code, doc) = run_data("verify", "sqrt2.json", &[]);
    assert_eq!(code, 11);
    assert_eq!(doc["status"], "failed");
    assert_eq!(doc["result"]["failure"]["stage"], "no-special-element");

    let (code, doc) = run_data("verify", "minus_identity.json", &[]);
    assert_eq!(code, 0);
    assert_eq!(doc["result"]["orbit_size"], 1);

    let (code, doc) = run_data("finite-orbit", "perturbed.json", &[]);
    assert_eq!(code, 0);
    assert_eq!(doc["result"]["orbit_size"], 2);
    assert!(doc["result"].get("log").is_none());
}

#[test]
fn thin_wrappers() {
    let (code, doc) = run_data("fixed-points", "minus_identity_map.json", &[]);
    assert_eq!(code, 0);
    assert_eq!(doc["result"]["search"]["records"].as_array().unwrap().len(), 4);
    assert_eq!(doc["result"]["index_sum"]["sum"], 4);

    let (code, doc) = run_data("rotation-set", "sqrt2_map.json", &[]);
    assert_eq!(code, 0);
    let hull = doc["result"]["hull"].as_array().unwrap();
    assert_eq!(hull.len(), 1);
    assert!((hull[0][0].as_f64().unwrap() - std::f64::consts::SQRT_2).abs() < 1e-12);
    assert_eq!(hull[0][1].as_f64().unwrap(), 0.0);

    let (code, doc) = run_data("circle", "rotation.json", &[]);
    assert_eq!(code, 0);
    assert!((doc["result"]["rotation_number"].as_f64().unwrap() - 0.3).abs() < 1e-12);

    let (code, doc) = run_data("circle", "reflection.json", &[]);
    assert_eq!(code, 0);
    let pts: Vec<f64> = serde_json::from_value(doc["result"]["fixed_points"].clone()).unwrap();
    assert!((pts[0] - 0.15).abs() < 1e-9 && (pts[1] - 0.65).abs() < 1e-9);

    let (code, doc) = run_data("double-annulus", "annulus_flip.json", &[]);
    assert_eq!(code, 0);
    assert_eq!(matrix(&doc["result"]["class"]), IntMatrix2::MINUS_IDENTITY);
    assert_eq!(doc["result"]["lefschetz"], 4);

    let (code, doc) = run_data("klein", "klein_map.json", &["--declared", "2"]);
    assert_eq!(code, 0);
    assert_eq!(doc["result"]["lefschetz"], serde_json::json!([0, 4]));

    let (code, _) = run_data("klein", "klein_map.json", &["--declared", "1"]);
    assert_eq!(code, 4);
}

#[test]
fn rotation_set_rejects_other_classes() {
    let (code, doc) = run_data("rotation-set", "minus_identity_map.json", &[]);
    assert_eq!(code, 4);
    assert!(doc["result"]["error"].is_string());
}

#[test]
fn malformed_input_exits_with_2() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, "{\"generators\": [[[2, 0], [0, 1]]]}").unwrap();
    let out = run(&["classify", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(!out.stderr.is_empty());

    let out = run(&["classify", dir.path().join("missing.json").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));

    let out = run(&["no-such-command"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn output_is_deterministic_and_can_go_to_a_file() {
    let dir = tempfile::tempdir().unwrap();
    let fast = data("fast.json");
    let ghat = data("ghat.json");
    let mut reports = Vec::new();
    for name in ["a.json", "b.json"] {
        let path = dir.path().join(name);
        let out = run(&[
            "verify",
            ghat.to_str().unwrap(),
            "--config",
            fast.to_str().unwrap(),
            "--out",
            path.to_str().unwrap(),
        ]);
        assert_eq!(out.status.code(), Some(0));
        assert!(out.stdout.is_empty());
        reports.push(std::fs::read(path).unwrap());
    }
    assert_eq!(reports[0], reports[1]);
}

#[test]
fn csv_output() {
    let fast = data("fast.json");
    let file = data("minus_identity_map.json");
    let out = run(&["fixed-points", file.to_str().unwrap(), "--config", fast.to_str().unwrap(), "--format", "csv"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines().filter(|l| !l.starts_with('#'));
    assert_eq!(lines.next(), Some("x,y,lift_v0,lift_v1,residual,det,index"));
    assert_eq!(lines.count(), 4);
    assert!(text.contains("# config: {"));
}

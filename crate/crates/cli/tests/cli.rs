use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_torsionscope"))
}

fn run(dir: &Path, args: &[&str]) -> Output {
    bin().current_dir(dir).args(args).output().expect("spawn")
}

fn json_file(path: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn rp2_homology_report() {
    let dir = tempfile::tempdir().unwrap();
    assert!(run(dir.path(), &["generate", "--dataset", "rp2-triangulation", "--out", "rp2.json"]).status.success());
    let out = run(dir.path(), &["homology", "--in", "rp2.json", "--k", "1"]);
    assert!(out.status.success());
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["betti"], 0);
    assert_eq!(v["torsion"], serde_json::json!([2]));
    assert_eq!(v["format_version"], 1);
    let out = run(dir.path(), &["homology", "--in", "rp2.json", "--k", "2", "--field", "zp", "--prime", "2"]);
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["dim"], 1);
}

#[test]
fn snf_example() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("m.json"), r#"{"format_version":1,"rows":2,"cols":2,"triplets":[[0,0,2],[0,1,4],[1,0,6],[1,1,8]]}"#).unwrap();
    let out = run(dir.path(), &["snf", "--in", "m.json", "--transforms"]);
    assert!(out.status.success());
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["divisors"], serde_json::json!([2, 4]));
    assert!(v["u"].is_object() && v["v"].is_object());
}

#[test]
fn compare_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    assert!(run(d, &["generate", "--dataset", "rp2-filtration", "--out", "f.json"]).status.success());
    for (field, out) in [(&["--field", "q"][..], "q.json"), (&["--field", "zp", "--prime", "2"][..], "z2.json"), (&["--field", "zp", "--prime", "3"][..], "z3.json")] {
        let mut args = vec!["persist", "--in", "f.json", "--k", "2", "--out", out];
        args.extend_from_slice(field);
        assert!(run(d, &args).status.success());
    }
    assert_eq!(run(d, &["compare", "q.json", "z2.json"]).status.code(), Some(3));
    assert_eq!(run(d, &["compare", "q.json", "z3.json"]).status.code(), Some(0));
}

#[test]
fn error_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    run(d, &["generate", "--dataset", "rp2-filtration", "--out", "f.json"]);
    let composite = run(d, &["persist", "--in", "f.json", "--field", "zp", "--prime", "15"]);
    assert_eq!(composite.status.code(), Some(1));
    let err: Value = serde_json::from_slice(&composite.stderr).unwrap();
    assert_eq!(err["error"], "not_prime");
    assert_eq!(run(d, &["homology", "--in", "missing.json", "--k", "0"]).status.code(), Some(2));
    fs::write(d.join("bad.json"), "{ not json").unwrap();
    assert_eq!(run(d, &["snf", "--in", "bad.json"]).status.code(), Some(2));
    fs::write(d.join("v2.json"), r#"{"format_version":2,"rows":1,"cols":1,"triplets":[]}"#).unwrap();
    assert_eq!(run(d, &["snf", "--in", "v2.json"]).status.code(), Some(2));
    assert_eq!(run(d, &["frobnicate"]).status.code(), Some(2));
    assert_eq!(run(d, &["generate", "--dataset", "nope"]).status.code(), Some(2));
}

#[test]
fn build_pipeline_composes() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    assert!(run(d, &["generate", "--dataset", "random-cloud", "--points", "9", "--seed", "5", "--out", "c.json"]).status.success());
    assert!(run(d, &["build", "--in", "c.json", "--flavor", "cech", "--scales", "0.1,0.3,0.6", "--skeleton", "2", "--out", "f.json"]).status.success());
    let primes = run(d, &["primes", "--in", "f.json", "--k", "2", "--out", "p.json"]);
    assert!(primes.status.success());
    let report = json_file(&d.join("p.json"));
    assert!(report["aggregate"].is_array());
    let cert = run(d, &["primes", "--in", "f.json", "--k", "2", "--certify", "5"]);
    let cert: Value = serde_json::from_slice(&cert.stdout).unwrap();
    assert_eq!(cert["pass"], true);
    assert!(run(d, &["persist", "--in", "f.json", "--k", "2", "--out", "a.json"]).status.success());
    assert!(run(d, &["persist", "--in", "f.json", "--k", "2", "--field", "zp", "--prime", "5", "--out", "b.json"]).status.success());
    assert_eq!(run(d, &["compare", "a.json", "b.json"]).status.code(), Some(0));
    let obstruct = run(d, &["obstruct", "--in", "f.json", "--vanishing", "--n", "2", "--k", "2"]);
    assert_eq!(obstruct.status.code(), Some(1), "max_k must exceed n");
    let obstruct = run(d, &["obstruct", "--in", "f.json", "--n", "1"]);
    assert!(obstruct.status.success());
}

#[test]
fn rips_build_is_flag() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    run(d, &["generate", "--dataset", "circle", "--points", "12", "--out", "c.json"]);
    assert!(run(d, &["build", "--in", "c.json", "--eps", "0.2", "--max-dim", "2", "--out", "r.json"]).status.success());
    let out = run(d, &["obstruct", "--in", "r.json"]);
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["verdict"], "FLAG");
    let out = run(d, &["homology", "--in", "r.json", "--k", "1", "--field", "q"]);
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["dim"], 1);
}

#[test]
fn text_barcode_and_threads() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    run(d, &["generate", "--dataset", "klein-filtration", "--out", "k.json"]);
    let a = bin().current_dir(d).env("TORSIONSCOPE_THREADS", "1").args(["persist", "--in", "k.json", "--k", "2", "--text"]).output().unwrap();
    let b = bin().current_dir(d).env("TORSIONSCOPE_THREADS", "4").args(["persist", "--in", "k.json", "--k", "2", "--text"]).output().unwrap();
    assert_eq!(a.stdout, b.stdout);
    let text = String::from_utf8(a.stdout).unwrap();
    assert!(text.lines().all(|l| l.starts_with('H')));
    assert!(text.contains("inf)"));
    let bad = bin().current_dir(d).env("TORSIONSCOPE_THREADS", "zero").args(["generate", "--dataset", "circle"]).output().unwrap();
    assert_eq!(bad.status.code(), Some(2));
}

#[test]
fn axioms_report() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("m.json"), r#"{"kind":"randers","b":[0.3,-0.2]}"#).unwrap();
    let out = run(dir.path(), &["axioms", "--in", "m.json", "--samples", "100"]);
    assert!(out.status.success());
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["passed"], true);
    fs::write(dir.path().join("bad.json"), r#"{"kind":"randers","b":[0.9,0.9]}"#).unwrap();
    assert_eq!(run(dir.path(), &["axioms", "--in", "bad.json"]).status.code(), Some(2));
}

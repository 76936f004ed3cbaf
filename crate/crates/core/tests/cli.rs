use std::path::Path;
use std::process::{Command, Output};

use pqa::files::read_matrix;
use pqa::qsvd::numerical_rank;

fn pqa(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pqa")).args(args).output().expect("binary runs")
}

fn ok(args: &[&str]) -> String {
    let out = pqa(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

#[test]
fn generate_decompose_approximate() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.json");
    ok(&["gen", "lowrank", "--m", "12", "--n", "10", "--rank", "1", "--seed", "3", "--out", p(&a)]);
    assert!(read_matrix(&a).unwrap().is_pure());

    let sv = dir.path().join("sv.csv");
    let printed = ok(&["qsvd", p(&a), "--sv", p(&sv), "--method", "householder"]);
    assert_eq!(printed.lines().count(), 10);
    let csv = std::fs::read_to_string(&sv).unwrap();
    assert!(csv.starts_with("index,sigma\n1,"));

    for solver in ["altproj", "hybrid", "qsvdtr"] {
        let sol = dir.path().join(format!("{solver}.json"));
        let trace = dir.path().join(format!("{solver}.csv"));
        let report = ok(&[
            "approx", solver, p(&a), "--rank", "4", "--drsm-steps", "10", "--out", p(&sol), "--trace", p(&trace),
        ]);
        let report: serde_json::Value = serde_json::from_str(&report).unwrap();
        assert!(report["objective"].as_f64().unwrap() < 1e-8, "{solver}: {report}");
        let x = read_matrix(&sol).unwrap();
        assert!(x.is_pure());
        assert_eq!(numerical_rank(&x, 1e-10).unwrap(), 4);
        if solver == "hybrid" {
            assert_eq!(report["drsm_steps"], 10);
            let t = std::fs::read_to_string(&trace).unwrap();
            assert_eq!(t.lines().filter(|l| l.starts_with("drsm,")).count(), 10);
        }
    }
}

#[test]
fn image_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let img = concat!(env!("CARGO_MANIFEST_DIR"), "/tests/data/astronaut_64.ppm");
    let q = dir.path().join("img.json");
    let back = dir.path().join("back.ppm");
    ok(&["img2q", img, p(&q)]);
    let a = read_matrix(&q).unwrap();
    assert_eq!(a.shape(), (64, 64));
    ok(&["q2img", p(&q), p(&back)]);
    assert_eq!(std::fs::read(img).unwrap(), std::fs::read(&back).unwrap());
}

#[test]
fn experiment_from_spec_file() {
    let dir = tempfile::tempdir().unwrap();
    let spec = dir.path().join("spec.json");
    std::fs::write(&spec, r#"{"kind": "synthetic5x5", "ranks": [4], "convention": "b"}"#).unwrap();
    let out = pqa(&["experiment", p(&spec), "--out-dir", p(&dir.path().join("o"))]);
    assert_eq!(out.status.code(), Some(1), "unknown kind is rejected");

    std::fs::write(&spec, r#"{"kind": "synthetic_5x5", "ranks": [4], "convention": "b"}"#).unwrap();
    let printed = ok(&["experiment", p(&spec), "--out-dir", p(&dir.path().join("o"))]);
    assert!(printed.contains("altproj"));
    assert!(dir.path().join("o/summary.json").exists());
}

#[test]
fn bad_input_exits_with_one() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.json");
    ok(&["gen", "pure", "--m", "5", "--n", "4", "--out", p(&a)]);

    let out = pqa(&["approx", "altproj", p(&a), "--rank", "9"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("rank"));
    assert_eq!(pqa(&["approx", "qsvdtr", p(&a), "--rank", "3", "--convention", "b"]).status.code(), Some(1));
    assert_eq!(pqa(&["approx", "nope", p(&a), "--rank", "2"]).status.code(), Some(1));
    assert_eq!(pqa(&["qsvd", p(&dir.path().join("missing.json"))]).status.code(), Some(1));

    let spec = dir.path().join("empty.json");
    std::fs::write(&spec, r#"{"kind": "random_pure", "m": 8, "n": 8, "ranks": []}"#).unwrap();
    let out = pqa(&["experiment", p(&spec), "--out-dir", p(&dir.path().join("e"))]);
    assert_eq!(out.status.code(), Some(1));
    assert!(!dir.path().join("e/summary.json").exists());

    assert_eq!(pqa(&["--help"]).status.code(), Some(0));
}

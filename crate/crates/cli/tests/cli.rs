use std::path::Path;
use std::process::{Command, Output};

fn pdtemplates(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pdtemplates")).current_dir(dir).args(args).output().expect("binary runs")
}

fn ok(dir: &Path, args: &[&str]) -> String {
    let out = pdtemplates(dir, args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

fn code(dir: &Path, args: &[&str]) -> i32 {
    pdtemplates(dir, args).status.code().unwrap()
}

#[test]
fn manifold_pipeline_end_to_end() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path();
    ok(dir, &["--seed", "4", "--out", "data", "gen-manifold", "--points", "50", "--count", "4"]);
    let manifest: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(dir.join("data/manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["items"].as_array().unwrap().len(), 24);

    ok(dir, &["--out", "data", "compute-pd", "--input", "data"]);
    assert!(dir.join("data/00000/diagram_h0.csv").exists());
    assert!(dir.join("data/00023/diagram_h1.csv").exists());

    ok(dir, &["--out", "feats.csv", "featurize", "--input", "data", "--featurizer", "polynomials", "--m", "4", "--n", "4"]);
    assert!(dir.join("feats.featurizer.json").exists());
    let header = std::fs::read_to_string(dir.join("feats.csv")).unwrap().lines().next().unwrap().to_string();
    assert_eq!(header.split(',').count(), 2 * 25);

    ok(dir, &["--out", "model.json", "train", "--features", "feats.csv", "--labels", "feats_labels.csv", "--folds", "3"]);
    let report = ok(dir, &["--out", "pred.csv", "evaluate", "--model", "model.json", "--features", "feats.csv", "--labels", "feats_labels.csv"]);
    let accuracy: f64 = report.lines().find_map(|l| l.strip_prefix("accuracy,")).unwrap().parse().unwrap();
    assert!((0.0..=1.0).contains(&accuracy));
    assert_eq!(std::fs::read_to_string(dir.join("pred.csv")).unwrap().lines().count(), 25);
}

#[test]
fn featurizer_sidecar_is_reused_for_new_data() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path();
    ok(dir, &["--seed", "1", "--out", "a", "gen-normal", "--count", "6"]);
    ok(dir, &["--seed", "2", "--out", "b", "gen-normal", "--count", "3", "--mu", "2,5", "--label", "1"]);
    ok(dir, &["--out", "fa.csv", "featurize", "--input", "a", "--dims", "0", "--d", "4"]);
    ok(dir, &["--out", "fb.csv", "featurize", "--input", "b", "--dims", "0", "--reuse", "fa.featurizer.json"]);
    let header = |f: &str| std::fs::read_to_string(dir.join(f)).unwrap().lines().next().unwrap().to_string();
    assert_eq!(header("fa.csv"), header("fb.csv"));
    assert_eq!(
        std::fs::read_to_string(dir.join("fa.featurizer.json")).unwrap(),
        std::fs::read_to_string(dir.join("fb.featurizer.json")).unwrap()
    );
}

#[test]
fn rossler_series_are_labelled() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path();
    ok(dir, &["--out", "r", "gen-rossler", "--alpha", "0.37,0.42"]);
    let manifest: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(dir.join("r/manifest.json")).unwrap()).unwrap();
    let labels: Vec<u64> = manifest["items"].as_array().unwrap().iter().map(|i| i["label"].as_u64().unwrap()).collect();
    assert_eq!(labels, vec![0, 1]);
    assert!(dir.join("r/bifurcation.csv").exists());
    ok(dir, &["--out", "r", "compute-pd", "--input", "r", "--dims", "1"]);
    assert!(dir.join("r/00001/diagram_h1.csv").exists());
}

#[test]
fn experiments_are_reproducible() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path();
    let config = r#"{"experiment": "normal-regress-line", "runs": 2, "protocol": {"diagrams": 40}}"#;
    std::fs::write(dir.join("cfg.json"), config).unwrap();
    let printed = ok(dir, &["--config", "cfg.json", "--out", "one", "experiment", "normal-regress-line"]);
    assert!(printed.contains("r2 test"));
    ok(dir, &["--config", "cfg.json", "--out", "two", "--jobs", "1", "experiment", "normal-regress-line"]);
    let scores = |d: &str| std::fs::read(dir.join(d).join("scores.csv")).unwrap();
    assert_eq!(scores("one"), scores("two"));
    ok(dir, &["--seed", "3", "--out", "three", "experiment", "manifold", "--runs", "1", "--diagrams-per-class", "3"]);
    assert!(dir.join("three/predictions.csv").exists());
}

#[test]
fn exit_codes() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path();
    assert_eq!(code(dir, &["--help"]), 0);
    assert_eq!(code(dir, &["frobnicate"]), 1);
    assert_eq!(code(dir, &["gen-normal"]), 1, "missing --out");
    assert_eq!(code(dir, &["--out", "x", "gen-normal", "--sigma", "-1"]), 1);
    assert_eq!(code(dir, &["--out", "x", "gen-normal", "--mu", "1,2,3"]), 1);
    assert_eq!(code(dir, &["--jobs", "0", "--out", "x", "gen-normal"]), 1);
    std::fs::write(dir.join("bad.json"), r#"{"experiment": "manifold", "runs": 0}"#).unwrap();
    assert_eq!(code(dir, &["--config", "bad.json", "--out", "e", "experiment", "manifold"]), 1);
    assert!(!dir.join("e").exists());
    std::fs::write(dir.join("two_points.csv"), "0,0\n1,1\n").unwrap();
    assert_eq!(code(dir, &["--out", "pd", "compute-pd", "--input", "two_points.csv"]), 2);
    assert_eq!(code(dir, &["--out", "f.csv", "featurize", "--input", "missing"]), 2);
}

use std::collections::BTreeMap;
use std::path::Path;

use pdtemplates::experiment::{read_predictions, run_experiment, ExperimentConfig, ExperimentKind, FeaturizerConfig};
use pdtemplates::io::read_scores;

fn small(kind: ExperimentKind, dir: &Path) -> ExperimentConfig {
    let mut cfg = ExperimentConfig::new(kind, dir);
    cfg.runs = 2;
    cfg.seed = 5;
    cfg.lambda_grid = vec![0.01, 1.0];
    cfg.folds = 3;
    let p = &mut cfg.protocol;
    p.diagrams = 30;
    p.sweep_steps = 3;
    p.diagrams_per_class = 4;
    p.points_per_cloud = 60;
    p.alpha_steps = 12;
    p.max_cloud_points = 60;
    cfg
}

fn files(dir: &Path) -> BTreeMap<String, Vec<u8>> {
    std::fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let e = e.unwrap();
            (e.file_name().to_string_lossy().into_owned(), std::fs::read(e.path()).unwrap())
        })
        .collect()
}

#[test]
fn repeated_runs_write_identical_bytes() {
    let tmp = tempfile::tempdir().unwrap();
    for kind in [ExperimentKind::NormalClassify, ExperimentKind::Manifold] {
        let a = small(kind, &tmp.path().join(format!("{kind}-a")));
        let mut b = small(kind, &tmp.path().join(format!("{kind}-b")));
        b.jobs = Some(1);
        run_experiment(&a).unwrap();
        run_experiment(&b).unwrap();
        let (fa, mut fb) = (files(&a.output_dir), files(&b.output_dir));
        // config.json records the output directory and job count
        fb.insert("config.json".into(), fa["config.json"].clone());
        assert_eq!(fa, fb, "{kind}");
    }
}

#[test]
fn scores_can_be_rederived_from_predictions() {
    let tmp = tempfile::tempdir().unwrap();
    for kind in [ExperimentKind::NormalClassify, ExperimentKind::NormalRegressLine] {
        let cfg = small(kind, &tmp.path().join(kind.name()));
        run_experiment(&cfg).unwrap();
        let predictions = read_predictions(&cfg.output_dir.join("predictions.csv")).unwrap();
        let scores = read_scores(&cfg.output_dir.join("scores.csv")).unwrap();
        let per_run: Vec<_> = scores.iter().filter(|r| r.run.parse::<usize>().is_ok()).collect();
        assert_eq!(per_run.len(), predictions.iter().map(|p| (&p.metric, p.run, &p.split)).collect::<std::collections::BTreeSet<_>>().len());
        for row in per_run {
            let run: usize = row.run.parse().unwrap();
            let rows: Vec<_> =
                predictions.iter().filter(|p| p.metric == row.metric && p.run == run && p.split == row.split).collect();
            assert!(!rows.is_empty());
            let derived = if row.metric == "r2" {
                let mean = rows.iter().map(|p| p.truth).sum::<f64>() / rows.len() as f64;
                let ss_res: f64 = rows.iter().map(|p| (p.truth - p.predicted).powi(2)).sum();
                let ss_tot: f64 = rows.iter().map(|p| (p.truth - mean).powi(2)).sum();
                1.0 - ss_res / ss_tot
            } else {
                rows.iter().filter(|p| p.truth == p.predicted).count() as f64 / rows.len() as f64
            };
            assert!((derived - row.value).abs() <= 1e-9, "{} run {run} {}: {derived} vs {}", row.metric, row.split, row.value);
        }
    }
}

#[test]
fn invalid_configs_fail_before_writing() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path().join("out");
    let mut bad = vec![];
    let mut cfg = small(ExperimentKind::Manifold, &dir);
    cfg.runs = 0;
    bad.push(cfg);
    let mut cfg = small(ExperimentKind::Manifold, &dir);
    cfg.lambda_grid = vec![-1.0];
    bad.push(cfg);
    let mut cfg = small(ExperimentKind::NormalClassify, &dir);
    cfg.featurizer = Some(FeaturizerConfig::polynomials(0, 3));
    bad.push(cfg);
    let mut cfg = small(ExperimentKind::Rossler, &dir);
    cfg.protocol.alpha_min = 0.5;
    bad.push(cfg);
    for cfg in bad {
        let err = run_experiment(&cfg).unwrap_err();
        assert!(err.is_validation(), "{err}");
        assert!(!dir.exists());
    }
}

#[test]
fn failed_writes_leave_no_partial_outputs() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = small(ExperimentKind::NormalRegressLine, tmp.path());
    // a directory where a report file should go makes that write fail
    std::fs::create_dir(tmp.path().join("predictions.csv")).unwrap();
    assert!(run_experiment(&cfg).is_err());
    let left: Vec<_> = files_or_dirs(tmp.path());
    assert_eq!(left, vec!["predictions.csv".to_string()]);
}

fn files_or_dirs(dir: &Path) -> Vec<String> {
    let mut names: Vec<String> =
        std::fs::read_dir(dir).unwrap().map(|e| e.unwrap().file_name().to_string_lossy().into_owned()).collect();
    names.sort();
    names
}

#[test]
fn config_json_round_trips() {
    let tmp = tempfile::tempdir().unwrap();
    let mut cfg = small(ExperimentKind::Rossler, tmp.path());
    cfg.featurizer = Some(FeaturizerConfig::fixed_tents(6, 0.3, 0.01));
    cfg.dims = Some(vec![1]);
    let text = cfg.to_json().unwrap();
    assert_eq!(ExperimentConfig::from_json(&text).unwrap(), cfg);
    assert!(ExperimentConfig::from_json(r#"{"experiment": "manifold", "unknown": 1}"#).is_err());
}

#[test]
fn rossler_report_labels_every_parameter() {
    let tmp = tempfile::tempdir().unwrap();
    let mut cfg = small(ExperimentKind::Rossler, tmp.path());
    cfg.runs = 1;
    let report = run_experiment(&cfg).unwrap();
    assert_eq!(report.rossler.as_ref().unwrap().len(), cfg.protocol.alpha_steps);
    let labels = std::fs::read_to_string(tmp.path().join("rossler_labels.csv")).unwrap();
    assert_eq!(labels.lines().next(), Some("alpha,score,label"));
    assert_eq!(labels.lines().count(), cfg.protocol.alpha_steps + 1);
    assert!(tmp.path().join("bifurcation.csv").exists());
}

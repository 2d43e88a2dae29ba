//! End-to-end experiment protocols with CSV reports.
//!
//! [`run_experiment`] validates the configuration, runs the protocol once per
//! run with seeds derived from the base seed, and writes:
//!
//! * `scores.csv`: `experiment,run,split,metric,value` rows per run plus
//!   `mean` and `std` (sample standard deviation) summary rows;
//! * `predictions.csv`: every prediction behind those scores, so each score
//!   row can be recomputed;
//! * `coefficients_{dim}_{class}.csv`: weight grids of the first run's model
//!   (the last sweep step for `normal-classify`; class `target` for
//!   regression);
//! * `config.json`: the resolved configuration;
//! * for `rossler`, also `rossler_labels.csv` and `bifurcation.csv`.
//!
//! Seeds: run `r` uses `derive_seed(seed, r)`; within a run, sub-streams 1, 2
//! and 3 drive the train/test split, the cross-validation folds, and data
//! generation. The Rossler sweep is simulated once per experiment from
//! `derive_seed(seed, 3)` and only the splits vary between runs.

mod config;
mod protocols;

use std::path::{Path, PathBuf};

use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

pub use config::{DelayRule, ExperimentConfig, ExperimentKind, FeaturizerConfig, ProtocolParams};
pub use protocols::{
    alpha_grid, cloud_diagrams, manifold_dataset, normal_classify_dataset, normal_regress_dataset, rossler_cloud,
    rossler_dataset, sweep_mu_b, sweep_t, MeanLaw, RosslerSample,
};

use crate::datagen::{derive_seed, rng, RosslerLabel};
use crate::error::{Error, Result};
use crate::exec::{self, ExecMode};
use crate::featurize::{featurize_dataset, ColumnKey, DatasetFeaturizer, DiagramSet};
use crate::io::{self, ScoreRow};
use crate::learn::{accuracy, coefficient_grid, r2_score, ridge_classifier_fit, ridge_cv, CoefficientGrid, CvOptions, Folds, Labels, RidgeModel};

const STREAM_SPLIT: u64 = 1;
const STREAM_CV: u64 = 2;
const STREAM_DATA: u64 = 3;

/// Seed of run `run`.
pub fn run_seed(seed: u64, run: usize) -> u64 {
    derive_seed(seed, run as u64)
}

/// Seeded shuffle split; the test part has `round(test_fraction * n)` rows,
/// at least one and leaving at least one for training. Both parts are
/// returned in ascending order.
pub fn split_indices(n: usize, test_fraction: f64, seed: u64) -> (Vec<usize>, Vec<usize>) {
    let mut idx: Vec<usize> = (0..n).collect();
    idx.shuffle(&mut rng(seed));
    let test_len = ((test_fraction * n as f64).round() as usize).clamp(1, n.saturating_sub(1).max(1));
    let (test, train) = idx.split_at(test_len.min(n));
    let (mut train, mut test) = (train.to_vec(), test.to_vec());
    train.sort_unstable();
    test.sort_unstable();
    (train, test)
}

/// One persisted prediction.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Prediction {
    pub metric: String,
    pub run: usize,
    pub split: String,
    pub item: usize,
    #[serde(rename = "true")]
    pub truth: f64,
    pub predicted: f64,
}

/// Outcome of fitting on one train/test split.
#[derive(Debug, Clone)]
pub struct Evaluation {
    pub featurizer: DatasetFeaturizer,
    pub columns: Vec<ColumnKey>,
    pub model: RidgeModel,
    pub train_score: f64,
    pub test_score: f64,
    pub train_predictions: Vec<f64>,
    pub test_predictions: Vec<f64>,
}

/// Settings shared by every fit of an experiment.
#[derive(Debug, Clone)]
pub struct FitSettings {
    pub featurizer: FeaturizerConfig,
    pub dims: Vec<usize>,
    pub lambda_grid: Vec<f64>,
    pub cv: CvOptions,
    pub mode: ExecMode,
}

fn subset<T: Clone>(items: &[T], idx: &[usize]) -> Vec<T> {
    idx.iter().map(|&i| items[i].clone()).collect()
}

/// Fits the featurizer parameters and the ridge model on `train` and scores
/// both splits (accuracy for classes, R^2 for regression targets).
pub fn evaluate_split(
    samples: &[DiagramSet],
    labels: &Labels,
    train: &[usize],
    test: &[usize],
    settings: &FitSettings,
) -> Result<Evaluation> {
    let train_samples = subset(samples, train);
    let test_samples = subset(samples, test);

    let mut featurizer = DatasetFeaturizer::default();
    for &dim in &settings.dims {
        let diagrams: Vec<_> = train_samples.iter().filter_map(|s| s.get(dim).cloned()).collect();
        if diagrams.len() != train_samples.len() {
            return Err(Error::Config(format!("samples carry no H{dim} diagrams")));
        }
        let f = settings.featurizer.build(&diagrams).map_err(|e| e.in_stage("featurize"))?;
        match dim {
            0 => featurizer.h0 = Some(f),
            _ => featurizer.h1 = Some(f),
        }
    }
    let x_train = featurize_dataset(&train_samples, &featurizer, settings.mode).map_err(|e| Error::from(e).in_stage("featurize"))?;
    let x_test = featurize_dataset(&test_samples, &featurizer, settings.mode).map_err(|e| Error::from(e).in_stage("featurize"))?;

    let fit = |e: crate::learn::LearnError| Error::from(e).in_stage("fit");
    let (model, train_predictions, test_predictions, train_score, test_score) = match labels {
        Labels::Classes(all) => {
            let (y_train, y_test) = (subset(all, train), subset(all, test));
            let model = ridge_classifier_fit(&x_train, &y_train, &settings.lambda_grid, &settings.cv).map_err(fit)?;
            let p_train = model.predict_classes(&x_train).map_err(fit)?;
            let p_test = model.predict_classes(&x_test).map_err(fit)?;
            let s_train = accuracy(&y_train, &p_train).map_err(fit)?;
            let s_test = accuracy(&y_test, &p_test).map_err(fit)?;
            let as_f64 = |v: Vec<usize>| v.into_iter().map(|c| c as f64).collect::<Vec<_>>();
            (model, as_f64(p_train), as_f64(p_test), s_train, s_test)
        }
        Labels::Regression(all) => {
            let (y_train, y_test) = (subset(all, train), subset(all, test));
            let model = ridge_cv(&x_train, &y_train, &settings.lambda_grid, &settings.cv).map_err(fit)?;
            let p_train = model.predict(&x_train).map_err(fit)?;
            let p_test = model.predict(&x_test).map_err(fit)?;
            let s_train = r2_score(&y_train, &p_train).map_err(fit)?;
            let s_test = r2_score(&y_test, &p_test).map_err(fit)?;
            (model, p_train, p_test, s_train, s_test)
        }
    };
    Ok(Evaluation {
        columns: featurizer.column_index(),
        featurizer,
        model,
        train_score,
        test_score,
        train_predictions,
        test_predictions,
    })
}

/// Everything an experiment produced.
#[derive(Debug, Clone)]
pub struct ExperimentReport {
    pub config: ExperimentConfig,
    pub scores: Vec<ScoreRow>,
    pub predictions: Vec<Prediction>,
    pub coefficients: Vec<CoefficientGrid>,
    pub rossler: Option<Vec<RosslerSample>>,
    pub files: Vec<PathBuf>,
}

impl ExperimentReport {
    /// `(mean, std)` of a metric over runs.
    pub fn summary(&self, metric: &str, split: &str) -> Option<(f64, f64)> {
        let find = |run: &str| {
            self.scores.iter().find(|r| r.metric == metric && r.split == split && r.run == run).map(|r| r.value)
        };
        Some((find("mean")?, find("std")?))
    }

    /// Per-run values of a metric.
    pub fn values(&self, metric: &str, split: &str) -> Vec<f64> {
        self.scores
            .iter()
            .filter(|r| r.metric == metric && r.split == split && r.run.parse::<usize>().is_ok())
            .map(|r| r.value)
            .collect()
    }
}

/// One dataset evaluated in every run: a sweep step, or the whole experiment.
struct Group {
    metric: String,
    param: Option<f64>,
}

struct RunOutcome {
    group: usize,
    run: usize,
    eval: Evaluation,
    train: Vec<usize>,
    test: Vec<usize>,
    truth: Vec<f64>,
}

fn groups(cfg: &ExperimentConfig) -> Vec<Group> {
    match cfg.experiment {
        ExperimentKind::NormalClassify => (0..cfg.protocol.sweep_steps)
            .map(|k| {
                let t = sweep_t(k, cfg.protocol.sweep_steps);
                Group { metric: format!("accuracy@t={t}"), param: Some(t) }
            })
            .collect(),
        ExperimentKind::NormalRegressLine | ExperimentKind::NormalRegressBall => {
            vec![Group { metric: "r2".into(), param: None }]
        }
        ExperimentKind::Manifold | ExperimentKind::Rossler => vec![Group { metric: "accuracy".into(), param: None }],
    }
}

fn rossler_labels(samples: &[RosslerSample]) -> Labels {
    Labels::Classes(samples.iter().map(|s| usize::from(s.label == RosslerLabel::Chaotic)).collect())
}

fn labels_as_f64(labels: &Labels) -> Vec<f64> {
    match labels {
        Labels::Classes(c) => c.iter().map(|&v| v as f64).collect(),
        Labels::Regression(t) => t.clone(),
    }
}

fn generate(cfg: &ExperimentConfig, group: &Group, seed: u64, mode: ExecMode) -> Result<(Vec<DiagramSet>, Labels)> {
    let p = &cfg.protocol;
    let with_h1 = cfg.dims().contains(&1);
    Ok(match cfg.experiment {
        ExperimentKind::NormalClassify => {
            let (s, l) = normal_classify_dataset(sweep_mu_b(group.param.unwrap_or(1.0)), p, seed, mode);
            (s, Labels::Classes(l))
        }
        ExperimentKind::NormalRegressLine => {
            let (s, t) = normal_regress_dataset(MeanLaw::Line, p, seed, mode);
            (s, Labels::Regression(t))
        }
        ExperimentKind::NormalRegressBall => {
            let (s, t) = normal_regress_dataset(MeanLaw::Ball, p, seed, mode);
            (s, Labels::Regression(t))
        }
        ExperimentKind::Manifold => {
            let (s, l) = manifold_dataset(p, with_h1, seed, mode)?;
            (s, Labels::Classes(l))
        }
        ExperimentKind::Rossler => {
            let samples = rossler_dataset(p, with_h1, seed, mode)?;
            let labels = rossler_labels(&samples);
            (samples.into_iter().map(|s| s.diagrams).collect(), labels)
        }
    })
}

/// Runs the configured experiment and writes its report files into
/// `config.output_dir`. Nothing is left behind when a stage fails.
pub fn run_experiment(config: &ExperimentConfig) -> Result<ExperimentReport> {
    config.validate()?;
    let cfg = config.resolved();
    let mut report = exec::with_jobs(cfg.jobs, || execute(&cfg))?;
    report.files = write_report(&cfg, &report)?;
    Ok(report)
}

fn execute(cfg: &ExperimentConfig) -> Result<ExperimentReport> {
    let mode = if cfg.jobs == Some(1) { ExecMode::Sequential } else { ExecMode::Parallel };
    let groups = groups(cfg);
    let normal = matches!(
        cfg.experiment,
        ExperimentKind::NormalClassify | ExperimentKind::NormalRegressLine | ExperimentKind::NormalRegressBall
    );
    let dims = if normal { vec![0] } else { cfg.dims() };

    let shared = if cfg.experiment == ExperimentKind::Rossler {
        let samples = rossler_dataset(&cfg.protocol, dims.contains(&1), derive_seed(cfg.seed, STREAM_DATA), mode)
            .map_err(|e| e.in_stage("generate"))?;
        Some(samples)
    } else {
        None
    };

    let jobs: Vec<(usize, usize)> = (0..cfg.runs).flat_map(|r| (0..groups.len()).map(move |g| (r, g))).collect();
    let outcomes = exec::try_map(mode, &jobs, |&(run, g)| -> Result<RunOutcome> {
        let seed = run_seed(cfg.seed, run);
        let (samples, labels) = match &shared {
            Some(rossler) => (rossler.iter().map(|s| s.diagrams.clone()).collect(), rossler_labels(rossler)),
            None => generate(cfg, &groups[g], derive_seed(derive_seed(seed, STREAM_DATA), g as u64), mode)
                .map_err(|e| e.in_stage("generate"))?,
        };
        let (train, test) = split_indices(samples.len(), cfg.test_fraction, derive_seed(seed, STREAM_SPLIT));
        let settings = FitSettings {
            featurizer: cfg.featurizer_config(),
            dims: dims.clone(),
            lambda_grid: cfg.lambda_grid.clone(),
            cv: CvOptions {
                folds: Folds::K(cfg.folds),
                seed: derive_seed(seed, STREAM_CV),
                standardize: cfg.standardize(),
                mode: ExecMode::Sequential,
            },
            mode,
        };
        let eval = evaluate_split(&samples, &labels, &train, &test, &settings)?;
        Ok(RunOutcome { group: g, run, eval, train, test, truth: labels_as_f64(&labels) })
    })?;

    let name = cfg.experiment.name();
    let mut scores = Vec::new();
    let mut predictions = Vec::new();
    for (g, group) in groups.iter().enumerate() {
        let mine: Vec<&RunOutcome> = outcomes.iter().filter(|o| o.group == g).collect();
        for o in &mine {
            for (split, value) in [("train", o.eval.train_score), ("test", o.eval.test_score)] {
                scores.push(ScoreRow {
                    experiment: name.into(),
                    run: o.run.to_string(),
                    split: split.into(),
                    metric: group.metric.clone(),
                    value,
                });
            }
            for (split, idx, pred) in
                [("train", &o.train, &o.eval.train_predictions), ("test", &o.test, &o.eval.test_predictions)]
            {
                predictions.extend(idx.iter().zip(pred.iter()).map(|(&item, &predicted)| Prediction {
                    metric: group.metric.clone(),
                    run: o.run,
                    split: split.into(),
                    item,
                    truth: o.truth[item],
                    predicted,
                }));
            }
        }
        for split in ["train", "test"] {
            let values: Vec<f64> = mine
                .iter()
                .map(|o| if split == "train" { o.eval.train_score } else { o.eval.test_score })
                .collect();
            let (mean, std) = mean_std(&values);
            for (run, value) in [("mean", mean), ("std", std)] {
                scores.push(ScoreRow {
                    experiment: name.into(),
                    run: run.into(),
                    split: split.into(),
                    metric: group.metric.clone(),
                    value,
                });
            }
        }
    }

    let coefficient_source = outcomes.iter().find(|o| o.run == 0 && o.group + 1 == groups.len());
    let coefficients = match coefficient_source {
        Some(o) => coefficient_grid(&o.eval.model, &o.eval.columns).map_err(|e| Error::from(e).in_stage("coefficients"))?,
        None => Vec::new(),
    };
    Ok(ExperimentReport { config: cfg.clone(), scores, predictions, coefficients, rossler: shared, files: Vec::new() })
}

/// Mean and sample standard deviation (0 for a single value).
pub fn mean_std(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

fn format_predictions(rows: &[Prediction]) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r).map_err(|e| Error::Config(format!("CSV encoding failed: {e}")))?;
    }
    w.into_inner().map_err(|e| Error::Config(format!("CSV encoding failed: {e}")))
}

pub fn read_predictions(path: &Path) -> Result<Vec<Prediction>> {
    let mut reader = csv::Reader::from_path(path).map_err(|e| Error::parse(path, e.to_string()))?;
    reader.deserialize().map(|r| r.map_err(|e| Error::parse(path, e.to_string()))).collect()
}

fn coefficient_file(grid: &CoefficientGrid) -> String {
    match grid.class {
        Some(c) => format!("coefficients_{}_{c}.csv", grid.dim),
        None => format!("coefficients_{}_target.csv", grid.dim),
    }
}

fn rossler_files(samples: &[RosslerSample]) -> (Vec<u8>, Vec<u8>) {
    let mut labels = String::from("alpha,score,label\n");
    let mut bifurcation = String::from("alpha,extremum_value\n");
    for s in samples {
        labels.push_str(&format!("{},{},{}\n", s.alpha, s.score, s.label.name()));
        for v in &s.extrema {
            bifurcation.push_str(&format!("{},{v}\n", s.alpha));
        }
    }
    (labels.into_bytes(), bifurcation.into_bytes())
}

/// Serializes every report file first, then writes them one by one; a
/// failed write removes the files already written.
fn write_report(cfg: &ExperimentConfig, report: &ExperimentReport) -> Result<Vec<PathBuf>> {
    let dir = Path::new(&cfg.output_dir);
    let mut files: Vec<(PathBuf, Vec<u8>)> = vec![
        (dir.join("scores.csv"), io::format_scores(&report.scores)?),
        (dir.join("predictions.csv"), format_predictions(&report.predictions)?),
    ];
    for grid in &report.coefficients {
        files.push((dir.join(coefficient_file(grid)), io::format_grid(grid).into_bytes()));
    }
    files.push((dir.join("config.json"), cfg.to_json()?.into_bytes()));
    if let Some(samples) = &report.rossler {
        let (labels, bifurcation) = rossler_files(samples);
        files.push((dir.join("rossler_labels.csv"), labels));
        files.push((dir.join("bifurcation.csv"), bifurcation));
    }

    let mut written = Vec::with_capacity(files.len());
    for (path, bytes) in files {
        if let Err(e) = io::atomic_write(&path, &bytes) {
            for p in &written {
                let _ = std::fs::remove_file(p);
            }
            return Err(e.in_stage("write"));
        }
        written.push(path);
    }
    Ok(written)
}

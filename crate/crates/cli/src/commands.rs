use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use pdtemplates::datagen::{
    derive_seed, extrema, gen_manifold as sample_manifold, gen_normal_diagram, rng, rossler_simulate, ManifoldKind, RosslerConfig,
    RosslerLabel,
};
use pdtemplates::exec::{self, ExecMode};
use pdtemplates::experiment::{
    alpha_grid, cloud_diagrams, rossler_cloud, run_experiment, ExperimentConfig, ExperimentKind, FeaturizerConfig,
    ProtocolParams,
};
use pdtemplates::featurize::{featurize_dataset, DatasetFeaturizer, DiagramSet};
use pdtemplates::io;
use pdtemplates::learn::{
    accuracy, default_lambda_grid, r2_score, ridge_classifier_fit, ridge_cv, CvOptions, Folds, Labels,
};
use pdtemplates::persistence::RipsOptions;
use pdtemplates::{PersistenceDiagram, RidgeModel};
use serde_json::json;

use crate::dataset::{self, item_dir, item_id, Item, Manifest};
use crate::{Cli, Command, Usage};

fn usage(message: impl Into<String>) -> anyhow::Error {
    Usage(message.into()).into()
}

fn required(out: &Option<PathBuf>, what: &str) -> Result<PathBuf> {
    out.clone().ok_or_else(|| usage(format!("--out is required ({what})")))
}

fn ensure(ok: bool, message: &str) -> Result<()> {
    if ok {
        Ok(())
    } else {
        Err(usage(message))
    }
}

pub fn run(cli: Cli) -> Result<()> {
    ensure(cli.jobs != Some(0), "--jobs must be at least 1")?;
    let mode = if cli.jobs == Some(1) { ExecMode::Sequential } else { ExecMode::Parallel };
    let seed = cli.seed.unwrap_or(0);
    if let Command::Experiment(args) = &cli.command {
        return experiment(&cli, args);
    }
    ensure(cli.config.is_none(), "--config only applies to `experiment`")?;
    exec::with_jobs(cli.jobs, || match &cli.command {
        Command::GenNormal(a) => gen_normal(a, &required(&cli.out, "dataset directory")?, seed, mode),
        Command::GenManifold(a) => gen_manifold(a, &required(&cli.out, "dataset directory")?, seed, mode),
        Command::GenRossler(a) => gen_rossler(a, &required(&cli.out, "dataset directory")?, seed, mode),
        Command::ComputePd(a) => compute_pd(a, cli.out.as_deref(), mode),
        Command::Featurize(a) => featurize(a, &required(&cli.out, "feature matrix CSV")?, mode),
        Command::Train(a) => train(a, &required(&cli.out, "model JSON")?, seed, mode),
        Command::Evaluate(a) => evaluate(a, cli.out.as_deref()),
        Command::Experiment(_) => unreachable!("handled above"),
    })
}

fn gen_normal(a: &crate::GenNormal, out: &Path, seed: u64, mode: ExecMode) -> Result<()> {
    ensure(a.mu.len() == 2 && a.mu.iter().all(|v| v.is_finite()), "--mu takes two finite values, birth,death")?;
    ensure(a.sigma.is_finite() && a.sigma > 0.0, "--sigma must be positive")?;
    ensure(a.count >= 1 && a.points >= 1, "--count and --points must be positive")?;
    let mu = (a.mu[0], a.mu[1]);
    let diagrams = exec::map_range(mode, a.count, |i| {
        gen_normal_diagram(mu, a.sigma, a.points, &mut rng(derive_seed(seed, i as u64)))
    });
    let mut items = Vec::with_capacity(a.count);
    for (i, d) in diagrams.iter().enumerate() {
        let item = Item { id: item_id(i), seed: derive_seed(seed, i as u64), label: a.label, info: Default::default() };
        io::write_diagram(&io::diagram_path(&item_dir(out, &item).join(dataset::DIAGRAM_PREFIX), 0), d)?;
        items.push(item);
    }
    let parameters = json!({ "mu": a.mu, "sigma": a.sigma, "points": a.points });
    Manifest { kind: "normal".into(), parameters, seed, items }.write(out)?;
    println!("wrote {} diagrams to {}", a.count, out.display());
    Ok(())
}

fn gen_manifold(a: &crate::GenManifold, out: &Path, seed: u64, mode: ExecMode) -> Result<()> {
    let kinds: Vec<ManifoldKind> = if a.kind.eq_ignore_ascii_case("all") {
        ManifoldKind::ALL.to_vec()
    } else {
        vec![a.kind.parse().map_err(|_| usage(format!("unknown manifold `{}`", a.kind)))?]
    };
    ensure(a.count >= 1 && a.points >= 1, "--count and --points must be positive")?;
    let total = kinds.len() * a.count;
    let clouds = exec::map_range(mode, total, |i| sample_manifold(kinds[i / a.count], a.points, &mut rng(derive_seed(seed, i as u64))))
        .into_iter()
        .collect::<Result<Vec<_>, _>>()
        .map_err(pdtemplates::Error::from)?;
    let mut items = Vec::with_capacity(total);
    for (i, cloud) in clouds.iter().enumerate() {
        let kind = kinds[i / a.count];
        let mut info = serde_json::Map::new();
        info.insert("class".into(), json!(kind.name()));
        let item = Item { id: item_id(i), seed: derive_seed(seed, i as u64), label: kind.class_id(), info };
        io::write_point_cloud(&item_dir(out, &item).join(dataset::CLOUD), cloud)?;
        items.push(item);
    }
    let parameters = json!({ "kinds": kinds.iter().map(|k| k.name()).collect::<Vec<_>>(), "points": a.points });
    Manifest { kind: "manifold".into(), parameters, seed, items }.write(out)?;
    println!("wrote {total} point clouds to {}", out.display());
    Ok(())
}

fn gen_rossler(a: &crate::GenRossler, out: &Path, seed: u64, mode: ExecMode) -> Result<()> {
    let p = ProtocolParams { alpha_steps: a.alpha_steps, alpha_min: a.alpha_min, alpha_max: a.alpha_max, ..Default::default() };
    let alphas = if a.alpha.is_empty() {
        ensure(a.alpha_steps >= 2, "--alpha-steps must be at least 2")?;
        ensure(a.alpha_min.is_finite() && a.alpha_min < a.alpha_max, "--alpha-min must be below --alpha-max")?;
        alpha_grid(&p)
    } else {
        ensure(a.alpha.iter().all(|v| v.is_finite()), "--alpha values must be finite")?;
        a.alpha.clone()
    };
    let sim = RosslerConfig::default();
    let runs = exec::map_range(mode, alphas.len(), |i| -> pdtemplates::Result<_> {
        let item_seed = derive_seed(seed, i as u64);
        let mut run = rossler_simulate(alphas[i], item_seed, &sim)?;
        let score = run.label_with_zero_one(p.zero_one_stride, p.chaos_threshold, &mut rng(derive_seed(item_seed, 1)))?;
        Ok((run, score))
    })
    .into_iter()
    .collect::<pdtemplates::Result<Vec<_>>>()?;

    let mut items = Vec::with_capacity(runs.len());
    let mut bifurcation = String::from("alpha,extremum_value\n");
    for (i, (run, score)) in runs.iter().enumerate() {
        let mut info = serde_json::Map::new();
        info.insert("alpha".into(), json!(run.alpha));
        info.insert("score".into(), json!(score));
        info.insert("regime".into(), json!(run.label.name()));
        let item = Item {
            id: item_id(i),
            seed: derive_seed(seed, i as u64),
            label: usize::from(run.label == RosslerLabel::Chaotic),
            info,
        };
        dataset::write_series(&item_dir(out, &item).join(dataset::SERIES), &run.x_series)?;
        for v in extrema(&run.x_series) {
            bifurcation.push_str(&format!("{},{v}\n", run.alpha));
        }
        items.push(item);
    }
    io::atomic_write(&out.join("bifurcation.csv"), bifurcation.as_bytes())?;
    let parameters = json!({ "alphas": alphas, "simulation": sim, "zero_one_stride": p.zero_one_stride,
        "chaos_threshold": p.chaos_threshold });
    let chaotic = items.iter().filter(|i| i.label == 1).count();
    Manifest { kind: "rossler".into(), parameters, seed, items }.write(out)?;
    println!("wrote {} series ({chaotic} chaotic) to {}", runs.len(), out.display());
    Ok(())
}

fn check_dims(dims: &[usize]) -> Result<()> {
    ensure(!dims.is_empty() && dims.iter().all(|&d| d <= 1), "--dims must list 0 and/or 1")
}

fn write_diagrams(prefix: &Path, set: &DiagramSet, dims: &[usize]) -> Result<Vec<PathBuf>> {
    let mut written = Vec::new();
    for &dim in dims {
        let path = io::diagram_path(prefix, dim);
        io::write_diagram(&path, set.get(dim).expect("computed above"))?;
        written.push(path);
    }
    Ok(written)
}

fn compute_pd(a: &crate::ComputePd, out: Option<&Path>, mode: ExecMode) -> Result<()> {
    check_dims(&a.dims)?;
    if let Some(s) = a.max_scale {
        ensure(s.is_finite() && s > 0.0, "--max-scale must be positive")?;
    }
    let opts = RipsOptions { max_scale: a.max_scale, ..RipsOptions::default() };
    let with_h1 = a.dims.contains(&1);

    if a.input.is_dir() {
        let manifest = Manifest::read(&a.input)?;
        let protocol = ProtocolParams::default();
        let sets = exec::try_map(mode, &manifest.items, |item| -> Result<DiagramSet> {
            let dir = item_dir(&a.input, item);
            let cloud = if dir.join(dataset::CLOUD).exists() {
                io::read_point_cloud(&dir.join(dataset::CLOUD))?
            } else if dir.join(dataset::SERIES).exists() {
                rossler_cloud(&dataset::read_series(&dir.join(dataset::SERIES))?, &protocol)?
            } else {
                return Err(usage(format!("item {} has neither {} nor {}", item.id, dataset::CLOUD, dataset::SERIES)));
            };
            cloud_diagrams(&cloud, with_h1, &opts).with_context(|| format!("item {}", item.id))
        })?;
        for (item, set) in manifest.items.iter().zip(&sets) {
            write_diagrams(&item_dir(&a.input, item).join(dataset::DIAGRAM_PREFIX), set, &a.dims)?;
        }
        println!("wrote diagrams for {} items in {}", sets.len(), a.input.display());
    } else {
        let prefix = out.ok_or_else(|| usage("--out prefix is required for a single point cloud"))?;
        let cloud = io::read_point_cloud(&a.input)?;
        let set = cloud_diagrams(&cloud, with_h1, &opts)?;
        for path in write_diagrams(prefix, &set, &a.dims)? {
            println!("wrote {}", path.display());
        }
    }
    Ok(())
}

fn featurizer_config(a: &crate::Featurize) -> Result<FeaturizerConfig> {
    let cfg = match a.featurizer.as_str() {
        "tents" => FeaturizerConfig::Tents { d: a.d, pad: a.pad, delta: a.delta, epsilon: a.epsilon },
        "polynomials" => FeaturizerConfig::polynomials(a.m, a.n),
        other => return Err(usage(format!("unknown featurizer `{other}` (expected tents or polynomials)"))),
    };
    cfg.validate()?;
    Ok(cfg)
}

/// Path of the labels written next to a feature matrix.
pub fn labels_path(features: &Path) -> PathBuf {
    let stem = features.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    features.with_file_name(format!("{stem}_labels.csv"))
}

fn featurize(a: &crate::Featurize, out: &Path, mode: ExecMode) -> Result<()> {
    check_dims(&a.dims)?;
    let config = if a.reuse.is_none() { Some(featurizer_config(a)?) } else { None };
    let manifest = Manifest::read(&a.input)?;
    ensure(!manifest.items.is_empty(), "dataset has no items")?;
    let samples = exec::try_map(mode, &manifest.items, |item| -> Result<DiagramSet> {
        let prefix = item_dir(&a.input, item).join(dataset::DIAGRAM_PREFIX);
        let load = |dim: usize| io::read_diagram(&io::diagram_path(&prefix, dim));
        let h0 = if a.dims.contains(&0) { load(0)? } else { PersistenceDiagram::empty(0) };
        let h1 = if a.dims.contains(&1) { Some(load(1)?) } else { None };
        Ok(DiagramSet { h0, h1 })
    })?;

    let featurizer: DatasetFeaturizer = match (&a.reuse, &config) {
        (Some(path), _) => io::read_json(path)?,
        (None, Some(cfg)) => {
            let mut f = DatasetFeaturizer::default();
            for &dim in &a.dims {
                let training: Vec<PersistenceDiagram> = samples.iter().filter_map(|s| s.get(dim).cloned()).collect();
                let built = cfg.build(&training)?;
                if dim == 0 {
                    f.h0 = Some(built);
                } else {
                    f.h1 = Some(built);
                }
            }
            f
        }
        (None, None) => unreachable!("config exists when not reusing"),
    };
    let matrix = featurize_dataset(&samples, &featurizer, mode).map_err(pdtemplates::Error::from)?;
    io::write_feature_matrix(out, &matrix, Some(&featurizer))?;
    let labels = Labels::Classes(manifest.items.iter().map(|i| i.label).collect());
    io::write_labels(&labels_path(out), &labels)?;
    println!("wrote {} x {} features to {}", matrix.nrows(), matrix.ncols(), out.display());
    Ok(())
}

fn train(a: &crate::Train, out: &Path, seed: u64, mode: ExecMode) -> Result<()> {
    let features = io::read_feature_matrix(&a.features)?;
    let labels = io::read_labels(&a.labels)?;
    ensure(labels.len() == features.nrows(), "label count differs from the feature matrix's row count")?;
    let grid = if a.lambda_grid.is_empty() { default_lambda_grid() } else { a.lambda_grid.clone() };
    ensure(grid.iter().all(|l| l.is_finite() && *l > 0.0), "--lambda-grid values must be positive")?;
    ensure(a.folds >= 2, "--folds must be at least 2")?;
    let cv = CvOptions { folds: Folds::K(a.folds), seed: derive_seed(seed, 2), standardize: a.standardize, mode };
    let mut model = match &labels {
        Labels::Classes(c) => ridge_classifier_fit(&features, c, &grid, &cv),
        Labels::Regression(t) => ridge_cv(&features, t, &grid, &cv),
    }
    .map_err(pdtemplates::Error::from)?;
    let sidecar = io::featurizer_sidecar(&a.features);
    if sidecar.exists() {
        model.featurizer = Some(sidecar.display().to_string());
    }
    io::write_json(out, &model)?;
    println!("lambda = {}; model written to {}", model.lambda, out.display());
    Ok(())
}

fn evaluate(a: &crate::Evaluate, out: Option<&Path>) -> Result<()> {
    let model: RidgeModel = io::read_json(&a.model)?;
    let features = io::read_feature_matrix(&a.features)?;
    let labels = io::read_labels(&a.labels)?;
    ensure(labels.len() == features.nrows(), "label count differs from the feature matrix's row count")?;
    ensure(model.feature_count() == features.ncols(), "model and feature matrix have different column counts")?;
    let learn = |e| anyhow::Error::from(pdtemplates::Error::from(e));
    let (metric, value, truth, predicted): (&str, f64, Vec<f64>, Vec<f64>) = match &labels {
        Labels::Classes(c) => {
            ensure(model.classes.is_some(), "a regression model cannot score class labels")?;
            let p = model.predict_classes(&features).map_err(learn)?;
            let acc = accuracy(c, &p).map_err(learn)?;
            ("accuracy", acc, c.iter().map(|&v| v as f64).collect(), p.iter().map(|&v| v as f64).collect())
        }
        Labels::Regression(t) => {
            let p = model.predict(&features).map_err(learn)?;
            ("r2", r2_score(t, &p).map_err(learn)?, t.clone(), p)
        }
    };
    println!("{metric},{value}");
    if let Some(path) = out {
        let mut text = String::from("item,true,predicted\n");
        for (k, (t, p)) in truth.iter().zip(&predicted).enumerate() {
            text.push_str(&format!("{k},{t},{p}\n"));
        }
        io::atomic_write(path, text.as_bytes())?;
    }
    Ok(())
}

fn experiment(cli: &Cli, a: &crate::Experiment) -> Result<()> {
    let kind: ExperimentKind = a.name.parse()?;
    let mut cfg = match &cli.config {
        Some(path) => {
            let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            ExperimentConfig::from_json(&text)?
        }
        None => ExperimentConfig::new(kind, "results"),
    };
    cfg.experiment = kind;
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    if cli.jobs.is_some() {
        cfg.jobs = cli.jobs;
    }
    if let Some(out) = &cli.out {
        cfg.output_dir = out.clone();
    }
    if let Some(runs) = a.runs {
        cfg.runs = runs;
    }
    if let Some(tf) = a.test_fraction {
        cfg.test_fraction = tf;
    }
    if let Some(name) = &a.featurizer {
        cfg.featurizer = Some(match name.as_str() {
            "tents" => match ExperimentConfig::default_featurizer(kind) {
                f @ FeaturizerConfig::Tents { .. } => f,
                _ => FeaturizerConfig::auto_tents(10, 0.05),
            },
            "polynomials" => FeaturizerConfig::polynomials(10, 10),
            other => return Err(usage(format!("unknown featurizer `{other}` (expected tents or polynomials)"))),
        });
    }
    if let Some(dims) = &a.dims {
        cfg.dims = Some(dims.clone());
    }
    if let Some(grid) = &a.lambda_grid {
        cfg.lambda_grid = grid.clone();
    }
    if let Some(steps) = a.alpha_steps {
        cfg.protocol.alpha_steps = steps;
    }
    if let Some(n) = a.diagrams {
        cfg.protocol.diagrams = n;
    }
    if let Some(n) = a.diagrams_per_class {
        cfg.protocol.diagrams_per_class = n;
    }

    let report = run_experiment(&cfg)?;
    for row in report.scores.iter().filter(|r| r.run == "mean") {
        let std = report.summary(&row.metric, &row.split).map_or(0.0, |s| s.1);
        println!("{} {} {}: {:.4} +- {:.4}", kind, row.metric, row.split, row.value, std);
    }
    for f in &report.files {
        println!("wrote {}", f.display());
    }
    Ok(())
}

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::datagen::RosslerConfig;
use crate::diagrams::PersistenceDiagram;
use crate::error::{Error, Result};
use crate::featurize::{auto_poly_params, auto_tent_params, ChebMesh, Featurizer, PadMode, TentGrid};
use crate::learn::default_lambda_grid;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentKind {
    NormalClassify,
    NormalRegressLine,
    NormalRegressBall,
    Manifold,
    Rossler,
}

impl ExperimentKind {
    pub const ALL: [ExperimentKind; 5] = [
        ExperimentKind::NormalClassify,
        ExperimentKind::NormalRegressLine,
        ExperimentKind::NormalRegressBall,
        ExperimentKind::Manifold,
        ExperimentKind::Rossler,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ExperimentKind::NormalClassify => "normal-classify",
            ExperimentKind::NormalRegressLine => "normal-regress-line",
            ExperimentKind::NormalRegressBall => "normal-regress-ball",
            ExperimentKind::Manifold => "manifold",
            ExperimentKind::Rossler => "rossler",
        }
    }

    pub fn is_classification(self) -> bool {
        !matches!(self, ExperimentKind::NormalRegressLine | ExperimentKind::NormalRegressBall)
    }
}

impl fmt::Display for ExperimentKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ExperimentKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|k| k.name() == s.trim())
            .ok_or_else(|| Error::Config(format!("unknown experiment `{s}`")))
    }
}

fn default_grid_size() -> usize {
    10
}

fn default_pad() -> f64 {
    0.05
}

fn default_pad_mode() -> PadMode {
    PadMode::HalfB
}

/// Template system and how its parameters are chosen. Tents without an
/// explicit `delta` are fitted to the training diagrams; polynomial meshes
/// always are.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum FeaturizerConfig {
    Tents {
        #[serde(default = "default_grid_size")]
        d: usize,
        #[serde(default = "default_pad")]
        pad: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        delta: Option<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        epsilon: Option<f64>,
    },
    Polynomials {
        #[serde(default = "default_grid_size")]
        m: usize,
        #[serde(default = "default_grid_size")]
        n: usize,
        #[serde(default = "default_pad_mode")]
        pad_mode: PadMode,
    },
}

impl FeaturizerConfig {
    pub fn auto_tents(d: usize, pad: f64) -> Self {
        FeaturizerConfig::Tents { d, pad, delta: None, epsilon: None }
    }

    pub fn fixed_tents(d: usize, delta: f64, epsilon: f64) -> Self {
        FeaturizerConfig::Tents { d, pad: default_pad(), delta: Some(delta), epsilon: Some(epsilon) }
    }

    pub fn polynomials(m: usize, n: usize) -> Self {
        FeaturizerConfig::Polynomials { m, n, pad_mode: default_pad_mode() }
    }

    pub fn name(&self) -> &'static str {
        match self {
            FeaturizerConfig::Tents { .. } => "tents",
            FeaturizerConfig::Polynomials { .. } => "polynomials",
        }
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            FeaturizerConfig::Tents { d, pad, delta, epsilon } => {
                check(d >= 1, "tent grid size d must be at least 1")?;
                check(pad.is_finite() && pad >= 0.0, "tent pad must be finite and nonnegative")?;
                match (delta, epsilon) {
                    (Some(delta), eps) => {
                        check(delta.is_finite() && delta > 0.0, "tent delta must be positive")?;
                        let eps = eps.unwrap_or(f64::EPSILON);
                        check(eps.is_finite() && eps > 0.0, "tent epsilon must be positive")?;
                        TentGrid::new(d, delta, eps).map_err(|e| Error::Config(e.to_string()))?;
                    }
                    (None, Some(_)) => return Err(Error::Config("tent epsilon requires an explicit delta".into())),
                    (None, None) => {}
                }
            }
            FeaturizerConfig::Polynomials { m, n, .. } => {
                check(m >= 1 && n >= 1, "polynomial mesh sizes m and n must be at least 1")?;
            }
        }
        Ok(())
    }

    /// Featurizer for one homology dimension, fitted to `training` when the
    /// parameters are automatic.
    pub fn build(&self, training: &[PersistenceDiagram]) -> Result<Featurizer> {
        Ok(match *self {
            FeaturizerConfig::Tents { d, delta: Some(delta), epsilon, .. } => {
                Featurizer::Tents(TentGrid::new(d, delta, epsilon.unwrap_or(f64::EPSILON))?)
            }
            FeaturizerConfig::Tents { d, pad, delta: None, .. } => Featurizer::Tents(auto_tent_params(training, d, pad)?),
            FeaturizerConfig::Polynomials { m, n, pad_mode } => {
                let mesh: ChebMesh = auto_poly_params(training, m, n, pad_mode)?;
                Featurizer::Polynomials(mesh)
            }
        })
    }
}

/// How the delay-embedding lag is picked from the autocorrelation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DelayRule {
    FirstMinimum,
    FirstZeroCrossing,
}

impl DelayRule {
    pub fn delay(self, series: &[f64], max_lag: usize) -> usize {
        match self {
            DelayRule::FirstMinimum => crate::datagen::embedding_delay(series, max_lag),
            DelayRule::FirstZeroCrossing => crate::datagen::zero_crossing_delay(series, max_lag),
        }
    }
}

/// Per-protocol knobs. Defaults are the full-size experiment settings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ProtocolParams {
    /// Normal-points experiments: diagrams per class (classification) or in
    /// total (regression).
    pub diagrams: usize,
    pub points_per_diagram: usize,
    pub sigma: f64,
    /// Evenly spaced `t` values in `[0, 1]` for the classification sweep.
    pub sweep_steps: usize,
    pub diagrams_per_class: usize,
    pub points_per_cloud: usize,
    pub alpha_steps: usize,
    pub alpha_min: f64,
    pub alpha_max: f64,
    pub rossler: RosslerConfig,
    pub embedding_dim: usize,
    pub delay_rule: DelayRule,
    /// Largest delay considered when choosing the embedding delay.
    pub max_lag: usize,
    /// Every `cloud_stride`-th embedded point is kept, up to `max_cloud_points`.
    pub cloud_stride: usize,
    pub max_cloud_points: usize,
    pub zero_one_stride: usize,
    /// Zero-one scores above this are labeled chaotic.
    pub chaos_threshold: f64,
}

impl Default for ProtocolParams {
    fn default() -> Self {
        ProtocolParams {
            diagrams: 500,
            points_per_diagram: 20,
            sigma: 1.0,
            sweep_steps: 11,
            diagrams_per_class: 50,
            points_per_cloud: 200,
            alpha_steps: 121,
            alpha_min: 0.37,
            alpha_max: 0.43,
            rossler: RosslerConfig::default(),
            embedding_dim: 3,
            delay_rule: DelayRule::FirstZeroCrossing,
            max_lag: 50,
            cloud_stride: 6,
            max_cloud_points: 300,
            zero_one_stride: 6,
            chaos_threshold: 0.5,
        }
    }
}

fn default_runs() -> usize {
    10
}

fn default_test_fraction() -> f64 {
    0.33
}

fn default_folds() -> usize {
    5
}

fn default_output_dir() -> PathBuf {
    PathBuf::from("results")
}

/// Everything needed to reproduce one experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment: ExperimentKind,
    /// `None` selects the protocol's default template system.
    #[serde(default)]
    pub featurizer: Option<FeaturizerConfig>,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_runs")]
    pub runs: usize,
    #[serde(default = "default_test_fraction")]
    pub test_fraction: f64,
    #[serde(default = "default_lambda_grid")]
    pub lambda_grid: Vec<f64>,
    #[serde(default = "default_folds")]
    pub folds: usize,
    /// `None` standardizes polynomial features and leaves tent features as is.
    #[serde(default)]
    pub standardize: Option<bool>,
    /// Homology dimensions featurized in the point-cloud experiments.
    #[serde(default)]
    pub dims: Option<Vec<usize>>,
    #[serde(default = "default_output_dir")]
    pub output_dir: PathBuf,
    /// Worker threads; `Some(1)` runs sequentially.
    #[serde(default)]
    pub jobs: Option<usize>,
    #[serde(default)]
    pub protocol: ProtocolParams,
}

fn check(ok: bool, message: &str) -> Result<()> {
    if ok {
        Ok(())
    } else {
        Err(Error::Config(message.to_string()))
    }
}

impl ExperimentConfig {
    pub fn new(experiment: ExperimentKind, output_dir: impl Into<PathBuf>) -> Self {
        ExperimentConfig {
            experiment,
            featurizer: None,
            seed: 0,
            runs: default_runs(),
            test_fraction: default_test_fraction(),
            lambda_grid: default_lambda_grid(),
            folds: default_folds(),
            standardize: None,
            dims: None,
            output_dir: output_dir.into(),
            jobs: None,
            protocol: ProtocolParams::default(),
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn default_featurizer(kind: ExperimentKind) -> FeaturizerConfig {
        match kind {
            ExperimentKind::Rossler => FeaturizerConfig::fixed_tents(10, 0.4, f64::EPSILON),
            _ => FeaturizerConfig::auto_tents(10, 0.05),
        }
    }

    pub fn featurizer_config(&self) -> FeaturizerConfig {
        self.featurizer.clone().unwrap_or_else(|| Self::default_featurizer(self.experiment))
    }

    /// Polynomial features are standardized by default; tent features are not,
    /// since a tent hit by only a few training diagrams would be blown up.
    pub fn standardize(&self) -> bool {
        self.standardize.unwrap_or(matches!(self.featurizer_config(), FeaturizerConfig::Polynomials { .. }))
    }

    pub fn dims(&self) -> Vec<usize> {
        self.dims.clone().unwrap_or_else(|| vec![0, 1])
    }

    /// Copy with every protocol-dependent default filled in.
    pub fn resolved(&self) -> Self {
        ExperimentConfig {
            featurizer: Some(self.featurizer_config()),
            standardize: Some(self.standardize()),
            dims: Some(self.dims()),
            ..self.clone()
        }
    }

    /// Number of labeled samples per dataset.
    pub fn sample_count(&self) -> usize {
        let p = &self.protocol;
        match self.experiment {
            ExperimentKind::NormalClassify => 2 * p.diagrams,
            ExperimentKind::NormalRegressLine | ExperimentKind::NormalRegressBall => p.diagrams,
            ExperimentKind::Manifold => crate::datagen::ManifoldKind::ALL.len() * p.diagrams_per_class,
            ExperimentKind::Rossler => p.alpha_steps,
        }
    }

    /// `(train, test)` sizes of every split.
    pub fn split_sizes(&self) -> (usize, usize) {
        let total = self.sample_count();
        let test = ((self.test_fraction * total as f64).round() as usize).clamp(1, total.saturating_sub(1).max(1));
        (total - test, test)
    }

    /// Rejects out-of-range fields before any work starts.
    pub fn validate(&self) -> Result<()> {
        let p = &self.protocol;
        check(self.runs >= 1, "runs must be at least 1")?;
        check(self.test_fraction > 0.0 && self.test_fraction < 1.0, "test_fraction must lie in (0, 1)")?;
        check(!self.lambda_grid.is_empty(), "lambda_grid must not be empty")?;
        check(
            self.lambda_grid.iter().all(|l| l.is_finite() && *l > 0.0),
            "lambda_grid entries must be positive and finite",
        )?;
        check(self.folds >= 2, "folds must be at least 2")?;
        check(self.jobs != Some(0), "jobs must be at least 1")?;
        check(!self.output_dir.as_os_str().is_empty(), "output_dir must not be empty")?;
        let dims = self.dims();
        check(!dims.is_empty() && dims.iter().all(|d| *d <= 1), "dims must be a nonempty subset of {0, 1}")?;
        let mut sorted = dims.clone();
        sorted.sort_unstable();
        sorted.dedup();
        check(sorted.len() == dims.len(), "dims must not repeat")?;
        self.featurizer_config().validate()?;

        match self.experiment {
            ExperimentKind::NormalClassify | ExperimentKind::NormalRegressLine | ExperimentKind::NormalRegressBall => {
                check(p.diagrams >= 2, "protocol.diagrams must be at least 2")?;
                check(p.points_per_diagram >= 1, "protocol.points_per_diagram must be at least 1")?;
                check(p.sigma.is_finite() && p.sigma > 0.0, "protocol.sigma must be positive")?;
                check(p.sweep_steps >= 1, "protocol.sweep_steps must be at least 1")?;
            }
            ExperimentKind::Manifold => {
                check(p.diagrams_per_class >= 1, "protocol.diagrams_per_class must be at least 1")?;
                check(p.points_per_cloud >= 3, "protocol.points_per_cloud must be at least 3")?;
            }
            ExperimentKind::Rossler => {
                check(p.alpha_steps >= 2, "protocol.alpha_steps must be at least 2")?;
                check(
                    p.alpha_min.is_finite() && p.alpha_max.is_finite() && p.alpha_min < p.alpha_max,
                    "protocol.alpha_min must be below protocol.alpha_max",
                )?;
                let r = &p.rossler;
                check(r.dt.is_finite() && r.dt > 0.0, "protocol.rossler.dt must be positive")?;
                check(r.n >= 2 && r.n.is_multiple_of(2), "protocol.rossler.n must be positive and even")?;
                check(r.beta.is_finite() && r.gamma.is_finite(), "protocol.rossler parameters must be finite")?;
                check(p.embedding_dim >= 1, "protocol.embedding_dim must be at least 1")?;
                check(p.max_lag >= 1, "protocol.max_lag must be at least 1")?;
                check(p.cloud_stride >= 1 && p.zero_one_stride >= 1, "protocol strides must be at least 1")?;
                check(p.max_cloud_points >= 3, "protocol.max_cloud_points must be at least 3")?;
                check(p.chaos_threshold > 0.0 && p.chaos_threshold < 1.0, "protocol.chaos_threshold must lie in (0, 1)")?;
                let retained = r.n / 2 / p.zero_one_stride;
                check(
                    retained >= crate::datagen::ZERO_ONE_MIN_LENGTH,
                    "protocol.rossler.n is too small for the zero-one test at this stride",
                )?;
            }
        }

        let (train, test) = self.split_sizes();
        check(test >= 1 && train >= 1, "test_fraction leaves an empty split")?;
        if self.lambda_grid.len() > 1 {
            check(train >= self.folds, "training split is smaller than the number of folds")?;
        }
        Ok(())
    }
}

//! Ridge regression and one-vs-rest ridge classification on feature
//! matrices, with cross-validated choice of the penalty.
//!
//! All fits minimize `(1/M) ||X w + b - y||^2 + lambda ||w||^2` with an
//! unpenalized intercept. Columns are centred (and, by default, scaled to unit
//! variance) using training statistics that are stored in the model, so
//! predictions are always made on raw feature values.

mod classifier;
mod coefficients;
mod metrics;
mod ridge;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::featurize::FeatureMatrix;

pub use classifier::ridge_classifier_fit;
pub use coefficients::{coefficient_grid, flatten_grids, CoefficientGrid};
pub use metrics::{accuracy, r2_score};
pub use ridge::{ridge_cv, ridge_fit, CvOptions, Folds};

/// `{10^n : -3 <= n <= 3}`.
pub fn default_lambda_grid() -> Vec<f64> {
    (-3..=3).map(|n| 10f64.powi(n)).collect()
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LearnError {
    #[error("{what}: expected {expected}, got {found}")]
    LengthMismatch { what: &'static str, expected: usize, found: usize },
    #[error("need at least {needed} rows, got {found}")]
    TooFewRows { needed: usize, found: usize },
    #[error("lambda must be positive and finite, got {0}")]
    InvalidLambda(f64),
    #[error("lambda grid is empty")]
    EmptyLambdaGrid,
    #[error("need at least 2 folds, got {0}")]
    InvalidFolds(usize),
    #[error("non-finite value in {0}")]
    NonFinite(&'static str),
    #[error("classification needs at least two classes")]
    SingleClass,
    #[error("true values have zero variance")]
    ZeroVariance,
    #[error("eigendecomposition of the Gram matrix failed")]
    Decomposition,
    #[error("model has {weights} weights per output but the column index has {columns} entries")]
    UnmappedColumns { weights: usize, columns: usize },
}

/// Fitted linear model with one output per regression target or per class.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RidgeModel {
    /// Row `k` holds the weights of output `k` in standardized units.
    pub weights: Vec<Vec<f64>>,
    pub intercepts: Vec<f64>,
    pub lambda: f64,
    pub standardization: Standardization,
    /// Class label of each output; `None` for regression.
    pub classes: Option<Vec<usize>>,
    /// Path of the featurizer sidecar the model was trained against.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub featurizer: Option<String>,
}

/// Per-column centring and scaling learned at fit time.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Standardization {
    pub enabled: bool,
    pub mean: Vec<f64>,
    pub scale: Vec<f64>,
}

impl Standardization {
    /// Column means always; unit-variance scales only when `enabled`.
    /// Zero-variance columns keep a scale of 1.
    pub fn fit(x: &DMatrix<f64>, enabled: bool) -> Self {
        let n = x.nrows() as f64;
        let mut mean = Vec::with_capacity(x.ncols());
        let mut scale = Vec::with_capacity(x.ncols());
        for col in x.column_iter() {
            let mu = col.iter().sum::<f64>() / n;
            let var = col.iter().map(|v| (v - mu) * (v - mu)).sum::<f64>() / n;
            mean.push(mu);
            scale.push(if enabled && var > 0.0 { var.sqrt() } else { 1.0 });
        }
        Standardization { enabled, mean, scale }
    }

    pub fn apply(&self, x: &DMatrix<f64>) -> DMatrix<f64> {
        DMatrix::from_fn(x.nrows(), x.ncols(), |r, c| (x[(r, c)] - self.mean[c]) / self.scale[c])
    }
}

impl RidgeModel {
    pub fn feature_count(&self) -> usize {
        self.standardization.mean.len()
    }

    pub fn output_count(&self) -> usize {
        self.weights.len()
    }

    /// Raw decision values, `rows x outputs`.
    pub fn decision_function(&self, x: &DMatrix<f64>) -> Result<DMatrix<f64>, LearnError> {
        if x.ncols() != self.feature_count() {
            return Err(LearnError::LengthMismatch {
                what: "feature columns",
                expected: self.feature_count(),
                found: x.ncols(),
            });
        }
        let xs = self.standardization.apply(x);
        Ok(DMatrix::from_fn(x.nrows(), self.output_count(), |r, k| {
            let dot: f64 = self.weights[k].iter().enumerate().map(|(c, w)| w * xs[(r, c)]).sum();
            dot + self.intercepts[k]
        }))
    }

    /// Regression predictions from the first output.
    pub fn predict(&self, x: &FeatureMatrix) -> Result<Vec<f64>, LearnError> {
        let d = self.decision_function(x.values())?;
        Ok(d.column(0).iter().copied().collect())
    }

    /// Class with the largest decision value; ties go to the earlier output.
    pub fn predict_classes(&self, x: &FeatureMatrix) -> Result<Vec<usize>, LearnError> {
        let classes = self.classes.as_ref().ok_or(LearnError::SingleClass)?;
        let d = self.decision_function(x.values())?;
        Ok(d.row_iter()
            .map(|row| {
                let mut best = 0;
                for k in 1..row.len() {
                    if row[k] > row[best] {
                        best = k;
                    }
                }
                classes[best]
            })
            .collect())
    }

    /// Weights and intercept of output `k` in raw feature units.
    pub fn effective_coefficients(&self, k: usize) -> (Vec<f64>, f64) {
        let s = &self.standardization;
        let w: Vec<f64> = self.weights[k].iter().zip(&s.scale).map(|(w, sc)| w / sc).collect();
        let b = self.intercepts[k] - w.iter().zip(&s.mean).map(|(w, m)| w * m).sum::<f64>();
        (w, b)
    }
}

/// Labels attached to the rows of a feature matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Labels {
    Regression(Vec<f64>),
    Classes(Vec<usize>),
}

impl Labels {
    pub fn len(&self) -> usize {
        match self {
            Labels::Regression(v) => v.len(),
            Labels::Classes(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LabeledDataset {
    pub features: FeatureMatrix,
    pub labels: Labels,
    pub metadata: serde_json::Value,
}

impl LabeledDataset {
    pub fn new(features: FeatureMatrix, labels: Labels, metadata: serde_json::Value) -> Result<Self, LearnError> {
        if labels.len() != features.nrows() {
            return Err(LearnError::LengthMismatch {
                what: "labels",
                expected: features.nrows(),
                found: labels.len(),
            });
        }
        Ok(LabeledDataset { features, labels, metadata })
    }
}

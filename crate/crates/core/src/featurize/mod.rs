//! Template-function featurizers and dataset-level feature matrices.

mod interp;
mod poly;
mod tents;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::diagrams::PersistenceDiagram;
use crate::exec::{self, ExecMode};

pub use interp::{barycentric_weights, cheb_nodes, interp_matrix};
pub use poly::{auto_poly_params, poly_features, ChebMesh, PadMode, DEGENERATE_BOX_PAD};
pub use tents::{auto_tent_params, tent_features, tent_value, TentGrid, MIN_DELTA};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FeaturizeError {
    #[error("invalid tent grid: {0}")]
    InvalidGrid(String),
    #[error("invalid Chebyshev mesh: {0}")]
    InvalidMesh(String),
    #[error("invalid interval [{lo}, {hi}]")]
    InvalidInterval { lo: f64, hi: f64 },
    #[error("duplicate interpolation node {0}")]
    DuplicateNodes(f64),
    #[error("tent radius {delta} reaches the diagonal from lifetime {lifetime}")]
    TentCrossesDiagonal { delta: f64, lifetime: f64 },
    #[error("training diagrams contain no points")]
    EmptyTraining,
    #[error("ragged dataset: {0}")]
    Ragged(String),
}

/// A template system applied to one homology dimension.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Featurizer {
    Tents(TentGrid),
    Polynomials(ChebMesh),
}

impl Featurizer {
    pub fn feature_count(&self) -> usize {
        match self {
            Featurizer::Tents(g) => g.feature_count(),
            Featurizer::Polynomials(c) => c.feature_count(),
        }
    }

    pub fn features(&self, diagram: &PersistenceDiagram) -> Vec<f64> {
        match self {
            Featurizer::Tents(g) => tent_features(diagram, g),
            Featurizer::Polynomials(c) => poly_features(diagram, c),
        }
    }

    /// Grid position `(i, j)` of every feature, in column order.
    pub fn positions(&self) -> Vec<(usize, usize)> {
        match self {
            Featurizer::Tents(g) => g.positions(),
            Featurizer::Polynomials(c) => c.positions(),
        }
    }
}

/// The diagrams describing one sample.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct DiagramSet {
    pub h0: PersistenceDiagram,
    pub h1: Option<PersistenceDiagram>,
}

impl DiagramSet {
    pub fn h0_only(h0: PersistenceDiagram) -> Self {
        DiagramSet { h0, h1: None }
    }

    pub fn get(&self, dim: usize) -> Option<&PersistenceDiagram> {
        match dim {
            0 => Some(&self.h0),
            1 => self.h1.as_ref(),
            _ => None,
        }
    }
}

/// Featurizers per homology dimension; feature blocks are concatenated in
/// dimension order.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct DatasetFeaturizer {
    pub h0: Option<Featurizer>,
    pub h1: Option<Featurizer>,
}

impl DatasetFeaturizer {
    pub fn blocks(&self) -> impl Iterator<Item = (usize, &Featurizer)> {
        [(0, self.h0.as_ref()), (1, self.h1.as_ref())]
            .into_iter()
            .filter_map(|(d, f)| f.map(|f| (d, f)))
    }

    pub fn column_index(&self) -> Vec<ColumnKey> {
        self.blocks()
            .flat_map(|(dim, f)| f.positions().into_iter().map(move |(i, j)| ColumnKey { dim, i, j }))
            .collect()
    }

    pub fn feature_count(&self) -> usize {
        self.blocks().map(|(_, f)| f.feature_count()).sum()
    }
}

/// Grid position of a feature column.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ColumnKey {
    pub dim: usize,
    pub i: usize,
    pub j: usize,
}

impl ColumnKey {
    pub fn name(&self) -> String {
        format!("h{}_i{}_j{}", self.dim, self.i, self.j)
    }

    /// Inverse of [`ColumnKey::name`].
    pub fn parse(name: &str) -> Option<ColumnKey> {
        let mut parts = name.trim().split('_');
        let dim = parts.next()?.strip_prefix('h')?.parse().ok()?;
        let i = parts.next()?.strip_prefix('i')?.parse().ok()?;
        let j = parts.next()?.strip_prefix('j')?.parse().ok()?;
        if parts.next().is_some() {
            return None;
        }
        Some(ColumnKey { dim, i, j })
    }
}

/// Samples by template-function values.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureMatrix {
    values: DMatrix<f64>,
    column_index: Vec<ColumnKey>,
}

impl FeatureMatrix {
    pub fn new(values: DMatrix<f64>, column_index: Vec<ColumnKey>) -> Result<Self, FeaturizeError> {
        if values.ncols() != column_index.len() {
            return Err(FeaturizeError::Ragged(format!(
                "{} columns but {} column keys",
                values.ncols(),
                column_index.len()
            )));
        }
        let mut seen = column_index.clone();
        seen.sort();
        seen.dedup();
        if seen.len() != column_index.len() {
            return Err(FeaturizeError::Ragged("duplicate column keys".into()));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(FeaturizeError::Ragged("non-finite feature value".into()));
        }
        Ok(FeatureMatrix { values, column_index })
    }

    pub fn values(&self) -> &DMatrix<f64> {
        &self.values
    }

    pub fn column_index(&self) -> &[ColumnKey] {
        &self.column_index
    }

    pub fn nrows(&self) -> usize {
        self.values.nrows()
    }

    pub fn ncols(&self) -> usize {
        self.values.ncols()
    }

    /// Keeps the given rows, in the given order.
    pub fn select_rows(&self, rows: &[usize]) -> FeatureMatrix {
        FeatureMatrix { values: self.values.select_rows(rows), column_index: self.column_index.clone() }
    }
}

/// Featurizes every sample and concatenates the per-dimension blocks.
pub fn featurize_dataset(
    samples: &[DiagramSet],
    featurizer: &DatasetFeaturizer,
    mode: ExecMode,
) -> Result<FeatureMatrix, FeaturizeError> {
    if featurizer.h0.is_none() && featurizer.h1.is_none() {
        return Err(FeaturizeError::Ragged("no featurizer configured".into()));
    }
    if let Some(first) = samples.first() {
        let has_h1 = first.h1.is_some();
        if let Some(k) = samples.iter().position(|s| s.h1.is_some() != has_h1) {
            return Err(FeaturizeError::Ragged(format!("sample {k} disagrees with sample 0 on H1 presence")));
        }
        if featurizer.h1.is_some() && !has_h1 {
            return Err(FeaturizeError::Ragged("H1 featurizer given but samples lack H1 diagrams".into()));
        }
    }

    let cols = featurizer.feature_count();
    let rows: Vec<Vec<f64>> = exec::map(mode, samples, |s| {
        let mut row = Vec::with_capacity(cols);
        for (dim, f) in featurizer.blocks() {
            row.extend(f.features(s.get(dim).expect("presence checked above")));
        }
        row
    });
    let values = DMatrix::from_fn(samples.len(), cols, |r, c| rows[r][c]);
    FeatureMatrix::new(values, featurizer.column_index())
}

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{LearnError, RidgeModel};
use crate::featurize::ColumnKey;

/// Model weights of one output laid out on the template grid of one
/// homology dimension: `values[i][j]` is the weight of template `(i, j)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoefficientGrid {
    pub dim: usize,
    /// Output row of the model this grid came from.
    pub output: usize,
    pub class: Option<usize>,
    pub values: Vec<Vec<f64>>,
}

/// One grid per (dimension, output). Grid shape spans `0..=max i` by
/// `0..=max j` of that dimension's columns; positions with no template stay 0.
pub fn coefficient_grid(model: &RidgeModel, columns: &[ColumnKey]) -> Result<Vec<CoefficientGrid>, LearnError> {
    if columns.len() != model.feature_count() {
        return Err(LearnError::UnmappedColumns { weights: model.feature_count(), columns: columns.len() });
    }
    let mut extents: BTreeMap<usize, (usize, usize)> = BTreeMap::new();
    for k in columns {
        let e = extents.entry(k.dim).or_default();
        e.0 = e.0.max(k.i);
        e.1 = e.1.max(k.j);
    }
    let mut grids = Vec::new();
    for (&dim, &(imax, jmax)) in &extents {
        for (output, weights) in model.weights.iter().enumerate() {
            let mut values = vec![vec![0.0; jmax + 1]; imax + 1];
            for (k, w) in columns.iter().zip(weights) {
                if k.dim == dim {
                    values[k.i][k.j] = *w;
                }
            }
            let class = model.classes.as_ref().map(|c| c[output]);
            grids.push(CoefficientGrid { dim, output, class, values });
        }
    }
    Ok(grids)
}

/// Reads weights back off the grids in column order, one vector per output.
pub fn flatten_grids(grids: &[CoefficientGrid], columns: &[ColumnKey]) -> Vec<Vec<f64>> {
    let outputs = grids.iter().map(|g| g.output + 1).max().unwrap_or(0);
    (0..outputs)
        .map(|o| {
            columns
                .iter()
                .map(|k| {
                    grids
                        .iter()
                        .find(|g| g.output == o && g.dim == k.dim)
                        .map_or(0.0, |g| g.values[k.i][k.j])
                })
                .collect()
        })
        .collect()
}

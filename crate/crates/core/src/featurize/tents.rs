use serde::{Deserialize, Serialize};

use super::FeaturizeError;
use crate::diagrams::{compactness_diagnostics, PersistenceDiagram};

/// Smallest partition scale chosen by [`auto_tent_params`].
pub const MIN_DELTA: f64 = 1e-6;

/// Tent functions centred at `(delta * i, delta * j + epsilon)` for
/// `0 <= i <= d`, `1 <= j <= d` in the birth-lifetime plane, each with an
/// L-infinity box support of radius `delta`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "TentGridRepr", into = "TentGridRepr")]
pub struct TentGrid {
    d: usize,
    delta: f64,
    epsilon: f64,
}

#[derive(Serialize, Deserialize)]
struct TentGridRepr {
    d: usize,
    delta: f64,
    epsilon: f64,
}

impl TryFrom<TentGridRepr> for TentGrid {
    type Error = FeaturizeError;
    fn try_from(s: TentGridRepr) -> Result<Self, Self::Error> {
        TentGrid::new(s.d, s.delta, s.epsilon)
    }
}

impl From<TentGrid> for TentGridRepr {
    fn from(g: TentGrid) -> Self {
        TentGridRepr { d: g.d, delta: g.delta, epsilon: g.epsilon }
    }
}

impl TentGrid {
    pub fn new(d: usize, delta: f64, epsilon: f64) -> Result<Self, FeaturizeError> {
        if d == 0 {
            return Err(FeaturizeError::InvalidGrid("d must be positive".into()));
        }
        if !(delta.is_finite() && delta > 0.0) {
            return Err(FeaturizeError::InvalidGrid(format!("delta must be positive, got {delta}")));
        }
        // epsilon > 0 keeps the lowest row's support strictly above lifetime 0
        if !(epsilon.is_finite() && epsilon > 0.0) {
            return Err(FeaturizeError::InvalidGrid(format!("epsilon must be positive, got {epsilon}")));
        }
        Ok(TentGrid { d, delta, epsilon })
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn feature_count(&self) -> usize {
        (self.d + 1) * self.d
    }

    /// Column of tent `(i, j)`; row-major over `i`, then `j`.
    pub fn column(&self, i: usize, j: usize) -> usize {
        i * self.d + (j - 1)
    }

    pub fn center(&self, i: usize, j: usize) -> (f64, f64) {
        (self.delta * i as f64, self.delta * j as f64 + self.epsilon)
    }

    /// `(i, j)` positions in column order.
    pub fn positions(&self) -> Vec<(usize, usize)> {
        (0..=self.d).flat_map(|i| (1..=self.d).map(move |j| (i, j))).collect()
    }
}

/// `|1 - max(|x - a|, |y - b|) / delta|_+` for the tent centred at `(a, b)`.
pub fn tent_value(center: (f64, f64), delta: f64, query: (f64, f64)) -> Result<f64, FeaturizeError> {
    if !(delta > 0.0 && delta < center.1) {
        return Err(FeaturizeError::TentCrossesDiagonal { delta, lifetime: center.1 });
    }
    Ok(tent_unchecked(center, delta, query))
}

#[inline]
fn tent_unchecked(center: (f64, f64), delta: f64, query: (f64, f64)) -> f64 {
    let r = (query.0 - center.0).abs().max((query.1 - center.1).abs());
    (1.0 - r / delta).max(0.0)
}

/// Multiplicity-weighted sums of every tent in `grid` over the diagram.
pub fn tent_features(diagram: &PersistenceDiagram, grid: &TentGrid) -> Vec<f64> {
    let mut out = vec![0.0; grid.feature_count()];
    let d = grid.d as i64;
    for p in diagram.to_birth_lifetime() {
        // Only tents whose support box may contain the point.
        let ci = (p.birth / grid.delta).floor() as i64;
        let cj = ((p.lifetime - grid.epsilon) / grid.delta).floor() as i64;
        let m = p.multiplicity as f64;
        for i in (ci - 1).max(0)..=(ci + 2).min(d) {
            for j in (cj - 1).max(1)..=(cj + 2).min(d) {
                let (i, j) = (i as usize, j as usize);
                let g = tent_unchecked(grid.center(i, j), grid.delta, (p.birth, p.lifetime));
                if g > 0.0 {
                    out[grid.column(i, j)] += m * g;
                }
            }
        }
    }
    out
}

/// Data-driven tent grid.
///
/// The birth-lifetime bounding box of the training points is padded by `pad`;
/// `epsilon` is half the smallest lifetime and `delta` is the smallest value for
/// which the grid centres reach the padded box's largest birth and lifetime
/// (the grid is anchored at birth 0 and lifetime `epsilon`), floored at
/// [`MIN_DELTA`].
pub fn auto_tent_params(training: &[PersistenceDiagram], d: usize, pad: f64) -> Result<TentGrid, FeaturizeError> {
    if d == 0 {
        return Err(FeaturizeError::InvalidGrid("d must be positive".into()));
    }
    if !(pad.is_finite() && pad >= 0.0) {
        return Err(FeaturizeError::InvalidGrid(format!("pad must be nonnegative, got {pad}")));
    }
    let report = compactness_diagnostics(training, &[]).map_err(|_| FeaturizeError::EmptyTraining)?;
    let (Some(bbox), Some(min_life)) = (report.bounding_box, report.min_positive_lifetime) else {
        return Err(FeaturizeError::EmptyTraining);
    };
    let epsilon = min_life / 2.0;
    let birth_reach = bbox.birth_max.value + pad;
    let lifetime_reach = bbox.lifetime_max.value + pad - epsilon;
    let delta = (birth_reach / d as f64).max(lifetime_reach / d as f64).max(MIN_DELTA);
    TentGrid::new(d, delta, epsilon)
}

use serde::{Deserialize, Serialize};

use super::{DiagramError, PersistenceDiagram, WedgeRegion};

/// Bounds witnessing (or failing to witness) relative compactness of a
/// finite collection of diagrams.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompactnessReport {
    /// `max_D d_B(D, empty)`.
    pub bound_c: f64,
    pub epsilon_grid: Vec<f64>,
    /// Largest birth among points with persistence `>= eps`, per grid value.
    pub birth_bounds_c_eps: Vec<f64>,
    /// Largest multiplicity of a single diagram in `lifetime >= eps`.
    pub mult_bounds_m_eps: Vec<u64>,
    /// Tight birth-lifetime box over every point, `None` when all diagrams are empty.
    pub bounding_box: Option<WedgeRegion>,
    pub min_positive_lifetime: Option<f64>,
}

pub fn compactness_diagnostics(
    collection: &[PersistenceDiagram],
    epsilon_grid: &[f64],
) -> Result<CompactnessReport, DiagramError> {
    if collection.is_empty() {
        return Err(DiagramError::EmptyCollection);
    }
    let grid_ok = epsilon_grid.iter().all(|e| e.is_finite() && *e > 0.0)
        && epsilon_grid.windows(2).all(|w| w[0] < w[1]);
    if !grid_ok {
        return Err(DiagramError::InvalidEpsilonGrid);
    }

    let bound_c = collection
        .iter()
        .filter_map(|d| d.max_persistence())
        .fold(0.0, f64::max)
        / 2.0;

    let mut birth_bounds = Vec::with_capacity(epsilon_grid.len());
    let mut mult_bounds = Vec::with_capacity(epsilon_grid.len());
    for &eps in epsilon_grid {
        let region = WedgeRegion::lifetime_at_least(eps);
        let c_eps = collection
            .iter()
            .flat_map(|d| d.points())
            .filter(|p| p.persistence() >= eps)
            .map(|p| p.birth())
            .fold(0.0, f64::max);
        let m_eps = collection
            .iter()
            .map(|d| d.multiplicity_in_region(&region))
            .max()
            .unwrap_or(0);
        birth_bounds.push(c_eps);
        mult_bounds.push(m_eps);
    }

    let mut extent: Option<[f64; 4]> = None;
    for p in collection.iter().flat_map(|d| d.points()) {
        let (b, l) = (p.birth(), p.persistence());
        let e = extent.get_or_insert([b, b, l, l]);
        e[0] = e[0].min(b);
        e[1] = e[1].max(b);
        e[2] = e[2].min(l);
        e[3] = e[3].max(l);
    }
    let bounding_box = extent
        .map(|[b0, b1, l0, l1]| WedgeRegion::closed(b0, b1, l0, l1))
        .transpose()?;

    Ok(CompactnessReport {
        bound_c,
        epsilon_grid: epsilon_grid.to_vec(),
        birth_bounds_c_eps: birth_bounds,
        mult_bounds_m_eps: mult_bounds,
        min_positive_lifetime: extent.map(|e| e[2]),
        bounding_box,
    })
}

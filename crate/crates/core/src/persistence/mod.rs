//! Vietoris-Rips persistence in dimensions 0 and 1 for Euclidean point clouds.

mod h0;
mod h1;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exec::{self, ExecMode};

pub use h0::{rips_h0, rips_h0_from_distances};
pub use h1::{rips_h1, rips_h1_from_distances, RipsOptions, DEFAULT_SIMPLEX_BUDGET};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PersistenceError {
    #[error("point cloud is empty")]
    EmptyCloud,
    #[error("point {index} has dimension {found}, expected {expected}")]
    RaggedCloud { index: usize, expected: usize, found: usize },
    #[error("point {index} has a non-finite coordinate")]
    NonFinite { index: usize },
    #[error("H1 needs at least 3 points, got {0}")]
    TooFewPoints(usize),
    #[error("max_scale must be positive and finite, got {0}")]
    InvalidScale(f64),
    #[error("Rips complex has {count} simplices, over the budget of {budget}")]
    SimplexBudgetExceeded { count: usize, budget: usize },
    #[error("{0} H1 classes are still alive at max_scale")]
    UnresolvedClasses(usize),
}

/// Nonempty set of points of a common dimension with finite coordinates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointCloud {
    dim: usize,
    coords: Vec<f64>,
}

impl PointCloud {
    pub fn new(points: Vec<Vec<f64>>) -> Result<Self, PersistenceError> {
        let first = points.first().ok_or(PersistenceError::EmptyCloud)?;
        let dim = first.len();
        let mut coords = Vec::with_capacity(points.len() * dim);
        for (index, p) in points.iter().enumerate() {
            if p.len() != dim {
                return Err(PersistenceError::RaggedCloud { index, expected: dim, found: p.len() });
            }
            if p.iter().any(|x| !x.is_finite()) {
                return Err(PersistenceError::NonFinite { index });
            }
            coords.extend_from_slice(p);
        }
        Ok(PointCloud { dim, coords })
    }

    /// Builds a cloud from row-major coordinates.
    pub fn from_flat(dim: usize, coords: Vec<f64>) -> Result<Self, PersistenceError> {
        if dim == 0 || coords.is_empty() {
            return Err(PersistenceError::EmptyCloud);
        }
        if !coords.len().is_multiple_of(dim) {
            return Err(PersistenceError::RaggedCloud {
                index: coords.len() / dim,
                expected: dim,
                found: coords.len() % dim,
            });
        }
        if let Some(i) = coords.iter().position(|x| !x.is_finite()) {
            return Err(PersistenceError::NonFinite { index: i / dim });
        }
        Ok(PointCloud { dim, coords })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.coords.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.coords[i * self.dim..(i + 1) * self.dim]
    }

    pub fn iter(&self) -> impl Iterator<Item = &[f64]> {
        self.coords.chunks_exact(self.dim)
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        self.iter().map(<[f64]>::to_vec).collect()
    }
}

/// Dense symmetric matrix of pairwise Euclidean distances.
#[derive(Debug, Clone)]
pub struct DistanceMatrix {
    n: usize,
    data: Vec<f64>,
}

impl DistanceMatrix {
    pub fn from_cloud(cloud: &PointCloud, mode: ExecMode) -> Self {
        let n = cloud.len();
        let rows = exec::map_range(mode, n, |i| {
            let p = cloud.point(i);
            (0..n)
                .map(|j| {
                    p.iter()
                        .zip(cloud.point(j))
                        .map(|(a, b)| (a - b) * (a - b))
                        .sum::<f64>()
                        .sqrt()
                })
                .collect::<Vec<_>>()
        });
        let mut data = Vec::with_capacity(n * n);
        for row in rows {
            data.extend(row);
        }
        // sqrt of identical sums is identical, but force exact symmetry anyway
        for i in 0..n {
            for j in 0..i {
                data[i * n + j] = data[j * n + i];
            }
        }
        DistanceMatrix { n, data }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    /// `min_i max_j d(i, j)`; the Rips complex is a cone at this scale.
    pub fn enclosing_radius(&self) -> f64 {
        (0..self.n)
            .map(|i| self.data[i * self.n..(i + 1) * self.n].iter().copied().fold(0.0, f64::max))
            .fold(f64::INFINITY, f64::min)
    }
}

/// Sorted edge list shared by the H0 and H1 routines.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Edge {
    pub len: f64,
    pub i: u32,
    pub j: u32,
}

/// All edges with length `<= threshold`, ordered by (length, i, j).
pub(crate) fn sorted_edges(dist: &DistanceMatrix, threshold: f64) -> Vec<Edge> {
    let n = dist.len();
    let mut edges = Vec::with_capacity(n * n.saturating_sub(1) / 2);
    for i in 0..n {
        for j in i + 1..n {
            let len = dist.get(i, j);
            if len <= threshold {
                edges.push(Edge { len, i: i as u32, j: j as u32 });
            }
        }
    }
    edges.sort_by(|a, b| a.len.total_cmp(&b.len).then(a.i.cmp(&b.i)).then(a.j.cmp(&b.j)));
    edges
}

pub(crate) struct UnionFind {
    parent: Vec<u32>,
    rank: Vec<u8>,
}

impl UnionFind {
    pub fn new(n: usize) -> Self {
        UnionFind { parent: (0..n as u32).collect(), rank: vec![0; n] }
    }

    pub fn find(&mut self, mut x: u32) -> u32 {
        while self.parent[x as usize] != x {
            let p = self.parent[x as usize];
            self.parent[x as usize] = self.parent[p as usize];
            x = p;
        }
        x
    }

    /// Returns false when `a` and `b` were already connected.
    pub fn union(&mut self, a: u32, b: u32) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        match self.rank[ra as usize].cmp(&self.rank[rb as usize]) {
            std::cmp::Ordering::Less => self.parent[ra as usize] = rb,
            std::cmp::Ordering::Greater => self.parent[rb as usize] = ra,
            std::cmp::Ordering::Equal => {
                self.parent[rb as usize] = ra;
                self.rank[ra as usize] += 1;
            }
        }
        true
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cloud_validation() {
        assert_eq!(PointCloud::new(vec![]), Err(PersistenceError::EmptyCloud));
        assert!(matches!(
            PointCloud::new(vec![vec![0.0, 1.0], vec![1.0]]),
            Err(PersistenceError::RaggedCloud { index: 1, .. })
        ));
        assert!(matches!(
            PointCloud::new(vec![vec![0.0, f64::NAN]]),
            Err(PersistenceError::NonFinite { index: 0 })
        ));
        let c = PointCloud::new(vec![vec![0.0, 1.0], vec![2.0, 3.0]]).unwrap();
        assert_eq!(c.len(), 2);
        assert_eq!(c.point(1), &[2.0, 3.0]);
    }

    #[test]
    fn distances_and_enclosing_radius() {
        let c = PointCloud::new(vec![vec![0.0], vec![1.0], vec![3.0]]).unwrap();
        let d = DistanceMatrix::from_cloud(&c, ExecMode::Sequential);
        assert_eq!(d.get(0, 2), 3.0);
        assert_eq!(d.get(2, 1), 2.0);
        assert_eq!(d.enclosing_radius(), 2.0);
    }
}

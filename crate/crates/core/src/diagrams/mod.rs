//! Finite persistence diagrams, wedge-region queries, the bottleneck distance
//! and compactness diagnostics over collections of diagrams.

mod bottleneck;
mod compactness;

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use bottleneck::bottleneck_distance;
pub use compactness::{compactness_diagnostics, CompactnessReport};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DiagramError {
    #[error("non-finite coordinate in point ({birth}, {death})")]
    NonFinite { birth: f64, death: f64 },
    #[error("negative birth {birth}")]
    NegativeBirth { birth: f64 },
    #[error("point ({birth}, {death}) is not above the diagonal")]
    NotAboveDiagonal { birth: f64, death: f64 },
    #[error("multiplicity must be at least 1")]
    ZeroMultiplicity,
    #[error("invalid region: {0}")]
    InvalidRegion(String),
    #[error("collection of diagrams is empty")]
    EmptyCollection,
    #[error("epsilon grid must be positive and strictly increasing")]
    InvalidEpsilonGrid,
}

/// A point `(birth, death)` of the open wedge `0 <= birth < death`, with
/// multiplicity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DiagramPoint {
    birth: f64,
    death: f64,
    multiplicity: u32,
}

impl DiagramPoint {
    pub fn new(birth: f64, death: f64, multiplicity: u32) -> Result<Self, DiagramError> {
        if !birth.is_finite() || !death.is_finite() {
            return Err(DiagramError::NonFinite { birth, death });
        }
        if birth < 0.0 {
            return Err(DiagramError::NegativeBirth { birth });
        }
        if death <= birth {
            return Err(DiagramError::NotAboveDiagonal { birth, death });
        }
        if multiplicity == 0 {
            return Err(DiagramError::ZeroMultiplicity);
        }
        Ok(DiagramPoint { birth, death, multiplicity })
    }

    pub fn birth(&self) -> f64 {
        self.birth
    }

    pub fn death(&self) -> f64 {
        self.death
    }

    pub fn multiplicity(&self) -> u32 {
        self.multiplicity
    }

    /// `death - birth`.
    pub fn persistence(&self) -> f64 {
        self.death - self.birth
    }

    fn key_cmp(&self, other: &Self) -> Ordering {
        self.birth
            .total_cmp(&other.birth)
            .then(self.death.total_cmp(&other.death))
    }
}

/// A point in birth-lifetime coordinates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BirthLifetime {
    pub birth: f64,
    pub lifetime: f64,
    pub multiplicity: u32,
}

/// Finite multiset of off-diagonal points.
///
/// Points are kept sorted by `(birth, death)` with duplicates merged into a
/// single entry, so structural equality is multiset equality.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct PersistenceDiagram {
    points: Vec<DiagramPoint>,
    dimension: usize,
}

impl PersistenceDiagram {
    /// Canonicalizes `points`: sorts and aggregates repeated `(birth, death)`.
    pub fn new(points: Vec<DiagramPoint>, dimension: usize) -> Self {
        let mut points = points;
        points.sort_by(DiagramPoint::key_cmp);
        let mut merged: Vec<DiagramPoint> = Vec::with_capacity(points.len());
        for p in points {
            match merged.last_mut() {
                Some(last) if last.key_cmp(&p) == Ordering::Equal => {
                    last.multiplicity += p.multiplicity;
                }
                _ => merged.push(p),
            }
        }
        PersistenceDiagram { points: merged, dimension }
    }

    pub fn empty(dimension: usize) -> Self {
        PersistenceDiagram { points: Vec::new(), dimension }
    }

    /// Builds a diagram from `(birth, death)` pairs of multiplicity one.
    pub fn from_pairs(pairs: &[(f64, f64)], dimension: usize) -> Result<Self, DiagramError> {
        let pts = pairs
            .iter()
            .map(|&(b, d)| DiagramPoint::new(b, d, 1))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Self::new(pts, dimension))
    }

    /// Builds a diagram from `(birth, death, multiplicity)` triples.
    pub fn from_triples(triples: &[(f64, f64, u32)], dimension: usize) -> Result<Self, DiagramError> {
        let pts = triples
            .iter()
            .map(|&(b, d, m)| DiagramPoint::new(b, d, m))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Self::new(pts, dimension))
    }

    pub fn points(&self) -> &[DiagramPoint] {
        &self.points
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Number of distinct points.
    pub fn len(&self) -> usize {
        self.points.len()
    }

    /// Sum of multiplicities.
    pub fn total_multiplicity(&self) -> u64 {
        self.points.iter().map(|p| p.multiplicity as u64).sum()
    }

    pub fn max_persistence(&self) -> Option<f64> {
        self.points.iter().map(|p| p.persistence()).reduce(f64::max)
    }

    /// Disjoint union; multiplicities of shared points add.
    pub fn union(&self, other: &PersistenceDiagram) -> PersistenceDiagram {
        let mut pts = self.points.clone();
        pts.extend_from_slice(&other.points);
        PersistenceDiagram::new(pts, self.dimension)
    }

    /// `(b, d, m) -> (b, d - b, m)` in storage order.
    pub fn to_birth_lifetime(&self) -> Vec<BirthLifetime> {
        self.points
            .iter()
            .map(|p| BirthLifetime {
                birth: p.birth,
                lifetime: p.persistence(),
                multiplicity: p.multiplicity,
            })
            .collect()
    }

    /// Total multiplicity of the points lying in `region`.
    pub fn multiplicity_in_region(&self, region: &WedgeRegion) -> u64 {
        self.points
            .iter()
            .filter(|p| region.contains(p.birth, p.persistence()))
            .map(|p| p.multiplicity as u64)
            .sum()
    }
}

/// One side of an interval.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Bound {
    pub value: f64,
    pub inclusive: bool,
}

impl Bound {
    pub fn closed(value: f64) -> Self {
        Bound { value, inclusive: true }
    }

    pub fn open(value: f64) -> Self {
        Bound { value, inclusive: false }
    }
}

/// Axis-aligned box in the birth-lifetime plane with per-bound inclusivity.
/// Infinite upper bounds describe unbounded regions such as `W^eps`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WedgeRegion {
    pub birth_min: Bound,
    pub birth_max: Bound,
    pub lifetime_min: Bound,
    pub lifetime_max: Bound,
}

impl WedgeRegion {
    pub fn new(
        birth_min: Bound,
        birth_max: Bound,
        lifetime_min: Bound,
        lifetime_max: Bound,
    ) -> Result<Self, DiagramError> {
        let ok = |v: f64| !v.is_nan() && v >= 0.0;
        if !(ok(birth_min.value) && ok(birth_max.value) && ok(lifetime_min.value) && ok(lifetime_max.value)) {
            return Err(DiagramError::InvalidRegion("bounds must be nonnegative".into()));
        }
        if birth_min.value > birth_max.value || lifetime_min.value > lifetime_max.value {
            return Err(DiagramError::InvalidRegion("lower bound exceeds upper bound".into()));
        }
        Ok(WedgeRegion { birth_min, birth_max, lifetime_min, lifetime_max })
    }

    /// Closed box `[b0, b1] x [l0, l1]`.
    pub fn closed(b0: f64, b1: f64, l0: f64, l1: f64) -> Result<Self, DiagramError> {
        Self::new(Bound::closed(b0), Bound::closed(b1), Bound::closed(l0), Bound::closed(l1))
    }

    /// The whole wedge.
    pub fn whole() -> Self {
        WedgeRegion {
            birth_min: Bound::closed(0.0),
            birth_max: Bound::closed(f64::INFINITY),
            lifetime_min: Bound::open(0.0),
            lifetime_max: Bound::closed(f64::INFINITY),
        }
    }

    /// Closed region of lifetime at least `eps`.
    pub fn lifetime_at_least(eps: f64) -> Self {
        WedgeRegion { lifetime_min: Bound::closed(eps), ..Self::whole() }
    }

    pub fn contains(&self, birth: f64, lifetime: f64) -> bool {
        fn above(x: f64, b: Bound) -> bool {
            if b.inclusive { x >= b.value } else { x > b.value }
        }
        fn below(x: f64, b: Bound) -> bool {
            if b.inclusive { x <= b.value } else { x < b.value }
        }
        above(birth, self.birth_min)
            && below(birth, self.birth_max)
            && above(lifetime, self.lifetime_min)
            && below(lifetime, self.lifetime_max)
    }
}

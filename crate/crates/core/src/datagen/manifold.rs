use std::f64::consts::TAU;
use std::str::FromStr;

use rand::Rng as _;
use serde::{Deserialize, Serialize};

use super::{standard_normal_pair, uniform, DatagenError, Rng};
use crate::persistence::PointCloud;

const CLUSTER_STD: f64 = 0.05;
const THREE_CENTERS: [(f64, f64); 3] = [(0.0, 0.0), (0.0, 2.0), (2.0, 0.0)];
const NINE_CENTERS: [(f64, f64); 9] = [
    (0.0, 0.0),
    (0.0, 1.5),
    (1.5, 0.0),
    (0.0, 4.0),
    (1.0, 3.0),
    (1.0, 5.0),
    (3.0, 4.0),
    (3.0, 5.5),
    (4.5, 4.0),
];
const TORUS_MAJOR: f64 = 2.0;
const TORUS_MINOR: f64 = 1.0;

/// The six point-cloud classes of the manifold experiment.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ManifoldKind {
    Annulus,
    ThreeClusters,
    NineClusters,
    Cube,
    Torus,
    Sphere,
}

impl ManifoldKind {
    pub const ALL: [ManifoldKind; 6] = [
        ManifoldKind::Annulus,
        ManifoldKind::ThreeClusters,
        ManifoldKind::NineClusters,
        ManifoldKind::Cube,
        ManifoldKind::Torus,
        ManifoldKind::Sphere,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ManifoldKind::Annulus => "annulus",
            ManifoldKind::ThreeClusters => "three_clusters",
            ManifoldKind::NineClusters => "nine_clusters",
            ManifoldKind::Cube => "cube",
            ManifoldKind::Torus => "torus",
            ManifoldKind::Sphere => "sphere",
        }
    }

    /// Position in [`ManifoldKind::ALL`], used as the class id.
    pub fn class_id(self) -> usize {
        Self::ALL.iter().position(|&k| k == self).expect("listed")
    }
}

impl FromStr for ManifoldKind {
    type Err = DatagenError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let norm = s.trim().to_ascii_lowercase().replace('-', "_");
        Self::ALL
            .into_iter()
            .find(|k| k.name() == norm)
            .ok_or_else(|| DatagenError::UnknownManifold(s.to_string()))
    }
}

/// `n` points sampled from the given class.
pub fn gen_manifold(kind: ManifoldKind, n: usize, rng: &mut Rng) -> Result<PointCloud, DatagenError> {
    if n == 0 {
        return Err(DatagenError::InvalidParameter("point count must be positive".into()));
    }
    let rows: Vec<Vec<f64>> = match kind {
        ManifoldKind::Annulus => (0..n)
            .map(|_| {
                // uniform in area: r^2 uniform on [1, 4]
                let r = uniform(rng, 1.0, 4.0).sqrt();
                let t = uniform(rng, 0.0, TAU);
                vec![r * t.cos(), r * t.sin()]
            })
            .collect(),
        ManifoldKind::ThreeClusters => clusters(&THREE_CENTERS, n, rng),
        ManifoldKind::NineClusters => clusters(&NINE_CENTERS, n, rng),
        ManifoldKind::Cube => (0..n).map(|_| vec![rng.random::<f64>(), rng.random::<f64>()]).collect(),
        ManifoldKind::Torus => (0..n)
            .map(|_| {
                let phi = torus_minor_angle(rng);
                let theta = uniform(rng, 0.0, TAU);
                let ring = TORUS_MAJOR + TORUS_MINOR * phi.cos();
                vec![ring * theta.cos(), ring * theta.sin(), TORUS_MINOR * phi.sin()]
            })
            .collect(),
        ManifoldKind::Sphere => (0..n)
            .map(|_| {
                let (a, b) = standard_normal_pair(rng);
                let (c, _) = standard_normal_pair(rng);
                let norm = (a * a + b * b + c * c).sqrt();
                let r = 1.0 + uniform(rng, -0.05, 0.05);
                vec![r * a / norm, r * b / norm, r * c / norm]
            })
            .collect(),
    };
    Ok(PointCloud::new(rows).expect("generated points are finite and consistent"))
}

/// Minor angle of a surface-uniform torus point: accept a uniform proposal
/// with probability `(1 + (r/R) cos phi) / (1 + r/R)`.
pub(crate) fn torus_minor_angle(rng: &mut Rng) -> f64 {
    let ratio = TORUS_MINOR / TORUS_MAJOR;
    loop {
        let phi = uniform(rng, 0.0, TAU);
        let accept = (1.0 + ratio * phi.cos()) / (1.0 + ratio);
        if rng.random::<f64>() < accept {
            return phi;
        }
    }
}

/// Splits `n` as evenly as possible over `centers`, earlier centers taking
/// the remainder.
fn clusters(centers: &[(f64, f64)], n: usize, rng: &mut Rng) -> Vec<Vec<f64>> {
    let k = centers.len();
    let mut rows = Vec::with_capacity(n);
    for (c, &(cx, cy)) in centers.iter().enumerate() {
        let count = n / k + usize::from(c < n % k);
        for _ in 0..count {
            let (zx, zy) = standard_normal_pair(rng);
            rows.push(vec![cx + CLUSTER_STD * zx, cy + CLUSTER_STD * zy]);
        }
    }
    rows
}

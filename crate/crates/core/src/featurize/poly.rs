//! Interpolating-polynomial templates on a tensor Chebyshev mesh.
//!
//! For a diagram with birth-lifetime points `(x_q, y_q)` the feature at mesh
//! position `(i, j)` is `sum_q mu_q h(x_q, y_q) g(l_i(x_q) l_j(y_q))`, where
//! `l_i`, `l_j` are the Lagrange bases on the birth and lifetime meshes, `h` is
//! a cutoff that is 1 on the mesh box and vanishes `support_pad` away from it,
//! and `g` is the absolute value (or the identity when `abs_mode` is off).

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::interp::{barycentric_weights, cheb_nodes, interp_matrix_with_weights};
use super::FeaturizeError;
use crate::diagrams::{compactness_diagnostics, PersistenceDiagram};

/// Widening applied to a zero-width bounding box axis, on each side.
pub const DEGENERATE_BOX_PAD: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PadMode {
    /// Cutoff is the hard indicator of the box.
    MachineEps,
    /// Linear falloff over half the box's lower lifetime bound.
    HalfB,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct ChebMeshRepr {
    m: usize,
    n: usize,
    birth: (f64, f64),
    lifetime: (f64, f64),
    abs_mode: bool,
    support_pad: f64,
}

/// Chebyshev mesh of `(m + 1) x (n + 1)` nodes on the box
/// `[A, A'] x [B, B']` in the birth-lifetime plane.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ChebMeshRepr", into = "ChebMeshRepr")]
pub struct ChebMesh {
    m: usize,
    n: usize,
    birth: (f64, f64),
    lifetime: (f64, f64),
    abs_mode: bool,
    support_pad: f64,
    birth_nodes: Vec<f64>,
    birth_weights: Vec<f64>,
    lifetime_nodes: Vec<f64>,
    lifetime_weights: Vec<f64>,
}

impl TryFrom<ChebMeshRepr> for ChebMesh {
    type Error = FeaturizeError;
    fn try_from(s: ChebMeshRepr) -> Result<Self, Self::Error> {
        ChebMesh::new(s.m, s.n, s.birth, s.lifetime, s.abs_mode, s.support_pad)
    }
}

impl From<ChebMesh> for ChebMeshRepr {
    fn from(c: ChebMesh) -> Self {
        ChebMeshRepr {
            m: c.m,
            n: c.n,
            birth: c.birth,
            lifetime: c.lifetime,
            abs_mode: c.abs_mode,
            support_pad: c.support_pad,
        }
    }
}

impl ChebMesh {
    pub fn new(
        m: usize,
        n: usize,
        birth: (f64, f64),
        lifetime: (f64, f64),
        abs_mode: bool,
        support_pad: f64,
    ) -> Result<Self, FeaturizeError> {
        if m == 0 || n == 0 {
            return Err(FeaturizeError::InvalidMesh("m and n must be positive".into()));
        }
        if !(support_pad.is_finite() && support_pad >= 0.0) {
            return Err(FeaturizeError::InvalidMesh(format!("support_pad must be nonnegative, got {support_pad}")));
        }
        if !(lifetime.0 > 0.0 && lifetime.0 - support_pad > 0.0) {
            return Err(FeaturizeError::InvalidMesh(format!(
                "support must stay above the diagonal: B = {}, pad = {support_pad}",
                lifetime.0
            )));
        }
        let birth_nodes = cheb_nodes(m, birth.0, birth.1)?;
        let lifetime_nodes = cheb_nodes(n, lifetime.0, lifetime.1)?;
        let birth_weights = barycentric_weights(&birth_nodes)?;
        let lifetime_weights = barycentric_weights(&lifetime_nodes)?;
        Ok(ChebMesh {
            m,
            n,
            birth,
            lifetime,
            abs_mode,
            support_pad,
            birth_nodes,
            birth_weights,
            lifetime_nodes,
            lifetime_weights,
        })
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn birth_interval(&self) -> (f64, f64) {
        self.birth
    }

    pub fn lifetime_interval(&self) -> (f64, f64) {
        self.lifetime
    }

    pub fn abs_mode(&self) -> bool {
        self.abs_mode
    }

    pub fn support_pad(&self) -> f64 {
        self.support_pad
    }

    pub fn birth_nodes(&self) -> &[f64] {
        &self.birth_nodes
    }

    pub fn lifetime_nodes(&self) -> &[f64] {
        &self.lifetime_nodes
    }

    pub fn feature_count(&self) -> usize {
        (self.m + 1) * (self.n + 1)
    }

    /// Feature index `r = i (n + 1) + j`.
    pub fn column(&self, i: usize, j: usize) -> usize {
        i * (self.n + 1) + j
    }

    pub fn positions(&self) -> Vec<(usize, usize)> {
        (0..=self.m).flat_map(|i| (0..=self.n).map(move |j| (i, j))).collect()
    }

    /// Cutoff `h`: 1 on the box, `1 - dist / pad` within `pad` of it (L-infinity),
    /// 0 beyond. A pad at or below machine epsilon is a hard indicator.
    pub fn cutoff(&self, birth: f64, lifetime: f64) -> f64 {
        let gap = |x: f64, (lo, hi): (f64, f64)| (lo - x).max(x - hi).max(0.0);
        let dist = gap(birth, self.birth).max(gap(lifetime, self.lifetime));
        if self.support_pad <= f64::EPSILON {
            return if dist == 0.0 { 1.0 } else { 0.0 };
        }
        1.0 - (dist / self.support_pad).clamp(0.0, 1.0)
    }
}

/// Row sums of the per-point template matrix, assembled by replicating the
/// one-dimensional interpolation matrices and taking their elementwise
/// product.
pub fn poly_features(diagram: &PersistenceDiagram, mesh: &ChebMesh) -> Vec<f64> {
    let (m1, n1) = (mesh.m + 1, mesh.n + 1);
    let mut births = Vec::new();
    let mut lifetimes = Vec::new();
    let mut scale = Vec::new();
    for p in diagram.to_birth_lifetime() {
        let h = mesh.cutoff(p.birth, p.lifetime);
        if h > 0.0 {
            births.push(p.birth);
            lifetimes.push(p.lifetime);
            scale.push(p.multiplicity as f64 * h);
        }
    }
    let big_n = births.len();
    let mut features = vec![0.0; m1 * n1];
    if big_n == 0 {
        return features;
    }

    // gamma: (m+1) x N, phi: N x (n+1)
    let gamma = interp_matrix_with_weights(&mesh.birth_nodes, &mesh.birth_weights, &births).transpose();
    let phi = interp_matrix_with_weights(&mesh.lifetime_nodes, &mesh.lifetime_weights, &lifetimes);

    // Gamma repeats every column of gamma n+1 times; Phi stacks m+1 copies of
    // phi unravelled row-wise.
    let wide = big_n * n1;
    let big_gamma = DMatrix::from_fn(m1, wide, |i, c| gamma[(i, c / n1)]);
    let big_phi = DMatrix::from_fn(m1, wide, |_, c| phi[(c / n1, c % n1)]);
    let psi = big_gamma.component_mul(&big_phi);

    // Chunk q of psi is the (m+1) x (n+1) block for point q; unravel each
    // block row-wise into row q of an N x (m+1)(n+1) matrix.
    let psi_hat = DMatrix::from_fn(big_n, m1 * n1, |q, r| psi[(r / n1, q * n1 + r % n1)]);

    let g = |v: f64| if mesh.abs_mode { v.abs() } else { v };
    for q in 0..big_n {
        for (r, f) in features.iter_mut().enumerate() {
            *f += scale[q] * g(psi_hat[(q, r)]);
        }
    }
    features
}

/// Mesh box from the tight birth-lifetime bounding box of the training points.
pub fn auto_poly_params(
    training: &[PersistenceDiagram],
    m: usize,
    n: usize,
    pad_mode: PadMode,
) -> Result<ChebMesh, FeaturizeError> {
    let report = compactness_diagnostics(training, &[]).map_err(|_| FeaturizeError::EmptyTraining)?;
    let bbox = report.bounding_box.ok_or(FeaturizeError::EmptyTraining)?;
    let widen = |lo: f64, hi: f64| {
        if hi > lo {
            (lo, hi)
        } else {
            (lo - DEGENERATE_BOX_PAD, hi + DEGENERATE_BOX_PAD)
        }
    };
    let birth = widen(bbox.birth_min.value, bbox.birth_max.value);
    let lifetime = widen(bbox.lifetime_min.value, bbox.lifetime_max.value);
    let support_pad = match pad_mode {
        PadMode::MachineEps => f64::EPSILON,
        PadMode::HalfB => lifetime.0 / 2.0,
    };
    ChebMesh::new(m, n, birth, lifetime, true, support_pad)
}

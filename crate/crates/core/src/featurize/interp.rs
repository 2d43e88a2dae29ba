//! One-dimensional barycentric Lagrange interpolation on arbitrary nodes,
//! plus Chebyshev points of the second kind.

use nalgebra::DMatrix;

use super::FeaturizeError;

/// `n + 1` Chebyshev points of the second kind on `[lo, hi]`, increasing.
///
/// Uses `sin(pi (n - 2j) / 2n)` rather than `cos(j pi / n)` so the points are
/// exactly symmetric and the midpoint is exactly zero on `[-1, 1]`.
pub fn cheb_nodes(n: usize, lo: f64, hi: f64) -> Result<Vec<f64>, FeaturizeError> {
    if n == 0 {
        return Err(FeaturizeError::InvalidMesh("need at least two nodes".into()));
    }
    if !(lo.is_finite() && hi.is_finite() && lo < hi) {
        return Err(FeaturizeError::InvalidInterval { lo, hi });
    }
    let half = (hi - lo) / 2.0;
    let nodes = (0..=n)
        .map(|k| {
            // k = 0 maps to -1, k = n to +1
            let t = (std::f64::consts::PI * (2.0 * k as f64 - n as f64) / (2.0 * n as f64)).sin();
            match k {
                0 => lo,
                k if k == n => hi,
                _ => lo + (t + 1.0) * half,
            }
        })
        .collect();
    Ok(nodes)
}

/// `w_j = 1 / prod_{i != j} (a_j - a_i)`.
pub fn barycentric_weights(nodes: &[f64]) -> Result<Vec<f64>, FeaturizeError> {
    let mut weights = Vec::with_capacity(nodes.len());
    for (j, &aj) in nodes.iter().enumerate() {
        let mut prod = 1.0;
        for (i, &ai) in nodes.iter().enumerate() {
            if i != j {
                let diff = aj - ai;
                if diff == 0.0 {
                    return Err(FeaturizeError::DuplicateNodes(aj));
                }
                prod *= diff;
            }
        }
        weights.push(1.0 / prod);
    }
    Ok(weights)
}

/// Lagrange basis values `l_j(x)` for all nodes, written into `out`.
/// A query equal to a node yields the matching indicator row.
pub(crate) fn basis_row(nodes: &[f64], weights: &[f64], x: f64, out: &mut [f64]) {
    if let Some(k) = nodes.iter().position(|&a| a == x) {
        out.fill(0.0);
        out[k] = 1.0;
        return;
    }
    let mut denom = 0.0;
    for ((o, &a), &w) in out.iter_mut().zip(nodes).zip(weights) {
        let t = w / (x - a);
        *o = t;
        denom += t;
    }
    for o in out.iter_mut() {
        *o /= denom;
    }
}

/// Interpolation matrix: entry `(q, j)` is `l_j(queries[q])`.
pub fn interp_matrix(nodes: &[f64], queries: &[f64]) -> Result<DMatrix<f64>, FeaturizeError> {
    let weights = barycentric_weights(nodes)?;
    Ok(interp_matrix_with_weights(nodes, &weights, queries))
}

pub(crate) fn interp_matrix_with_weights(nodes: &[f64], weights: &[f64], queries: &[f64]) -> DMatrix<f64> {
    let mut m = DMatrix::zeros(queries.len(), nodes.len());
    let mut row = vec![0.0; nodes.len()];
    for (q, &x) in queries.iter().enumerate() {
        basis_row(nodes, weights, x, &mut row);
        for (j, v) in row.iter().enumerate() {
            m[(q, j)] = *v;
        }
    }
    m
}

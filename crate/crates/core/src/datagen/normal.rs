use super::{standard_normal_pair, Rng};
use crate::diagrams::{DiagramPoint, PersistenceDiagram};

/// Draws `n` points from `N(mu, sigma^2 I)` in the birth-death plane and keeps
/// those with `0 <= birth < death`, so the diagram has at most `n` points.
pub fn gen_normal_diagram(mu: (f64, f64), sigma: f64, n: usize, rng: &mut Rng) -> PersistenceDiagram {
    let mut points = Vec::with_capacity(n);
    for _ in 0..n {
        let (zx, zy) = standard_normal_pair(rng);
        let (birth, death) = (mu.0 + sigma * zx, mu.1 + sigma * zy);
        if birth >= 0.0 && birth < death {
            if let Ok(p) = DiagramPoint::new(birth, death, 1) {
                points.push(p);
            }
        }
    }
    PersistenceDiagram::new(points, 0)
}

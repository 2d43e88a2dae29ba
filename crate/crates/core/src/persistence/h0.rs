use super::{sorted_edges, DistanceMatrix, PointCloud, UnionFind};
use crate::diagrams::{DiagramPoint, PersistenceDiagram};
use crate::exec::ExecMode;

/// 0-dimensional Rips diagram: one point `(0, w)` per minimum spanning tree
/// edge of positive length `w`. The component that never dies is dropped.
pub fn rips_h0(cloud: &PointCloud) -> PersistenceDiagram {
    rips_h0_from_distances(&DistanceMatrix::from_cloud(cloud, ExecMode::Sequential))
}

pub fn rips_h0_from_distances(dist: &DistanceMatrix) -> PersistenceDiagram {
    let n = dist.len();
    let mut uf = UnionFind::new(n);
    let mut points = Vec::with_capacity(n.saturating_sub(1));
    let mut merges = 0;
    for e in sorted_edges(dist, f64::INFINITY) {
        if uf.union(e.i, e.j) {
            merges += 1;
            if e.len > 0.0 {
                points.push(DiagramPoint::new(0.0, e.len, 1).expect("positive finite edge"));
            }
            if merges + 1 == n {
                break;
            }
        }
    }
    PersistenceDiagram::new(points, 0)
}

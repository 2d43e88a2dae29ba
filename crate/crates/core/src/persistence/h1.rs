//! H1 of the Rips filtration by reducing the coboundary matrix.
//!
//! Edges are processed from the last to the first in filtration order and
//! their coboundaries (cofacet triangles) are reduced with pivot = earliest
//! triangle. This yields the same persistence pairs as reducing the boundary
//! matrix, but most columns are settled by their very first pivot. Columns
//! that collide are kept as a heap of cofacets plus the chain of edges added
//! so far; only chains are stored, never reduced coboundaries, so long-lived
//! cocycles do not blow up memory. Minimum-spanning-tree edges kill H0
//! classes and are skipped (clearing).

use std::cmp::Reverse;
use std::collections::hash_map::Entry;
use std::collections::{BinaryHeap, HashMap};

use serde::{Deserialize, Serialize};

use super::{sorted_edges, DistanceMatrix, Edge, PersistenceError, PointCloud, UnionFind};
use crate::diagrams::{DiagramPoint, PersistenceDiagram};
use crate::exec::ExecMode;

pub const DEFAULT_SIMPLEX_BUDGET: usize = 5_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RipsOptions {
    /// Filtration cutoff; `None` uses the enclosing radius.
    pub max_scale: Option<f64>,
    pub simplex_budget: usize,
    pub mode: ExecMode,
}

impl Default for RipsOptions {
    fn default() -> Self {
        RipsOptions { max_scale: None, simplex_budget: DEFAULT_SIMPLEX_BUDGET, mode: ExecMode::Sequential }
    }
}

pub fn rips_h1(cloud: &PointCloud, opts: &RipsOptions) -> Result<PersistenceDiagram, PersistenceError> {
    if cloud.len() < 3 {
        return Err(PersistenceError::TooFewPoints(cloud.len()));
    }
    rips_h1_from_distances(&DistanceMatrix::from_cloud(cloud, opts.mode), opts)
}

/// Triangle in filtration order: diameter, then lexicographic vertex order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
struct Tri {
    // Diameters are nonnegative, so the IEEE bit pattern orders like the value.
    diam_bits: u64,
    id: u64,
}

impl Tri {
    fn diam(self) -> f64 {
        f64::from_bits(self.diam_bits)
    }
}

struct Complex<'a> {
    dist: &'a DistanceMatrix,
    edges: Vec<Edge>,
    threshold: f64,
    n: u64,
}

impl Complex<'_> {
    #[inline]
    fn tri(&self, e: &Edge, k: usize) -> Option<Tri> {
        let (i, j) = (e.i as usize, e.j as usize);
        let (dik, djk) = (self.dist.get(i, k), self.dist.get(j, k));
        if dik > self.threshold || djk > self.threshold {
            return None;
        }
        let diam = e.len.max(dik).max(djk);
        let mut v = [i as u64, j as u64, k as u64];
        v.sort_unstable();
        Some(Tri { diam_bits: diam.to_bits(), id: (v[0] * self.n + v[1]) * self.n + v[2] })
    }

    fn cofacets(&self, e: &Edge) -> impl Iterator<Item = Tri> + '_ {
        let e = *e;
        (0..self.n as usize)
            .filter(move |&k| k != e.i as usize && k != e.j as usize)
            .filter_map(move |k| self.tri(&e, k))
    }

    fn min_cofacet(&self, e: &Edge) -> Option<Tri> {
        self.cofacets(e).min()
    }

    fn triangle_count(&self) -> usize {
        let n = self.n as usize;
        let t = self.threshold;
        let mut count = 0;
        for i in 0..n {
            for j in i + 1..n {
                if self.dist.get(i, j) > t {
                    continue;
                }
                count += (j + 1..n)
                    .filter(|&k| self.dist.get(i, k) <= t && self.dist.get(j, k) <= t)
                    .count();
            }
        }
        count
    }
}

pub fn rips_h1_from_distances(
    dist: &DistanceMatrix,
    opts: &RipsOptions,
) -> Result<PersistenceDiagram, PersistenceError> {
    let n = dist.len();
    if n < 3 {
        return Err(PersistenceError::TooFewPoints(n));
    }
    let threshold = match opts.max_scale {
        Some(s) if !(s.is_finite() && s > 0.0) => return Err(PersistenceError::InvalidScale(s)),
        Some(s) => s,
        None => dist.enclosing_radius(),
    };

    let cx = Complex { dist, edges: sorted_edges(dist, threshold), threshold, n: n as u64 };
    let count = n + cx.edges.len() + cx.triangle_count();
    if count > opts.simplex_budget {
        return Err(PersistenceError::SimplexBudgetExceeded { count, budget: opts.simplex_budget });
    }

    let mut uf = UnionFind::new(n);
    let negative: Vec<bool> = cx.edges.iter().map(|e| uf.union(e.i, e.j)).collect();

    // pivot triangle -> edge whose reduced column owns it
    let mut pivots: HashMap<Tri, usize> = HashMap::new();
    // reduction chains of columns that needed more than their own coboundary
    let mut chains: HashMap<usize, Vec<usize>> = HashMap::new();
    let mut points = Vec::new();
    let mut unresolved = 0;

    for idx in (0..cx.edges.len()).rev() {
        if negative[idx] {
            continue;
        }
        let edge = &cx.edges[idx];
        let Some(first) = cx.min_cofacet(edge) else {
            unresolved += 1;
            continue;
        };
        let pivot = if let Entry::Vacant(slot) = pivots.entry(first) {
            slot.insert(idx);
            Some(first)
        } else {
            let mut chain = vec![idx];
            let mut column: BinaryHeap<Reverse<Tri>> = cx.cofacets(edge).map(Reverse).collect();
            loop {
                let Some(low) = pop_pivot(&mut column) else { break None };
                match pivots.get(&low) {
                    None => {
                        pivots.insert(low, idx);
                        chains.insert(idx, reduce_mod2(chain));
                        break Some(low);
                    }
                    Some(&owner) => {
                        let owner_chain = chains.get(&owner).map_or(std::slice::from_ref(&owner), Vec::as_slice);
                        for &e in owner_chain {
                            chain.push(e);
                            column.extend(cx.cofacets(&cx.edges[e]).map(Reverse));
                        }
                    }
                }
            }
        };
        match pivot {
            Some(t) if t.diam() > edge.len => {
                points.push(DiagramPoint::new(edge.len, t.diam(), 1).expect("death exceeds birth"));
            }
            Some(_) => {}
            None => unresolved += 1,
        }
    }

    if unresolved > 0 {
        return Err(PersistenceError::UnresolvedClasses(unresolved));
    }
    Ok(PersistenceDiagram::new(points, 1))
}

/// Smallest triangle with odd multiplicity in the heap, left on top.
fn pop_pivot(column: &mut BinaryHeap<Reverse<Tri>>) -> Option<Tri> {
    while let Some(Reverse(t)) = column.pop() {
        if column.peek() == Some(&Reverse(t)) {
            column.pop();
        } else {
            column.push(Reverse(t));
            return Some(t);
        }
    }
    None
}

/// Drops edges that occur an even number of times.
fn reduce_mod2(mut chain: Vec<usize>) -> Vec<usize> {
    chain.sort_unstable();
    let mut out = Vec::with_capacity(chain.len());
    for e in chain {
        if out.last() == Some(&e) {
            out.pop();
        } else {
            out.push(e);
        }
    }
    out
}

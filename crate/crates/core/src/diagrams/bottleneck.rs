use std::collections::VecDeque;

use super::PersistenceDiagram;

/// Exact bottleneck distance between two finite diagrams.
///
/// Points of multiplicity `m` are expanded into `m` copies. The answer is the
/// smallest value in the finite candidate set (pairwise L-infinity distances
/// and half-persistences) for which a perfect matching exists in the threshold
/// graph where every point may also be sent to the diagonal.
pub fn bottleneck_distance(a: &PersistenceDiagram, b: &PersistenceDiagram) -> f64 {
    let xs = expand(a);
    let ys = expand(b);
    if xs.is_empty() && ys.is_empty() {
        return 0.0;
    }

    let mut candidates: Vec<f64> = Vec::with_capacity(xs.len() * ys.len() + xs.len() + ys.len());
    for x in &xs {
        for y in &ys {
            candidates.push(linf(*x, *y));
        }
    }
    candidates.extend(xs.iter().chain(&ys).map(|p| half_pers(*p)));
    candidates.sort_by(f64::total_cmp);
    candidates.dedup();

    // The largest half-persistence is always feasible, so the search is
    // bounded by it.
    let (mut lo, mut hi) = (0usize, candidates.len() - 1);
    while lo < hi {
        let mid = lo + (hi - lo) / 2;
        if perfect_matching_exists(&xs, &ys, candidates[mid]) {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    candidates[lo]
}

fn expand(d: &PersistenceDiagram) -> Vec<(f64, f64)> {
    d.points()
        .iter()
        .flat_map(|p| std::iter::repeat_n((p.birth(), p.death()), p.multiplicity() as usize))
        .collect()
}

fn linf(x: (f64, f64), y: (f64, f64)) -> f64 {
    (x.0 - y.0).abs().max((x.1 - y.1).abs())
}

fn half_pers(x: (f64, f64)) -> f64 {
    (x.1 - x.0) / 2.0
}

/// Left vertices: `xs` then one diagonal slot per `ys` point.
/// Right vertices: `ys` then one diagonal slot per `xs` point.
fn perfect_matching_exists(xs: &[(f64, f64)], ys: &[(f64, f64)], delta: f64) -> bool {
    let (na, nb) = (xs.len(), ys.len());
    let n = na + nb;
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (i, x) in xs.iter().enumerate() {
        for (j, y) in ys.iter().enumerate() {
            if linf(*x, *y) <= delta {
                adj[i].push(j);
            }
        }
        if half_pers(*x) <= delta {
            adj[i].push(nb + i);
        }
    }
    for (j, y) in ys.iter().enumerate() {
        let row = &mut adj[na + j];
        if half_pers(*y) <= delta {
            row.push(j);
        }
        row.extend(nb..nb + na);
    }
    hopcroft_karp(&adj, n) == n
}

/// Maximum bipartite matching size; `adj[u]` lists right neighbours of left
/// vertex `u`, right vertices are `0..n_right`.
fn hopcroft_karp(adj: &[Vec<usize>], n_right: usize) -> usize {
    const FREE: usize = usize::MAX;
    let n_left = adj.len();
    let mut match_l = vec![FREE; n_left];
    let mut match_r = vec![FREE; n_right];
    let mut dist = vec![0u32; n_left];
    let mut matched = 0;

    loop {
        // BFS layering from free left vertices.
        let mut queue = VecDeque::new();
        for u in 0..n_left {
            if match_l[u] == FREE {
                dist[u] = 0;
                queue.push_back(u);
            } else {
                dist[u] = u32::MAX;
            }
        }
        let mut found = false;
        while let Some(u) = queue.pop_front() {
            for &v in &adj[u] {
                let w = match_r[v];
                if w == FREE {
                    found = true;
                } else if dist[w] == u32::MAX {
                    dist[w] = dist[u] + 1;
                    queue.push_back(w);
                }
            }
        }
        if !found {
            return matched;
        }

        let mut it = vec![0usize; n_left];
        for u in 0..n_left {
            if match_l[u] == FREE && augment(u, adj, &mut match_l, &mut match_r, &mut dist, &mut it) {
                matched += 1;
            }
        }
    }
}

fn augment(
    root: usize,
    adj: &[Vec<usize>],
    match_l: &mut [usize],
    match_r: &mut [usize],
    dist: &mut [u32],
    it: &mut [usize],
) -> bool {
    const FREE: usize = usize::MAX;
    // Iterative DFS along the BFS layers.
    let mut stack = vec![root];
    while let Some(&u) = stack.last() {
        if it[u] == adj[u].len() {
            dist[u] = u32::MAX;
            stack.pop();
            continue;
        }
        let v = adj[u][it[u]];
        it[u] += 1;
        let w = match_r[v];
        if w == FREE {
            // Flip the path recorded on the stack.
            let mut v = v;
            while let Some(u) = stack.pop() {
                let prev = match_l[u];
                match_l[u] = v;
                match_r[v] = u;
                v = prev;
            }
            return true;
        }
        if dist[w] == dist[u] + 1 {
            stack.push(w);
        }
    }
    false
}

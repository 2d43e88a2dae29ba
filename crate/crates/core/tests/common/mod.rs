//! Independent reference implementations and shared check routines.
//!
//! The oracles here deliberately avoid the library's algorithms: matchings
//! are enumerated, boundary matrices are reduced column by column, Lagrange
//! bases are evaluated from their product formula and ridge systems are
//! assembled entrywise and solved by elimination.

#![allow(dead_code)]

use pdtemplates::datagen::{rng, Rng};
use pdtemplates::diagrams::bottleneck_distance;
use pdtemplates::featurize::{interp_matrix, poly_features, tent_features, ChebMesh, TentGrid};
use pdtemplates::learn::ridge_fit;
use pdtemplates::persistence::{rips_h0, rips_h1, DistanceMatrix, RipsOptions};
use pdtemplates::{ExecMode, FeatureMatrix, PersistenceDiagram, PointCloud};
use rand::Rng as _;

pub type Check = Result<String, String>;

// ---------------------------------------------------------------- generators

pub fn random_diagram(r: &mut Rng, max_points: usize, max_mult: u32) -> PersistenceDiagram {
    let n = r.random_range(0..=max_points);
    let triples: Vec<(f64, f64, u32)> = (0..n)
        .map(|_| {
            let b = r.random_range(0.0..5.0);
            let l = r.random_range(0.05..5.0);
            (b, b + l, r.random_range(1..=max_mult))
        })
        .collect();
    PersistenceDiagram::from_triples(&triples, 0).unwrap()
}

pub fn random_cloud(r: &mut Rng, n: usize, dim: usize) -> PointCloud {
    PointCloud::new((0..n).map(|_| (0..dim).map(|_| r.random_range(-1.0..1.0)).collect()).collect()).unwrap()
}

fn expand(d: &PersistenceDiagram) -> Vec<(f64, f64)> {
    d.points()
        .iter()
        .flat_map(|p| std::iter::repeat_n((p.birth(), p.death()), p.multiplicity() as usize))
        .collect()
}

// ------------------------------------------------------------------ oracles

/// Bottleneck distance by enumerating every bijection between `a + diag(b)`
/// and `b + diag(a)`.
pub fn bottleneck_brute(a: &PersistenceDiagram, b: &PersistenceDiagram) -> f64 {
    let (xs, ys) = (expand(a), expand(b));
    let (na, nb) = (xs.len(), ys.len());
    let n = na + nb;
    let cost = |i: usize, j: usize| -> f64 {
        match (i < na, j < nb) {
            (true, true) => (xs[i].0 - ys[j].0).abs().max((xs[i].1 - ys[j].1).abs()),
            (true, false) => (xs[i].1 - xs[i].0) / 2.0,
            (false, true) => (ys[j].1 - ys[j].0) / 2.0,
            (false, false) => 0.0,
        }
    };
    let mut perm: Vec<usize> = (0..n).collect();
    let mut best = f64::INFINITY;
    permute(&mut perm, 0, &mut |p| {
        let worst = p.iter().enumerate().map(|(i, &j)| cost(i, j)).fold(0.0, f64::max);
        best = best.min(worst);
    });
    if n == 0 {
        0.0
    } else {
        best
    }
}

fn permute(p: &mut Vec<usize>, k: usize, visit: &mut impl FnMut(&[usize])) {
    if k == p.len() {
        visit(p);
        return;
    }
    for i in k..p.len() {
        p.swap(k, i);
        permute(p, k + 1, visit);
        p.swap(k, i);
    }
}

/// H0 and H1 diagrams from the full Rips boundary matrix (every vertex, edge
/// and triangle) reduced by the textbook left-to-right column algorithm.
pub fn rips_brute(cloud: &PointCloud) -> (PersistenceDiagram, PersistenceDiagram) {
    let dist = DistanceMatrix::from_cloud(cloud, ExecMode::Sequential);
    let n = cloud.len();
    let mut simplices: Vec<(f64, Vec<usize>)> = (0..n).map(|i| (0.0, vec![i])).collect();
    for i in 0..n {
        for j in i + 1..n {
            simplices.push((dist.get(i, j), vec![i, j]));
            for k in j + 1..n {
                let d = dist.get(i, j).max(dist.get(i, k)).max(dist.get(j, k));
                simplices.push((d, vec![i, j, k]));
            }
        }
    }
    simplices.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.len().cmp(&b.1.len())).then(a.1.cmp(&b.1)));
    let position = |s: &[usize]| simplices.iter().position(|t| t.1 == s).unwrap();
    let mut columns: Vec<Vec<usize>> = simplices
        .iter()
        .map(|(_, s)| {
            let mut faces: Vec<usize> = if s.len() == 1 {
                Vec::new()
            } else {
                (0..s.len())
                    .map(|skip| {
                        let face: Vec<usize> = s.iter().enumerate().filter(|&(k, _)| k != skip).map(|(_, &v)| v).collect();
                        position(&face)
                    })
                    .collect()
            };
            faces.sort_unstable();
            faces
        })
        .collect();

    let mut low_owner: Vec<Option<usize>> = vec![None; simplices.len()];
    let mut pairs = (Vec::new(), Vec::new());
    for j in 0..columns.len() {
        while let Some(&low) = columns[j].last() {
            match low_owner[low] {
                Some(k) => {
                    let other = columns[k].clone();
                    columns[j] = sym_diff(&columns[j], &other);
                }
                None => {
                    low_owner[low] = Some(j);
                    let (birth, death) = (simplices[low].0, simplices[j].0);
                    if death > birth {
                        match simplices[low].1.len() {
                            1 => pairs.0.push((birth, death)),
                            _ => pairs.1.push((birth, death)),
                        }
                    }
                    break;
                }
            }
        }
    }
    (
        PersistenceDiagram::from_pairs(&pairs.0, 0).unwrap(),
        PersistenceDiagram::from_pairs(&pairs.1, 1).unwrap(),
    )
}

fn sym_diff(a: &[usize], b: &[usize]) -> Vec<usize> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() || j < b.len() {
        if j == b.len() || (i < a.len() && a[i] < b[j]) {
            out.push(a[i]);
            i += 1;
        } else if i == a.len() || b[j] < a[i] {
            out.push(b[j]);
            j += 1;
        } else {
            i += 1;
            j += 1;
        }
    }
    out
}

fn lagrange(nodes: &[f64], i: usize, x: f64) -> f64 {
    nodes.iter().enumerate().filter(|&(k, _)| k != i).map(|(_, &xk)| (x - xk) / (nodes[i] - xk)).product()
}

/// Polynomial features by a double loop over mesh positions and points.
pub fn poly_naive(d: &PersistenceDiagram, mesh: &ChebMesh) -> Vec<f64> {
    let (bn, ln) = (mesh.birth_nodes(), mesh.lifetime_nodes());
    let (bi, li) = (mesh.birth_interval(), mesh.lifetime_interval());
    let mut out = Vec::new();
    for i in 0..bn.len() {
        for j in 0..ln.len() {
            let mut sum = 0.0;
            for p in d.points() {
                let (x, y) = (p.birth(), p.death() - p.birth());
                let gap = (bi.0 - x).max(x - bi.1).max(0.0).max((li.0 - y).max(y - li.1).max(0.0));
                let h = if mesh.support_pad() <= f64::EPSILON {
                    f64::from(u8::from(gap == 0.0))
                } else {
                    (1.0 - gap / mesh.support_pad()).max(0.0)
                };
                if h == 0.0 {
                    continue;
                }
                let v = lagrange(bn, i, x) * lagrange(ln, j, y);
                sum += f64::from(p.multiplicity()) * h * if mesh.abs_mode() { v.abs() } else { v };
            }
            out.push(sum);
        }
    }
    out
}

/// Tent features by evaluating every tent at every point.
pub fn tent_naive(d: &PersistenceDiagram, grid: &TentGrid) -> Vec<f64> {
    grid.positions()
        .into_iter()
        .map(|(i, j)| {
            let (a, b) = (i as f64 * grid.delta(), j as f64 * grid.delta() + grid.epsilon());
            d.points()
                .iter()
                .map(|p| {
                    let r = (p.birth() - a).abs().max((p.death() - p.birth() - b).abs());
                    f64::from(p.multiplicity()) * (1.0 - r / grid.delta()).max(0.0)
                })
                .sum()
        })
        .collect()
}

/// Ridge weights (standardized units) and intercept from the normal
/// equations `(X'X + n lambda I) w = X'y` assembled entrywise on the centred
/// (and optionally scaled) design, solved by Gaussian elimination.
pub fn ridge_normal_equations(x: &[Vec<f64>], y: &[f64], lambda: f64, standardize: bool) -> (Vec<f64>, f64) {
    let (n, p) = (x.len(), x[0].len());
    let mut xs = x.to_vec();
    for c in 0..p {
        let mean = x.iter().map(|r| r[c]).sum::<f64>() / n as f64;
        let var = x.iter().map(|r| (r[c] - mean).powi(2)).sum::<f64>() / n as f64;
        let scale = if standardize && var > 0.0 { var.sqrt() } else { 1.0 };
        for r in 0..n {
            xs[r][c] = (x[r][c] - mean) / scale;
        }
    }
    let y_mean = y.iter().sum::<f64>() / n as f64;
    let mut a = vec![vec![0.0; p + 1]; p];
    for i in 0..p {
        for j in 0..p {
            a[i][j] = (0..n).map(|r| xs[r][i] * xs[r][j]).sum::<f64>();
        }
        a[i][i] += n as f64 * lambda;
        a[i][p] = (0..n).map(|r| xs[r][i] * (y[r] - y_mean)).sum::<f64>();
    }
    (gauss_solve(a), y_mean)
}

fn gauss_solve(mut a: Vec<Vec<f64>>) -> Vec<f64> {
    let p = a.len();
    for col in 0..p {
        let pivot = (col..p).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs())).unwrap();
        a.swap(col, pivot);
        let pivot_row = a[col].clone();
        for row in a.iter_mut().take(p).skip(col + 1) {
            let f = row[col] / pivot_row[col];
            for (x, y) in row[col..=p].iter_mut().zip(&pivot_row[col..=p]) {
                *x -= f * y;
            }
        }
    }
    let mut w = vec![0.0; p];
    for row in (0..p).rev() {
        let s: f64 = (row + 1..p).map(|k| a[row][k] * w[k]).sum();
        w[row] = (a[row][p] - s) / a[row][row];
    }
    w
}

pub fn feature_matrix(rows: &[Vec<f64>]) -> FeatureMatrix {
    use pdtemplates::featurize::ColumnKey;
    let p = rows[0].len();
    let values = nalgebra::DMatrix::from_fn(rows.len(), p, |r, c| rows[r][c]);
    let columns = (0..p).map(|c| ColumnKey { dim: 0, i: c, j: 0 }).collect();
    FeatureMatrix::new(values, columns).unwrap()
}

pub fn rel_close(a: &[f64], b: &[f64], tol: f64) -> bool {
    let scale = b.iter().fold(1.0f64, |m, v| m.max(v.abs()));
    a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).abs() <= tol * scale)
}

// ------------------------------------------------------------ shared checks

pub fn check_bottleneck_oracle(cases: usize, seed: u64) -> Check {
    let mut r = rng(seed);
    for case in 0..cases {
        let a = random_diagram(&mut r, 2, 2);
        let b = random_diagram(&mut r, 2, 2);
        if a.total_multiplicity() > 4 || b.total_multiplicity() > 4 {
            continue;
        }
        let (fast, slow) = (bottleneck_distance(&a, &b), bottleneck_brute(&a, &b));
        if fast != slow {
            return Err(format!("case {case}: Hopcroft-Karp {fast} vs enumeration {slow}"));
        }
    }
    Ok(format!("{cases} diagram pairs, exact"))
}

pub fn check_rips_oracle(cases: usize, seed: u64) -> Check {
    let mut r = rng(seed);
    for case in 0..cases {
        let n = r.random_range(3..=8);
        let dim = r.random_range(1..=3);
        let cloud = random_cloud(&mut r, n, dim);
        let (h0, h1) = rips_brute(&cloud);
        let fast_h1 = rips_h1(&cloud, &RipsOptions::default()).map_err(|e| e.to_string())?;
        if rips_h0(&cloud) != h0 || fast_h1 != h1 {
            return Err(format!("case {case} ({n} points in R^{dim}) differs from the full reduction"));
        }
    }
    Ok(format!("{cases} clouds of 3..8 points, exact"))
}

pub fn check_poly_oracle(diagrams: usize, seed: u64) -> Check {
    let mut r = rng(seed);
    let mesh = ChebMesh::new(6, 5, (0.0, 5.0), (0.5, 5.0), true, 0.2).unwrap();
    let mut worst = 0.0f64;
    for case in 0..diagrams {
        let d = random_diagram(&mut r, 12, 3);
        let (fast, slow) = (poly_features(&d, &mesh), poly_naive(&d, &mesh));
        let scale = slow.iter().fold(1.0f64, |m, v| m.max(v.abs()));
        let err = fast.iter().zip(&slow).map(|(a, b)| (a - b).abs() / scale).fold(0.0, f64::max);
        worst = worst.max(err);
        if err > 1e-9 {
            return Err(format!("diagram {case}: relative error {err:e}"));
        }
    }
    Ok(format!("{diagrams} diagrams, worst relative error {worst:.1e}"))
}

pub fn check_ridge_oracle(cases: usize, seed: u64) -> Check {
    let mut r = rng(seed);
    let mut worst = 0.0f64;
    for case in 0..cases {
        let x: Vec<Vec<f64>> = (0..20).map(|_| (0..15).map(|_| r.random_range(-2.0..2.0)).collect()).collect();
        let y: Vec<f64> = (0..20).map(|_| r.random_range(-3.0..3.0)).collect();
        let lambda = 10f64.powf(r.random_range(-3.0..1.0));
        let standardize = case % 2 == 0;
        let model = ridge_fit(&feature_matrix(&x), &y, lambda, standardize).map_err(|e| e.to_string())?;
        let (w, b) = ridge_normal_equations(&x, &y, lambda, standardize);
        let scale = w.iter().fold(1e-300f64, |m, v| m.max(v.abs()));
        let err = model.weights[0].iter().zip(&w).map(|(a, b)| (a - b).abs() / scale).fold(0.0, f64::max);
        let err = err.max((model.intercepts[0] - b).abs() / b.abs().max(1.0));
        worst = worst.max(err);
        if err > 1e-9 {
            return Err(format!("case {case}: relative error {err:e}"));
        }
    }
    Ok(format!("{cases} random 20x15 problems, worst relative error {worst:.1e}"))
}

pub fn check_additivity(cases: usize, seed: u64) -> Check {
    let mut r = rng(seed);
    let grid = TentGrid::new(8, 0.6, 0.05).unwrap();
    let mesh = ChebMesh::new(5, 5, (0.0, 5.0), (0.5, 5.0), true, 0.2).unwrap();
    for case in 0..cases {
        let (a, b) = (random_diagram(&mut r, 8, 3), random_diagram(&mut r, 8, 3));
        let u = a.union(&b);
        let add = |f: &dyn Fn(&PersistenceDiagram) -> Vec<f64>| -> Vec<f64> {
            f(&a).iter().zip(f(&b)).map(|(x, y)| x + y).collect()
        };
        if !rel_close(&tent_features(&u, &grid), &add(&|d| tent_features(d, &grid)), 1e-12) {
            return Err(format!("case {case}: tent features are not additive"));
        }
        if !rel_close(&poly_features(&u, &mesh), &add(&|d| poly_features(d, &mesh)), 1e-12) {
            return Err(format!("case {case}: polynomial features are not additive"));
        }
        let p = random_diagram(&mut r, 1, 1);
        let Some(pt) = p.points().first() else { continue };
        let m = r.random_range(2..=9u32);
        let heavy = PersistenceDiagram::from_triples(&[(pt.birth(), pt.death(), m)], 0).unwrap();
        let scaled = |f: Vec<f64>| f.into_iter().map(|v| v * f64::from(m)).collect::<Vec<_>>();
        if !rel_close(&tent_features(&heavy, &grid), &scaled(tent_features(&p, &grid)), 1e-12)
            || !rel_close(&poly_features(&heavy, &mesh), &scaled(poly_features(&p, &mesh)), 1e-12)
        {
            return Err(format!("case {case}: multiplicity {m} is not linear"));
        }
    }
    Ok(format!("{cases} diagram pairs"))
}

pub fn check_partition_and_nodes(max_m: usize, seed: u64) -> Check {
    let mut r = rng(seed);
    let (mut pu, mut ne) = (0.0f64, 0.0f64);
    for m in 1..=max_m {
        let nodes = pdtemplates::featurize::cheb_nodes(m, -1.5, 2.5).map_err(|e| e.to_string())?;
        let queries: Vec<f64> = (0..50).map(|_| r.random_range(-1.5..2.5)).collect();
        let rows = interp_matrix(&nodes, &queries).map_err(|e| e.to_string())?;
        for row in rows.row_iter() {
            pu = pu.max((row.sum() - 1.0).abs());
        }
        let at_nodes = interp_matrix(&nodes, &nodes).map_err(|e| e.to_string())?;
        let data: Vec<f64> = (0..=m).map(|_| r.random_range(-10.0..10.0)).collect();
        for (k, row) in at_nodes.row_iter().enumerate() {
            let value: f64 = row.iter().zip(&data).map(|(l, c)| l * c).sum();
            ne = ne.max((value - data[k]).abs());
        }
    }
    if pu > 1e-10 {
        return Err(format!("row sums deviate by {pu:e}"));
    }
    if ne > 1e-12 {
        return Err(format!("node interpolation deviates by {ne:e}"));
    }
    Ok(format!("m = 1..{max_m}: row sums within {pu:.1e}, nodes within {ne:.1e}"))
}

/// Perturbed diagram: every point moves by at most `eta` in birth and death,
/// and a few short-lived points may appear.
pub fn perturb(d: &PersistenceDiagram, eta: f64, r: &mut Rng) -> PersistenceDiagram {
    let mut triples: Vec<(f64, f64, u32)> = Vec::new();
    for p in d.points() {
        for _ in 0..p.multiplicity() {
            let b = (p.birth() + r.random_range(-eta..=eta)).max(0.0);
            let death = (p.death() + r.random_range(-eta..=eta)).max(b + 1e-3);
            triples.push((b, death, 1));
        }
    }
    for _ in 0..r.random_range(0..3) {
        let b = r.random_range(0.0..5.0);
        triples.push((b, b + r.random_range(1e-3..2.0 * eta.max(2e-3)), 1));
    }
    PersistenceDiagram::from_triples(&triples, 0).unwrap()
}

/// Tent stability on sampled pairs: for every tent, `|G(D) - G(D')|` is at
/// most `beta * L * d_B(D, D')` where `beta` counts the points of both
/// diagrams in the tent's support and `L = 2 / delta` is the tent's Lipschitz
/// constant for the L-infinity metric on (birth, death).
pub fn check_tent_stability(pairs: usize, seed: u64) -> Check {
    let mut r = rng(seed);
    let grid = TentGrid::new(10, 0.5, 0.05).unwrap();
    let mut tightest = 0.0f64;
    for case in 0..pairs {
        let a = random_diagram(&mut r, 10, 2);
        let b = if case % 2 == 0 { perturb(&a, r.random_range(0.01..0.3), &mut r) } else { random_diagram(&mut r, 10, 2) };
        let db = bottleneck_distance(&a, &b);
        let (fa, fb) = (tent_features(&a, &grid), tent_features(&b, &grid));
        for (k, (i, j)) in grid.positions().into_iter().enumerate() {
            let c = (i as f64 * grid.delta(), j as f64 * grid.delta() + grid.epsilon());
            let inside = |d: &PersistenceDiagram| -> u64 {
                d.points()
                    .iter()
                    .filter(|p| (p.birth() - c.0).abs().max((p.death() - p.birth() - c.1).abs()) <= grid.delta())
                    .map(|p| u64::from(p.multiplicity()))
                    .sum()
            };
            let beta = (inside(&a) + inside(&b)) as f64;
            let bound = beta * (2.0 / grid.delta()) * db;
            let diff = (fa[k] - fb[k]).abs();
            if diff > bound + 1e-12 {
                return Err(format!("pair {case}, tent ({i}, {j}): |dG| = {diff} > {bound}"));
            }
            if bound > 0.0 {
                tightest = tightest.max(diff / bound);
            }
        }
    }
    Ok(format!("{pairs} pairs, largest |dG| / bound = {tightest:.3}"))
}

/// `|| (2/M) X'(Xw + b - y) + 2 lambda w ||_inf` in standardized units.
pub fn ridge_gradient(x: &[Vec<f64>], y: &[f64], lambda: f64, standardize: bool) -> f64 {
    let model = ridge_fit(&feature_matrix(x), y, lambda, standardize).unwrap();
    let fm = feature_matrix(x);
    let xs = model.standardization.apply(fm.values());
    let w = &model.weights[0];
    let m = x.len() as f64;
    let resid: Vec<f64> = (0..x.len())
        .map(|r| (0..w.len()).map(|c| xs[(r, c)] * w[c]).sum::<f64>() + model.intercepts[0] - y[r])
        .collect();
    (0..w.len())
        .map(|c| (2.0 / m * (0..x.len()).map(|r| xs[(r, c)] * resid[r]).sum::<f64>() + 2.0 * lambda * w[c]).abs())
        .fold(0.0, f64::max)
}

pub fn check_ridge_gradient(cases: usize, seed: u64) -> Check {
    let mut r = rng(seed);
    let mut worst = 0.0f64;
    for _ in 0..cases {
        let (rows, cols) = (r.random_range(5..40), r.random_range(1..20));
        let x: Vec<Vec<f64>> = (0..rows).map(|_| (0..cols).map(|_| r.random_range(-3.0..3.0)).collect()).collect();
        let y: Vec<f64> = (0..rows).map(|_| r.random_range(-5.0..5.0)).collect();
        let lambda = 10f64.powf(r.random_range(-3.0..3.0));
        worst = worst.max(ridge_gradient(&x, &y, lambda, r.random_bool(0.5)));
    }
    if worst < 1e-8 {
        Ok(format!("{cases} problems, largest gradient {worst:.1e}"))
    } else {
        Err(format!("gradient {worst:e} exceeds 1e-8"))
    }
}

/// Log-log slope of the RK4 global error on `x'' = -x` integrated to `t = 10`
/// over `dt` in {0.2, 0.1, 0.05}.
pub fn rk4_order_slope() -> f64 {
    let f = |y: &[f64; 2]| [y[1], -y[0]];
    let errors: Vec<(f64, f64)> = [0.2, 0.1, 0.05]
        .iter()
        .map(|&dt| {
            let steps = (10.0 / dt) as usize;
            let mut y = [1.0, 0.0];
            for _ in 0..steps {
                y = pdtemplates::datagen::rk4_step(f, &y, dt);
            }
            let t = steps as f64 * dt;
            let err = (y[0] - t.cos()).abs().max((y[1] + t.sin()).abs());
            (dt.ln(), err.ln())
        })
        .collect();
    let n = errors.len() as f64;
    let mx = errors.iter().map(|e| e.0).sum::<f64>() / n;
    let my = errors.iter().map(|e| e.1).sum::<f64>() / n;
    let sxy: f64 = errors.iter().map(|e| (e.0 - mx) * (e.1 - my)).sum();
    let sxx: f64 = errors.iter().map(|e| (e.0 - mx).powi(2)).sum();
    sxy / sxx
}

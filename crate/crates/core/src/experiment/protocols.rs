//! Dataset generators for each experiment. Every item draws from its own
//! derived seed, so results do not depend on evaluation order.

use serde::{Deserialize, Serialize};

use super::config::ProtocolParams;
use crate::datagen::{
    delay_embed, derive_seed, extrema, gen_manifold, gen_normal_diagram, rng, rossler_simulate, standard_normal_pair,
    uniform, ManifoldKind, RosslerLabel,
};
use crate::error::{Error, Result};
use crate::exec::{self, ExecMode};
use crate::featurize::DiagramSet;
use crate::persistence::{rips_h0_from_distances, rips_h1_from_distances, DistanceMatrix, PointCloud, RipsOptions};

pub(crate) const MU_A: (f64, f64) = (1.0, 3.0);
const MU_B_END: (f64, f64) = (2.0, 5.0);
const LINE_FAR_END: (f64, f64) = (6.0, 8.0);

/// Value of the sweep parameter `t` at step `k` of `steps`.
pub fn sweep_t(k: usize, steps: usize) -> f64 {
    if steps <= 1 {
        1.0
    } else {
        k as f64 / (steps - 1) as f64
    }
}

/// Mean of class B at sweep position `t`: `(1 - t) mu_A + t (2, 5)`.
pub fn sweep_mu_b(t: f64) -> (f64, f64) {
    (MU_A.0 + t * (MU_B_END.0 - MU_A.0), MU_A.1 + t * (MU_B_END.1 - MU_A.1))
}

/// `diagrams` per class: class 0 centred at `(1, 3)`, class 1 at `mu_b`.
pub fn normal_classify_dataset(
    mu_b: (f64, f64),
    p: &ProtocolParams,
    seed: u64,
    mode: ExecMode,
) -> (Vec<DiagramSet>, Vec<usize>) {
    let n = p.diagrams;
    let samples = exec::map_range(mode, 2 * n, |i| {
        let mu = if i < n { MU_A } else { mu_b };
        let d = gen_normal_diagram(mu, p.sigma, p.points_per_diagram, &mut rng(derive_seed(seed, i as u64)));
        DiagramSet::h0_only(d)
    });
    let labels = (0..2 * n).map(|i| usize::from(i >= n)).collect();
    (samples, labels)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MeanLaw {
    /// `mu = t (1, 3) + (1 - t) (6, 8)` with `t ~ U[0, 1]`.
    Line,
    /// `mu ~ N((1, 3), I)`.
    Ball,
}

/// Diagrams whose generating mean is random; the target is the distance
/// from that mean to `(1, 3)`.
pub fn normal_regress_dataset(law: MeanLaw, p: &ProtocolParams, seed: u64, mode: ExecMode) -> (Vec<DiagramSet>, Vec<f64>) {
    let items = exec::map_range(mode, p.diagrams, |i| {
        let mut r = rng(derive_seed(seed, i as u64));
        let mu = match law {
            MeanLaw::Line => {
                let t = uniform(&mut r, 0.0, 1.0);
                (t * MU_A.0 + (1.0 - t) * LINE_FAR_END.0, t * MU_A.1 + (1.0 - t) * LINE_FAR_END.1)
            }
            MeanLaw::Ball => {
                let (zx, zy) = standard_normal_pair(&mut r);
                (MU_A.0 + zx, MU_A.1 + zy)
            }
        };
        let target = (mu.0 - MU_A.0).hypot(mu.1 - MU_A.1);
        (DiagramSet::h0_only(gen_normal_diagram(mu, p.sigma, p.points_per_diagram, &mut r)), target)
    });
    items.into_iter().unzip()
}

/// H0 and (when requested) H1 Rips diagrams of a point cloud.
pub fn cloud_diagrams(cloud: &PointCloud, with_h1: bool, opts: &RipsOptions) -> Result<DiagramSet> {
    let dist = DistanceMatrix::from_cloud(cloud, opts.mode);
    let h0 = rips_h0_from_distances(&dist);
    let h1 = if with_h1 { Some(rips_h1_from_distances(&dist, opts)?) } else { None };
    Ok(DiagramSet { h0, h1 })
}

/// `diagrams_per_class` clouds of every manifold class, class-major.
pub fn manifold_dataset(
    p: &ProtocolParams,
    with_h1: bool,
    seed: u64,
    mode: ExecMode,
) -> Result<(Vec<DiagramSet>, Vec<usize>)> {
    let per = p.diagrams_per_class;
    let total = per * ManifoldKind::ALL.len();
    let samples = exec::map_range(mode, total, |i| -> Result<DiagramSet> {
        let kind = ManifoldKind::ALL[i / per];
        let cloud = gen_manifold(kind, p.points_per_cloud, &mut rng(derive_seed(seed, i as u64)))?;
        cloud_diagrams(&cloud, with_h1, &RipsOptions::default())
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;
    let labels = (0..total).map(|i| i / per).collect();
    Ok((samples, labels))
}

/// Point cloud fed to the Rips computation: delay embedding of the series,
/// every `cloud_stride`-th point, at most `max_cloud_points` points.
pub fn rossler_cloud(series: &[f64], p: &ProtocolParams) -> Result<PointCloud> {
    let tau = p.delay_rule.delay(series, p.max_lag);
    let embedded = delay_embed(series, p.embedding_dim, tau)?;
    let rows: Vec<Vec<f64>> = embedded.iter().step_by(p.cloud_stride).take(p.max_cloud_points).map(<[f64]>::to_vec).collect();
    PointCloud::new(rows).map_err(Error::from)
}

/// One simulated parameter value of the Rossler sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RosslerSample {
    pub alpha: f64,
    pub score: f64,
    pub label: RosslerLabel,
    pub extrema: Vec<f64>,
    pub diagrams: DiagramSet,
}

/// Evenly spaced parameter values over `[alpha_min, alpha_max]`.
pub fn alpha_grid(p: &ProtocolParams) -> Vec<f64> {
    let steps = p.alpha_steps.max(2);
    (0..steps)
        .map(|k| {
            let s = k as f64 / (steps - 1) as f64;
            p.alpha_min * (1.0 - s) + p.alpha_max * s
        })
        .collect()
}

/// Simulates, labels and computes diagrams for every value of the sweep.
pub fn rossler_dataset(p: &ProtocolParams, with_h1: bool, seed: u64, mode: ExecMode) -> Result<Vec<RosslerSample>> {
    let alphas = alpha_grid(p);
    exec::map_range(mode, alphas.len(), |index| -> Result<RosslerSample> {
        let alpha = alphas[index];
        let item_seed = derive_seed(seed, index as u64);
        let mut run = rossler_simulate(alpha, item_seed, &p.rossler)?;
        let score = run.label_with_zero_one(p.zero_one_stride, p.chaos_threshold, &mut rng(derive_seed(item_seed, 1)))?;
        let cloud = rossler_cloud(&run.x_series, p)?;
        let diagrams = cloud_diagrams(&cloud, with_h1, &RipsOptions::default())?;
        Ok(RosslerSample { alpha, score, label: run.label, extrema: extrema(&run.x_series), diagrams })
    })
    .into_iter()
    .collect()
}

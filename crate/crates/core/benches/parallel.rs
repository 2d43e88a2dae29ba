//! Sequential vs parallel execution of the data-parallel stages.
//!
//! Run with `cargo bench -p pdtemplates --bench parallel`. Without the
//! `parallel` feature both modes run sequentially.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use pdtemplates::datagen::ManifoldKind;
use pdtemplates::experiment::{manifold_dataset, ProtocolParams};
use pdtemplates::featurize::{auto_poly_params, featurize_dataset, DatasetFeaturizer, PadMode};
use pdtemplates::persistence::DistanceMatrix;
use pdtemplates::{ExecMode, Featurizer};

const MODES: [(&str, ExecMode); 2] = [("sequential", ExecMode::Sequential), ("parallel", ExecMode::Parallel)];

fn small_protocol() -> ProtocolParams {
    ProtocolParams { diagrams_per_class: 4, points_per_cloud: 120, ..ProtocolParams::default() }
}

fn diagrams(c: &mut Criterion) {
    let p = small_protocol();
    let mut group = c.benchmark_group("manifold_diagrams");
    group.sample_size(10);
    for (name, mode) in MODES {
        group.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| manifold_dataset(&p, true, 7, mode).unwrap())
        });
    }
    group.finish();
}

fn features(c: &mut Criterion) {
    let (samples, _) = manifold_dataset(&small_protocol(), true, 7, ExecMode::Parallel).unwrap();
    let h0: Vec<_> = samples.iter().map(|s| s.h0.clone()).collect();
    let h1: Vec<_> = samples.iter().filter_map(|s| s.h1.clone()).collect();
    let featurizer = DatasetFeaturizer {
        h0: Some(Featurizer::Polynomials(auto_poly_params(&h0, 10, 10, PadMode::HalfB).unwrap())),
        h1: Some(Featurizer::Polynomials(auto_poly_params(&h1, 10, 10, PadMode::HalfB).unwrap())),
    };
    let mut group = c.benchmark_group("polynomial_features");
    for (name, mode) in MODES {
        group.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| featurize_dataset(&samples, &featurizer, mode).unwrap())
        });
    }
    group.finish();
}

fn distances(c: &mut Criterion) {
    let cloud = pdtemplates::datagen::gen_manifold(ManifoldKind::Torus, 1500, &mut pdtemplates::datagen::rng(3)).unwrap();
    let mut group = c.benchmark_group("distance_matrix");
    for (name, mode) in MODES {
        group.bench_function(BenchmarkId::from_parameter(name), |b| b.iter(|| DistanceMatrix::from_cloud(&cloud, mode)));
    }
    group.finish();
}

criterion_group!(benches, diagrams, features, distances);
criterion_main!(benches);

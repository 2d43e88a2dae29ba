mod common;

use common::{bottleneck_brute, poly_naive, rel_close, rips_brute, ridge_normal_equations, tent_naive};
use pdtemplates::diagrams::bottleneck_distance;
use pdtemplates::featurize::{poly_features, tent_features, ChebMesh, TentGrid};
use pdtemplates::learn::ridge_fit;
use pdtemplates::persistence::{rips_h0, rips_h1, RipsOptions};
use pdtemplates::{PersistenceDiagram, PointCloud};
use proptest::prelude::*;

fn diagram(max_points: usize, max_mult: u32) -> impl Strategy<Value = PersistenceDiagram> {
    prop::collection::vec((0.0..5.0f64, 0.05..5.0f64, 1..=max_mult), 0..=max_points).prop_map(|pts| {
        let triples: Vec<_> = pts.into_iter().map(|(b, l, m)| (b, b + l, m)).collect();
        PersistenceDiagram::from_triples(&triples, 0).unwrap()
    })
}

fn cloud(max_points: usize) -> impl Strategy<Value = PointCloud> {
    (1usize..=3).prop_flat_map(move |dim| {
        prop::collection::vec(prop::collection::vec(-1.0..1.0f64, dim), 3..=max_points)
            .prop_map(|rows| PointCloud::new(rows).unwrap())
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn bottleneck_matches_matching_enumeration(a in diagram(4, 2), b in diagram(4, 2)) {
        prop_assume!(a.total_multiplicity() <= 4 && b.total_multiplicity() <= 4);
        prop_assert_eq!(bottleneck_distance(&a, &b), bottleneck_brute(&a, &b));
    }

    #[test]
    fn rips_matches_full_boundary_reduction(c in cloud(8)) {
        let (h0, h1) = rips_brute(&c);
        prop_assert_eq!(rips_h0(&c), h0);
        prop_assert_eq!(rips_h1(&c, &RipsOptions::default()).unwrap(), h1);
    }

    #[test]
    fn tents_match_dense_evaluation(d in diagram(15, 3), delta in 0.2..1.0f64, eps in 0.01..0.2f64) {
        let grid = TentGrid::new(8, delta, eps).unwrap();
        prop_assert!(rel_close(&tent_features(&d, &grid), &tent_naive(&d, &grid), 1e-12));
    }

    #[test]
    fn polynomials_match_double_loop(d in diagram(15, 3), m in 1usize..12, n in 1usize..12, abs in any::<bool>()) {
        let mesh = ChebMesh::new(m, n, (0.0, 5.0), (0.5, 5.0), abs, 0.25).unwrap();
        prop_assert!(rel_close(&poly_features(&d, &mesh), &poly_naive(&d, &mesh), 1e-9));
    }

    #[test]
    fn ridge_matches_normal_equations(
        x in prop::collection::vec(prop::collection::vec(-2.0..2.0f64, 15), 20),
        y in prop::collection::vec(-3.0..3.0f64, 20),
        log_lambda in -3.0..2.0f64,
        standardize in any::<bool>(),
    ) {
        let lambda = 10f64.powf(log_lambda);
        let model = ridge_fit(&common::feature_matrix(&x), &y, lambda, standardize).unwrap();
        let (w, b) = ridge_normal_equations(&x, &y, lambda, standardize);
        prop_assert!(rel_close(&model.weights[0], &w, 1e-9));
        prop_assert!((model.intercepts[0] - b).abs() <= 1e-9 * b.abs().max(1.0));
    }
}

#[test]
fn hundred_random_diagrams_through_the_matrix_pipeline() {
    common::check_poly_oracle(100, 5).unwrap();
}

#[test]
fn square_and_hexagon_match_the_full_reduction() {
    let square = PointCloud::new(vec![vec![0.0, 0.0], vec![1.0, 0.0], vec![1.0, 1.0], vec![0.0, 1.0]]).unwrap();
    let hexagon = PointCloud::new(
        (0..6)
            .map(|k| {
                let t = std::f64::consts::PI * k as f64 / 3.0;
                vec![t.cos(), t.sin()]
            })
            .collect(),
    )
    .unwrap();
    for c in [square, hexagon] {
        let (_, h1) = rips_brute(&c);
        assert_eq!(h1.len(), 1);
        assert_eq!(rips_h1(&c, &RipsOptions::default()).unwrap(), h1);
    }
}

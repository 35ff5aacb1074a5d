//! Cross-checks between the boundary laws and end-to-end file round trips.

use std::fs::File;
use std::io::{BufReader, BufWriter};

use trochoid::boundary::{
    dense_hypotrochoid, interior_density, mixed_cycle_boundary, solve_segment_depth,
    sparse_hypotrochoid, GridSpec, HypotrochoidParams, MixedCycleParams, PolytrochoidParams,
    SparseCyclicParams,
};
use trochoid::ensemble::{generate_regular_cyclic, RegularCyclicSpec};
use trochoid::io::{
    read_curve_csv, read_density_csv, read_matrix_market, read_spectrum_csv, write_curve_csv,
    write_density_csv, write_matrix_market_digraph, write_spectrum_csv, CycleSidecar,
};
use trochoid::spectra::{compute_eigenvalues, containment, tree_walk_prediction, brute_force_tree_walks};
use trochoid::{BoundaryCurve32, Complex, RandomSeed};

#[test]
fn reduction_chain_mixed_sparse_dense() {
    for k in [3usize, 4] {
        // Mixed with an empty second species is the single-species sparse law.
        let d1: f64 = 5.0;
        let other = if k == 3 { 4 } else { 3 };
        let mixed = mixed_cycle_boundary(&MixedCycleParams::unit(d1, k, 0.0, other).unwrap(), 512).unwrap();
        let sparse = sparse_hypotrochoid(&SparseCyclicParams::new(d1 - 1.0, k, 1.0).unwrap(), 512).unwrap();
        let radius = sparse.mean_radius();
        for (a, b) in mixed.samples.iter().zip(&sparse.samples) {
            assert!((a.z - b.z).norm() < 0.01 * radius, "k={k}");
        }

        // Rescaled by d_hat^{-1/2}, the sparse law tends to the dense one.
        let d_hat: f64 = 1e3;
        let sparse = sparse_hypotrochoid(&SparseCyclicParams::new(d_hat, k, 1.0).unwrap(), 512).unwrap();
        let rho = d_hat.powf(1.0 - k as f64 / 2.0);
        let dense = dense_hypotrochoid(&HypotrochoidParams::new(k, rho).unwrap(), 512).unwrap();
        for (a, b) in sparse.samples.iter().zip(&dense.samples) {
            assert!((a.z / d_hat.sqrt() - b.z).norm() < 0.01, "k={k}");
        }
    }
}

#[test]
fn tree_walks_match_enumeration_for_small_l() {
    for branching in 1u64..6 {
        let d = branching + 1;
        for l in 1..=3 {
            let exact = brute_force_tree_walks(2, l, d, branching).unwrap();
            let predicted: f64 = tree_walk_prediction(2, l, d as f64, d as f64).unwrap();
            assert_eq!(exact.to_string(), format!("{predicted}"), "d={d} l={l}");
        }
    }
}

#[test]
fn single_precision_pipeline() {
    let t: f32 = solve_segment_depth(1.0, 3).unwrap();
    assert!((t - 0.786_151_4).abs() < 1e-5);
    let curve: BoundaryCurve32 =
        sparse_hypotrochoid(&SparseCyclicParams::regular(2, 3, 1.0f32).unwrap(), 1024).unwrap();
    let g = generate_regular_cyclic(&RegularCyclicSpec::new(99, 2, 3, 1.0f32).periodic(), RandomSeed(0)).unwrap();
    let s = compute_eigenvalues(&trochoid::ensemble::adjacency_matrix(&g, 1.0)).unwrap();
    let r = containment(&s, &curve, 0.05, &[]).unwrap();
    assert_eq!(r.total, 99);
    assert!(r.inside >= 90);
}

#[test]
fn artifacts_round_trip_through_files() {
    let dir = tempfile::tempdir().unwrap();
    let g = generate_regular_cyclic(&RegularCyclicSpec::new(30, 2, 3, 1.0), RandomSeed(9)).unwrap();

    let mtx = dir.path().join("g.mtx");
    write_matrix_market_digraph(&g, BufWriter::new(File::create(&mtx).unwrap())).unwrap();
    let side = dir.path().join("g.json");
    serde_json::to_writer(File::create(&side).unwrap(), &CycleSidecar::from(&g)).unwrap();
    let edges = read_matrix_market::<f64>(BufReader::new(File::open(&mtx).unwrap()))
        .unwrap()
        .into_digraph()
        .unwrap();
    assert_eq!(edges.edges, g.edges);
    let cycles: CycleSidecar<f64> = serde_json::from_reader(File::open(&side).unwrap()).unwrap();
    assert_eq!(cycles.into_digraph().unwrap(), g);

    let s = compute_eigenvalues(&trochoid::ensemble::adjacency_matrix(&g, 1.0)).unwrap();
    let path = dir.path().join("spectrum.csv");
    write_spectrum_csv(&s, File::create(&path).unwrap()).unwrap();
    assert_eq!(read_spectrum_csv::<f64>(File::open(&path).unwrap()).unwrap(), s.eigenvalues);

    let curve = dense_hypotrochoid(&HypotrochoidParams::new(3, 0.2).unwrap(), 512).unwrap();
    let path = dir.path().join("curve.csv");
    write_curve_csv(&curve, File::create(&path).unwrap()).unwrap();
    assert_eq!(read_curve_csv::<f64>(File::open(&path).unwrap()).unwrap(), curve.samples);

    let params = PolytrochoidParams::single(3, 0.2).unwrap();
    let grid = GridSpec::covering(&curve, 12, 10, 0.1);
    let field = interior_density(&params, &grid).unwrap();
    let path = dir.path().join("density.csv");
    write_density_csv(&field, File::create(&path).unwrap()).unwrap();
    let back = read_density_csv::<f64>(File::open(&path).unwrap()).unwrap();
    assert_eq!(back.len(), 120);
    assert!(back.iter().zip(&field.points).all(|((z, mu), p)| *z == p.z && *mu == p.mu));
    assert!(back.iter().any(|(z, _)| *z != Complex::new(0.0, 0.0)));
}

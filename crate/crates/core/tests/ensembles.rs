//! Monte Carlo and exactness checks on the generators.

use statrs::distribution::{ChiSquared, ContinuousCDF, Discrete, DiscreteCDF, Poisson};
use trochoid::ensemble::{
    adjacency_matrix, combine_correlated, generate_base_iid, generate_dense_cyclic,
    generate_poisson_cyclic, generate_regular_cyclic, induce_cyclic_correlations,
    induce_cyclic_correlations_reference, BaseDistribution, CorrelationSign, DenseCyclicSpec,
    PoissonCyclicSpec, RegularCyclicSpec,
};
use trochoid::spectra::{
    compute_eigenvalues, detect_deterministic_outliers, rotation_symmetry_residual, trace_moment,
};
use trochoid::{DenseMatrix, RandomSeed};

fn cyclic(n: usize, k: usize, p: f64) -> DenseCyclicSpec<f64> {
    DenseCyclicSpec {
        n,
        k,
        flip_prob: p,
        sign: CorrelationSign::Positive,
        base: BaseDistribution::Gaussian,
    }
}

fn mean_and_stderr(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

/// Closed 3-walks `sum a_ij a_jl a_li / n` by sparse row scans.
fn sparse_trace_cube(m: &DenseMatrix<f64>) -> f64 {
    let n = m.n();
    let rows: Vec<Vec<(usize, f64)>> = (0..n)
        .map(|i| m.row(i).iter().copied().enumerate().filter(|&(_, x)| x != 0.0).collect())
        .collect();
    let mut total = 0.0;
    for (i, ri) in rows.iter().enumerate() {
        for &(j, a) in ri {
            for &(l, b) in &rows[j] {
                total += a * b * m[(l, i)];
            }
        }
    }
    total / n as f64
}

#[test]
fn incremental_sweep_matches_reference_bit_exactly() {
    for seed in 0..5u64 {
        for (n, k) in [(12, 3), (60, 4), (200, 3), (200, 5)] {
            let base = generate_base_iid::<f64>(n, RandomSeed(seed)).unwrap();
            let spec = cyclic(n, k, 0.6);
            let fast = induce_cyclic_correlations(&base, &spec, RandomSeed(seed)).unwrap();
            let slow = induce_cyclic_correlations_reference(&base, &spec, RandomSeed(seed)).unwrap();
            assert_eq!(fast, slow, "n={n} k={k} seed={seed}");
        }
    }
}

#[test]
fn uncorrelated_cube_trace_is_small() {
    let m = generate_dense_cyclic(&cyclic(200, 3, 0.0), RandomSeed(4)).unwrap();
    assert!(trace_moment(&m, 3).unwrap().abs() < 5.0 / 200f64.sqrt());
}

#[test]
fn induced_cube_trace_is_positive() {
    let m = generate_dense_cyclic(&cyclic(500, 3, 1.0), RandomSeed(3)).unwrap();
    assert!(trace_moment(&m, 3).unwrap() > 0.0);
    let neg = DenseCyclicSpec { sign: CorrelationSign::Negative, ..cyclic(500, 3, 1.0) };
    let m = generate_dense_cyclic(&neg, RandomSeed(3)).unwrap();
    assert!(trace_moment(&m, 3).unwrap() < 0.0);
}

#[test]
fn order_four_correlations_exceed_baseline() {
    let measure = |p: f64| -> Vec<f64> {
        (0..10)
            .map(|s| trace_moment(&generate_dense_cyclic(&cyclic(500, 4, p), RandomSeed(s)).unwrap(), 4).unwrap())
            .collect()
    };
    let (base, base_se) = mean_and_stderr(&measure(0.0));
    let (corr, corr_se) = mean_and_stderr(&measure(1.0));
    let se = (base_se.powi(2) + corr_se.powi(2)).sqrt();
    assert!(corr - base > 3.0 * se, "p=1: {corr} +- {corr_se}, p=0: {base} +- {base_se}");
}

#[test]
fn combined_ensemble_keeps_both_orders() {
    let n = 800;
    let (mut t3, mut t4) = (Vec::new(), Vec::new());
    for s in 0..10u64 {
        let a = generate_dense_cyclic(&cyclic(n, 3, 1.0), RandomSeed(2 * s)).unwrap();
        let b = generate_dense_cyclic(&cyclic(n, 4, 1.0), RandomSeed(2 * s + 1)).unwrap();
        let m = combine_correlated(&a, &b).unwrap();
        t3.push(trace_moment(&m, 3).unwrap());
        t4.push(trace_moment(&m, 4).unwrap());
    }
    for (name, xs) in [("cube", t3), ("fourth", t4)] {
        let (mean, se) = mean_and_stderr(&xs);
        assert!(mean > 3.0 * se, "{name}: {mean} +- {se}");
    }
}

#[test]
fn combine_preserves_mean_frobenius_norm() {
    let n = 200;
    let (mut lhs, mut rhs) = (0.0, 0.0);
    for s in 0..10u64 {
        let a = generate_base_iid::<f64>(n, RandomSeed(100 + s)).unwrap();
        let b = generate_base_iid::<f64>(n, RandomSeed(200 + s)).unwrap();
        lhs += combine_correlated(&a, &b).unwrap().frobenius_sq();
        rhs += (a.frobenius_sq() + b.frobenius_sq()) / 2.0;
    }
    assert!((lhs / rhs - 1.0).abs() < 0.05, "{lhs} vs {rhs}");
}

#[test]
fn periodic_regular_graph_is_rotation_symmetric() {
    let g = generate_regular_cyclic(&RegularCyclicSpec::new(300, 2, 3, 1.0).periodic(), RandomSeed(11))
        .unwrap();
    let m = adjacency_matrix(&g, 1.0);
    assert_eq!(m.trace(), 0.0);
    let s = compute_eigenvalues(&m).unwrap();
    assert!(rotation_symmetry_residual(&s, 3).unwrap() < 1e-8);
    assert_eq!(detect_deterministic_outliers(&s, &g, 1.0).len(), 3);
    // The all-ones vector is a right eigenvector with eigenvalue d w.
    assert!(g.row_sums().iter().all(|&r| r == 2.0));
}

#[test]
fn poisson_in_degrees_follow_poisson_law() {
    let spec = PoissonCyclicSpec { n: 1000, mean_degree: 8.0, k: 3, weight: 1.0 };
    let g = generate_poisson_cyclic(&spec, RandomSeed(5)).unwrap();
    let deg = g.in_degrees();
    let mean = deg.iter().sum::<usize>() as f64 / deg.len() as f64;
    assert!((mean / 8.0 - 1.0).abs() < 0.05, "mean in-degree {mean}");

    // Pool tails until every bin expects at least 5 nodes.
    let law = Poisson::new(8.0).unwrap();
    let n = deg.len() as f64;
    let (lo, hi) = (2u64, 14u64);
    let mut observed = vec![0.0; (hi - lo + 1) as usize];
    for &d in &deg {
        observed[(d as u64).clamp(lo, hi) as usize - lo as usize] += 1.0;
    }
    let expected: Vec<f64> = (lo..=hi)
        .map(|d| {
            n * if d == lo {
                law.cdf(lo)
            } else if d == hi {
                1.0 - law.cdf(hi - 1)
            } else {
                law.pmf(d)
            }
        })
        .collect();
    assert!(expected.iter().all(|&e| e >= 5.0));
    let chi2: f64 = observed.iter().zip(&expected).map(|(o, e)| (o - e).powi(2) / e).sum();
    let p = 1.0 - ChiSquared::new((expected.len() - 2) as f64).unwrap().cdf(chi2);
    assert!(p > 0.01, "chi2 = {chi2}, p = {p}");
}

#[test]
fn rescaled_poisson_cube_trace_matches_effective_rho() {
    let scale = 8f64.powf(-0.5);
    let traces: Vec<f64> = (0..10)
        .map(|s| {
            let spec = PoissonCyclicSpec { n: 1000, mean_degree: 8.0, k: 3, weight: 1.0 };
            let g = generate_poisson_cyclic(&spec, RandomSeed(s)).unwrap();
            sparse_trace_cube(&adjacency_matrix(&g, scale))
        })
        .collect();
    let (mean, _) = mean_and_stderr(&traces);
    assert!((mean / scale - 1.0).abs() < 0.15, "mean Tr M^3/n = {mean}");
}

#[test]
fn dense_rotation_residual_shrinks_with_n() {
    let residual = |n: usize| -> f64 {
        let r: Vec<f64> = (0..10)
            .map(|s| {
                let m = generate_dense_cyclic(&cyclic(n, 3, 0.5), RandomSeed(s)).unwrap();
                rotation_symmetry_residual(&compute_eigenvalues(&m).unwrap(), 3).unwrap()
            })
            .collect();
        mean_and_stderr(&r).0
    };
    let rs: Vec<f64> = [200, 500, 1000].into_iter().map(residual).collect();
    assert!(rs[0] > rs[1] && rs[1] > rs[2], "{rs:?}");
    assert!(rs[2] > 0.0);
}

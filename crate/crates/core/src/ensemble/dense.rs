//! Dense ensembles: i.i.d. base matrices, pairwise-correlated (elliptic)
//! matrices and the sign-flip sweep that induces order-`k` cycle
//! correlations.
//!
//! The sweep visits nodes `v = k-1, ..., n-1`. For node `v` it looks at the
//! leading `v x v` block `A` (nodes already visited; their entries are final)
//! and the walk-weight matrices
//!
//! ```text
//! P_1 = A,    P_j = A P_{j-1} - diag(A P_{j-1})
//! ```
//!
//! The aggregate weight of the `k`-cycles closing through the in-edge `b -> v`
//! is `w_b = (M[v, :v] P_{k-2})_b * M[b, v]`: edge `v -> a`, a walk `a ~> b` of
//! length `k-2`, then `b -> v`. If `sign * w_b < 0` the entry `M[b, v]` is
//! negated with probability `p`.
//!
//! [`induce_cyclic_correlations_reference`] recomputes the `P_j` from scratch
//! for every `v` (O(k n^4)). [`induce_cyclic_correlations`] only needs the row
//! vector `M[v, :v] P_{k-2}`, which expands to
//!
//! ```text
//! x P_J = x A^J - sum_{i=0}^{J-2} (x A^i) o D_{J-i},
//! D_j[a] = (A^j)_aa - sum_{i=1}^{j-2} (A^i)_aa D_{j-i}[a]
//! ```
//!
//! so it keeps just the diagonals of `A^1..A^J` and updates them by a
//! low-rank correction each time the block grows by one node (O(k n^3)).

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;

use super::spec::{BaseDistribution, DenseCyclicSpec, DenseEllipticSpec};
use crate::error::{Error, Result};
use crate::matrix::DenseMatrix;
use crate::rng::{domain, stream, RandomSeed, StreamRng};
use crate::scalar::{lit, Scalar};

/// Block sizes from which the sweep's matrix-vector products go parallel.
const PAR_MIN_BLOCK: usize = 256;

fn draw_entry(rng: &mut StreamRng, dist: BaseDistribution, sigma: f64) -> f64 {
    match dist {
        BaseDistribution::Gaussian => {
            let x: f64 = StandardNormal.sample(rng);
            x * sigma
        }
        BaseDistribution::Uniform => {
            let half_width = sigma * 3f64.sqrt();
            rng.random_range(-half_width..half_width)
        }
    }
}

/// i.i.d. Gaussian entries with mean 0 and variance `1/n`.
pub fn generate_base_iid<T: Scalar>(n: usize, seed: RandomSeed) -> Result<DenseMatrix<T>> {
    generate_base(n, BaseDistribution::Gaussian, seed)
}

/// i.i.d. entries from `dist`, mean 0 and variance `1/n`. Row `i` is drawn
/// from its own stream.
pub fn generate_base<T: Scalar>(
    n: usize,
    dist: BaseDistribution,
    seed: RandomSeed,
) -> Result<DenseMatrix<T>> {
    if n == 0 {
        return Err(Error::spec("matrix dimension must be >= 1"));
    }
    let sigma = (1.0 / n as f64).sqrt();
    let mut data = vec![T::zero(); n * n];
    data.par_chunks_mut(n).enumerate().for_each(|(i, row)| {
        let mut rng = stream(seed, domain::BASE_ENTRIES, i as u64);
        for x in row.iter_mut() {
            *x = lit(draw_entry(&mut rng, dist, sigma));
        }
    });
    DenseMatrix::from_row_major(n, data)
}

/// Pairwise-correlated matrix: `(M_ij, M_ji)` for `i < j` is a bivariate pair
/// with unit-scaled variance `1/n` and correlation `rho`; the diagonal has
/// variance `(1 + rho)/n`.
pub fn generate_dense_elliptic<T: Scalar>(
    spec: &DenseEllipticSpec<T>,
    base: BaseDistribution,
    seed: RandomSeed,
) -> Result<DenseMatrix<T>> {
    spec.validate()?;
    let n = spec.n;
    let rho = spec.rho.to_f64().unwrap();
    let sigma = (1.0 / n as f64).sqrt();
    let mix = (1.0 - rho * rho).max(0.0).sqrt();
    let rows: Vec<Vec<(usize, f64, f64)>> = (0..n)
        .into_par_iter()
        .map(|i| {
            let mut rng = stream(seed, domain::ELLIPTIC_PAIRS, i as u64);
            (i..n)
                .map(|j| {
                    let a = draw_entry(&mut rng, base, sigma);
                    let b = draw_entry(&mut rng, base, sigma);
                    if i == j {
                        (j, a * (1.0 + rho).max(0.0).sqrt(), 0.0)
                    } else {
                        (j, a, rho * a + mix * b)
                    }
                })
                .collect()
        })
        .collect();
    let mut m = DenseMatrix::zeros(n);
    for (i, row) in rows.into_iter().enumerate() {
        for (j, upper, lower) in row {
            m[(i, j)] = lit(upper);
            if i != j {
                m[(j, i)] = lit(lower);
            }
        }
    }
    Ok(m)
}

fn check_sweep_input<T: Scalar>(m: &DenseMatrix<T>, spec: &DenseCyclicSpec<T>) -> Result<()> {
    spec.validate()?;
    if m.n() != spec.n {
        return Err(Error::spec(format!(
            "matrix dimension {} does not match spec n = {}",
            m.n(),
            spec.n
        )));
    }
    Ok(())
}

/// `y = x * A` for the leading `s x s` block `A` of `m`. Column chunks run in
/// parallel; each accumulates rows in ascending order.
fn row_times_block<T: Scalar>(m: &DenseMatrix<T>, x: &[T], s: usize) -> Vec<T> {
    let mut y = vec![T::zero(); s];
    let chunk = |(c, out): (usize, &mut [T]), width: usize| {
        let lo = c * width;
        for (a, &xa) in x.iter().enumerate().take(s) {
            if xa == T::zero() {
                continue;
            }
            let row = &m.row(a)[lo..lo + out.len()];
            for (o, &r) in out.iter_mut().zip(row) {
                *o = *o + xa * r;
            }
        }
    };
    if s >= PAR_MIN_BLOCK {
        let width = 64;
        y.par_chunks_mut(width).enumerate().for_each(|p| chunk(p, width));
    } else if s > 0 {
        chunk((0, &mut y[..]), s);
    }
    y
}

/// `y = A * c` for the leading `s x s` block `A` of `m`.
fn block_times_col<T: Scalar>(m: &DenseMatrix<T>, c: &[T], s: usize) -> Vec<T> {
    let dot = |a: usize| -> T { m.row(a)[..s].iter().zip(c).map(|(&x, &y)| x * y).sum() };
    if s >= PAR_MIN_BLOCK {
        (0..s).into_par_iter().map(dot).collect()
    } else {
        (0..s).map(dot).collect()
    }
}

fn dot<T: Scalar>(a: &[T], b: &[T]) -> T {
    a.iter().zip(b).map(|(&x, &y)| x * y).sum()
}

/// Flip decisions for node `v` given `y = M[v, :v] P_{k-2}`. One uniform is
/// drawn per candidate edge regardless of the outcome, so both sweep
/// variants consume identical random streams.
fn apply_flips<T: Scalar>(
    m: &mut DenseMatrix<T>,
    v: usize,
    y: &[T],
    spec: &DenseCyclicSpec<T>,
    seed: RandomSeed,
) {
    let sign: T = spec.sign.value();
    let p = spec.flip_prob.to_f64().unwrap();
    let mut rng = stream(seed, domain::CYCLIC_FLIPS, v as u64);
    for (b, &yb) in y.iter().enumerate().take(v) {
        let u: f64 = rng.random();
        let w = yb * m[(b, v)];
        if sign * w < T::zero() && u < p {
            m[(b, v)] = -m[(b, v)];
        }
    }
}

/// Reference sweep: rebuilds `P_1..P_{k-2}` on the leading block for every
/// node.
pub fn induce_cyclic_correlations_reference<T: Scalar>(
    m: &DenseMatrix<T>,
    spec: &DenseCyclicSpec<T>,
    seed: RandomSeed,
) -> Result<DenseMatrix<T>> {
    check_sweep_input(m, spec)?;
    let mut out = m.clone();
    let depth = spec.k - 2;
    for v in spec.k - 1..spec.n {
        let block = DenseMatrix::from_fn(v, |i, j| out[(i, j)]);
        let mut paths = block.clone();
        for _ in 2..=depth {
            paths = block.matmul(&paths)?;
            for i in 0..v {
                paths[(i, i)] = T::zero();
            }
        }
        let x = &out.row(v)[..v];
        let y: Vec<T> = (0..v).map(|b| (0..v).map(|a| x[a] * paths[(a, b)]).sum()).collect();
        apply_flips(&mut out, v, &y, spec, seed);
    }
    Ok(out)
}

/// Diagonals of `A^1..A^depth` for a growing leading block `A`.
struct PowerDiagonals<T> {
    depth: usize,
    size: usize,
    /// `diag[j - 1][a] = (A^j)_aa`
    diag: Vec<Vec<T>>,
}

impl<T: Scalar> PowerDiagonals<T> {
    fn new(depth: usize, capacity: usize) -> Self {
        PowerDiagonals { depth, size: 0, diag: (0..depth).map(|_| Vec::with_capacity(capacity)).collect() }
    }

    /// Grows the block by node `s = self.size`, using the current (final)
    /// entries of row and column `s`.
    ///
    /// With `A' = [[A, c], [r, m]]` the top-left block of `A'^j` is
    /// `A^j + sum_{i=0}^{j-2} (A^i c) l_{j-1-i}` where `l_q` is the bottom-left
    /// row of `A'^q`: `l_q = l_{q-1} A + b_{q-1} r`, `b_q = l_{q-1} c + b_{q-1} m`,
    /// and `b_j` is the new diagonal entry of `A'^j`.
    fn extend(&mut self, mat: &DenseMatrix<T>) {
        let s = self.size;
        let depth = self.depth;
        let c: Vec<T> = (0..s).map(|a| mat[(a, s)]).collect();
        let r = &mat.row(s)[..s];
        let corner = mat[(s, s)];

        let mut a_pow_c: Vec<Vec<T>> = Vec::with_capacity(depth.saturating_sub(1));
        if depth >= 2 {
            a_pow_c.push(c.clone());
            for i in 1..depth - 1 {
                let next = block_times_col(mat, &a_pow_c[i - 1], s);
                a_pow_c.push(next);
            }
        }

        // ell[q] for q = 0..depth-1 (ell[0] = 0), beta[q] for q = 0..=depth
        let mut ell: Vec<Vec<T>> = vec![vec![T::zero(); s]];
        let mut beta: Vec<T> = vec![T::one()];
        for q in 1..=depth {
            let b = dot(&ell[q - 1], &c) + beta[q - 1] * corner;
            if q < depth {
                let mut l = row_times_block(mat, &ell[q - 1], s);
                for (li, &ri) in l.iter_mut().zip(r) {
                    *li = *li + beta[q - 1] * ri;
                }
                ell.push(l);
            }
            beta.push(b);
        }

        for j in 1..=depth {
            let dj = &mut self.diag[j - 1];
            for i in 0..j.saturating_sub(1) {
                let col = &a_pow_c[i];
                let row = &ell[j - 1 - i];
                for a in 0..s {
                    dj[a] = dj[a] + col[a] * row[a];
                }
            }
            dj.push(beta[j]);
        }
        self.size += 1;
    }

    /// `D_j` for `j = 2..=depth`, indexed `d[j]` (entries 0 and 1 unused).
    fn walk_diagonals(&self) -> Vec<Vec<T>> {
        let s = self.size;
        let mut d: Vec<Vec<T>> = vec![Vec::new(), Vec::new()];
        for j in 2..=self.depth {
            let mut dj = self.diag[j - 1].clone();
            for i in 1..=j - 2 {
                let pi = &self.diag[i - 1];
                let dji = &d[j - i];
                for a in 0..s {
                    dj[a] = dj[a] - pi[a] * dji[a];
                }
            }
            d.push(dj);
        }
        d
    }
}

/// Sign-flip sweep inducing order-`k` cycle correlations (incremental
/// variant). Produces the same matrix as
/// [`induce_cyclic_correlations_reference`] up to ties in the sign test.
pub fn induce_cyclic_correlations<T: Scalar>(
    m: &DenseMatrix<T>,
    spec: &DenseCyclicSpec<T>,
    seed: RandomSeed,
) -> Result<DenseMatrix<T>> {
    check_sweep_input(m, spec)?;
    let mut out = m.clone();
    let depth = spec.k - 2;
    let mut diags = PowerDiagonals::new(depth, spec.n);
    for _ in 0..spec.k - 1 {
        diags.extend(&out);
    }
    for v in spec.k - 1..spec.n {
        debug_assert_eq!(diags.size, v);
        let d = diags.walk_diagonals();
        let mut powers: Vec<Vec<T>> = Vec::with_capacity(depth + 1);
        powers.push(out.row(v)[..v].to_vec());
        for i in 1..=depth {
            let next = row_times_block(&out, &powers[i - 1], v);
            powers.push(next);
        }
        let mut y = powers[depth].clone();
        for i in 0..depth.saturating_sub(1) {
            let di = &d[depth - i];
            for (b, yb) in y.iter_mut().enumerate() {
                *yb = *yb - powers[i][b] * di[b];
            }
        }
        apply_flips(&mut out, v, &y, spec, seed);
        if v + 1 < spec.n {
            diags.extend(&out);
        }
    }
    Ok(out)
}

/// Base matrix followed by the incremental sign-flip sweep.
pub fn generate_dense_cyclic<T: Scalar>(
    spec: &DenseCyclicSpec<T>,
    seed: RandomSeed,
) -> Result<DenseMatrix<T>> {
    spec.validate()?;
    let base = generate_base(spec.n, spec.base, seed)?;
    let out = induce_cyclic_correlations(&base, spec, seed)?;
    debug_assert!(out.is_finite());
    Ok(out)
}

/// `(a + b) / sqrt(2)`: restores variance `1/n` for independent inputs.
pub fn combine_correlated<T: Scalar>(
    a: &DenseMatrix<T>,
    b: &DenseMatrix<T>,
) -> Result<DenseMatrix<T>> {
    Ok(a.add(b)?.scaled(T::FRAC_1_SQRT_2()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ensemble::spec::CorrelationSign;

    fn spec(n: usize, k: usize, p: f64) -> DenseCyclicSpec<f64> {
        DenseCyclicSpec { n, k, flip_prob: p, sign: CorrelationSign::Positive, base: BaseDistribution::Gaussian }
    }

    #[test]
    fn base_is_deterministic() {
        let a: DenseMatrix<f64> = generate_base_iid(1, RandomSeed(7)).unwrap();
        let b: DenseMatrix<f64> = generate_base_iid(1, RandomSeed(7)).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.n(), 1);
        assert!(generate_base_iid::<f64>(0, RandomSeed(7)).is_err());
    }

    #[test]
    fn base_variance_and_frobenius() {
        let n = 1000;
        let m: DenseMatrix<f64> = generate_base_iid(n, RandomSeed(1)).unwrap();
        let mean = m.as_slice().iter().sum::<f64>() / (n * n) as f64;
        let var = m.as_slice().iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n * n) as f64;
        let target = 1.0 / n as f64;
        assert!(var > 0.9 * target && var < 1.1 * target, "var = {var}");
        let tr = m.mul_transpose().trace() / n as f64;
        assert!((tr - 1.0).abs() < 0.1);
    }

    #[test]
    fn uniform_base_has_unit_scaled_variance() {
        let n = 400;
        let m: DenseMatrix<f64> = generate_base(n, BaseDistribution::Uniform, RandomSeed(2)).unwrap();
        let bound = (3.0 / n as f64).sqrt();
        assert!(m.as_slice().iter().all(|x| x.abs() <= bound));
        let var = m.frobenius_sq() / (n * n) as f64;
        assert!((var * n as f64 - 1.0).abs() < 0.05);
    }

    #[test]
    fn elliptic_pair_correlation() {
        let n = 600;
        let rho = 0.5;
        let m: DenseMatrix<f64> =
            generate_dense_elliptic(&DenseEllipticSpec { n, rho }, BaseDistribution::Gaussian, RandomSeed(4))
                .unwrap();
        let tr2 = m.trace_power(2).unwrap() / n as f64;
        assert!((tr2 - rho).abs() < 0.05, "Tr M^2 / n = {tr2}");
    }

    #[test]
    fn zero_flip_probability_is_identity() {
        let m: DenseMatrix<f64> = generate_base_iid(40, RandomSeed(9)).unwrap();
        for k in [3, 4, 6] {
            let s = spec(40, k, 0.0);
            assert_eq!(induce_cyclic_correlations(&m, &s, RandomSeed(1)).unwrap(), m);
            assert_eq!(induce_cyclic_correlations_reference(&m, &s, RandomSeed(1)).unwrap(), m);
        }
    }

    #[test]
    fn sweep_only_flips_signs_of_upper_triangle() {
        let m: DenseMatrix<f64> = generate_base_iid(60, RandomSeed(5)).unwrap();
        let out = induce_cyclic_correlations(&m, &spec(60, 4, 1.0), RandomSeed(5)).unwrap();
        let mut flips = 0;
        for i in 0..60 {
            for j in 0..60 {
                assert_eq!(out[(i, j)].abs(), m[(i, j)].abs());
                if out[(i, j)] != m[(i, j)] {
                    assert!(i < j);
                    flips += 1;
                }
            }
        }
        assert!(flips > 0);
    }

    /// Walks the six steps literally on a tiny matrix: submatrix, path
    /// matrices via the recursion, per-edge cycle weights by explicit sums
    /// over intermediate nodes, flip.
    fn scripted_sweep(m: &DenseMatrix<f64>, k: usize, seed: RandomSeed) -> DenseMatrix<f64> {
        let n = m.n();
        let mut out = m.clone();
        for v in k - 1..n {
            let sub: Vec<Vec<f64>> = (0..v).map(|i| (0..v).map(|j| out[(i, j)]).collect()).collect();
            let mut p = sub.clone();
            for _ in 2..=k - 2 {
                let mut q = vec![vec![0.0; v]; v];
                for i in 0..v {
                    for j in 0..v {
                        if i != j {
                            q[i][j] = (0..v).map(|c| sub[i][c] * p[c][j]).sum();
                        }
                    }
                }
                p = q;
            }
            let mut rng = stream(seed, domain::CYCLIC_FLIPS, v as u64);
            for b in 0..v {
                let u: f64 = rng.random();
                let mut w = 0.0;
                for a in 0..v {
                    w += out[(v, a)] * p[a][b] * out[(b, v)];
                }
                if w < 0.0 && u < 1.0 {
                    out[(b, v)] = -out[(b, v)];
                }
            }
        }
        out
    }

    #[test]
    fn tiny_sweep_matches_scripted_walkthrough() {
        for k in [3, 4, 5] {
            for s in 0..4u64 {
                let m: DenseMatrix<f64> = generate_base_iid(6, RandomSeed(s)).unwrap();
                let expect = scripted_sweep(&m, k, RandomSeed(s + 100));
                let fast = induce_cyclic_correlations(&m, &spec(6, k, 1.0), RandomSeed(s + 100)).unwrap();
                let reference =
                    induce_cyclic_correlations_reference(&m, &spec(6, k, 1.0), RandomSeed(s + 100)).unwrap();
                assert_eq!(fast, expect, "k={k} seed={s}");
                assert_eq!(reference, expect, "k={k} seed={s}");
            }
        }
    }

    #[test]
    fn power_diagonals_track_full_powers() {
        let n = 12;
        let m: DenseMatrix<f64> = generate_base_iid(n, RandomSeed(3)).unwrap();
        let depth = 4;
        let mut pd = PowerDiagonals::new(depth, n);
        for s in 0..n {
            pd.extend(&m);
            let block = DenseMatrix::from_fn(s + 1, |i, j| m[(i, j)]);
            for j in 1..=depth {
                let pw = block.power(j).unwrap();
                for a in 0..=s {
                    assert!((pd.diag[j - 1][a] - pw[(a, a)]).abs() < 1e-12, "s={s} j={j} a={a}");
                }
            }
        }
    }

    #[test]
    fn combine_definition() {
        let a: DenseMatrix<f64> = generate_base_iid(5, RandomSeed(1)).unwrap();
        let z = DenseMatrix::zeros(5);
        let half = combine_correlated(&a, &z).unwrap();
        let twice = combine_correlated(&a, &a).unwrap();
        for i in 0..25 {
            assert!((half.as_slice()[i] - a.as_slice()[i] / 2f64.sqrt()).abs() < 1e-15);
            assert!((twice.as_slice()[i] - a.as_slice()[i] * 2f64.sqrt()).abs() < 1e-15);
        }
        assert!(combine_correlated(&a, &DenseMatrix::zeros(4)).is_err());
    }
}

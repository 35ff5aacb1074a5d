use num_complex::Complex;

use super::Spectrum;
use crate::error::{Error, Result};
use crate::scalar::{lit, Scalar};

/// Largest spectrum accepted by the O(n^3) matching.
pub const MAX_MATCHING_SIZE: usize = 2000;

/// Minimum-cost perfect matching (Hungarian algorithm with potentials);
/// returns the total cost.
fn assignment_cost(cost: &[f64], n: usize) -> f64 {
    let inf = f64::INFINITY;
    let mut u = vec![0.0; n + 1];
    let mut v = vec![0.0; n + 1];
    let mut p = vec![0usize; n + 1];
    let mut way = vec![0usize; n + 1];
    for i in 1..=n {
        p[0] = i;
        let mut j0 = 0;
        let mut minv = vec![inf; n + 1];
        let mut used = vec![false; n + 1];
        loop {
            used[j0] = true;
            let i0 = p[j0];
            let row = &cost[(i0 - 1) * n..i0 * n];
            let mut delta = inf;
            let mut j1 = 0;
            for j in 1..=n {
                if !used[j] {
                    let cur = row[j - 1] - u[i0] - v[j];
                    if cur < minv[j] {
                        minv[j] = cur;
                        way[j] = j0;
                    }
                    if minv[j] < delta {
                        delta = minv[j];
                        j1 = j;
                    }
                }
            }
            for j in 0..=n {
                if used[j] {
                    u[p[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
            if p[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }
    (1..=n).map(|j| cost[(p[j] - 1) * n + j - 1]).sum()
}

fn matching_residual<T: Scalar>(s: &Spectrum<T>, map: impl Fn(Complex<f64>) -> Complex<f64>) -> Result<T> {
    let n = s.len();
    if n == 0 {
        return Err(Error::input("spectrum is empty"));
    }
    if n > MAX_MATCHING_SIZE {
        return Err(Error::ComplexityGuard(format!(
            "matching limited to n <= {MAX_MATCHING_SIZE}, got {n}"
        )));
    }
    let pts: Vec<Complex<f64>> = s
        .eigenvalues
        .iter()
        .map(|z| Complex::new(z.re.to_f64().unwrap(), z.im.to_f64().unwrap()))
        .collect();
    let images: Vec<Complex<f64>> = pts.iter().map(|&z| map(z)).collect();
    let mut cost = Vec::with_capacity(n * n);
    for a in &pts {
        cost.extend(images.iter().map(|b| (a - b).norm()));
    }
    Ok(lit(assignment_cost(&cost, n) / n as f64))
}

/// Optimal-matching distance between the spectrum and its rotation by
/// `2 pi / k`, divided by `n`.
pub fn rotation_symmetry_residual<T: Scalar>(s: &Spectrum<T>, k: usize) -> Result<T> {
    if k == 0 {
        return Err(Error::input("rotation order must be >= 1"));
    }
    let w = Complex::from_polar(1.0, std::f64::consts::TAU / k as f64);
    matching_residual(s, |z| z * w)
}

/// Optimal-matching distance between the spectrum and its complex conjugate.
pub fn conjugation_residual<T: Scalar>(s: &Spectrum<T>) -> Result<T> {
    matching_residual(s, |z| z.conj())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hungarian_small() {
        let cost = [4.0, 1.0, 3.0, 2.0, 0.0, 5.0, 3.0, 2.0, 2.0];
        assert_eq!(assignment_cost(&cost, 3), 5.0);
    }

    #[test]
    fn hungarian_matches_permutation_search() {
        let n = 6;
        let cost: Vec<f64> = (0..n * n).map(|i| ((i * 37 % 11) as f64 * 0.7).sin().abs()).collect();
        let mut best = f64::INFINITY;
        let mut perm: Vec<usize> = (0..n).collect();
        permute(&mut perm, 0, &mut |p| {
            best = best.min((0..n).map(|i| cost[i * n + p[i]]).sum());
        });
        assert!((assignment_cost(&cost, n) - best).abs() < 1e-12);
    }

    fn permute(p: &mut Vec<usize>, i: usize, f: &mut impl FnMut(&[usize])) {
        if i == p.len() {
            f(p);
            return;
        }
        for j in i..p.len() {
            p.swap(i, j);
            permute(p, i + 1, f);
            p.swap(i, j);
        }
    }

    #[test]
    fn roots_of_unity_are_symmetric() {
        let s = Spectrum::new((0..3).map(|j| Complex::from_polar(1.0, j as f64 * 2.0 * std::f64::consts::PI / 3.0)).collect());
        assert!(rotation_symmetry_residual(&s, 3).unwrap() < 1e-15);
        assert!(rotation_symmetry_residual(&s, 4).unwrap() > 0.1);
        assert!(conjugation_residual(&s).unwrap() < 1e-15);
    }
}

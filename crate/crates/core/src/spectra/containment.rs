use num_complex::Complex;
use serde::{Deserialize, Serialize};

use super::Spectrum;
use crate::boundary::BoundaryCurve;
use crate::ensemble::SparseDigraph;
use crate::error::{Error, Result};
use crate::scalar::{lit, Scalar};

/// Matching radius for outliers and exclusions.
const OUTLIER_TOL: f64 = 1e-6;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ContainmentReport<T> {
    pub total: usize,
    pub inside: usize,
    pub outside: usize,
    pub excluded_outliers: Vec<Complex<T>>,
    /// Largest distance of a counted outside eigenvalue from the inflated
    /// curve, in units of its mean radius; 0 when nothing lies outside.
    pub worst_violation: T,
    pub inflation: T,
}

impl<T: Scalar> ContainmentReport<T> {
    /// `inside / (total - excluded)`.
    pub fn inside_fraction(&self) -> f64 {
        let counted = self.inside + self.outside;
        if counted == 0 {
            return 1.0;
        }
        self.inside as f64 / counted as f64
    }
}

/// Winding number of the closed polygon `poly` around `p`.
pub fn winding_number<T: Scalar>(poly: &[Complex<T>], p: Complex<T>) -> i32 {
    let n = poly.len();
    let mut w = 0;
    for i in 0..n {
        let a = poly[i];
        let b = poly[(i + 1) % n];
        let cross = (b.re - a.re) * (p.im - a.im) - (p.re - a.re) * (b.im - a.im);
        if a.im <= p.im {
            if b.im > p.im && cross > T::zero() {
                w += 1;
            }
        } else if b.im <= p.im && cross < T::zero() {
            w -= 1;
        }
    }
    w
}

fn segment_distance<T: Scalar>(a: Complex<T>, b: Complex<T>, p: Complex<T>) -> T {
    let ab = b - a;
    let len2 = ab.norm_sqr();
    let s = if len2 > T::zero() {
        (((p - a).re * ab.re + (p - a).im * ab.im) / len2).max(T::zero()).min(T::one())
    } else {
        T::zero()
    };
    (a + ab * s - p).norm()
}

fn polygon_distance<T: Scalar>(poly: &[Complex<T>], p: Complex<T>) -> T {
    (0..poly.len())
        .map(|i| segment_distance(poly[i], poly[(i + 1) % poly.len()], p))
        .fold(T::infinity(), T::min)
}

/// Counts eigenvalues inside `curve` scaled by `1 + inflation` about its
/// centroid, by the nonzero winding rule. Each entry of `exclusions` removes
/// the nearest eigenvalue within `1e-6` before counting.
pub fn containment<T: Scalar>(
    s: &Spectrum<T>,
    curve: &BoundaryCurve<T>,
    inflation: T,
    exclusions: &[Complex<T>],
) -> Result<ContainmentReport<T>> {
    if s.is_empty() {
        return Err(Error::input("spectrum is empty"));
    }
    if !(inflation >= T::zero()) {
        return Err(Error::input(format!("inflation must be >= 0, got {inflation}")));
    }
    if curve.len() < 3 {
        return Err(Error::input("boundary curve has fewer than 3 samples"));
    }
    let mut excluded = vec![false; s.len()];
    let mut excluded_outliers = Vec::new();
    for &x in exclusions {
        let nearest = s
            .eigenvalues
            .iter()
            .enumerate()
            .filter(|(i, _)| !excluded[*i])
            .map(|(i, z)| (i, (z - x).norm()))
            .min_by(|a, b| a.1.partial_cmp(&b.1).unwrap());
        if let Some((i, dist)) = nearest {
            if dist <= lit(OUTLIER_TOL) {
                excluded[i] = true;
                excluded_outliers.push(s.eigenvalues[i]);
            }
        }
    }
    let poly = curve.inflated_points(inflation);
    let centroid = curve.centroid();
    let n: T = lit(poly.len() as f64);
    let radius = poly.iter().map(|z| (z - centroid).norm()).sum::<T>() / n;
    let (mut inside, mut outside) = (0, 0);
    let mut worst = T::zero();
    for (z, _) in s.eigenvalues.iter().zip(&excluded).filter(|(_, &e)| !e) {
        if winding_number(&poly, *z) != 0 {
            inside += 1;
        } else {
            outside += 1;
            worst = worst.max(polygon_distance(&poly, *z) / radius);
        }
    }
    Ok(ContainmentReport {
        total: s.len(),
        inside,
        outside,
        excluded_outliers,
        worst_violation: worst,
        inflation,
    })
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Eigenvalues forced by constant row sums: when every row of `scale * A(g)`
/// sums to `r`, the spectrum contains `r` and, when all cycle lengths share
/// the divisor `q`, its rotations `r e^{2 pi i j / q}`. Returns the spectrum
/// entries within `1e-6` of those points, or nothing if row sums vary.
pub fn detect_deterministic_outliers<T: Scalar>(
    s: &Spectrum<T>,
    g: &SparseDigraph<T>,
    scale: T,
) -> Vec<Complex<T>> {
    let sums = g.row_sums();
    let Some(&r0) = sums.first() else { return Vec::new() };
    let spread = lit::<T>(1e-9) * (T::one() + r0.abs());
    if sums.iter().any(|&r| (r - r0).abs() > spread) || r0 == T::zero() {
        return Vec::new();
    }
    let r = r0 * scale;
    let q = g.cycle_lengths().fold(0, gcd).max(1);
    let targets: Vec<Complex<T>> = (0..q)
        .map(|j| Complex::from_polar(r, T::TAU() * lit(j as f64) / lit(q as f64)))
        .collect();
    s.eigenvalues
        .iter()
        .filter(|z| targets.iter().any(|t| (*z - t).norm() <= lit(OUTLIER_TOL)))
        .copied()
        .collect()
}

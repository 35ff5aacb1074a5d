use std::collections::BTreeMap;

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use super::{BoundaryCurve, BoundaryLaw};
use crate::error::{Error, Result};
use crate::scalar::{cis, lit, Scalar};

/// Single correlation order: `z(phi) = e^{-i phi} + rho e^{i (k-1) phi}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HypotrochoidParams<T> {
    pub k: usize,
    pub rho: T,
}

/// Several orders: `z(phi) = e^{-i phi} + sum_k rho_k e^{i (k-1) phi}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PolytrochoidParams<T> {
    pub terms: BTreeMap<usize, T>,
}

impl<T: Scalar> HypotrochoidParams<T> {
    pub fn new(k: usize, rho: T) -> Result<Self> {
        if k < 2 {
            return Err(Error::spec(format!("correlation order must be >= 2, got {k}")));
        }
        if !rho.is_finite() {
            return Err(Error::spec("rho must be finite"));
        }
        Ok(HypotrochoidParams { k, rho })
    }
}

impl<T: Scalar> From<&HypotrochoidParams<T>> for PolytrochoidParams<T> {
    fn from(p: &HypotrochoidParams<T>) -> Self {
        PolytrochoidParams { terms: BTreeMap::from([(p.k, p.rho)]) }
    }
}

impl<T: Scalar> PolytrochoidParams<T> {
    pub fn new(terms: impl IntoIterator<Item = (usize, T)>) -> Result<Self> {
        let terms: BTreeMap<usize, T> = terms.into_iter().collect();
        if terms.is_empty() {
            return Err(Error::spec("a polytrochoid needs at least one term"));
        }
        if let Some((&k, _)) = terms.iter().find(|(&k, r)| k < 2 || !r.is_finite()) {
            return Err(Error::spec(format!("invalid polytrochoid term for k = {k}")));
        }
        Ok(PolytrochoidParams { terms })
    }

    pub fn single(k: usize, rho: T) -> Result<Self> {
        Self::new([(k, rho)])
    }

    /// Same orders with every `rho_k` multiplied by `s`.
    pub fn scaled_rhos(&self, s: T) -> Self {
        PolytrochoidParams { terms: self.terms.iter().map(|(&k, &r)| (k, r * s)).collect() }
    }

    pub fn point(&self, phi: T) -> Complex<T> {
        let mut z = cis(-phi);
        for (&k, &rho) in &self.terms {
            z = z + cis(phi * lit((k - 1) as f64)) * rho;
        }
        z
    }

    /// `dz/dphi`.
    pub fn velocity(&self, phi: T) -> Complex<T> {
        let i = Complex::new(T::zero(), T::one());
        let mut v = -i * cis(-phi);
        for (&k, &rho) in &self.terms {
            let m: T = lit((k - 1) as f64);
            v = v + i * cis(phi * m) * (rho * m);
        }
        v
    }

    /// `f(h) = sum_k rho_k h^{k-1}`, the holomorphic part of the interior
    /// fixed-point equation `z = conj(h) + f(h)`.
    pub fn f(&self, h: Complex<T>) -> Complex<T> {
        self.terms
            .iter()
            .fold(Complex::new(T::zero(), T::zero()), |acc, (&k, &rho)| acc + h.powu((k - 1) as u32) * rho)
    }

    pub fn f_prime(&self, h: Complex<T>) -> Complex<T> {
        self.terms.iter().fold(Complex::new(T::zero(), T::zero()), |acc, (&k, &rho)| {
            let m = (k - 1) as u32;
            if m == 0 {
                acc
            } else {
                acc + h.powu(m - 1) * (rho * lit(m as f64))
            }
        })
    }
}

pub fn dense_hypotrochoid<T: Scalar>(
    params: &HypotrochoidParams<T>,
    n_samples: usize,
) -> Result<BoundaryCurve<T>> {
    let p = HypotrochoidParams::new(params.k, params.rho)?;
    let m: T = lit((p.k - 1) as f64);
    BoundaryCurve::from_fn(n_samples, BoundaryLaw::DenseHypotrochoid(p.clone()), |phi| {
        cis(-phi) + cis(phi * m) * p.rho
    })
}

pub fn dense_polytrochoid<T: Scalar>(
    params: &PolytrochoidParams<T>,
    n_samples: usize,
) -> Result<BoundaryCurve<T>> {
    let p = PolytrochoidParams::new(params.terms.clone())?;
    BoundaryCurve::from_fn(n_samples, BoundaryLaw::DensePolytrochoid(p.clone()), |phi| p.point(phi))
}

/// `|rho_k| (k - 1)` at which a single-order hypotrochoid first develops
/// cusps; beyond it the curve has self-intersecting loops.
pub fn cusp_threshold<T: Scalar>(k: usize) -> T {
    T::one() / lit((k - 1) as f64)
}

/// Smallest `|dz/dphi|` over `n_samples` uniformly spaced parameters.
pub fn min_speed<T: Scalar>(params: &PolytrochoidParams<T>, n_samples: usize) -> T {
    super::sample_phis::<T>(n_samples)
        .map(|phi| params.velocity(phi).norm())
        .fold(T::infinity(), T::min)
}

fn orient<T: Scalar>(a: Complex<T>, b: Complex<T>, c: Complex<T>) -> T {
    (b - a).re * (c - a).im - (b - a).im * (c - a).re
}

fn segments_cross<T: Scalar>(a: Complex<T>, b: Complex<T>, c: Complex<T>, d: Complex<T>) -> bool {
    let o1 = orient(a, b, c);
    let o2 = orient(a, b, d);
    let o3 = orient(c, d, a);
    let o4 = orient(c, d, b);
    o1 * o2 < T::zero() && o3 * o4 < T::zero()
}

/// Number of properly crossing pairs of non-adjacent polygon edges.
pub fn self_intersections<T: Scalar>(curve: &BoundaryCurve<T>) -> usize {
    let pts = curve.points();
    let n = pts.len();
    if n < 4 {
        return 0;
    }
    let seg = |i: usize| (pts[i], pts[(i + 1) % n]);
    let bbox = |(a, b): (Complex<T>, Complex<T>)| {
        (a.re.min(b.re), a.re.max(b.re), a.im.min(b.im), a.im.max(b.im))
    };
    let boxes: Vec<_> = (0..n).map(|i| bbox(seg(i))).collect();
    let mut count = 0;
    for i in 0..n {
        for j in i + 2..n {
            if i == 0 && j == n - 1 {
                continue;
            }
            let (bi, bj) = (boxes[i], boxes[j]);
            if bi.1 < bj.0 || bj.1 < bi.0 || bi.3 < bj.2 || bj.3 < bi.2 {
                continue;
            }
            let (a, b) = seg(i);
            let (c, d) = seg(j);
            if segments_cross(a, b, c, d) {
                count += 1;
            }
        }
    }
    count
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CurveRegime {
    /// Simple closed curve with nonvanishing velocity.
    Smooth,
    /// Velocity vanishes (to `speed_tol`) without self-intersection.
    Cusped,
    /// Past the cusp threshold: the curve crosses itself.
    Looped,
}

/// Classifies a sampled polytrochoid from its geometry alone.
pub fn classify_curve<T: Scalar>(
    params: &PolytrochoidParams<T>,
    n_samples: usize,
    speed_tol: T,
) -> Result<CurveRegime> {
    let curve = dense_polytrochoid(params, n_samples)?;
    Ok(if self_intersections(&curve) > 0 {
        CurveRegime::Looped
    } else if min_speed(params, n_samples) <= speed_tol {
        CurveRegime::Cusped
    } else {
        CurveRegime::Smooth
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn evaluates_at_zero() {
        let c = dense_hypotrochoid(&HypotrochoidParams { k: 3, rho: 0.5 }, 512).unwrap();
        assert!((c.samples[0].z - Complex::new(1.5, 0.0)).norm() < 1e-15);
        let p = PolytrochoidParams::new([(3, 0.2), (4, 0.2)]).unwrap();
        let c = dense_polytrochoid(&p, 512).unwrap();
        assert!((c.samples[0].z - Complex::new(1.4, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn too_few_samples() {
        assert!(dense_hypotrochoid(&HypotrochoidParams { k: 3, rho: 0.5 }, 100).is_err());
        assert!(PolytrochoidParams::<f64>::new([]).is_err());
    }

    #[test]
    fn single_term_polytrochoid_is_hypotrochoid() {
        let h = dense_hypotrochoid(&HypotrochoidParams { k: 5, rho: 0.075 }, 1024).unwrap();
        let p = dense_polytrochoid(&PolytrochoidParams::single(5, 0.075).unwrap(), 1024).unwrap();
        for (a, b) in h.samples.iter().zip(&p.samples) {
            assert!((a.z - b.z).norm() < 1e-14);
        }
    }

    #[test]
    fn zero_terms_give_unit_circle() {
        let p = PolytrochoidParams::new([(3, 0.0f64), (4, 0.0)]).unwrap();
        let c = dense_polytrochoid(&p, 512).unwrap();
        assert!(c.samples.iter().all(|s| (s.z.norm() - 1.0).abs() < 1e-14));
    }

    #[test]
    fn order_two_is_the_ellipse() {
        let rho: f64 = 0.3;
        let c = dense_hypotrochoid(&HypotrochoidParams { k: 2, rho }, 2048).unwrap();
        let (a, b) = (1.0 + rho, 1.0 - rho);
        let focus = 2.0 * rho.sqrt();
        assert!(((a * a - b * b).sqrt() - focus).abs() < 1e-12);
        for s in &c.samples {
            let e = (s.z.re / a).powi(2) + (s.z.im / b).powi(2);
            assert!((e - 1.0).abs() < 1e-12);
            // sum of focal distances is the major axis
            let d = (s.z - Complex::new(focus, 0.0)).norm() + (s.z + Complex::new(focus, 0.0)).norm();
            assert!((d - 2.0 * a).abs() < 1e-12);
        }
    }

    #[test]
    fn k_fold_symmetry() {
        for (k, rho) in [(3, 0.3), (4, -0.2), (5, 0.075), (6, 0.5)] {
            let p = PolytrochoidParams::single(k, rho).unwrap();
            let w = cis(-2.0 * PI / k as f64);
            for j in 0..64 {
                let phi = j as f64 * 0.1;
                let lhs = p.point(phi + 2.0 * PI / k as f64);
                assert!((lhs - w * p.point(phi)).norm() < 1e-14);
            }
        }
    }

    #[test]
    fn cusp_threshold_detection() {
        for k in [3usize, 4, 5] {
            let t: f64 = cusp_threshold(k);
            let below = PolytrochoidParams::single(k, t - 1e-3).unwrap();
            let above = PolytrochoidParams::single(k, t + 1e-3).unwrap();
            let at = PolytrochoidParams::single(k, t).unwrap();
            assert_eq!(classify_curve(&below, 8192, 1e-9).unwrap(), CurveRegime::Smooth, "k={k}");
            assert_eq!(classify_curve(&above, 8192, 1e-9).unwrap(), CurveRegime::Looped, "k={k}");
            assert!(min_speed(&at, 8192 * k) < 1e-9);
            assert!(min_speed(&below, 8192) > 0.9e-3 * (k - 1) as f64);
        }
    }
}

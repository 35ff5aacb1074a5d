use num_complex::Complex;
use serde::{Deserialize, Serialize};

use super::{BoundaryCurve, BoundaryLaw};
use crate::error::{Error, Result};
use crate::scalar::{cis, lit, Scalar};

/// `S(u) = u + u^2 + ... + u^m` and `S'(u)` by Horner's rule.
fn geometric_sum<T: Scalar>(u: T, m: usize) -> (T, T) {
    let mut s = T::zero();
    let mut ds = T::zero();
    for _ in 0..m {
        ds = ds * u + s + T::one();
        s = (s + T::one()) * u;
    }
    (s, ds)
}

/// `d_hat * sum_{j=1}^{k-1} t^{2j} - 1`.
pub fn segment_depth_residual<T: Scalar>(d_hat: T, k: usize, t: T) -> T {
    d_hat * geometric_sum(t * t, k - 1).0 - T::one()
}

/// `d_hat t^{2k} - (d_hat + 1) t^2 + 1`, which vanishes at the segment depth
/// and also at the spurious root `t = 1`.
pub fn printed_polynomial_residual<T: Scalar>(d_hat: T, k: usize, t: T) -> T {
    let u = t * t;
    d_hat * u.powi(k as i32) - (d_hat + T::one()) * u + T::one()
}

/// Positive root `t` of `d_hat * sum_{j=1}^{k-1} t^{2j} = 1`.
///
/// The left side is increasing in `u = t^2` and spans `(0, inf)`, so the root
/// is bracketed by doubling, bisected, then polished with Newton in `u`.
pub fn solve_segment_depth<T: Scalar>(d_hat: T, k: usize) -> Result<T> {
    if !(d_hat > T::zero()) || !d_hat.is_finite() {
        return Err(Error::spec(format!("d_hat must be positive, got {d_hat}")));
    }
    if k < 2 {
        return Err(Error::spec(format!("cycle length must be >= 2, got {k}")));
    }
    let m = k - 1;
    let g = |u: T| {
        let (s, ds) = geometric_sum(u, m);
        (d_hat * s - T::one(), d_hat * ds)
    };
    let mut hi = T::one();
    while g(hi).0 < T::zero() {
        hi = hi * lit(2.0);
    }
    let mut lo = T::zero();
    for _ in 0..200 {
        let mid = (lo + hi) * lit(0.5);
        if mid <= lo || mid >= hi {
            break;
        }
        if g(mid).0 < T::zero() {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= hi * lit(1e-6) {
            break;
        }
    }
    let mut u = (lo + hi) * lit(0.5);
    for _ in 0..50 {
        let (r, dr) = g(u);
        if r == T::zero() {
            break;
        }
        if r < T::zero() {
            lo = u;
        } else {
            hi = u;
        }
        let next = u - r / dr;
        let next = if next >= lo && next <= hi { next } else { (lo + hi) * lit(0.5) };
        let done = (next - u).abs() <= T::epsilon() * u;
        u = next;
        if done {
            break;
        }
    }
    let u = [lo, hi]
        .into_iter()
        .fold(u, |best, c| if g(c).0.abs() < g(best).0.abs() { c } else { best });
    Ok(u.sqrt())
}

/// Sparse cycle digraph law: `z(phi) = w [ e^{-i phi} / t + d_hat t^{k-1} e^{i (k-1) phi} ]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SparseCyclicParams<T> {
    /// Degree-biased cycle count: `d - 1` on regular graphs, the mean degree on
    /// Poisson graphs.
    pub d_hat: T,
    pub k: usize,
    pub weight: T,
    /// Segment depth, solved on construction.
    pub t: T,
}

impl<T: Scalar> SparseCyclicParams<T> {
    pub fn new(d_hat: T, k: usize, weight: T) -> Result<Self> {
        if !weight.is_finite() || weight == T::zero() {
            return Err(Error::spec(format!("weight must be finite and nonzero, got {weight}")));
        }
        let t = solve_segment_depth(d_hat, k)?;
        Ok(SparseCyclicParams { d_hat, k, weight, t })
    }

    /// Every node in exactly `d` cycles.
    pub fn regular(d: usize, k: usize, weight: T) -> Result<Self> {
        if d < 2 {
            return Err(Error::spec(format!("regular law needs d >= 2, got {d}")));
        }
        Self::new(lit((d - 1) as f64), k, weight)
    }

    pub fn poisson(mean_degree: T, k: usize, weight: T) -> Result<Self> {
        Self::new(mean_degree, k, weight)
    }

    pub fn point(&self, phi: T) -> Complex<T> {
        let m: T = lit((self.k - 1) as f64);
        (cis(-phi) / self.t + cis(phi * m) * (self.d_hat * self.t.powi(self.k as i32 - 1)))
            * self.weight
    }
}

pub fn sparse_hypotrochoid<T: Scalar>(
    params: &SparseCyclicParams<T>,
    n_samples: usize,
) -> Result<BoundaryCurve<T>> {
    let p = params.clone();
    BoundaryCurve::from_fn(n_samples, BoundaryLaw::SparseHypotrochoid(params.clone()), |phi| {
        p.point(phi)
    })
}

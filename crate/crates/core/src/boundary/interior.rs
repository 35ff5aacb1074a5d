use num_complex::Complex;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{BoundaryCurve, PolytrochoidParams};
use crate::error::{Error, Result};
use crate::scalar::{lit, tol, Scalar};

/// Continuation steps in the correlation strength.
const BRANCH_STEPS: usize = 32;
/// Largest accepted Newton step in `h`.
const TRUST_RADIUS: f64 = 0.5;

/// Solution of `z = conj(h) + f(h)` inside the support, with the local density.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GreensFixedPoint<T> {
    pub z: Complex<T>,
    pub h: Complex<T>,
    /// Eigenvalue density per unit area, `(1/pi) Re dh/dz*`.
    pub mu: T,
}

/// Newton solve of `conj(h) + s f(h) = z` from `h0`.
fn newton<T: Scalar>(
    params: &PolytrochoidParams<T>,
    s: T,
    z: Complex<T>,
    h0: Complex<T>,
) -> Option<Complex<T>> {
    let target = tol::<T>(1e-13) * (T::one() + z.norm());
    let mut h = h0;
    for _ in 0..60 {
        let g = h.conj() + params.f(h) * s - z;
        if g.norm() <= target {
            return Some(h);
        }
        let fp = params.f_prime(h) * s;
        let (p, q) = (fp.re, fp.im);
        // real Jacobian of (Re g, Im g) in (Re h, Im h)
        let (a, b, c, d) = (T::one() + p, -q, q, p - T::one());
        let det = a * d - b * c;
        if det == T::zero() || !det.is_finite() {
            return None;
        }
        let dx = -(d * g.re - b * g.im) / det;
        let dy = -(-c * g.re + a * g.im) / det;
        let step = Complex::new(dx, dy);
        if step.norm() > lit(TRUST_RADIUS) {
            return None;
        }
        h = h + step;
    }
    let g = h.conj() + params.f(h) * s - z;
    (g.norm() <= tol::<T>(1e-10) * (T::one() + z.norm())).then_some(h)
}

/// Branch of `z = conj(h) + f(h)` continued from `h = conj(z)` at zero
/// correlation; `None` if tracking fails.
fn track_branch<T: Scalar>(params: &PolytrochoidParams<T>, z: Complex<T>) -> Option<Complex<T>> {
    let mut h = z.conj();
    for j in 1..=BRANCH_STEPS {
        let s = lit::<T>(j as f64) / lit(BRANCH_STEPS as f64);
        h = newton(params, s, z, h)?;
    }
    Some(h)
}

fn density_at<T: Scalar>(
    params: &PolytrochoidParams<T>,
    z: Complex<T>,
    h: Complex<T>,
    step: T,
) -> Result<T> {
    let solve = |dz: Complex<T>| newton(params, T::one(), z + dz, h).ok_or(Error::OutsideSupport);
    let dx = Complex::new(step, T::zero());
    let dy = Complex::new(T::zero(), step);
    let two_step = step * lit(2.0);
    let d_x: Complex<T> = (solve(dx)? - solve(-dx)?) / two_step;
    let d_y = (solve(dy)? - solve(-dy)?) / two_step;
    let i = Complex::new(T::zero(), T::one());
    let dh_dzbar = (d_x + i * d_y) * lit::<T>(0.5);
    Ok(dh_dzbar.re / T::PI())
}

/// Fixed point and density at `z`, or [`Error::OutsideSupport`] when the
/// tracked branch has `|h| > 1` or cannot be followed.
pub fn interior_fixed_point<T: Scalar>(
    z: Complex<T>,
    params: &PolytrochoidParams<T>,
) -> Result<GreensFixedPoint<T>> {
    let step = lit::<T>(1e-5).max(T::epsilon().cbrt());
    fixed_point_with_step(z, params, step)
}

fn fixed_point_with_step<T: Scalar>(
    z: Complex<T>,
    params: &PolytrochoidParams<T>,
    step: T,
) -> Result<GreensFixedPoint<T>> {
    let h = track_branch(params, z).ok_or(Error::OutsideSupport)?;
    if h.norm() > T::one() + tol::<T>(1e-9) {
        return Err(Error::OutsideSupport);
    }
    let mu = density_at(params, z, h, step)?;
    Ok(GreensFixedPoint { z, h, mu })
}

/// Cell-centred rectangular grid.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridSpec<T> {
    pub re_min: T,
    pub re_max: T,
    pub im_min: T,
    pub im_max: T,
    pub nx: usize,
    pub ny: usize,
}

impl<T: Scalar> GridSpec<T> {
    /// Grid over the curve's bounding box enlarged by `margin` on each side.
    pub fn covering(curve: &BoundaryCurve<T>, nx: usize, ny: usize, margin: T) -> Self {
        let (a, b, c, d) = curve.bounding_box();
        GridSpec { re_min: a - margin, re_max: b + margin, im_min: c - margin, im_max: d + margin, nx, ny }
    }

    fn validate(&self) -> Result<()> {
        let ok = self.nx > 0
            && self.ny > 0
            && self.re_max > self.re_min
            && self.im_max > self.im_min
            && self.re_min.is_finite()
            && self.re_max.is_finite()
            && self.im_min.is_finite()
            && self.im_max.is_finite();
        if !ok {
            return Err(Error::input("grid must have positive extent and cell counts"));
        }
        Ok(())
    }

    pub fn dx(&self) -> T {
        (self.re_max - self.re_min) / lit(self.nx as f64)
    }

    pub fn dy(&self) -> T {
        (self.im_max - self.im_min) / lit(self.ny as f64)
    }

    pub fn cell_area(&self) -> T {
        self.dx() * self.dy()
    }

    pub fn diagonal(&self) -> T {
        (self.re_max - self.re_min).hypot(self.im_max - self.im_min)
    }

    pub fn point(&self, ix: usize, iy: usize) -> Complex<T> {
        let half: T = lit(0.5);
        Complex::new(
            self.re_min + self.dx() * (lit::<T>(ix as f64) + half),
            self.im_min + self.dy() * (lit::<T>(iy as f64) + half),
        )
    }

    /// True when every sample of `curve` lies inside the grid rectangle.
    pub fn covers(&self, curve: &BoundaryCurve<T>) -> bool {
        let (a, b, c, d) = curve.bounding_box();
        a >= self.re_min && b <= self.re_max && c >= self.im_min && d <= self.im_max
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DensityPoint<T> {
    pub z: Complex<T>,
    pub mu: T,
    pub inside: bool,
}

/// Density on a grid, row by row in increasing imaginary part.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DensityField<T> {
    pub grid: GridSpec<T>,
    pub points: Vec<DensityPoint<T>>,
}

impl<T: Scalar> DensityField<T> {
    /// Midpoint-rule integral of the density.
    pub fn integral(&self) -> T {
        self.points.iter().map(|p| p.mu).sum::<T>() * self.grid.cell_area()
    }

    pub fn interior(&self) -> impl Iterator<Item = &DensityPoint<T>> {
        self.points.iter().filter(|p| p.inside)
    }
}

/// Density field on `grid`; points outside the support get `mu = 0`. Finite
/// differences use a step of 1/256 of the grid diagonal.
pub fn interior_density<T: Scalar>(
    params: &PolytrochoidParams<T>,
    grid: &GridSpec<T>,
) -> Result<DensityField<T>> {
    grid.validate()?;
    let step = grid.diagonal() / lit(256.0);
    let rows: Vec<Vec<DensityPoint<T>>> = (0..grid.ny)
        .into_par_iter()
        .map(|iy| {
            (0..grid.nx)
                .map(|ix| {
                    let z = grid.point(ix, iy);
                    match fixed_point_with_step(z, params, step) {
                        Ok(fp) => Ok(DensityPoint { z, mu: fp.mu, inside: true }),
                        Err(Error::OutsideSupport) => Ok(DensityPoint { z, mu: T::zero(), inside: false }),
                        Err(e) => Err(e),
                    }
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<_>>()?;
    Ok(DensityField { grid: grid.clone(), points: rows.into_iter().flatten().collect() })
}

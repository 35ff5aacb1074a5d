//! Predicted spectral boundaries and interior densities.
//!
//! All curves are sampled at `phi_j = 2 pi j / N`, `j = 0..N`; the sample list
//! is implicitly closed (the last sample connects back to the first).

mod hypotrochoid;
mod interior;
mod mixed;
mod sparse;

pub use hypotrochoid::{
    classify_curve, cusp_threshold, dense_hypotrochoid, dense_polytrochoid, min_speed,
    self_intersections, CurveRegime, HypotrochoidParams, PolytrochoidParams,
};
pub use interior::{
    interior_density, interior_fixed_point, DensityField, DensityPoint, GreensFixedPoint, GridSpec,
};
pub use mixed::{
    mixed_cycle_asymptotic, mixed_cycle_boundary, mixed_cycle_solve, ContinuationDiagnostics,
    MixedCycleParams, MixedSolution, MixedSpecies,
};
pub use sparse::{
    printed_polynomial_residual, segment_depth_residual, solve_segment_depth, sparse_hypotrochoid,
    SparseCyclicParams,
};

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{lit, Scalar};

/// Fewest samples a boundary curve may carry.
pub const MIN_SAMPLES: usize = 512;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CurveSample<T> {
    pub phi: T,
    pub z: Complex<T>,
}

/// Parameter record of the law that produced a curve.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "law", rename_all = "kebab-case")]
pub enum BoundaryLaw<T> {
    DenseHypotrochoid(HypotrochoidParams<T>),
    DensePolytrochoid(PolytrochoidParams<T>),
    SparseHypotrochoid(SparseCyclicParams<T>),
    MixedCycle { params: MixedCycleParams<T>, diagnostics: ContinuationDiagnostics },
    MixedAsymptotic(MixedCycleParams<T>),
    Scaled { factor: T, inner: Box<BoundaryLaw<T>> },
}

/// Closed parametric curve `z(phi)` in the complex plane.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundaryCurve<T> {
    pub samples: Vec<CurveSample<T>>,
    pub law: BoundaryLaw<T>,
}

pub(crate) fn check_samples(n_samples: usize) -> Result<()> {
    if n_samples < MIN_SAMPLES {
        return Err(Error::input(format!(
            "boundary curves need at least {MIN_SAMPLES} samples, got {n_samples}"
        )));
    }
    Ok(())
}

pub(crate) fn sample_phis<T: Scalar>(n_samples: usize) -> impl Iterator<Item = T> {
    let step = T::TAU() / lit(n_samples as f64);
    (0..n_samples).map(move |j| step * lit(j as f64))
}

impl<T: Scalar> BoundaryCurve<T> {
    pub fn from_fn(
        n_samples: usize,
        law: BoundaryLaw<T>,
        f: impl Fn(T) -> Complex<T>,
    ) -> Result<Self> {
        check_samples(n_samples)?;
        let samples = sample_phis(n_samples).map(|phi| CurveSample { phi, z: f(phi) }).collect();
        Ok(BoundaryCurve { samples, law })
    }

    pub fn points(&self) -> Vec<Complex<T>> {
        self.samples.iter().map(|s| s.z).collect()
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    /// Mean of the sample points.
    pub fn centroid(&self) -> Complex<T> {
        let n: T = lit(self.samples.len().max(1) as f64);
        self.samples.iter().fold(Complex::new(T::zero(), T::zero()), |acc, s| acc + s.z) / n
    }

    /// Mean distance of the samples from the centroid.
    pub fn mean_radius(&self) -> T {
        let c = self.centroid();
        let n: T = lit(self.samples.len().max(1) as f64);
        self.samples.iter().map(|s| (s.z - c).norm()).sum::<T>() / n
    }

    /// Largest sample modulus.
    pub fn max_modulus(&self) -> T {
        self.samples.iter().map(|s| s.z.norm()).fold(T::zero(), T::max)
    }

    /// Curve scaled about the origin; used with rescaled adjacency matrices.
    pub fn scaled(&self, factor: T) -> Self {
        BoundaryCurve {
            samples: self
                .samples
                .iter()
                .map(|s| CurveSample { phi: s.phi, z: s.z * factor })
                .collect(),
            law: BoundaryLaw::Scaled { factor, inner: Box::new(self.law.clone()) },
        }
    }

    /// Sample points scaled by `1 + inflation` about the centroid.
    pub fn inflated_points(&self, inflation: T) -> Vec<Complex<T>> {
        let c = self.centroid();
        let f = T::one() + inflation;
        self.samples.iter().map(|s| c + (s.z - c) * f).collect()
    }

    /// Axis-aligned bounding box `(re_min, re_max, im_min, im_max)`.
    pub fn bounding_box(&self) -> (T, T, T, T) {
        let mut bb = (T::infinity(), T::neg_infinity(), T::infinity(), T::neg_infinity());
        for s in &self.samples {
            bb.0 = bb.0.min(s.z.re);
            bb.1 = bb.1.max(s.z.re);
            bb.2 = bb.2.min(s.z.im);
            bb.3 = bb.3.max(s.z.im);
        }
        bb
    }
}

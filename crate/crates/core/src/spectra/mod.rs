//! Eigenvalues of sampled ensembles and the checks run against the predicted
//! laws: containment in a boundary curve, rotation symmetry and trace moments.

mod containment;
mod moments;
mod symmetry;
mod walks;

pub use containment::{containment, detect_deterministic_outliers, winding_number, ContainmentReport};
pub use moments::{
    catalan_prefactor, empirical_mixed_moment, empirical_pure_moment, fuss_catalan_prediction,
    printed_mixed_prefactor, pure_moment_from_spectrum, trace_moment, MomentOrder, MomentReport,
};
pub use symmetry::{conjugation_residual, rotation_symmetry_residual, MAX_MATCHING_SIZE};
pub use walks::{brute_force_tree_walks, tree_walk_prediction, MAX_WALK_HALF_LENGTH};

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::ensemble::EnsembleSpec;
use crate::error::{Error, Result};
use crate::matrix::DenseMatrix;
use crate::rng::RandomSeed;
use crate::scalar::{lit, Scalar};

/// Largest matrix handed to the dense eigensolver by default.
pub const DEFAULT_EIGEN_CAP: usize = 4000;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectrumSource<T> {
    pub ensemble: EnsembleSpec<T>,
    pub seed: RandomSeed,
}

/// Eigenvalues sorted by real part, then imaginary part.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Spectrum<T> {
    pub eigenvalues: Vec<Complex<T>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub source: Option<SpectrumSource<T>>,
}

impl<T: Scalar> Spectrum<T> {
    pub fn new(mut eigenvalues: Vec<Complex<T>>) -> Self {
        eigenvalues.sort_by(|a, b| a.re.partial_cmp(&b.re).unwrap().then(a.im.partial_cmp(&b.im).unwrap()));
        Spectrum { eigenvalues, source: None }
    }

    pub fn with_source(mut self, ensemble: EnsembleSpec<T>, seed: RandomSeed) -> Self {
        self.source = Some(SpectrumSource { ensemble, seed });
        self
    }

    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }

    pub fn sum(&self) -> Complex<T> {
        self.eigenvalues.iter().fold(Complex::new(T::zero(), T::zero()), |a, &b| a + b)
    }

    pub fn spectral_radius(&self) -> T {
        self.eigenvalues.iter().map(|z| z.norm()).fold(T::zero(), T::max)
    }
}

pub fn compute_eigenvalues<T: Scalar>(m: &DenseMatrix<T>) -> Result<Spectrum<T>> {
    compute_eigenvalues_capped(m, DEFAULT_EIGEN_CAP)
}

/// Dense nonsymmetric eigensolve (Hessenberg reduction plus shifted QR).
pub fn compute_eigenvalues_capped<T: Scalar>(m: &DenseMatrix<T>, cap: usize) -> Result<Spectrum<T>> {
    let n = m.n();
    if n > cap {
        return Err(Error::ComplexityGuard(format!("n = {n} exceeds the eigensolver cap {cap}")));
    }
    if !m.is_finite() {
        return Err(Error::input("matrix has non-finite entries"));
    }
    let eig = T::dense_eigenvalues(n, m.as_slice())
        .map_err(|reason| Error::EigensolverFailure { n, reason })?;
    if eig.len() != n || eig.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::EigensolverFailure {
            n,
            reason: format!("returned {} eigenvalues, some non-finite", eig.len()),
        });
    }
    let spectrum = Spectrum::new(eig);
    let gap = (spectrum.sum() - Complex::new(m.trace(), T::zero())).norm();
    let allowed = crate::scalar::tol::<T>(1e-6) * lit((n.max(1)) as f64);
    if gap > allowed {
        return Err(Error::EigensolverFailure {
            n,
            reason: format!("eigenvalue sum differs from the trace by {gap}"),
        });
    }
    Ok(spectrum)
}

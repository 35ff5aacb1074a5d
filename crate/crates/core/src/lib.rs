//! Random matrices and digraphs with cyclic (order-k) correlations, the
//! hypotrochoid and polytrochoid curves that bound their spectra, and the
//! numerical machinery used to check one against the other.
//!
//! Everything numeric is generic over [`Scalar`] (implemented for `f32` and
//! `f64`). The `*64` aliases below are the types the CLI works with.

pub mod boundary;
pub mod ensemble;
pub mod error;
pub mod io;
pub mod matrix;
pub mod rng;
pub mod scalar;
pub mod spectra;

pub use error::{Error, Result};
pub use matrix::DenseMatrix;
pub use rng::RandomSeed;
pub use scalar::Scalar;

pub use num_complex::Complex;

pub type DenseMatrix64 = matrix::DenseMatrix<f64>;
pub type DenseMatrix32 = matrix::DenseMatrix<f32>;
pub type SparseDigraph64 = ensemble::SparseDigraph<f64>;
pub type SparseDigraph32 = ensemble::SparseDigraph<f32>;
pub type BoundaryCurve64 = boundary::BoundaryCurve<f64>;
pub type BoundaryCurve32 = boundary::BoundaryCurve<f32>;
pub type Spectrum64 = spectra::Spectrum<f64>;
pub type Spectrum32 = spectra::Spectrum<f32>;
pub type EnsembleSpec64 = ensemble::EnsembleSpec<f64>;
pub type Complex64 = Complex<f64>;

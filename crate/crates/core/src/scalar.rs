use std::fmt::{Debug, Display};
use std::iter::Sum;
use std::str::FromStr;

use num_complex::Complex;
use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};
use serde::de::DeserializeOwned;
use serde::Serialize;

/// Real floating-point scalar the whole crate is generic over.
pub trait Scalar:
    Float
    + FloatConst
    + FromPrimitive
    + ToPrimitive
    + Sum
    + Default
    + Debug
    + Display
    + FromStr
    + Send
    + Sync
    + Serialize
    + DeserializeOwned
    + 'static
{
    /// Eigenvalues of a dense real `n x n` matrix stored row-major.
    fn dense_eigenvalues(n: usize, row_major: &[Self]) -> Result<Vec<Complex<Self>>, String>;
}

macro_rules! impl_scalar {
    ($t:ty) => {
        impl Scalar for $t {
            fn dense_eigenvalues(
                n: usize,
                row_major: &[Self],
            ) -> Result<Vec<Complex<Self>>, String> {
                let m = faer::Mat::<$t>::from_fn(n, n, |i, j| row_major[i * n + j]);
                m.eigenvalues().map_err(|e| format!("{e:?}"))
            }
        }
    };
}

impl_scalar!(f32);
impl_scalar!(f64);

/// Converts an `f64` constant into `T`.
#[inline]
pub fn lit<T: Scalar>(x: f64) -> T {
    T::from_f64(x).expect("f64 constant representable")
}

/// An absolute tolerance of `x`, floored at a few ulps of `T` so the same
/// code path is meaningful for `f32`.
#[inline]
pub fn tol<T: Scalar>(x: f64) -> T {
    lit::<T>(x).max(T::epsilon() * lit(64.0))
}

#[inline]
pub fn to_f64<T: Scalar>(x: T) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

#[inline]
pub fn cis<T: Scalar>(phi: T) -> Complex<T> {
    Complex::new(phi.cos(), phi.sin())
}

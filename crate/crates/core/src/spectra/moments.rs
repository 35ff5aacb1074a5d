use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

use super::{compute_eigenvalues, Spectrum};
use crate::error::{Error, Result};
use crate::matrix::DenseMatrix;
use crate::scalar::{lit, tol, Scalar};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum MomentOrder {
    /// `Tr M^k / n`.
    Pure { k: usize },
    /// `Tr (M M^T)^l / n`.
    Mixed { l: usize },
}

/// Empirical moment averaged over seeds next to its prediction.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MomentReport<T> {
    pub order: MomentOrder,
    pub empirical: T,
    pub predicted: T,
    /// Standard error of `empirical` over seeds (0 for a single seed).
    pub stderr: T,
    /// Second candidate prediction where two readings of the formula exist.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alternative: Option<T>,
}

impl<T: Scalar> MomentReport<T> {
    pub fn from_samples(order: MomentOrder, samples: &[T], predicted: T) -> Result<Self> {
        if samples.is_empty() {
            return Err(Error::input("no moment samples"));
        }
        let n: T = lit(samples.len() as f64);
        let mean = samples.iter().copied().sum::<T>() / n;
        let stderr = if samples.len() > 1 {
            let var = samples.iter().map(|&x| (x - mean) * (x - mean)).sum::<T>() / (n - T::one());
            (var / n).sqrt()
        } else {
            T::zero()
        };
        Ok(MomentReport { order, empirical: mean, predicted, stderr, alternative: None })
    }

    pub fn with_alternative(mut self, alternative: T) -> Self {
        self.alternative = Some(alternative);
        self
    }

    /// `|empirical - predicted|` in units of the standard error.
    pub fn z_score(&self) -> T {
        (self.empirical - self.predicted).abs() / self.stderr
    }

    pub fn relative_error(&self) -> T {
        (self.empirical - self.predicted).abs() / self.predicted.abs()
    }
}

/// `sum_i lambda_i^k / n`. The imaginary part must vanish (real matrices).
pub fn pure_moment_from_spectrum<T: Scalar>(s: &Spectrum<T>, k: usize) -> Result<T> {
    if k == 0 {
        return Err(Error::input("moment order must be >= 1"));
    }
    if s.is_empty() {
        return Err(Error::input("spectrum is empty"));
    }
    let n: T = lit(s.len() as f64);
    let (mut re, mut im, mut abs) = (T::zero(), T::zero(), T::zero());
    for z in &s.eigenvalues {
        let p = z.powu(k as u32);
        re = re + p.re;
        im = im + p.im;
        abs = abs + p.norm();
    }
    let (re, im, abs) = (re / n, im / n, abs / n);
    if im.abs() > tol::<T>(1e-8) * (T::one() + abs) {
        return Err(Error::input(format!("moment of order {k} has imaginary part {im}")));
    }
    Ok(re)
}

/// `Tr M^k / n` from the eigenvalues of `m`.
pub fn empirical_pure_moment<T: Scalar>(m: &DenseMatrix<T>, k: usize) -> Result<T> {
    pure_moment_from_spectrum(&compute_eigenvalues(m)?, k)
}

/// `Tr M^k / n` by matrix powers, without an eigensolve.
pub fn trace_moment<T: Scalar>(m: &DenseMatrix<T>, k: usize) -> Result<T> {
    if k == 0 {
        return Err(Error::input("moment order must be >= 1"));
    }
    Ok(m.trace_power(k)? / lit(m.n().max(1) as f64))
}

/// `Tr (M M^T)^l / n`; for `l = 1` this is the squared Frobenius norm over `n`.
pub fn empirical_mixed_moment<T: Scalar>(m: &DenseMatrix<T>, l: usize) -> Result<T> {
    let n: T = lit(m.n().max(1) as f64);
    match l {
        0 => Err(Error::input("moment order must be >= 1")),
        1 => Ok(m.frobenius_sq() / n),
        _ => Ok(m.mul_transpose().trace_power(l)? / n),
    }
}

pub(crate) fn binomial(n: u64, k: u64) -> BigUint {
    if k > n {
        return BigUint::from(0u32);
    }
    let k = k.min(n - k);
    let mut acc = BigUint::from(1u32);
    for i in 0..k {
        acc = acc * BigUint::from(n - i) / BigUint::from(i + 1);
    }
    acc
}

fn ratio(num: BigUint, den: u64) -> BigRational {
    BigRational::new(num.into(), BigUint::from(den).into())
}

fn to_scalar<T: Scalar>(r: &BigRational) -> T {
    lit(r.to_f64().unwrap_or(f64::INFINITY))
}

fn check_order(l: usize) -> Result<()> {
    if l == 0 {
        return Err(Error::input("moment order l must be >= 1"));
    }
    Ok(())
}

/// `C(3l, l) / (2l + 1) * rho3^l`, the predicted `Tr M^{3l} / n`.
pub fn fuss_catalan_prediction<T: Scalar>(l: usize, rho3: T) -> Result<T> {
    check_order(l)?;
    let l64 = l as u64;
    let c = ratio(binomial(3 * l64, l64), 2 * l64 + 1);
    Ok(to_scalar::<T>(&c) * rho3.powi(l as i32))
}

/// Catalan number `C(2l, l) / (l + 1)`, the limit of `Tr (M M^T)^l / n` at
/// unit variance.
pub fn catalan_prefactor<T: Scalar>(l: usize) -> Result<T> {
    check_order(l)?;
    let l64 = l as u64;
    Ok(to_scalar(&ratio(binomial(2 * l64, l64), l64 + 1)))
}

/// The alternative reading `C(2l, l) / l`.
pub fn printed_mixed_prefactor<T: Scalar>(l: usize) -> Result<T> {
    check_order(l)?;
    let l64 = l as u64;
    Ok(to_scalar(&ratio(binomial(2 * l64, l64), l64)))
}

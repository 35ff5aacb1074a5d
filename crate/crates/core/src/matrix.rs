use std::ops::{Index, IndexMut};

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Rows below this size are multiplied on the calling thread.
const PAR_MIN_DIM: usize = 128;

/// Square real matrix, row-major. Entry `(u, v)` of an adjacency matrix is the
/// weight of the edge `u -> v`.
#[derive(Clone, Debug, PartialEq)]
pub struct DenseMatrix<T> {
    n: usize,
    data: Vec<T>,
}

impl<T: Scalar> DenseMatrix<T> {
    pub fn zeros(n: usize) -> Self {
        DenseMatrix { n, data: vec![T::zero(); n * n] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m[(i, i)] = T::one();
        }
        m
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut data = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                data.push(f(i, j));
            }
        }
        DenseMatrix { n, data }
    }

    /// Wraps row-major data; rejects non-square lengths and non-finite entries.
    pub fn from_row_major(n: usize, data: Vec<T>) -> Result<Self> {
        if data.len() != n * n {
            return Err(Error::spec(format!(
                "matrix data has {} entries, expected {n}x{n}",
                data.len()
            )));
        }
        if let Some(pos) = data.iter().position(|x| !x.is_finite()) {
            return Err(Error::input(format!(
                "non-finite entry at ({}, {})",
                pos / n.max(1),
                pos % n.max(1)
            )));
        }
        Ok(DenseMatrix { n, data })
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn as_slice(&self) -> &[T] {
        &self.data
    }

    #[inline]
    pub fn as_mut_slice(&mut self) -> &mut [T] {
        &mut self.data
    }

    pub fn into_vec(self) -> Vec<T> {
        self.data
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.n..(i + 1) * self.n]
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|x| x.is_finite())
    }

    pub fn trace(&self) -> T {
        (0..self.n).map(|i| self[(i, i)]).sum()
    }

    /// Sum of squared entries.
    pub fn frobenius_sq(&self) -> T {
        self.data.iter().map(|&x| x * x).sum()
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.n, |i, j| self[(j, i)])
    }

    pub fn scaled(&self, s: T) -> Self {
        DenseMatrix { n: self.n, data: self.data.iter().map(|&x| x * s).collect() }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_same_dim(other)?;
        let data = self.data.iter().zip(&other.data).map(|(&a, &b)| a + b).collect();
        Ok(DenseMatrix { n: self.n, data })
    }

    fn check_same_dim(&self, other: &Self) -> Result<()> {
        if self.n != other.n {
            return Err(Error::input(format!("dimension mismatch: {} vs {}", self.n, other.n)));
        }
        Ok(())
    }

    /// `self * other`. Each output row is accumulated in a fixed order, so the
    /// result does not depend on the thread count.
    pub fn matmul(&self, other: &Self) -> Result<Self> {
        self.check_same_dim(other)?;
        let n = self.n;
        let mut out = vec![T::zero(); n * n];
        let kernel = |(i, out_row): (usize, &mut [T])| {
            let a_row = &self.data[i * n..(i + 1) * n];
            for (k, &a) in a_row.iter().enumerate() {
                if a == T::zero() {
                    continue;
                }
                let b_row = &other.data[k * n..(k + 1) * n];
                for (o, &b) in out_row.iter_mut().zip(b_row) {
                    *o = *o + a * b;
                }
            }
        };
        if n >= PAR_MIN_DIM {
            out.par_chunks_mut(n).enumerate().for_each(kernel);
        } else {
            out.chunks_mut(n.max(1)).enumerate().for_each(kernel);
        }
        Ok(DenseMatrix { n, data: out })
    }

    /// `self * self^T`, symmetric positive semidefinite.
    pub fn mul_transpose(&self) -> Self {
        let n = self.n;
        let mut out = vec![T::zero(); n * n];
        let kernel = |(i, out_row): (usize, &mut [T])| {
            let ri = &self.data[i * n..(i + 1) * n];
            for (j, o) in out_row.iter_mut().enumerate() {
                let rj = &self.data[j * n..(j + 1) * n];
                *o = ri.iter().zip(rj).map(|(&a, &b)| a * b).sum();
            }
        };
        if n >= PAR_MIN_DIM {
            out.par_chunks_mut(n).enumerate().for_each(kernel);
        } else {
            out.chunks_mut(n.max(1)).enumerate().for_each(kernel);
        }
        DenseMatrix { n, data: out }
    }

    /// `Tr(self * other)` without forming the product.
    pub fn trace_of_product(&self, other: &Self) -> Result<T> {
        self.check_same_dim(other)?;
        let n = self.n;
        Ok((0..n)
            .map(|i| (0..n).map(|j| self[(i, j)] * other[(j, i)]).sum::<T>())
            .sum())
    }

    pub fn power(&self, k: usize) -> Result<Self> {
        let mut result = Self::identity(self.n);
        let mut base = self.clone();
        let mut e = k;
        let mut first = true;
        while e > 0 {
            if e & 1 == 1 {
                result = if first { base.clone() } else { result.matmul(&base)? };
                first = false;
            }
            e >>= 1;
            if e > 0 {
                base = base.matmul(&base)?;
            }
        }
        Ok(result)
    }

    /// `Tr(M^k)` by matrix powers, splitting `M^k = M^h * M^(k-h)`.
    pub fn trace_power(&self, k: usize) -> Result<T> {
        match k {
            0 => Ok(T::from_usize(self.n).unwrap()),
            1 => Ok(self.trace()),
            _ => {
                let half = self.power(k / 2)?;
                if k.is_multiple_of(2) {
                    half.trace_of_product(&half)
                } else {
                    half.matmul(self)?.trace_of_product(&half)
                }
            }
        }
    }
}

impl<T> Index<(usize, usize)> for DenseMatrix<T> {
    type Output = T;

    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &T {
        &self.data[i * self.n + j]
    }
}

impl<T> IndexMut<(usize, usize)> for DenseMatrix<T> {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut T {
        &mut self.data[i * self.n + j]
    }
}

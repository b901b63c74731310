//! Small dense square matrices, row-major.

use std::ops::{Add, Mul, Neg, Sub};

use crate::error::{check_dim, Result};
use crate::scalar::Real;

/// A dense `n x n` matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Mat<T> {
    n: usize,
    data: Vec<T>,
}

impl<T: Real> Mat<T> {
    pub fn zeros(n: usize) -> Self {
        Self { n, data: vec![T::zero(); n * n] }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, |i, j| if i == j { T::one() } else { T::zero() })
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut data = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                data.push(f(i, j));
            }
        }
        Self { n, data }
    }

    /// Builds a matrix from `n` rows of `n` entries.
    pub fn from_rows(rows: &[Vec<T>]) -> Result<Self> {
        let n = rows.len();
        for r in rows {
            check_dim(n, r.len())?;
        }
        Ok(Self::from_fn(n, |i, j| rows[i][j]))
    }

    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> T {
        self.data[i * self.n + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: T) {
        self.data[i * self.n + j] = v;
    }

    pub fn as_slice(&self) -> &[T] {
        &self.data
    }

    pub fn rows(&self) -> Vec<Vec<T>> {
        self.data.chunks(self.n).map(<[T]>::to_vec).collect()
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.n, |i, j| self.get(j, i))
    }

    pub fn scale(&self, s: T) -> Self {
        self.map(|x| x * s)
    }

    pub fn map(&self, f: impl Fn(T) -> T) -> Self {
        Self { n: self.n, data: self.data.iter().map(|&x| f(x)).collect() }
    }

    fn zip_with(&self, other: &Self, f: impl Fn(T, T) -> T) -> Self {
        debug_assert_eq!(self.n, other.n);
        Self {
            n: self.n,
            data: self.data.iter().zip(&other.data).map(|(&a, &b)| f(a, b)).collect(),
        }
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self> {
        check_dim(self.n, other.n)?;
        Ok(self.zip_with(other, |a, b| a + b))
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self> {
        check_dim(self.n, other.n)?;
        Ok(self.zip_with(other, |a, b| a - b))
    }

    pub fn checked_mul(&self, other: &Self) -> Result<Self> {
        check_dim(self.n, other.n)?;
        let n = self.n;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self.get(i, k);
                if a == T::zero() {
                    continue;
                }
                for j in 0..n {
                    out.data[i * n + j] += a * other.get(k, j);
                }
            }
        }
        Ok(out)
    }

    pub fn trace(&self) -> T {
        (0..self.n).fold(T::zero(), |acc, i| acc + self.get(i, i))
    }

    /// `Tr(self * other)` without forming the product.
    pub fn trace_of_product(&self, other: &Self) -> Result<T> {
        check_dim(self.n, other.n)?;
        let mut acc = T::zero();
        for i in 0..self.n {
            for k in 0..self.n {
                acc += self.get(i, k) * other.get(k, i);
            }
        }
        Ok(acc)
    }

    pub fn max_abs(&self) -> T {
        self.data.iter().fold(T::zero(), |m, &x| m.max(x.abs()))
    }

    pub fn frobenius_sq(&self) -> T {
        self.data.iter().fold(T::zero(), |acc, &x| acc + x * x)
    }

    /// `max |M + M^T|` over all entries.
    pub fn asymmetry(&self) -> T {
        let mut m = T::zero();
        for i in 0..self.n {
            for j in i..self.n {
                m = m.max((self.get(i, j) + self.get(j, i)).abs());
            }
        }
        m
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|x| x.is_finite())
    }

    /// Matrix exponential by scaling and squaring of a truncated Taylor series.
    pub fn expm(&self) -> Self {
        let n = self.n;
        let norm = (0..n)
            .map(|i| (0..n).fold(T::zero(), |acc, j| acc + self.get(i, j).abs()))
            .fold(T::zero(), T::max);
        let mut squarings = 0u32;
        let mut scaled = self.clone();
        let half = T::lit(0.5);
        let mut s = norm;
        while s > half {
            s = s * half;
            squarings += 1;
        }
        if squarings > 0 {
            scaled = self.scale(T::lit(0.5).powi(squarings as i32));
        }
        // the 20-term series on a matrix of norm <= 1/2 is exact to well below f64 roundoff
        let mut result = Self::identity(n);
        let mut term = Self::identity(n);
        for k in 1..=20 {
            term = &term * &scaled;
            term = term.scale(T::one() / T::from_count(k));
            result = &result + &term;
        }
        for _ in 0..squarings {
            result = &result * &result;
        }
        result
    }
}

impl<T: Real> Add for &Mat<T> {
    type Output = Mat<T>;
    fn add(self, rhs: Self) -> Mat<T> {
        self.checked_add(rhs).expect("matrix dimensions agree")
    }
}

impl<T: Real> Sub for &Mat<T> {
    type Output = Mat<T>;
    fn sub(self, rhs: Self) -> Mat<T> {
        self.checked_sub(rhs).expect("matrix dimensions agree")
    }
}

impl<T: Real> Mul for &Mat<T> {
    type Output = Mat<T>;
    fn mul(self, rhs: Self) -> Mat<T> {
        self.checked_mul(rhs).expect("matrix dimensions agree")
    }
}

impl<T: Real> Neg for &Mat<T> {
    type Output = Mat<T>;
    fn neg(self) -> Mat<T> {
        self.map(|x| -x)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn product_and_trace() {
        let a = Mat::from_rows(&[vec![1.0, 2.0], vec![3.0, 4.0]]).unwrap();
        let b = Mat::from_rows(&[vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap();
        let p = &a * &b;
        assert_eq!(p.rows(), vec![vec![2.0, 1.0], vec![4.0, 3.0]]);
        assert_eq!(a.trace_of_product(&b).unwrap(), p.trace());
    }

    #[test]
    fn ragged_rows_rejected() {
        assert!(Mat::<f64>::from_rows(&[vec![1.0, 2.0], vec![3.0]]).is_err());
    }

    #[test]
    fn expm_of_planar_generator_is_rotation() {
        let t = 2.3_f64;
        let g = Mat::from_rows(&[vec![0.0, -t], vec![t, 0.0]]).unwrap();
        let r = g.expm();
        assert!((r.get(0, 0) - t.cos()).abs() < 1e-14);
        assert!((r.get(1, 0) - t.sin()).abs() < 1e-14);
        assert!((r.get(0, 1) + t.sin()).abs() < 1e-14);
    }

    #[test]
    fn expm_of_nilpotent_is_polynomial() {
        let g = Mat::from_rows(&[vec![0.0, 3.0], vec![0.0, 0.0]]).unwrap();
        let r = g.expm();
        assert_eq!(r.rows(), vec![vec![1.0, 3.0], vec![0.0, 1.0]]);
    }
}

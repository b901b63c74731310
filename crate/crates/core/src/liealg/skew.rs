use std::ops::{Add, Mul, Neg, Sub};

use crate::error::{check_dim, Error, Result};
use crate::liealg::dense::Mat;
use crate::scalar::Real;

/// Largest `|M + M^T|_max` accepted when ingesting a dense matrix as skew.
pub const SKEW_INGEST_TOLERANCE: f64 = 1e-12;

/// A vector of R^3 in the basis i, j, k with `i x j = k`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Vector3<T> {
    pub x: T,
    pub y: T,
    pub z: T,
}

impl<T: Real> Vector3<T> {
    pub const fn new(x: T, y: T, z: T) -> Self {
        Self { x, y, z }
    }

    pub fn zero() -> Self {
        Self::new(T::zero(), T::zero(), T::zero())
    }

    pub fn i() -> Self {
        Self::new(T::one(), T::zero(), T::zero())
    }

    pub fn j() -> Self {
        Self::new(T::zero(), T::one(), T::zero())
    }

    pub fn k() -> Self {
        Self::new(T::zero(), T::zero(), T::one())
    }

    pub fn from_array(v: [T; 3]) -> Self {
        Self::new(v[0], v[1], v[2])
    }

    pub fn to_array(self) -> [T; 3] {
        [self.x, self.y, self.z]
    }

    pub fn dot(self, o: Self) -> T {
        self.x * o.x + self.y * o.y + self.z * o.z
    }

    pub fn cross(self, o: Self) -> Self {
        Self::new(
            self.y * o.z - self.z * o.y,
            self.z * o.x - self.x * o.z,
            self.x * o.y - self.y * o.x,
        )
    }

    pub fn norm(self) -> T {
        self.dot(self).sqrt()
    }

    pub fn scale(self, s: T) -> Self {
        Self::new(self.x * s, self.y * s, self.z * s)
    }

    pub fn max_abs(self) -> T {
        self.x.abs().max(self.y.abs()).max(self.z.abs())
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite() && self.z.is_finite()
    }
}

impl<T: Real> Add for Vector3<T> {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Self::new(self.x + o.x, self.y + o.y, self.z + o.z)
    }
}

impl<T: Real> Sub for Vector3<T> {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Self::new(self.x - o.x, self.y - o.y, self.z - o.z)
    }
}

impl<T: Real> Neg for Vector3<T> {
    type Output = Self;
    fn neg(self) -> Self {
        Self::new(-self.x, -self.y, -self.z)
    }
}

impl<T: Real> Mul<T> for Vector3<T> {
    type Output = Self;
    fn mul(self, s: T) -> Self {
        self.scale(s)
    }
}

/// An element of so(n), stored densely. The entries are exactly antisymmetric.
#[derive(Debug, Clone, PartialEq)]
pub struct SkewMatrix<T> {
    inner: Mat<T>,
}

impl<T: Real> SkewMatrix<T> {
    pub fn zeros(n: usize) -> Self {
        Self { inner: Mat::zeros(n) }
    }

    /// Accepts a dense matrix whose asymmetry is below [`SKEW_INGEST_TOLERANCE`],
    /// storing its exact antisymmetric part.
    pub fn from_dense(m: Mat<T>) -> Result<Self> {
        let asym = m.asymmetry();
        if !m.is_finite() || asym >= T::lit(SKEW_INGEST_TOLERANCE) {
            return Err(Error::NotSkew { asymmetry: asym.to_f64().unwrap_or(f64::NAN) });
        }
        Ok(Self::antisymmetrize(&m).0)
    }

    pub fn from_rows(rows: &[Vec<T>]) -> Result<Self> {
        Self::from_dense(Mat::from_rows(rows)?)
    }

    /// `(M - M^T) / 2`, together with the largest entry change this caused.
    pub fn antisymmetrize(m: &Mat<T>) -> (Self, T) {
        let n = m.n();
        let half = T::lit(0.5);
        let mut out = Mat::zeros(n);
        let mut correction = T::zero();
        for i in 0..n {
            for j in (i + 1)..n {
                let v = (m.get(i, j) - m.get(j, i)) * half;
                correction = correction.max((v - m.get(i, j)).abs());
                out.set(i, j, v);
                out.set(j, i, -v);
            }
            correction = correction.max(m.get(i, i).abs());
        }
        (Self { inner: out }, correction)
    }

    /// Builds from the strict upper triangle in row order: `(0,1), (0,2), ..., (n-2,n-1)`.
    pub fn from_upper(n: usize, upper: &[T]) -> Result<Self> {
        check_dim(n * (n.saturating_sub(1)) / 2, upper.len())?;
        let mut m = Mat::zeros(n);
        let mut it = upper.iter();
        for i in 0..n {
            for j in (i + 1)..n {
                let v = *it.next().expect("length checked");
                m.set(i, j, v);
                m.set(j, i, -v);
            }
        }
        Ok(Self { inner: m })
    }

    /// Strict upper triangle in row order; inverse of [`SkewMatrix::from_upper`].
    pub fn upper(&self) -> Vec<T> {
        let n = self.n();
        let mut out = Vec::with_capacity(n * (n - 1) / 2);
        for i in 0..n {
            for j in (i + 1)..n {
                out.push(self.get(i, j));
            }
        }
        out
    }

    /// The hat map R^3 -> so(3): `hat(v) w = v x w`.
    pub fn hat(v: Vector3<T>) -> Self {
        let z = T::zero();
        let inner = Mat::from_fn(3, |i, j| match (i, j) {
            (0, 1) => -v.z,
            (0, 2) => v.y,
            (1, 0) => v.z,
            (1, 2) => -v.x,
            (2, 0) => -v.y,
            (2, 1) => v.x,
            _ => z,
        });
        Self { inner }
    }

    pub fn unhat(&self) -> Result<Vector3<T>> {
        check_dim(3, self.n())?;
        Ok(Vector3::new(self.get(2, 1), self.get(0, 2), self.get(1, 0)))
    }

    pub fn n(&self) -> usize {
        self.inner.n()
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> T {
        self.inner.get(i, j)
    }

    pub fn dense(&self) -> &Mat<T> {
        &self.inner
    }

    pub fn into_dense(self) -> Mat<T> {
        self.inner
    }

    pub fn max_abs(&self) -> T {
        self.inner.max_abs()
    }

    pub fn is_finite(&self) -> bool {
        self.inner.is_finite()
    }

    pub fn scale(&self, s: T) -> Self {
        Self { inner: self.inner.scale(s) }
    }

    /// `self + s * other`.
    pub fn axpy(&self, s: T, other: &Self) -> Result<Self> {
        check_dim(self.n(), other.n())?;
        Ok(Self { inner: &self.inner + &other.inner.scale(s) })
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self> {
        Ok(Self { inner: self.inner.checked_add(&other.inner)? })
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self> {
        Ok(Self { inner: self.inner.checked_sub(&other.inner)? })
    }

    /// Elementwise equality within an absolute tolerance; false on dimension mismatch.
    pub fn approx_eq(&self, other: &Self, tol: T) -> bool {
        self.n() == other.n()
            && self
                .inner
                .as_slice()
                .iter()
                .zip(other.inner.as_slice())
                .all(|(&a, &b)| (a - b).abs() <= tol)
    }
}

impl<T: Real> From<Vector3<T>> for SkewMatrix<T> {
    fn from(v: Vector3<T>) -> Self {
        Self::hat(v)
    }
}

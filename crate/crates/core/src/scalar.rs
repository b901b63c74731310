//! Scalar abstraction shared by every numeric routine in the crate.

use std::fmt::{Debug, Display, LowerExp};

use num_traits::{Float, FloatConst, FromPrimitive, NumAssign};

/// Floating point scalar the algebra and integrators are written against: `f32` or `f64`.
pub trait Real:
    Float + FloatConst + FromPrimitive + NumAssign + Debug + Display + LowerExp + Send + Sync + 'static
{
    /// Converts an `f64` literal into this scalar type.
    fn lit(x: f64) -> Self;

    /// Converts an index or count into this scalar type.
    fn from_count(k: usize) -> Self {
        Self::from_usize(k).expect("count representable in scalar type")
    }
}

impl Real for f32 {
    fn lit(x: f64) -> Self {
        x as f32
    }
}

impl Real for f64 {
    fn lit(x: f64) -> Self {
        x
    }
}

/// Double-double arithmetic (about 32 significant digits), for convergence studies whose
/// signal sits below `f64` roundoff.
pub type DoubleDouble = twofloat::TwoFloat;

// `FromPrimitive::from_f64` on this type truncates through the integer path.
impl Real for DoubleDouble {
    fn lit(x: f64) -> Self {
        Self::from(x)
    }
}

/// Wraps an angle into `(-pi, pi]`.
pub fn wrap_angle<T: Real>(x: T) -> T {
    let two_pi = T::TAU();
    let mut y = x - two_pi * (x / two_pi).round();
    if y <= -T::PI() {
        y += two_pi;
    } else if y > T::PI() {
        y -= two_pi;
    }
    y
}

/// Distance between two angles on the circle, `min(|d|, 2pi - |d|)`.
pub fn wrapped_distance<T: Real>(x: T, y: T) -> T {
    wrap_angle(x - y).abs()
}

/// Shifts `raw` by a multiple of `2pi` so that it lands closest to `reference`.
pub fn unwrap_near<T: Real>(raw: T, reference: T) -> T {
    raw + T::TAU() * ((reference - raw) / T::TAU()).round()
}

//! Two rotators on so(n) whose Lie brackets depend on each other's state.
//!
//! Each rotator state is a skew-symmetric matrix. The first evolves under
//! `dA/dt = [Omega+, A]_B` and the second under `dB/dt = [Omega-, B]_A`, where
//! `[X,Y]_C = XY - YX + eps (X C^2 Y - Y C^2 X)`. For n = 3 and a shared angular
//! velocity along `i`, [`reduced3`] provides angle/amplitude coordinates, the reduced
//! equations and a closed-form solution; [`diagnostics`] compares that solution with
//! RK4 integrations from [`dynamics`].
//!
//! All numerics are generic over [`Real`] (`f32` or `f64`); the `*64` aliases below fix
//! the scalar to `f64`, and [`DoubleDouble`] is available for extended-precision runs.

pub mod diagnostics;
pub mod dynamics;
mod error;
pub mod liealg;
pub mod quadrature;
pub mod reduced3;
mod scalar;

pub use dynamics::{Coupling, CoupledState, InvariantReport, ModelParams, Trajectory};
pub use error::{Error, Result};
pub use liealg::{Mat, SkewMatrix, Vector3};
pub use reduced3::{AnalyticSolution, PeriodPair, ReducedCoords};
pub use scalar::{unwrap_near, wrap_angle, wrapped_distance, DoubleDouble, Real};

pub type SkewMatrix64 = SkewMatrix<f64>;
pub type Vector3f64 = Vector3<f64>;
pub type ModelParams64 = ModelParams<f64>;
pub type CoupledState64 = CoupledState<f64>;
pub type Trajectory64 = Trajectory<f64>;
pub type ReducedCoords64 = ReducedCoords<f64>;
pub type AnalyticSolution64 = AnalyticSolution<f64>;

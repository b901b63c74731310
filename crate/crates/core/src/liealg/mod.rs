//! Dense skew-symmetric matrix algebra over R^n.
//!
//! Sign conventions throughout follow the right-handed basis of so(3):
//! `[i,j] = k`, `[j,k] = i`, `[k,i] = j`, realized by [`SkewMatrix::hat`].

mod bracket;
mod dense;
mod skew;

pub use bracket::{
    commutator, deformed_bracket_v1, deformed_bracket_v2, jacobi_relative_residual,
    jacobi_residual, trace_pairing,
};
pub use dense::Mat;
pub use skew::{SkewMatrix, Vector3, SKEW_INGEST_TOLERANCE};

use thiserror::Error;

/// Failures raised by the algebra, the integrators and the trajectory analysis.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    Dimension { expected: usize, found: usize },

    #[error("matrix is not skew-symmetric (|M + M^T|_max = {asymmetry:e})")]
    NotSkew { asymmetry: f64 },

    #[error("non-finite value at t = {t}: {what}")]
    Numeric { t: f64, what: String },

    #[error("degenerate invariant: {0}")]
    DegenerateInvariant(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("no significant period found (best confidence {confidence:.3})")]
    NoPeriodFound { confidence: f64 },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn check_dim(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::Dimension { expected, found })
    }
}

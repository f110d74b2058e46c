use thiserror::Error;

/// Errors raised by the geometry, barycentre and entropy routines.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    /// A point violates the defining inequality of its domain.
    #[error("domain violation: {invariant} ({detail})")]
    Domain {
        invariant: &'static str,
        detail: String,
    },

    /// An argument is outside the accepted range (dimension, step, tolerance, ...).
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// Dimension mismatch between two objects that must agree.
    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },

    /// Iterative solver stopped before reaching the requested tolerance.
    #[error("no convergence after {iterations} iterations (residual {residual:e})")]
    NonConvergence {
        iterations: usize,
        residual: f64,
        /// Real coordinates of the best iterate.
        best: Vec<f64>,
    },

    /// Linear system too ill-conditioned to trust.
    #[error("ill-conditioned system: condition number {0:e}")]
    IllConditioned(f64),

    /// Bisection could not find a divergent/convergent bracket.
    #[error("no exponent bracket found in (0, {upper}]")]
    BracketNotFound { upper: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn domain(invariant: &'static str, detail: impl Into<String>) -> Self {
        Error::Domain {
            invariant,
            detail: detail.into(),
        }
    }
}

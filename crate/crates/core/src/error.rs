use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    /// Input outside an operation's stated domain.
    #[error("domain error: {0}")]
    Domain(String),

    /// Evaluation requested at a pole.
    #[error("pole encountered: {0}")]
    Pole(String),

    /// A precision target could not be met within the configured bounds.
    /// Carries the best achieved error estimate.
    #[error("precision target {target:.3e} unattained (best estimate {achieved:.3e})")]
    Precision { target: f64, achieved: f64 },

    /// A denominator or path endpoint is too close to a zero of L.
    #[error("too close to a zero of L: |L| = {magnitude:.3e}")]
    NearZero { magnitude: f64 },

    /// Adaptive refinement exhausted its step budget.
    #[error("refinement budget exhausted: {0}")]
    Refinement(String),

    /// A counting contour passes too near a zero; perturb the bounds.
    #[error("contour error: {0}")]
    Contour(String),

    /// An operation required a certified zero list.
    #[error("zero list not certified: {0}")]
    Certification(String),

    /// Malformed cache file.
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    /// A loaded artifact fails re-validation.
    #[error("integrity check failed: {0}")]
    Integrity(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

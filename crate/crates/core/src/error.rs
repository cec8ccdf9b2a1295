//! Error type shared by every operation in the crate.
//!
//! Asymptotic quantities are computed from finite enumerations, so several
//! failure modes are legitimate outcomes rather than bugs: a query can land
//! beyond the declared tail model, a classification can be inconclusive, or
//! an extrapolation can refuse to commit to a value. Each of those gets its
//! own variant so callers (and the CLI exit codes) can tell them apart.

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, thiserror::Error)]
pub enum Error {
    /// The query falls in the unresolved part of the spectrum, beyond the
    /// declared validity of the tail extrapolation. `bound` is the best
    /// available estimate at that point.
    #[error("tail-uncertain at t = {at}: beyond tail extrapolation validity (bound {bound:.6e})")]
    TailUncertain { at: f64, bound: f64 },

    /// A membership precondition failed (e.g. the input is not in the weak
    /// trace ideal required by a Dixmier-trace computation).
    #[error("not in {ideal}: {detail}")]
    NotInIdeal { ideal: String, detail: String },

    /// Asymptotics were inconclusive; no value is fabricated.
    #[error("indeterminate: {0}")]
    Indeterminate(String),

    /// An operation precondition was violated.
    #[error("precondition violated: {0}")]
    Precondition(String),

    /// Malformed descriptor or serialized input. The message carries a
    /// JSON-pointer-style path when one is available.
    #[error("schema error: {0}")]
    Schema(String),

    /// Singular values cluster at a kernel threshold; the kernel dimension
    /// cannot be read off reliably. Carries the observed gap report.
    #[error("ill-conditioned kernel count: {0}")]
    IllConditioned(String),
}

impl Error {
    pub fn precondition(msg: impl Into<String>) -> Self {
        Error::Precondition(msg.into())
    }

    pub fn schema(msg: impl Into<String>) -> Self {
        Error::Schema(msg.into())
    }

    pub fn indeterminate(msg: impl Into<String>) -> Self {
        Error::Indeterminate(msg.into())
    }
}

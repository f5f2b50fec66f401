use thiserror::Error;

/// Errors surfaced by the toolkit. Variants are grouped by contract kind so
/// callers (in particular the CLI) can map them to distinct exit codes.
#[derive(Debug, Error)]
pub enum Error {
    /// A point is malformed for the space it was used with: wrong coordinate
    /// count, negative ray coordinate, non-finite entries, and so on.
    #[error("invalid point: {0}")]
    InvalidPoint(String),

    /// A scalar parameter lies outside its documented domain (for example a
    /// geodesic parameter outside [0,1] or a non-positive radius).
    #[error("parameter out of domain: {0}")]
    Domain(String),

    /// An operation precondition failed for otherwise well-formed inputs.
    #[error("precondition failed: {0}")]
    Precondition(String),

    /// The inputs are valid individually but the requested combination is
    /// outside what the toolkit computes (for example a barycenter of points
    /// spread across different blocks of a glued space).
    #[error("unsupported configuration: {0}")]
    Unsupported(String),

    /// A cover was required to contain a point and does not.
    #[error("coverage failure: {0}")]
    Coverage(String),

    /// Two points of a complex lie in different connected components.
    #[error("unreachable: {0}")]
    Unreachable(String),

    /// A user-supplied function produced a non-finite value.
    #[error("evaluation failure: {0}")]
    Evaluation(String),

    /// An internal invariant that the construction is supposed to guarantee
    /// was violated. Indicates a bug, not a user error.
    #[error("internal invariant violated: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;

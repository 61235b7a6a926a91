use thiserror::Error;

/// Errors surfaced by the toolkit.
///
/// Mathematical obstructions (isotropic pivots, singular metrics) are kept
/// distinct from caller mistakes (dimension mismatches, inadmissible input)
/// so frontends can map them to different exit paths.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum FinslerError {
    /// The direction cannot be used with this norm (zero vector, non-finite
    /// entries, or outside the norm's admissible set).
    #[error("non-admissible direction: {0}")]
    NonAdmissibleDirection(String),

    /// The metric tensor failed the nonsingularity check at this direction.
    #[error(
        "singular metric at direction {direction}: sigma_min/sigma_max = {ratio:.3e} <= {tol:.3e}"
    )]
    SingularMetric {
        direction: String,
        ratio: f64,
        tol: f64,
    },

    /// Orthogonalization or normalization hit a vector of (numerically) zero
    /// length; null directions cannot serve as pivots.
    #[error(
        "isotropic pivot at position {index}: |F^2| = {f2_abs:.3e} (threshold {threshold:.3e})"
    )]
    IsotropicPivot {
        index: usize,
        f2_abs: f64,
        threshold: f64,
    },

    /// The input vectors do not form a basis.
    #[error("singular input: {0}")]
    SingularInput(String),

    /// A precondition required an orthogonal set and the input is not one.
    #[error("not an orthogonal set: {0}")]
    NotOrthogonalSet(String),

    /// A precondition required an orthonormal basis and the input is not one.
    #[error("not an orthonormal basis: {0}")]
    NotOrthonormalBasis(String),

    /// Mismatched dimensions between two objects that must agree.
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    /// A closed-form derivative path was requested for a norm kind that has
    /// none; use the hyperdual or finite-difference path instead.
    #[error("no analytic derivative path for this norm kind")]
    AnalyticUnavailable,

    /// Model construction rejected its parameters.
    #[error("invalid model: {0}")]
    InvalidModel(String),
}

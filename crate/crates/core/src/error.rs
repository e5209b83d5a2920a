use thiserror::Error;

/// Errors produced by the geometry routines and estimators.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// Three lengths that do not form a valid model triangle.
    #[error("invalid triangle: {0}")]
    InvalidTriangle(String),

    /// A model-space family parameter is outside its valid range.
    #[error("invalid parameter `{field}`: {reason}")]
    InvalidParameter { field: String, reason: String },

    /// `sqrt(-kappa) * s` exceeded the overflow cap.
    #[error("overflow guard: sqrt(-kappa)*s = {value} exceeds cap {cap}")]
    Overflow { value: f64, cap: f64 },

    /// A geodesic left the domain of a compact profile.
    #[error("geodesic left the profile domain at r = {r}")]
    DomainExit { r: f64 },

    #[error("zero velocity")]
    ZeroVelocity,

    /// The two-point shooting solver could not hit the target.
    #[error("shooting did not converge (best residual {residual:e})")]
    NoConvergence { residual: f64 },

    /// A limit ladder had not stabilised to the requested tolerance.
    #[error("not converged: {what} (spread {spread:e} > tol {tol:e})")]
    NotConverged { what: String, spread: f64, tol: f64 },

    /// The space does not provide a capability the estimator needs.
    #[error("capability `{0}` not available for this space")]
    Capability(&'static str),

    /// Malformed or invalid space specification document.
    #[error("spec error: {0}")]
    Spec(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn param(field: &str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            field: field.to_string(),
            reason: reason.into(),
        }
    }
}

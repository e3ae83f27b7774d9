use thiserror::Error;

/// Errors raised by the geometry engine.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument lies outside the domain of the operation (σ ≤ 0, point off the manifold, ...).
    #[error("domain error: {0}")]
    Domain(String),

    #[error("kind mismatch: expected {expected}, found {found}")]
    KindMismatch {
        expected: &'static str,
        found: &'static str,
    },

    /// The two sphere points are antipodal; the logarithm is not unique.
    #[error("points are on each other's cut locus")]
    CutLocus,

    #[error("unsupported operation: {0}")]
    Unsupported(String),

    /// A geodesic of an incomplete model reaches σ = 0 in finite time.
    #[error("geodesic reaches the boundary σ = 0 at t = {escape_time}")]
    BoundaryEscape { escape_time: f64 },

    /// The integrator or path walker ran into the edge of representable σ.
    #[error("boundary proximity at t = {t} (σ = {sigma})")]
    BoundaryProximity { t: f64, sigma: f64 },

    #[error("{what} did not converge (residual {residual:e})")]
    NonConvergence { what: String, residual: f64 },

    #[error("estimator diverged at step {step}: σ = {sigma}")]
    Divergence { step: usize, sigma: f64 },

    #[error("non-finite value in {0}")]
    NonFinite(String),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn no_convergence(what: impl Into<String>, residual: f64) -> Self {
        Error::NonConvergence {
            what: what.into(),
            residual,
        }
    }

    /// True for errors caused by the caller's input rather than by the numerics.
    pub fn is_input_error(&self) -> bool {
        matches!(
            self,
            Error::Domain(_) | Error::KindMismatch { .. } | Error::CutLocus | Error::Unsupported(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;

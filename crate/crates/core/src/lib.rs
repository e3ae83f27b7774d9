//! Location-scale statistical models as warped Riemannian manifolds.
//!
//! A model p(x | x̄, σ) with location x̄ on a base manifold M (ℝ, S² or H²) and
//! scale or concentration σ > 0 carries the Rao-Fisher metric
//! `I₀(σ) dσ² + I₁(σ) ds²_M`. This crate computes the warp coefficients,
//! curvatures, exact geodesics, Rao distances, Fréchet means and
//! natural-gradient estimates of such models, along with independent
//! numerical oracles (ODE integration, Monte Carlo) that check them.

pub mod base_manifold;
pub mod curvature;
pub mod error;
pub mod geodesics;
pub mod models;
pub mod numerics;
pub mod statistics;

/// Seed used by the CLI and the documented estimation scenarios when none is given.
pub const DEFAULT_SEED: u64 = 24_601;

pub use base_manifold::{BaseKind, BaseManifold, BasePoint, BaseTangent, IsometryGenerator};
pub use error::{Error, Result};
pub use models::{
    builtin, LocationScaleModel, ModelRegistry, ModelTag, NormalLine, RiemannianGaussianH2, VonMisesFisherS2,
    WarpCoefficients, WarpedPoint, WarpedTangent,
};

//! Conservation laws, exact geodesics, the geodesic ODE oracle, and the
//! exponential and logarithm maps of the warped manifold.

pub mod oracle;
mod path;
mod shooting;

pub use oracle::{geodesic_ode_oracle, integrate_geodesic, OracleEnd};
pub use path::{GeodesicPath, GeodesicState};
pub use shooting::{rao_distance, warped_log};

use crate::base_manifold::IsometryGenerator;
use crate::error::{Error, Result};
use crate::models::{norm_sq, LocationScaleModel, WarpedPoint, WarpedTangent};

/// E = I₀(σ)σ̇² + I₁(σ)‖ẋ‖².
pub fn energy(model: &dyn LocationScaleModel, z: &WarpedPoint, v: &WarpedTangent) -> Result<f64> {
    norm_sq(model, z, v)
}

/// J(ξ) = I₁(σ)⟨ẋ, X_ξ(x̄)⟩.
pub fn moment(model: &dyn LocationScaleModel, z: &WarpedPoint, v: &WarpedTangent, xi: &IsometryGenerator) -> Result<f64> {
    let base = model.base();
    if xi.kind != base.kind() {
        return Err(Error::KindMismatch {
            expected: base.kind().name(),
            found: xi.kind.name(),
        });
    }
    let field = base.killing_field(xi, &z.location)?;
    let c = model.coefficients(z.sigma)?;
    Ok(c.i1 * base.metric_dot(&z.location, &v.base, &field)?)
}

/// Moments for every basis generator of the base isometry algebra.
pub fn moments(model: &dyn LocationScaleModel, z: &WarpedPoint, v: &WarpedTangent) -> Result<Vec<f64>> {
    IsometryGenerator::basis(model.base().kind())
        .iter()
        .map(|xi| moment(model, z, v, xi))
        .collect()
}

pub fn geodesic_closed_form<'a>(
    model: &'a dyn LocationScaleModel,
    z0: &WarpedPoint,
    v0: &WarpedTangent,
) -> Result<GeodesicPath<'a>> {
    GeodesicPath::new(model, *z0, *v0)
}

/// Endpoint of the unit-time geodesic from z with initial velocity w.
pub fn warped_exp(model: &dyn LocationScaleModel, z: &WarpedPoint, w: &WarpedTangent) -> Result<WarpedPoint> {
    if w.is_zero() {
        crate::models::check_point(model, z)?;
        return Ok(*z);
    }
    Ok(GeodesicPath::new(model, *z, *w)?.at(1.0)?.point)
}

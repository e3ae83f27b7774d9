//! Geodesics by direct integration of the Euler–Lagrange equations of
//! L = I₀σ̇² + I₁‖ẋ‖²_M in chart coordinates. Shares nothing with the
//! conservation-law solution in [`super::path`] beyond the warp coefficients,
//! so the two serve as checks on each other.
//!
//! σ̈ = (I₁′‖ẋ‖² − I₀′σ̇²)/(2I₀) and ẍ = −Γ(ẋ, ẋ) − (I₁′/I₁)σ̇ẋ, with Γ the
//! Christoffel symbols of the base chart (none on ℝ; −|ẋ|²x in the ambient
//! form on S²; half-plane symbols on H²).

use nalgebra::Vector3;

use crate::base_manifold::{BaseKind, BasePoint, BaseTangent};
use crate::error::{Error, Result};
use crate::models::{check_point, LocationScaleModel, WarpedPoint, WarpedTangent};
use crate::numerics::ode::{Dopri5, OdeSystem};

struct GeodesicOde<'a> {
    model: &'a dyn LocationScaleModel,
    kind: BaseKind,
    scale: f64,
}

impl GeodesicOde<'_> {
    /// Number of chart coordinates of the base point.
    fn n(&self) -> usize {
        self.kind.coordinate_count()
    }
}

impl OdeSystem for GeodesicOde<'_> {
    fn dim(&self) -> usize {
        2 * (1 + self.n())
    }

    fn rhs(&self, _t: f64, y: &[f64], dy: &mut [f64]) -> bool {
        let n = self.n();
        let sigma = y[0];
        let x = &y[1..=n];
        let sdot = y[n + 1];
        let xdot = &y[n + 2..];
        if !(sigma > 0.0) {
            return false;
        }
        let Ok(c) = self.model.coefficients(sigma) else {
            return false;
        };
        let damp = c.di1_dsigma / c.i1 * sdot;
        let speed2 = match self.kind {
            BaseKind::RealLine | BaseKind::Sphere2 => xdot.iter().map(|v| v * v).sum::<f64>(),
            BaseKind::Hyperbolic2 => {
                if !(x[1] > 0.0) {
                    return false;
                }
                (xdot[0] * xdot[0] + xdot[1] * xdot[1]) / (x[1] * x[1])
            }
        };
        dy[0] = sdot;
        dy[1..=n].copy_from_slice(xdot);
        dy[n + 1] = (c.di1_dsigma * self.scale * speed2 - c.di0_dsigma * sdot * sdot) / (2.0 * c.i0);
        let acc = &mut dy[n + 2..];
        match self.kind {
            BaseKind::RealLine => acc[0] = -damp * xdot[0],
            BaseKind::Sphere2 => {
                let v2 = speed2;
                for i in 0..3 {
                    acc[i] = -v2 * x[i] - damp * xdot[i];
                }
            }
            BaseKind::Hyperbolic2 => {
                let w = x[1];
                let (du, dw) = (xdot[0], xdot[1]);
                acc[0] = 2.0 * du * dw / w - damp * du;
                acc[1] = (dw * dw - du * du) / w - damp * dw;
            }
        }
        dy.iter().all(|v| v.is_finite())
    }
}

/// End state of an oracle integration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleEnd {
    pub t: f64,
    pub point: WarpedPoint,
    pub velocity: WarpedTangent,
    /// True when integration stopped because σ fell below the requested floor.
    pub hit_floor: bool,
}

fn pack(z: &WarpedPoint, v: &WarpedTangent) -> Vec<f64> {
    let mut y = vec![z.sigma];
    y.extend(z.location.coords());
    y.push(v.sigma_rate);
    y.extend(v.base.components());
    y
}

fn unpack(kind: BaseKind, y: &[f64]) -> Result<(WarpedPoint, WarpedTangent)> {
    let n = kind.coordinate_count();
    let location = match kind {
        BaseKind::Sphere2 => BasePoint::sphere_normalized(Vector3::new(y[1], y[2], y[3]))?,
        _ => BasePoint::from_coords(kind, &y[1..=n])?,
    };
    let mut base = BaseTangent::from_components(kind, &y[n + 2..])?;
    if let (BasePoint::Sphere(p), BaseTangent::Sphere(v)) = (location, base) {
        base = BaseTangent::Sphere(v - p * p.dot(&v));
    }
    Ok((WarpedPoint { location, sigma: y[0] }, WarpedTangent::new(base, y[n + 1])))
}

/// Integrates the geodesic equations from (z₀, ż₀) to time `t`, stopping
/// early if σ falls to `sigma_floor`.
pub fn integrate_geodesic(
    model: &dyn LocationScaleModel,
    z0: &WarpedPoint,
    v0: &WarpedTangent,
    t: f64,
    sigma_floor: Option<f64>,
    solver: Dopri5,
) -> Result<OracleEnd> {
    check_point(model, z0)?;
    let base = model.base();
    base.check_tangent(&z0.location, &v0.base)?;
    let kind = base.kind();
    let sys = GeodesicOde {
        model,
        kind,
        scale: base.metric_scale(),
    };
    let (sign, span) = if t < 0.0 { (-1.0, -t) } else { (1.0, t) };
    let y0 = pack(z0, &(*v0 * sign));
    let floor = sigma_floor.unwrap_or(0.0);
    let event = sigma_floor.map(|_| move |y: &[f64]| y[0] - floor);
    let sol = solver.solve(&sys, 0.0, &y0, span, event).map_err(|f| {
        if f.y[0] < 1e-6 * z0.sigma.min(1.0) || f.reason == "step size underflow" {
            Error::BoundaryProximity {
                t: sign * f.t,
                sigma: f.y[0],
            }
        } else {
            Error::no_convergence(format!("geodesic ODE ({})", f.reason), f64::NAN)
        }
    })?;
    let (point, velocity) = unpack(kind, &sol.y)?;
    Ok(OracleEnd {
        t: sign * sol.t,
        point,
        velocity: velocity * sign,
        hit_floor: sol.event,
    })
}

/// State at time `t` of the geodesic through z₀ with velocity ż₀, by
/// adaptive Dormand–Prince integration.
pub fn geodesic_ode_oracle(
    model: &dyn LocationScaleModel,
    z0: &WarpedPoint,
    v0: &WarpedTangent,
    t: f64,
) -> Result<(WarpedPoint, WarpedTangent)> {
    let end = integrate_geodesic(model, z0, v0, t, None, Dopri5::default())?;
    Ok((end.point, end.velocity))
}

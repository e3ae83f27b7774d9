//! Logarithm map and Rao distance by shooting.
//!
//! The base component of the connecting geodesic runs along the base
//! geodesic from x̄₁ toward x̄₂, so only the split of a unit initial speed
//! between the vertical and the base direction is unknown. For an angle θ
//! the unit-speed geodesic with ẋ = cos θ/√I₁ · û, σ̇ = sin θ/√I₀ is walked
//! until its base arc length equals d(x̄₁, x̄₂); the mismatch ln(σ/σ₂) there is
//! increasing in θ. Angles whose path never covers the base distance are
//! classified by where the path ends up (σ → 0 or σ → ∞).

use std::cell::RefCell;
use std::f64::consts::FRAC_PI_2;

use super::path::{GeodesicPath, Walk};
use crate::error::{Error, Result};
use crate::models::{check_point, vertical_r, LocationScaleModel, WarpedPoint, WarpedTangent};
use crate::numerics::roots::brent;

/// Accepted |ln(σ_end/σ₂)| of the final shot.
const END_TOL: f64 = 1e-10;
const MAX_BISECTIONS: usize = 200;

#[derive(Debug, Clone, Copy)]
enum Shot {
    Hit { mismatch: f64, tau: f64 },
    Low,
    High,
}

impl Shot {
    fn value(&self) -> f64 {
        match *self {
            Shot::Hit { mismatch, .. } => mismatch,
            Shot::Low => f64::NEG_INFINITY,
            Shot::High => f64::INFINITY,
        }
    }
}

struct Shooter<'a> {
    model: &'a dyn LocationScaleModel,
    z1: WarpedPoint,
    sigma2: f64,
    heading: crate::base_manifold::BaseTangent,
    base_distance: f64,
    inv_sqrt_i0: f64,
    inv_sqrt_i1: f64,
}

impl Shooter<'_> {
    fn velocity(&self, theta: f64) -> WarpedTangent {
        let (s, c) = theta.sin_cos();
        WarpedTangent::new(self.heading * (c * self.inv_sqrt_i1), s * self.inv_sqrt_i0)
    }

    fn shoot(&self, theta: f64) -> Result<Shot> {
        let path = GeodesicPath::new(self.model, self.z1, self.velocity(theta))?;
        Ok(match path.walk_arc(self.base_distance)? {
            Walk::Reached { sigma, t, .. } => Shot::Hit {
                mismatch: (sigma / self.sigma2).ln(),
                tau: t,
            },
            Walk::Unreached { dir } if dir > 0.0 => Shot::High,
            Walk::Unreached { .. } => Shot::Low,
        })
    }
}

/// Initial velocity of the unit-time geodesic from z₁ to z₂.
pub fn warped_log(model: &dyn LocationScaleModel, z1: &WarpedPoint, z2: &WarpedPoint) -> Result<WarpedTangent> {
    check_point(model, z1)?;
    check_point(model, z2)?;
    let base = model.base();
    let kind = base.kind();
    if z1 == z2 {
        return Ok(WarpedTangent::zero(kind));
    }
    let c1 = model.coefficients(z1.sigma)?;
    let log = base.log(&z1.location, &z2.location)?;
    let d = base.norm(&z1.location, &log)?;
    if d == 0.0 {
        let r = vertical_r(model, z1.sigma, z2.sigma)?;
        return Ok(WarpedTangent::new(log, r / c1.i0.sqrt()));
    }
    let shooter = Shooter {
        model,
        z1: *z1,
        sigma2: z2.sigma,
        heading: log * (1.0 / d),
        base_distance: d,
        inv_sqrt_i0: 1.0 / c1.i0.sqrt(),
        inv_sqrt_i1: 1.0 / c1.i1.sqrt(),
    };

    // Start from the angle of the straight line in (r, extrinsic distance).
    let rise = vertical_r(model, z1.sigma, z2.sigma)?;
    let guess = rise.atan2(c1.i1.sqrt() * d);
    let (mut lo, mut hi) = (-FRAC_PI_2, FRAC_PI_2);
    let (mut f_lo, mut f_hi) = (f64::NEG_INFINITY, f64::INFINITY);
    let mut theta = guess;
    let mut best: Option<(f64, Shot)> = None;
    for _ in 0..MAX_BISECTIONS {
        let shot = shooter.shoot(theta)?;
        let f = shot.value();
        if f == 0.0 {
            best = Some((theta, shot));
            break;
        }
        if f < 0.0 {
            lo = theta;
            f_lo = f;
        } else {
            hi = theta;
            f_hi = f;
        }
        if f_lo.is_finite() && f_hi.is_finite() {
            break;
        }
        if hi - lo < 1e-15 {
            return Err(Error::no_convergence("warped_log bracketing", hi - lo));
        }
        theta = 0.5 * (lo + hi);
    }
    let (theta, shot) = match best {
        Some(b) => b,
        None => {
            if !(f_lo.is_finite() && f_hi.is_finite()) {
                return Err(Error::no_convergence("warped_log bracketing", f_hi - f_lo));
            }
            let failure = RefCell::new(None);
            let root = brent(
                |th| match shooter.shoot(th) {
                    Ok(s) => s.value(),
                    Err(e) => {
                        failure.borrow_mut().get_or_insert(e);
                        f64::NAN
                    }
                },
                lo,
                hi,
                1e-15,
                200,
            );
            if let Some(e) = failure.into_inner() {
                return Err(e);
            }
            let root = root?;
            (root, shooter.shoot(root)?)
        }
    };
    match shot {
        Shot::Hit { mismatch, tau } if mismatch.abs() <= END_TOL => Ok(shooter.velocity(theta) * tau),
        other => Err(Error::no_convergence("warped_log shooting", other.value().abs())),
    }
}

/// Geodesic distance √E of the unit-time connecting geodesic.
pub fn rao_distance(model: &dyn LocationScaleModel, z1: &WarpedPoint, z2: &WarpedPoint) -> Result<f64> {
    let w = warped_log(model, z1, z2)?;
    crate::models::warped_norm(model, z1, &w)
}

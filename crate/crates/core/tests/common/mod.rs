//! Shared random inputs and independent oracles for the integration tests.

#![allow(dead_code)]

use nalgebra::Vector3;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use warpgeo::base_manifold::{BaseKind, BasePoint, BaseTangent};
use warpgeo::models::{norm_sq, vertical_r, LocationScaleModel, WarpedPoint, WarpedTangent};
use warpgeo::numerics::roots::brent;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn log_grid(a: f64, b: f64, n: usize) -> Vec<f64> {
    (0..n)
        .map(|k| (a.ln() + (b.ln() - a.ln()) * k as f64 / (n - 1) as f64).exp())
        .collect()
}

pub fn random_base_point(kind: BaseKind, rng: &mut ChaCha8Rng) -> BasePoint {
    match kind {
        BaseKind::RealLine => BasePoint::Line(rng.random_range(-2.0..2.0)),
        BaseKind::Sphere2 => loop {
            let v = Vector3::new(
                rng.random_range(-1.0..1.0),
                rng.random_range(-1.0..1.0),
                rng.random_range(-1.0..1.0),
            );
            let n = v.norm();
            if n > 0.1 && n < 1.0 {
                break BasePoint::Sphere(v / n);
            }
        },
        BaseKind::Hyperbolic2 => BasePoint::HalfPlane {
            u: rng.random_range(-1.0..1.0),
            w: rng.random_range(-0.7f64..0.7).exp(),
        },
    }
}

pub fn random_point(model: &dyn LocationScaleModel, rng: &mut ChaCha8Rng) -> WarpedPoint {
    let location = random_base_point(model.base().kind(), rng);
    WarpedPoint::new(location, rng.random_range(-0.7f64..0.7).exp()).unwrap()
}

/// A random tangent at z scaled to the given speed.
pub fn random_tangent(model: &dyn LocationScaleModel, z: &WarpedPoint, speed: f64, rng: &mut ChaCha8Rng) -> WarpedTangent {
    let base = model.base();
    let basis = base.tangent_basis(&z.location);
    let mut v = BaseTangent::zero(base.kind());
    for e in &basis {
        v = v + *e * rng.random_range(-1.0..1.0);
    }
    let w = WarpedTangent::new(v, rng.random_range(-1.0..1.0));
    let n = norm_sq(model, z, &w).unwrap().sqrt();
    w * (speed / n)
}

/// Chart coordinates (σ followed by the base coordinates).
pub fn chart(z: &WarpedPoint) -> Vec<f64> {
    let mut c = vec![z.sigma];
    c.extend(z.location.coords());
    c
}

pub fn chart_gap(a: &WarpedPoint, b: &WarpedPoint) -> f64 {
    chart(a)
        .iter()
        .zip(chart(b))
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

/// Poincaré half-plane distance of the normal model under u = x̄/√2.
pub fn normal_poincare_distance(a: &WarpedPoint, b: &WarpedPoint) -> f64 {
    let (BasePoint::Line(x1), BasePoint::Line(x2)) = (a.location, b.location) else {
        panic!("normal model points expected")
    };
    let du = (x1 - x2) / 2f64.sqrt();
    let ds = a.sigma - b.sigma;
    (1.0 + (du * du + ds * ds) / (2.0 * a.sigma * b.sigma)).acosh()
}

/// f, ∂_r f and ∂²_r f of f(σ) = I₁(σ)^{1/2} by central differences in the
/// vertical distance r with step h = max(1e-4, 1e-3 σ), Richardson-extrapolated
/// over h and h/2.
pub fn sqrt_i1_r_derivatives(model: &dyn LocationScaleModel, sigma: f64) -> (f64, f64, f64) {
    let f = |s: f64| model.coefficients(s).unwrap().i1.sqrt();
    // Offsets in r are converted to σ by inverting r(σ) with Brent.
    let h = (1e-3 * sigma).max(1e-4);
    let sigma_at = |dr: f64| -> f64 {
        let r = |s: f64| vertical_r(model, sigma, s).unwrap() - dr;
        let mut k = 1e-6 * dr.signum();
        while r(sigma * k.exp()).signum() != dr.signum() {
            k *= 2.0;
        }
        let (lo, hi) = if dr > 0.0 { (sigma, sigma * k.exp()) } else { (sigma * k.exp(), sigma) };
        brent(r, lo, hi, 1e-16 * sigma, 300).unwrap()
    };
    let derivs = |h: f64| {
        let (sp, sm) = (sigma_at(h), sigma_at(-h));
        let (fp, f0, fm) = (f(sp), f(sigma), f(sm));
        ((fp - fm) / (2.0 * h), (fp - 2.0 * f0 + fm) / (h * h))
    };
    let (d1a, d2a) = derivs(h);
    let (d1b, d2b) = derivs(0.5 * h);
    let d1 = (4.0 * d1b - d1a) / 3.0;
    let d2 = (4.0 * d2b - d2a) / 3.0;
    (f(sigma), d1, d2)
}

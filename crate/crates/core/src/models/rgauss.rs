use std::f64::consts::{PI, SQRT_2};

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use super::{check_sigma, LocationScaleModel, ModelTag, Score, WarpCoefficients, WarpedPoint};
use crate::base_manifold::{BaseKind, BaseManifold, BasePoint};
use crate::error::{Error, Result};

/// Metric scale of the base: 2·(du² + dw²)/w², curvature −1/2. On this plane
/// Z(σ) = 2π√π · σ · e^{σ²/4} · erf(σ/2) is the exact normalising constant.
pub const RG_METRIC_SCALE: f64 = 2.0;

/// ln(2π√π), the constant in Z(σ).
pub const LN_Z_CONST: f64 = 2.410_242_009_334_045_6;

/// Riemannian Gaussian p(x) = Z(σ)⁻¹ exp(−d²(x, x̄)/2σ²) on the hyperbolic plane.
///
/// With η = −1/2σ² and ψ(η) = ln Z, the warp coefficients are
/// I₁ = 4η²ψ′(η)/2 and I₀ = ψ″(η)·(dη/dσ)², both evaluated through
/// p(σ) = d ln Z/dσ = 1/σ + σ/2 + g(σ), g = e^{−σ²/4}/(√π erf(σ/2)):
/// I₁ = p/(2σ), I₀ = p′ + 3p/σ.
#[derive(Debug, Clone, Copy, Default)]
pub struct RiemannianGaussianH2;

/// ln Z(σ).
pub fn log_partition(sigma: f64) -> f64 {
    LN_Z_CONST + sigma.ln() + 0.25 * sigma * sigma + libm::erf(0.5 * sigma).ln()
}

/// (p, p′, p″) where p = d ln Z / dσ.
fn log_partition_derivatives(s: f64) -> (f64, f64, f64) {
    let g = (-0.25 * s * s).exp() / (PI.sqrt() * libm::erf(0.5 * s));
    let g1 = -0.5 * s * g - g * g;
    let g2 = -0.5 * g - 0.5 * s * g1 - 2.0 * g * g1;
    let p = 1.0 / s + 0.5 * s + g;
    let p1 = -1.0 / (s * s) + 0.5 + g1;
    let p2 = 2.0 / (s * s * s) + g2;
    (p, p1, p2)
}

/// E[d²(x, x̄)] = ψ′(η) = σ³ · d ln Z/dσ.
pub fn mean_squared_distance(sigma: f64) -> f64 {
    sigma.powi(3) * log_partition_derivatives(sigma).0
}

fn base() -> BaseManifold {
    BaseManifold::hyperbolic_plane().scaled(RG_METRIC_SCALE)
}

fn check_kind(x: &BasePoint) -> Result<()> {
    if x.kind() == BaseKind::Hyperbolic2 {
        Ok(())
    } else {
        Err(Error::KindMismatch {
            expected: "hyperbolic-plane",
            found: x.kind().name(),
        })
    }
}

impl LocationScaleModel for RiemannianGaussianH2 {
    fn tag(&self) -> ModelTag {
        ModelTag::RiemannianGaussianH2
    }

    fn base(&self) -> BaseManifold {
        base()
    }

    fn coefficients(&self, sigma: f64) -> Result<WarpCoefficients> {
        check_sigma(sigma)?;
        let s = sigma;
        let (p, p1, p2) = log_partition_derivatives(s);
        Ok(WarpCoefficients {
            sigma,
            i0: p1 + 3.0 * p / s,
            i1: p / (2.0 * s),
            di0_dsigma: p2 + 3.0 * p1 / s - 3.0 * p / (s * s),
            di1_dsigma: p1 / (2.0 * s) - p / (2.0 * s * s),
            d2i1_dsigma2: p2 / (2.0 * s) - p1 / (s * s) + p / (s * s * s),
        })
    }

    fn log_density(&self, x: &BasePoint, z: &WarpedPoint) -> Result<f64> {
        check_sigma(z.sigma)?;
        check_kind(x)?;
        let d = base().distance(x, &z.location)?;
        Ok(-log_partition(z.sigma) - d * d / (2.0 * z.sigma * z.sigma))
    }

    fn score(&self, x: &BasePoint, z: &WarpedPoint) -> Result<Score> {
        check_sigma(z.sigma)?;
        check_kind(x)?;
        let m = base();
        let d = m.distance(x, &z.location)?;
        let s = z.sigma;
        // ∇_x̄ (−d²/2σ²) = log_x̄(x)/σ²; zero at x = x̄.
        let grad = m.log(&z.location, x)? * (1.0 / (s * s));
        Ok(Score {
            location: grad,
            sigma: -log_partition_derivatives(s).0 + d * d / (s * s * s),
        })
    }

    /// Geodesic polar coordinates about x̄: the radius has density
    /// ∝ e^{−r²/2σ²} sinh(r/√2), drawn by rejection from N(σ²/√2, σ²) with
    /// acceptance 1 − e^{−√2 r}; the angle is uniform.
    fn sample_point(&self, z: &WarpedPoint, rng: &mut ChaCha8Rng) -> BasePoint {
        let s = z.sigma;
        let shift = s * s / SQRT_2;
        let r = loop {
            let g: f64 = StandardNormal.sample(rng);
            let r = shift + s * g;
            if r <= 0.0 {
                continue;
            }
            let u: f64 = rng.random();
            if u < -(-SQRT_2 * r).exp_m1() {
                break r;
            }
        };
        let theta = 2.0 * PI * rng.random::<f64>();
        let m = base();
        let basis = m.tangent_basis(&z.location);
        let dir = basis[0] * theta.cos() + basis[1] * theta.sin();
        m.exp(&z.location, &(dir * r)).expect("location on the hyperbolic plane")
    }
}

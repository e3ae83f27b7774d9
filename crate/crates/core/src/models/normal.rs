use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use super::{check_sigma, LocationScaleModel, ModelTag, Score, WarpCoefficients, WarpedPoint};
use crate::base_manifold::{BaseManifold, BasePoint, BaseTangent};
use crate::error::{Error, Result};

const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_8;

/// Univariate normal N(x̄, σ²) with warp coefficients I₀ = σ⁻², I₁ = σ⁻²/2.
///
/// These are the coefficients of the Poincaré half-plane form; the Fisher
/// expectations of the scores are exactly twice as large (see
/// `statistics::mc_fisher`).
#[derive(Debug, Clone, Copy, Default)]
pub struct NormalLine;

fn line(x: &BasePoint) -> Result<f64> {
    match *x {
        BasePoint::Line(v) => Ok(v),
        other => Err(Error::KindMismatch {
            expected: "real-line",
            found: other.kind().name(),
        }),
    }
}

impl LocationScaleModel for NormalLine {
    fn tag(&self) -> ModelTag {
        ModelTag::NormalLine
    }

    fn base(&self) -> BaseManifold {
        BaseManifold::real_line()
    }

    fn coefficients(&self, sigma: f64) -> Result<WarpCoefficients> {
        check_sigma(sigma)?;
        let inv2 = 1.0 / (sigma * sigma);
        Ok(WarpCoefficients {
            sigma,
            i0: inv2,
            i1: 0.5 * inv2,
            di0_dsigma: -2.0 * inv2 / sigma,
            di1_dsigma: -inv2 / sigma,
            d2i1_dsigma2: 3.0 * inv2 * inv2,
        })
    }

    fn log_density(&self, x: &BasePoint, z: &WarpedPoint) -> Result<f64> {
        check_sigma(z.sigma)?;
        let d = line(x)? - line(&z.location)?;
        Ok(-z.sigma.ln() - LN_SQRT_2PI - d * d / (2.0 * z.sigma * z.sigma))
    }

    fn score(&self, x: &BasePoint, z: &WarpedPoint) -> Result<Score> {
        check_sigma(z.sigma)?;
        let d = line(x)? - line(&z.location)?;
        let s2 = z.sigma * z.sigma;
        Ok(Score {
            location: BaseTangent::Line(d / s2),
            sigma: -1.0 / z.sigma + d * d / (s2 * z.sigma),
        })
    }

    fn sample_point(&self, z: &WarpedPoint, rng: &mut ChaCha8Rng) -> BasePoint {
        let mean = line(&z.location).expect("location on the real line");
        let g: f64 = StandardNormal.sample(rng);
        BasePoint::Line(mean + z.sigma * g)
    }
}

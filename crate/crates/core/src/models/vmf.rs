use std::f64::consts::{LN_2, PI};

use nalgebra::Vector3;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use super::{check_sigma, LocationScaleModel, ModelTag, Score, WarpCoefficients, WarpedPoint};
use crate::base_manifold::{BaseManifold, BasePoint, BaseTangent};
use crate::error::{Error, Result};

/// Below this concentration all coefficients come from their Taylor series;
/// the closed forms cancel catastrophically near σ = 0.
pub const VMF_SERIES_BELOW: f64 = 0.25;

/// Below this concentration the sectional curvatures come from their own
/// series. Both are O(σ²) while the generic formulas subtract terms of order
/// σ⁻², losing about 1e-7 relative accuracy by σ = 0.01.
pub const VMF_CURVATURE_SERIES_BELOW: f64 = 0.5;

/// von Mises–Fisher distribution on S² with concentration σ:
/// p(x) = σ / (4π sinh σ) · exp(σ x·x̄).
///
/// I₀ = σ⁻² − sinh⁻²σ, I₁ = σ coth σ − 1.
#[derive(Debug, Clone, Copy, Default)]
pub struct VonMisesFisherS2;

fn poly(coeffs: &[f64], x: f64) -> f64 {
    coeffs.iter().rev().fold(0.0, |acc, c| acc * x + c)
}

// Coefficients in powers of σ².
const I0_SERIES: [f64; 8] = [
    1.0 / 3.0,
    -1.0 / 15.0,
    2.0 / 189.0,
    -1.0 / 675.0,
    2.0 / 10395.0,
    -1382.0 / 58_046_625.0,
    4.0 / 1_403_325.0,
    -3617.0 / 10_854_718_875.0,
];
// dI₀/dσ divided by σ.
const DI0_SERIES: [f64; 7] = [
    -2.0 / 15.0,
    8.0 / 189.0,
    -2.0 / 225.0,
    16.0 / 10395.0,
    -2764.0 / 11_609_325.0,
    16.0 / 467_775.0,
    -7234.0 / 1_550_674_125.0,
];
// I₁ divided by σ².
const I1_SERIES: [f64; 7] = [
    1.0 / 3.0,
    -1.0 / 45.0,
    2.0 / 945.0,
    -1.0 / 4725.0,
    2.0 / 93555.0,
    -1382.0 / 638_512_875.0,
    4.0 / 18_243_225.0,
];
// dI₁/dσ divided by σ.
const DI1_SERIES: [f64; 7] = [
    2.0 / 3.0,
    -4.0 / 45.0,
    4.0 / 315.0,
    -8.0 / 4725.0,
    4.0 / 18711.0,
    -5528.0 / 212_837_625.0,
    8.0 / 2_606_175.0,
];
const D2I1_SERIES: [f64; 7] = [
    2.0 / 3.0,
    -4.0 / 15.0,
    4.0 / 63.0,
    -8.0 / 675.0,
    4.0 / 2079.0,
    -5528.0 / 19_348_875.0,
    8.0 / 200_475.0,
];

// Tangential and mixed sectional curvatures divided by σ², in powers of σ².
const TANGENTIAL_SERIES: [f64; 11] = [
    -1.0 / 75.0,
    1.0 / 1575.0,
    -22.0 / 826_875.0,
    173.0 / 136_434_375.0,
    -706.0 / 8_868_234_375.0,
    5.411_860_891_830_658e-9,
    -3.358_467_018_524_596e-10,
    1.854_344_146_421_268_4e-11,
    -9.520_899_513_658_618e-13,
    4.864_106_206_368_745_6e-14,
    -2.590_937_861_076_012e-15,
];
const MIXED_SERIES: [f64; 11] = [
    -2.0 / 75.0,
    8.0 / 7875.0,
    8.0 / 275_625.0,
    -752.0 / 136_434_375.0,
    18344.0 / 62_077_640_625.0,
    -5.859_329_215_338_286e-9,
    -2.050_887_230_278_852_2e-10,
    1.338_824_654_601_603_7e-11,
    4.336_700_823_644_942_6e-13,
    -9.091_660_260_094_473e-14,
    5.813_127_700_907_007e-15,
];

/// csch σ without overflow for large σ.
fn csch(s: f64) -> f64 {
    2.0 * (-s).exp() / -(-2.0 * s).exp_m1()
}

fn coth(s: f64) -> f64 {
    1.0 / s.tanh()
}

/// ln sinh σ for σ > 0.
fn ln_sinh(s: f64) -> f64 {
    if s < 1.0 {
        s.sinh().ln()
    } else {
        s - LN_2 + (-(-2.0 * s).exp()).ln_1p()
    }
}

/// Mean resultant length A(σ) = coth σ − 1/σ = E[x·x̄].
pub fn mean_resultant(sigma: f64) -> f64 {
    if sigma < VMF_SERIES_BELOW {
        sigma * poly(&I1_SERIES, sigma * sigma)
    } else {
        coth(sigma) - 1.0 / sigma
    }
}

fn series_coefficients(s: f64) -> WarpCoefficients {
    let s2 = s * s;
    WarpCoefficients {
        sigma: s,
        i0: poly(&I0_SERIES, s2),
        i1: s2 * poly(&I1_SERIES, s2),
        di0_dsigma: s * poly(&DI0_SERIES, s2),
        di1_dsigma: s * poly(&DI1_SERIES, s2),
        d2i1_dsigma2: poly(&D2I1_SERIES, s2),
    }
}

fn closed_form_coefficients(s: f64) -> WarpCoefficients {
    let cs2 = csch(s).powi(2);
    let ct = coth(s);
    let i1 = s * ct - 1.0;
    WarpCoefficients {
        sigma: s,
        i0: 1.0 / (s * s) - cs2,
        i1,
        di0_dsigma: -2.0 / (s * s * s) + 2.0 * ct * cs2,
        di1_dsigma: ct - s * cs2,
        d2i1_dsigma2: 2.0 * cs2 * i1,
    }
}

fn sphere(x: &BasePoint) -> Result<Vector3<f64>> {
    match *x {
        BasePoint::Sphere(p) => Ok(p),
        other => Err(Error::KindMismatch {
            expected: "sphere",
            found: other.kind().name(),
        }),
    }
}

impl LocationScaleModel for VonMisesFisherS2 {
    fn tag(&self) -> ModelTag {
        ModelTag::VonMisesFisherS2
    }

    fn base(&self) -> BaseManifold {
        BaseManifold::sphere()
    }

    fn coefficients(&self, sigma: f64) -> Result<WarpCoefficients> {
        check_sigma(sigma)?;
        Ok(if sigma < VMF_SERIES_BELOW {
            series_coefficients(sigma)
        } else {
            closed_form_coefficients(sigma)
        })
    }

    fn curvature_expansion(&self, sigma: f64) -> Option<(f64, f64)> {
        (sigma > 0.0 && sigma < VMF_CURVATURE_SERIES_BELOW).then(|| {
            let s2 = sigma * sigma;
            (s2 * poly(&TANGENTIAL_SERIES, s2), s2 * poly(&MIXED_SERIES, s2))
        })
    }

    fn log_density(&self, x: &BasePoint, z: &WarpedPoint) -> Result<f64> {
        check_sigma(z.sigma)?;
        let (p, m) = (sphere(x)?, sphere(&z.location)?);
        let s = z.sigma;
        Ok(s.ln() - (4.0 * PI).ln() - ln_sinh(s) + s * p.dot(&m))
    }

    fn score(&self, x: &BasePoint, z: &WarpedPoint) -> Result<Score> {
        check_sigma(z.sigma)?;
        let (p, m) = (sphere(x)?, sphere(&z.location)?);
        let c = p.dot(&m);
        Ok(Score {
            location: BaseTangent::Sphere((p - m * c) * z.sigma),
            sigma: c - mean_resultant(z.sigma),
        })
    }

    /// Tangent-normal decomposition: the cosine w = x·x̄ has density ∝ e^{σw}
    /// on [−1, 1] and is drawn by its inverse CDF; the tangent direction is uniform.
    fn sample_point(&self, z: &WarpedPoint, rng: &mut ChaCha8Rng) -> BasePoint {
        let m = sphere(&z.location).expect("location on the sphere");
        let s = z.sigma;
        let u: f64 = rng.random();
        let w = (1.0 + ((1.0 - u) * (-2.0 * s).exp_m1()).ln_1p() / s).clamp(-1.0, 1.0);
        let phi = 2.0 * PI * rng.random::<f64>();
        let basis = BaseManifold::sphere().tangent_basis(&z.location);
        let (e1, e2) = match (basis[0], basis[1]) {
            (BaseTangent::Sphere(a), BaseTangent::Sphere(b)) => (a, b),
            _ => unreachable!(),
        };
        let r = (1.0 - w * w).max(0.0).sqrt();
        let v = m * w + (e1 * phi.cos() + e2 * phi.sin()) * r;
        BasePoint::Sphere(v / v.norm())
    }
}

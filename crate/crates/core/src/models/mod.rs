//! Location-scale models realised as warped metrics
//! `ds² = I₀(σ) dσ² + I₁(σ) ds²_M` on `M × (0, ∞)`.
//!
//! Each model is a [`LocationScaleModel`] strategy registered by name in a
//! [`ModelRegistry`]; everything downstream (curvature, geodesics, statistics,
//! the CLI) works against `&dyn LocationScaleModel`.

mod completeness;
mod normal;
mod rgauss;
mod vmf;

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;
use std::sync::Arc;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::base_manifold::{BaseKind, BaseManifold, BasePoint, BaseTangent};
use crate::error::{Error, Result};
use crate::numerics::quad::{integrate, QuadConfig};

pub use completeness::{completeness_check, BoundaryClass, Completeness};
pub use normal::NormalLine;
pub use rgauss::{log_partition, mean_squared_distance, RiemannianGaussianH2, RG_METRIC_SCALE};
pub use vmf::{mean_resultant, VonMisesFisherS2, VMF_CURVATURE_SERIES_BELOW, VMF_SERIES_BELOW};

/// Points drawn per independent RNG substream in [`sample`].
pub const SAMPLE_CHUNK: usize = 4096;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ModelTag {
    NormalLine,
    VonMisesFisherS2,
    RiemannianGaussianH2,
}

impl ModelTag {
    pub const ALL: [ModelTag; 3] = [ModelTag::NormalLine, ModelTag::VonMisesFisherS2, ModelTag::RiemannianGaussianH2];

    /// Registry name.
    pub fn name(self) -> &'static str {
        match self {
            ModelTag::NormalLine => "normal",
            ModelTag::VonMisesFisherS2 => "vmf",
            ModelTag::RiemannianGaussianH2 => "rgauss",
        }
    }

    pub fn base_kind(self) -> BaseKind {
        match self {
            ModelTag::NormalLine => BaseKind::RealLine,
            ModelTag::VonMisesFisherS2 => BaseKind::Sphere2,
            ModelTag::RiemannianGaussianH2 => BaseKind::Hyperbolic2,
        }
    }
}

impl fmt::Display for ModelTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ModelTag {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "normal" | "normal-line" | "gaussian" => Ok(ModelTag::NormalLine),
            "vmf" | "von-mises-fisher" => Ok(ModelTag::VonMisesFisherS2),
            "rgauss" | "riemannian-gaussian" | "h2" => Ok(ModelTag::RiemannianGaussianH2),
            other => Err(Error::domain(format!("unknown model '{other}'"))),
        }
    }
}

/// A point z = (x̄, σ) of the warped manifold.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WarpedPoint {
    pub location: BasePoint,
    pub sigma: f64,
}

impl WarpedPoint {
    pub fn new(location: BasePoint, sigma: f64) -> Result<Self> {
        check_sigma(sigma)?;
        Ok(Self { location, sigma })
    }
}

/// A tangent vector (v, s) at a warped point: base component and the
/// coefficient of ∂σ.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WarpedTangent {
    pub base: BaseTangent,
    pub sigma_rate: f64,
}

impl WarpedTangent {
    pub fn new(base: BaseTangent, sigma_rate: f64) -> Self {
        Self { base, sigma_rate }
    }

    pub fn zero(kind: BaseKind) -> Self {
        Self::new(BaseTangent::zero(kind), 0.0)
    }

    pub fn is_zero(&self) -> bool {
        self.sigma_rate == 0.0 && self.base.max_abs() == 0.0
    }
}

impl Add for WarpedTangent {
    type Output = WarpedTangent;
    fn add(self, rhs: Self) -> Self {
        WarpedTangent::new(self.base + rhs.base, self.sigma_rate + rhs.sigma_rate)
    }
}

impl Sub for WarpedTangent {
    type Output = WarpedTangent;
    fn sub(self, rhs: Self) -> Self {
        self + (-rhs)
    }
}

impl Neg for WarpedTangent {
    type Output = WarpedTangent;
    fn neg(self) -> Self {
        self * -1.0
    }
}

impl Mul<f64> for WarpedTangent {
    type Output = WarpedTangent;
    fn mul(self, s: f64) -> Self {
        WarpedTangent::new(self.base * s, self.sigma_rate * s)
    }
}

/// Warp coefficients and their σ-derivatives at one σ.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WarpCoefficients {
    pub sigma: f64,
    pub i0: f64,
    pub i1: f64,
    pub di0_dsigma: f64,
    pub di1_dsigma: f64,
    pub d2i1_dsigma2: f64,
}

/// Score of one observation: (∇_x̄ ℓ, ∂σ ℓ).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Score {
    pub location: BaseTangent,
    pub sigma: f64,
}

/// A location-scale model whose Rao-Fisher metric is a warped metric.
pub trait LocationScaleModel: Send + Sync + fmt::Debug {
    fn tag(&self) -> ModelTag;

    /// The base manifold with the metric ds²_M used in the warped metric.
    fn base(&self) -> BaseManifold;

    /// I₀, I₁ and derivatives; fails with a domain error for σ ≤ 0.
    fn coefficients(&self, sigma: f64) -> Result<WarpCoefficients>;

    /// log p(x | x̄, σ) with respect to the Riemannian volume of ds²_M.
    fn log_density(&self, x: &BasePoint, z: &WarpedPoint) -> Result<f64>;

    fn score(&self, x: &BasePoint, z: &WarpedPoint) -> Result<Score>;

    /// One draw from p(· | z).
    fn sample_point(&self, z: &WarpedPoint, rng: &mut ChaCha8Rng) -> BasePoint;

    /// (tangential, mixed) sectional curvatures at σ from a model-specific
    /// expansion, where the generic formulas in [`crate::curvature`] lose
    /// precision. `None` defers to the generic formulas.
    fn curvature_expansion(&self, _sigma: f64) -> Option<(f64, f64)> {
        None
    }

    fn name(&self) -> &'static str {
        self.tag().name()
    }

    fn dimension(&self) -> usize {
        self.base().dimension()
    }
}

pub(crate) fn check_sigma(sigma: f64) -> Result<()> {
    if sigma > 0.0 && sigma.is_finite() {
        Ok(())
    } else {
        Err(Error::domain(format!("σ must be positive and finite, got {sigma}")))
    }
}

/// Checks that `z` lives on the model's base manifold.
pub fn check_point(model: &dyn LocationScaleModel, z: &WarpedPoint) -> Result<()> {
    check_sigma(z.sigma)?;
    model.base().distance(&z.location, &z.location).map(|_| ())
}

pub fn warp_coefficients(model: &dyn LocationScaleModel, sigma: f64) -> Result<WarpCoefficients> {
    model.coefficients(sigma)
}

/// Squared length of a warped tangent: I₀ s² + I₁ ‖v‖²_M.
pub fn norm_sq(model: &dyn LocationScaleModel, z: &WarpedPoint, w: &WarpedTangent) -> Result<f64> {
    let c = model.coefficients(z.sigma)?;
    let b = model.base().metric_dot(&z.location, &w.base, &w.base)?;
    Ok(c.i0 * w.sigma_rate * w.sigma_rate + c.i1 * b)
}

pub fn warped_norm(model: &dyn LocationScaleModel, z: &WarpedPoint, w: &WarpedTangent) -> Result<f64> {
    norm_sq(model, z, w).map(f64::sqrt)
}

/// Signed vertical arc length r(σ_to) − r(σ_from) = ∫ I₀^{1/2} dσ.
pub fn vertical_r(model: &dyn LocationScaleModel, sigma_from: f64, sigma_to: f64) -> Result<f64> {
    check_sigma(sigma_from)?;
    check_sigma(sigma_to)?;
    if sigma_from == sigma_to {
        return Ok(0.0);
    }
    // Substituting σ = e^y turns scale-type integrands (∝ 1/σ) into constants.
    let mut failure = None;
    let val = integrate(
        |y| {
            let s = y.exp();
            match model.coefficients(s) {
                Ok(c) => c.i0.sqrt() * s,
                Err(e) => {
                    failure.get_or_insert(e);
                    0.0
                }
            }
        },
        sigma_from.ln(),
        sigma_to.ln(),
        QuadConfig::default(),
    )?;
    match failure {
        Some(e) => Err(e),
        None => Ok(val),
    }
}

/// ∫₀^σ I₀^{1/2} dσ, the vertical distance to the boundary σ = 0. Fails when
/// the integral diverges (complete models).
pub fn vertical_r_from_zero(model: &dyn LocationScaleModel, sigma: f64) -> Result<f64> {
    check_sigma(sigma)?;
    if completeness_check(model).at_zero != BoundaryClass::Convergent {
        return Err(Error::domain(format!(
            "∫₀ I₀^(1/2) dσ diverges for the {} model",
            model.name()
        )));
    }
    integrate(
        |s| model.coefficients(s).map(|c| c.i0.sqrt()).unwrap_or(f64::NAN),
        0.0,
        sigma,
        QuadConfig::default(),
    )
}

/// `n` i.i.d. draws from p(·|z). Deterministic in `seed`: chunk `k` of
/// [`SAMPLE_CHUNK`] points uses ChaCha8 stream `k`, so the result does not
/// depend on the thread count.
pub fn sample(model: &dyn LocationScaleModel, z: &WarpedPoint, n: usize, seed: u64) -> Result<Vec<BasePoint>> {
    check_point(model, z)?;
    let chunks = n.div_ceil(SAMPLE_CHUNK);
    let out: Vec<Vec<BasePoint>> = (0..chunks)
        .into_par_iter()
        .map(|k| {
            let mut rng = chunk_rng(seed, k as u64);
            let len = SAMPLE_CHUNK.min(n - k * SAMPLE_CHUNK);
            (0..len).map(|_| model.sample_point(z, &mut rng)).collect()
        })
        .collect();
    Ok(out.into_iter().flatten().collect())
}

pub(crate) fn chunk_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Name-indexed collection of models.
#[derive(Clone)]
pub struct ModelRegistry {
    models: BTreeMap<String, Arc<dyn LocationScaleModel>>,
}

impl fmt::Debug for ModelRegistry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.models.keys()).finish()
    }
}

impl ModelRegistry {
    pub fn empty() -> Self {
        Self { models: BTreeMap::new() }
    }

    /// Registry holding the three built-in models under their tag names.
    pub fn builtin() -> Self {
        let mut r = Self::empty();
        r.register(Arc::new(NormalLine));
        r.register(Arc::new(VonMisesFisherS2));
        r.register(Arc::new(RiemannianGaussianH2));
        r
    }

    pub fn register(&mut self, model: Arc<dyn LocationScaleModel>) {
        self.models.insert(model.name().to_string(), model);
    }

    /// Looks a model up by registry name or by any alias accepted by [`ModelTag`].
    pub fn get(&self, name: &str) -> Result<Arc<dyn LocationScaleModel>> {
        if let Some(m) = self.models.get(name) {
            return Ok(m.clone());
        }
        let tag: ModelTag = name.parse()?;
        self.models
            .get(tag.name())
            .cloned()
            .ok_or_else(|| Error::domain(format!("model '{name}' is not registered")))
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.models.keys().map(String::as_str)
    }

    pub fn iter(&self) -> impl Iterator<Item = &Arc<dyn LocationScaleModel>> {
        self.models.values()
    }
}

impl Default for ModelRegistry {
    fn default() -> Self {
        Self::builtin()
    }
}

/// Shorthand for a built-in model by tag.
pub fn builtin(tag: ModelTag) -> Arc<dyn LocationScaleModel> {
    match tag {
        ModelTag::NormalLine => Arc::new(NormalLine),
        ModelTag::VonMisesFisherS2 => Arc::new(VonMisesFisherS2),
        ModelTag::RiemannianGaussianH2 => Arc::new(RiemannianGaussianH2),
    }
}

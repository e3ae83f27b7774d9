//! Monte-Carlo Fisher information, Fréchet means, and natural-gradient
//! online estimation.

use rayon::prelude::*;

use crate::base_manifold::BasePoint;
use crate::error::{Error, Result};
use crate::geodesics::{warped_exp, warped_log};
use crate::models::{chunk_rng, check_point, norm_sq, LocationScaleModel, WarpedPoint, WarpedTangent, SAMPLE_CHUNK};

/// Smallest sample accepted by [`mc_fisher`].
pub const MIN_FISHER_SAMPLES: usize = 1000;

/// Monte-Carlo estimates of I₀ = E(∂σℓ)² and I₁ = E‖∇_x̄ℓ‖²/dim M.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FisherEstimate {
    pub i0_hat: f64,
    pub i1_hat: f64,
    pub n: usize,
    pub i0_stderr: f64,
    pub i1_stderr: f64,
}

#[derive(Debug, Clone, Copy, Default)]
struct Moments {
    a: f64,
    a2: f64,
    b: f64,
    b2: f64,
}

impl Moments {
    fn merge(self, o: Self) -> Self {
        Moments {
            a: self.a + o.a,
            a2: self.a2 + o.a2,
            b: self.b + o.b,
            b2: self.b2 + o.b2,
        }
    }
}

/// Sample means of the squared scores over `n` draws from p(·|z). Uses the
/// same random streams as [`crate::models::sample`], so the estimate is
/// reproducible from `seed` regardless of thread count.
pub fn mc_fisher(model: &dyn LocationScaleModel, z: &WarpedPoint, n: usize, seed: u64) -> Result<FisherEstimate> {
    check_point(model, z)?;
    if n < MIN_FISHER_SAMPLES {
        return Err(Error::domain(format!("mc_fisher needs n ≥ {MIN_FISHER_SAMPLES}, got {n}")));
    }
    let base = model.base();
    let dim = model.dimension() as f64;
    let chunks = n.div_ceil(SAMPLE_CHUNK);
    let total = (0..chunks)
        .into_par_iter()
        .map(|k| -> Result<Moments> {
            let mut rng = chunk_rng(seed, k as u64);
            let len = SAMPLE_CHUNK.min(n - k * SAMPLE_CHUNK);
            let mut m = Moments::default();
            for _ in 0..len {
                let x = model.sample_point(z, &mut rng);
                let s = model.score(&x, z)?;
                let a = s.sigma * s.sigma;
                let b = base.metric_dot(&z.location, &s.location, &s.location)? / dim;
                m = m.merge(Moments { a, a2: a * a, b, b2: b * b });
            }
            Ok(m)
        })
        .try_reduce(Moments::default, |x, y| Ok(x.merge(y)))?;
    let nf = n as f64;
    let stderr = |s: f64, s2: f64| {
        let mean = s / nf;
        ((s2 / nf - mean * mean).max(0.0) / (nf - 1.0)).sqrt()
    };
    Ok(FisherEstimate {
        i0_hat: total.a / nf,
        i1_hat: total.b / nf,
        n,
        i0_stderr: stderr(total.a, total.a2),
        i1_stderr: stderr(total.b, total.b2),
    })
}

/// Settings of the Fréchet-mean gradient descent.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrechetConfig {
    /// Stop when the unit-step update Σ wᵢ log_z(zᵢ) is shorter than this.
    pub tol: f64,
    pub max_iter: usize,
    /// Step halvings allowed per iteration before giving up.
    pub max_halvings: usize,
}

impl Default for FrechetConfig {
    fn default() -> Self {
        Self {
            tol: 1e-9,
            max_iter: 500,
            max_halvings: 40,
        }
    }
}

/// Σ wᵢ log_z(zᵢ) and the objective ½ Σ wᵢ d²(z, zᵢ).
fn mean_field(
    model: &dyn LocationScaleModel,
    z: &WarpedPoint,
    points: &[WarpedPoint],
    weights: &[f64],
) -> Result<(WarpedTangent, f64)> {
    let logs = points
        .par_iter()
        .map(|p| warped_log(model, z, p))
        .collect::<Result<Vec<_>>>()?;
    let mut grad = WarpedTangent::zero(model.base().kind());
    let mut objective = 0.0;
    for (w, l) in weights.iter().zip(&logs) {
        grad = grad + *l * *w;
        objective += 0.5 * w * norm_sq(model, z, l)?;
    }
    Ok((grad, objective))
}

fn normalized_weights(n: usize, weights: Option<&[f64]>) -> Result<Vec<f64>> {
    let w = match weights {
        None => vec![1.0; n],
        Some(w) if w.len() != n => {
            return Err(Error::domain(format!("{} weights for {n} points", w.len())));
        }
        Some(w) => w.to_vec(),
    };
    if w.iter().any(|&v| !(v > 0.0 && v.is_finite())) {
        return Err(Error::domain("weights must be positive and finite"));
    }
    let sum: f64 = w.iter().sum();
    Ok(w.into_iter().map(|v| v / sum).collect())
}

/// Relative rounding level of the objective. Near the minimum the decrease
/// |grad|²/2 drops below it, and steps within it are accepted.
const OBJECTIVE_NOISE: f64 = 1e-12;

/// Weighted Riemannian centre of mass by gradient descent with unit step,
/// halved while the step raises the objective without shrinking the
/// gradient.
pub fn frechet_mean(model: &dyn LocationScaleModel, points: &[WarpedPoint], weights: Option<&[f64]>) -> Result<WarpedPoint> {
    frechet_mean_with(model, points, weights, FrechetConfig::default())
}

pub fn frechet_mean_with(
    model: &dyn LocationScaleModel,
    points: &[WarpedPoint],
    weights: Option<&[f64]>,
    cfg: FrechetConfig,
) -> Result<WarpedPoint> {
    if points.is_empty() {
        return Err(Error::domain("Fréchet mean of an empty set"));
    }
    for p in points {
        check_point(model, p)?;
    }
    let weights = normalized_weights(points.len(), weights)?;
    let mut z = points[0];
    let (mut grad, mut objective) = mean_field(model, &z, points, &weights)?;
    for _ in 0..cfg.max_iter {
        let size = norm_sq(model, &z, &grad)?.sqrt();
        if size < cfg.tol {
            return Ok(z);
        }
        let mut gamma = 1.0;
        let mut accepted = None;
        for _ in 0..=cfg.max_halvings {
            let cand = warped_exp(model, &z, &(grad * gamma))?;
            let (g, f) = mean_field(model, &cand, points, &weights)?;
            if f <= objective + OBJECTIVE_NOISE * objective || norm_sq(model, &cand, &g)?.sqrt() < size {
                accepted = Some((cand, g, f));
                break;
            }
            gamma *= 0.5;
        }
        match accepted {
            Some((cand, g, f)) => {
                z = cand;
                grad = g;
                objective = f;
            }
            None => return Err(Error::no_convergence("Fréchet mean step halving", size)),
        }
    }
    let size = norm_sq(model, &z, &grad)?.sqrt();
    Err(Error::no_convergence("Fréchet mean", size))
}

/// γ_t = a/t, with each step's vertical displacement √I₀|s| capped at `clip`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GainSchedule {
    pub a: f64,
    pub clip: f64,
}

impl Default for GainSchedule {
    fn default() -> Self {
        Self { a: 1.0, clip: 1.0 }
    }
}

impl GainSchedule {
    pub fn gain(&self, t: usize) -> f64 {
        self.a / t as f64
    }
}

/// Estimate after `step` observations.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EstimatorState {
    pub estimate: WarpedPoint,
    pub step: usize,
    /// Gain used to reach this state (0 for the initial state).
    pub gain: f64,
}

/// Estimates outside this σ range are treated as diverged.
pub const DIVERGENCE_BOUNDS: (f64, f64) = (1e-8, 1e8);

/// Natural-gradient (Riemannian stochastic gradient) ascent on the
/// log-likelihood: ẑ ← Exp_ẑ(γ_t G⁻¹∇ℓ(ẑ; x_t)), where G⁻¹∇ℓ has base part
/// ∇_x̄ℓ/I₁ and vertical part ∂σℓ/I₀. Returns every state including the start.
pub fn natural_gradient_estimate(
    model: &dyn LocationScaleModel,
    stream: &[BasePoint],
    gain: GainSchedule,
    z_init: &WarpedPoint,
) -> Result<Vec<EstimatorState>> {
    check_point(model, z_init)?;
    if !(gain.a > 0.0 && gain.clip > 0.0) {
        return Err(Error::domain("gain parameters must be positive"));
    }
    let mut z = *z_init;
    let mut out = Vec::with_capacity(stream.len() + 1);
    out.push(EstimatorState { estimate: z, step: 0, gain: 0.0 });
    for (k, x) in stream.iter().enumerate() {
        let t = k + 1;
        let g = gain.gain(t);
        let s = model.score(x, &z)?;
        let c = model.coefficients(z.sigma)?;
        let mut step = WarpedTangent::new(s.location * (g / c.i1), s.sigma * g / c.i0);
        let rise = c.i0.sqrt() * step.sigma_rate.abs();
        if rise > gain.clip {
            step.sigma_rate *= gain.clip / rise;
        }
        z = warped_exp(model, &z, &step)?;
        if !(z.sigma > DIVERGENCE_BOUNDS.0 && z.sigma < DIVERGENCE_BOUNDS.1) {
            return Err(Error::Divergence { step: t, sigma: z.sigma });
        }
        out.push(EstimatorState { estimate: z, step: t, gain: g });
    }
    Ok(out)
}

//! Extrinsic geometry of the slices M × {σ} and sectional curvatures of the
//! warped manifold.
//!
//! All r-derivatives are taken by the chain rule ∂_r = I₀^{-1/2} ∂_σ on the
//! analytic σ-derivatives of the warp coefficients.

use rayon::prelude::*;

use crate::base_manifold::BasePoint;
use crate::error::{Error, Result};
use crate::models::{LocationScaleModel, WarpCoefficients};

/// Curvature data of the warped manifold at one σ.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurvatureReport {
    pub sigma: f64,
    /// K(u, v) for u, v tangent to the slice; `None` when dim M = 1.
    pub tangential: Option<f64>,
    /// K(u, ∂_r) for u tangent to the slice.
    pub mixed: f64,
    /// ½ ∂_r I₁ / I₁, the coefficient of the second fundamental form.
    pub shape: f64,
}

impl CurvatureReport {
    pub fn is_negative(&self) -> bool {
        self.mixed < 0.0 && self.tangential.is_none_or(|k| k < 0.0)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CurvatureScan {
    pub reports: Vec<CurvatureReport>,
    /// σ values where some sectional curvature is ≥ 0 (or not a number).
    pub nonnegative: Vec<f64>,
}

impl CurvatureScan {
    pub fn all_negative(&self) -> bool {
        self.nonnegative.is_empty()
    }
}

/// ½ I₀^{-1/2} I₁′ / I₁.
pub fn shape_coefficient(c: &WarpCoefficients) -> f64 {
    0.5 * c.di1_dsigma / (c.i0.sqrt() * c.i1)
}

/// K^M/I₁ − ¼(∂_r I₁/I₁)².
pub fn tangential_from(c: &WarpCoefficients, base_curvature: f64) -> f64 {
    base_curvature / c.i1 - c.di1_dsigma * c.di1_dsigma / (4.0 * c.i0 * c.i1 * c.i1)
}

/// −∂²_r I₁^{1/2} / I₁^{1/2}.
pub fn mixed_from(c: &WarpCoefficients) -> f64 {
    let ratio = c.di1_dsigma / c.i1;
    let second = (0.5 * c.d2i1_dsigma2 / c.i1 - 0.25 * ratio * ratio) / c.i0;
    let drift = c.di0_dsigma * c.di1_dsigma / (4.0 * c.i0 * c.i0 * c.i1);
    -(second - drift)
}

/// Distance between x and y inside the slice at σ: √I₁(σ) · d(x, y).
pub fn extrinsic_distance(model: &dyn LocationScaleModel, x: &BasePoint, y: &BasePoint, sigma: f64) -> Result<f64> {
    let c = model.coefficients(sigma)?;
    Ok(c.i1.sqrt() * model.base().distance(x, y)?)
}

pub fn sectional_tangential(model: &dyn LocationScaleModel, sigma: f64) -> Result<f64> {
    if model.dimension() < 2 {
        return Err(Error::Unsupported(format!(
            "tangential curvature needs dim M = 2; the {} model has dim M = 1",
            model.name()
        )));
    }
    let c = model.coefficients(sigma)?;
    Ok(match model.curvature_expansion(sigma) {
        Some((tangential, _)) => tangential,
        None => tangential_from(&c, model.base().curvature()),
    })
}

pub fn sectional_mixed(model: &dyn LocationScaleModel, sigma: f64) -> Result<f64> {
    let c = model.coefficients(sigma)?;
    Ok(match model.curvature_expansion(sigma) {
        Some((_, mixed)) => mixed,
        None => mixed_from(&c),
    })
}

pub fn curvature_report(model: &dyn LocationScaleModel, sigma: f64) -> Result<CurvatureReport> {
    let c = model.coefficients(sigma)?;
    let (tangential, mixed) = match model.curvature_expansion(sigma) {
        Some(pair) => pair,
        None => (tangential_from(&c, model.base().curvature()), mixed_from(&c)),
    };
    Ok(CurvatureReport {
        sigma,
        tangential: (model.dimension() >= 2).then_some(tangential),
        mixed,
        shape: shape_coefficient(&c),
    })
}

/// Reports at every grid point, in grid order.
pub fn curvature_scan(model: &dyn LocationScaleModel, sigma_grid: &[f64]) -> Result<CurvatureScan> {
    let reports = sigma_grid
        .par_iter()
        .map(|&s| curvature_report(model, s))
        .collect::<Result<Vec<_>>>()?;
    let nonnegative = reports.iter().filter(|r| !r.is_negative()).map(|r| r.sigma).collect();
    Ok(CurvatureScan { reports, nonnegative })
}

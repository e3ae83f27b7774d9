//! Numerical classification of ∫₀ I₀^{1/2} dσ and ∫^∞ I₀^{1/2} dσ.
//!
//! The integrand is fitted to a power law σ^α on two adjacent log-log windows
//! at each end. At zero the integral converges iff α > −1, at infinity iff
//! α < −1. The fitted verdict is then confirmed by the growth of the integral
//! over successive decades: for a convergent tail the decade contributions
//! shrink geometrically, for a divergent one they stay level or grow.

use std::fmt;

use super::LocationScaleModel;
use crate::numerics::quad::{integrate, QuadConfig};

/// Exponents closer than this to the critical value −1 count as logarithmic.
const CRITICAL_BAND: f64 = 0.02;
/// The two window exponents at one end must agree to this tolerance.
const WINDOW_AGREEMENT: f64 = 0.05;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundaryClass {
    /// The vertical distance to this boundary is infinite.
    Divergent,
    /// Geodesics can reach this boundary in finite time.
    Convergent,
    /// The fit and the quadrature disagree, or the exponent is unstable.
    Undetermined,
}

impl BoundaryClass {
    pub fn name(self) -> &'static str {
        match self {
            BoundaryClass::Divergent => "divergent",
            BoundaryClass::Convergent => "convergent",
            BoundaryClass::Undetermined => "undetermined",
        }
    }
}

impl fmt::Display for BoundaryClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Completeness {
    pub at_zero: BoundaryClass,
    pub at_infinity: BoundaryClass,
    /// Fitted exponents α of I₀^{1/2} ~ σ^α near each end (inner window).
    pub exponent_at_zero: f64,
    pub exponent_at_infinity: f64,
}

impl Completeness {
    /// Both integrals diverge: every geodesic extends to all time.
    pub fn is_complete(&self) -> bool {
        self.at_zero == BoundaryClass::Divergent && self.at_infinity == BoundaryClass::Divergent
    }
}

fn sqrt_i0(model: &dyn LocationScaleModel, s: f64) -> f64 {
    model.coefficients(s).map(|c| c.i0.sqrt()).unwrap_or(f64::NAN)
}

fn slope(model: &dyn LocationScaleModel, a: f64, b: f64) -> f64 {
    (sqrt_i0(model, b) / sqrt_i0(model, a)).ln() / (b / a).ln()
}

/// ∫ over [a, b] in log coordinates.
fn decade_integral(model: &dyn LocationScaleModel, a: f64, b: f64) -> f64 {
    integrate(|y| y.exp() * sqrt_i0(model, y.exp()), a.ln(), b.ln(), QuadConfig::default()).unwrap_or(f64::NAN)
}

/// Ratio of the outermost decade contribution to the one before it.
fn decade_ratio(model: &dyn LocationScaleModel, inner: (f64, f64), outer: (f64, f64)) -> f64 {
    decade_integral(model, outer.0, outer.1) / decade_integral(model, inner.0, inner.1)
}

fn classify(alpha_in: f64, alpha_out: f64, convergent_if_above: bool, ratio: f64) -> BoundaryClass {
    if !(alpha_in.is_finite() && alpha_out.is_finite() && ratio.is_finite()) {
        return BoundaryClass::Undetermined;
    }
    if (alpha_in - alpha_out).abs() > WINDOW_AGREEMENT {
        return BoundaryClass::Undetermined;
    }
    let margin = if convergent_if_above { alpha_out + 1.0 } else { -1.0 - alpha_out };
    let fitted = if margin > CRITICAL_BAND {
        BoundaryClass::Convergent
    } else {
        BoundaryClass::Divergent
    };
    let measured = if ratio <= 0.9 {
        BoundaryClass::Convergent
    } else if ratio >= 0.99 {
        BoundaryClass::Divergent
    } else {
        BoundaryClass::Undetermined
    };
    if fitted == measured {
        fitted
    } else {
        BoundaryClass::Undetermined
    }
}

/// Classifies both ends of the σ axis.
pub fn completeness_check(model: &dyn LocationScaleModel) -> Completeness {
    let (z_in, z_out) = (slope(model, 1e-7, 1e-5), slope(model, 1e-9, 1e-7));
    let (i_in, i_out) = (slope(model, 1e5, 1e7), slope(model, 1e7, 1e9));
    let z_ratio = decade_ratio(model, (1e-8, 1e-7), (1e-9, 1e-8));
    let i_ratio = decade_ratio(model, (1e7, 1e8), (1e8, 1e9));
    Completeness {
        at_zero: classify(z_in, z_out, true, z_ratio),
        at_infinity: classify(i_in, i_out, false, i_ratio),
        exponent_at_zero: z_in,
        exponent_at_infinity: i_in,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::{NormalLine, RiemannianGaussianH2, VonMisesFisherS2};

    #[test]
    fn normal_is_complete() {
        let c = completeness_check(&NormalLine);
        assert_eq!(c.at_zero, BoundaryClass::Divergent);
        assert_eq!(c.at_infinity, BoundaryClass::Divergent);
        assert!(c.is_complete());
        assert!((c.exponent_at_zero + 1.0).abs() < 1e-9);
    }

    #[test]
    fn vmf_is_incomplete_at_zero_only() {
        let c = completeness_check(&VonMisesFisherS2);
        assert_eq!(c.at_zero, BoundaryClass::Convergent);
        assert_eq!(c.at_infinity, BoundaryClass::Divergent);
        assert!(!c.is_complete());
    }

    #[test]
    fn riemannian_gaussian_is_complete() {
        // I₀ → 4/σ² at zero and → 2 at infinity.
        let c = completeness_check(&RiemannianGaussianH2);
        assert_eq!(c.at_zero, BoundaryClass::Divergent);
        assert_eq!(c.at_infinity, BoundaryClass::Divergent);
    }

    #[test]
    fn classify_rejects_unstable_fits() {
        assert_eq!(classify(-0.5, -1.5, true, 0.5), BoundaryClass::Undetermined);
        assert_eq!(classify(0.0, 0.0, true, 0.95), BoundaryClass::Undetermined);
        assert_eq!(classify(0.0, 0.0, true, 0.1), BoundaryClass::Convergent);
    }
}

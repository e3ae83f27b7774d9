//! Intrinsic geometry of the three base manifolds: the real line, the unit
//! sphere S² (ambient ℝ³ coordinates) and the hyperbolic plane H² (upper
//! half-plane chart).
//!
//! A [`BaseManifold`] is a kind plus a constant metric scale λ, so that its
//! metric is `λ · ds²_kind`. Scaling the metric leaves geodesics, `exp`, `log`
//! and Killing fields unchanged; it multiplies inner products by λ, distances
//! by √λ and divides the sectional curvature by λ.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use nalgebra::{Rotation3, Unit, Vector3};
use num_complex::Complex64;

use crate::error::{Error, Result};

/// On-manifold and tangency tolerance.
pub const MANIFOLD_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BaseKind {
    RealLine,
    Sphere2,
    Hyperbolic2,
}

impl BaseKind {
    pub fn dimension(self) -> usize {
        match self {
            BaseKind::RealLine => 1,
            BaseKind::Sphere2 | BaseKind::Hyperbolic2 => 2,
        }
    }

    /// Sectional curvature of the unscaled metric.
    pub fn curvature(self) -> f64 {
        match self {
            BaseKind::RealLine => 0.0,
            BaseKind::Sphere2 => 1.0,
            BaseKind::Hyperbolic2 => -1.0,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            BaseKind::RealLine => "real-line",
            BaseKind::Sphere2 => "sphere",
            BaseKind::Hyperbolic2 => "hyperbolic-plane",
        }
    }

    /// Number of chart (or ambient) coordinates of a point.
    pub fn coordinate_count(self) -> usize {
        match self {
            BaseKind::RealLine => 1,
            BaseKind::Sphere2 => 3,
            BaseKind::Hyperbolic2 => 2,
        }
    }
}

impl fmt::Display for BaseKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BasePoint {
    Line(f64),
    Sphere(Vector3<f64>),
    HalfPlane { u: f64, w: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BaseTangent {
    Line(f64),
    Sphere(Vector3<f64>),
    HalfPlane { du: f64, dw: f64 },
}

impl BasePoint {
    pub fn sphere(x: f64, y: f64, z: f64) -> Result<Self> {
        let p = Vector3::new(x, y, z);
        if (p.norm() - 1.0).abs() > MANIFOLD_TOL {
            return Err(Error::domain(format!("sphere point has norm {}", p.norm())));
        }
        Ok(BasePoint::Sphere(p))
    }

    /// Projects a nonzero ambient vector onto the sphere.
    pub fn sphere_normalized(v: Vector3<f64>) -> Result<Self> {
        let n = v.norm();
        if !(n > 0.0 && n.is_finite()) {
            return Err(Error::domain("cannot normalise a zero or non-finite vector"));
        }
        Ok(BasePoint::Sphere(v / n))
    }

    pub fn half_plane(u: f64, w: f64) -> Result<Self> {
        if !(w > 0.0 && w.is_finite() && u.is_finite()) {
            return Err(Error::domain(format!("half-plane point needs w > 0, got ({u}, {w})")));
        }
        Ok(BasePoint::HalfPlane { u, w })
    }

    pub fn kind(&self) -> BaseKind {
        match self {
            BasePoint::Line(_) => BaseKind::RealLine,
            BasePoint::Sphere(_) => BaseKind::Sphere2,
            BasePoint::HalfPlane { .. } => BaseKind::Hyperbolic2,
        }
    }

    pub fn coords(&self) -> Vec<f64> {
        match *self {
            BasePoint::Line(x) => vec![x],
            BasePoint::Sphere(p) => vec![p.x, p.y, p.z],
            BasePoint::HalfPlane { u, w } => vec![u, w],
        }
    }

    /// Builds a point from chart coordinates, validating the manifold invariant.
    pub fn from_coords(kind: BaseKind, c: &[f64]) -> Result<Self> {
        if c.len() != kind.coordinate_count() {
            return Err(Error::domain(format!(
                "{kind} point needs {} coordinates, got {}",
                kind.coordinate_count(),
                c.len()
            )));
        }
        match kind {
            BaseKind::RealLine if c[0].is_finite() => Ok(BasePoint::Line(c[0])),
            BaseKind::RealLine => Err(Error::domain("non-finite coordinate")),
            BaseKind::Sphere2 => BasePoint::sphere(c[0], c[1], c[2]),
            BaseKind::Hyperbolic2 => BasePoint::half_plane(c[0], c[1]),
        }
    }

    fn as_complex(&self) -> Complex64 {
        match *self {
            BasePoint::HalfPlane { u, w } => Complex64::new(u, w),
            _ => unreachable!("as_complex on a non half-plane point"),
        }
    }
}

impl BaseTangent {
    pub fn kind(&self) -> BaseKind {
        match self {
            BaseTangent::Line(_) => BaseKind::RealLine,
            BaseTangent::Sphere(_) => BaseKind::Sphere2,
            BaseTangent::HalfPlane { .. } => BaseKind::Hyperbolic2,
        }
    }

    pub fn zero(kind: BaseKind) -> Self {
        match kind {
            BaseKind::RealLine => BaseTangent::Line(0.0),
            BaseKind::Sphere2 => BaseTangent::Sphere(Vector3::zeros()),
            BaseKind::Hyperbolic2 => BaseTangent::HalfPlane { du: 0.0, dw: 0.0 },
        }
    }

    pub fn components(&self) -> Vec<f64> {
        match *self {
            BaseTangent::Line(v) => vec![v],
            BaseTangent::Sphere(v) => vec![v.x, v.y, v.z],
            BaseTangent::HalfPlane { du, dw } => vec![du, dw],
        }
    }

    pub fn from_components(kind: BaseKind, c: &[f64]) -> Result<Self> {
        if c.len() != kind.coordinate_count() {
            return Err(Error::domain(format!(
                "{kind} tangent needs {} components, got {}",
                kind.coordinate_count(),
                c.len()
            )));
        }
        Ok(match kind {
            BaseKind::RealLine => BaseTangent::Line(c[0]),
            BaseKind::Sphere2 => BaseTangent::Sphere(Vector3::new(c[0], c[1], c[2])),
            BaseKind::Hyperbolic2 => BaseTangent::HalfPlane { du: c[0], dw: c[1] },
        })
    }

    /// Largest absolute component, a chart-level size used for tolerances.
    pub fn max_abs(&self) -> f64 {
        self.components().iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    fn as_complex(&self) -> Complex64 {
        match *self {
            BaseTangent::HalfPlane { du, dw } => Complex64::new(du, dw),
            _ => unreachable!("as_complex on a non half-plane tangent"),
        }
    }

    fn from_complex(c: Complex64) -> Self {
        BaseTangent::HalfPlane { du: c.re, dw: c.im }
    }
}

impl Add for BaseTangent {
    type Output = BaseTangent;
    fn add(self, rhs: BaseTangent) -> BaseTangent {
        match (self, rhs) {
            (BaseTangent::Line(a), BaseTangent::Line(b)) => BaseTangent::Line(a + b),
            (BaseTangent::Sphere(a), BaseTangent::Sphere(b)) => BaseTangent::Sphere(a + b),
            (BaseTangent::HalfPlane { du: a, dw: b }, BaseTangent::HalfPlane { du: c, dw: d }) => {
                BaseTangent::HalfPlane { du: a + c, dw: b + d }
            }
            (a, b) => panic!("adding tangents of different kinds: {} + {}", a.kind(), b.kind()),
        }
    }
}

impl Sub for BaseTangent {
    type Output = BaseTangent;
    fn sub(self, rhs: BaseTangent) -> BaseTangent {
        self + (-rhs)
    }
}

impl Neg for BaseTangent {
    type Output = BaseTangent;
    fn neg(self) -> BaseTangent {
        self * -1.0
    }
}

impl Mul<f64> for BaseTangent {
    type Output = BaseTangent;
    fn mul(self, s: f64) -> BaseTangent {
        match self {
            BaseTangent::Line(a) => BaseTangent::Line(a * s),
            BaseTangent::Sphere(a) => BaseTangent::Sphere(a * s),
            BaseTangent::HalfPlane { du, dw } => BaseTangent::HalfPlane { du: du * s, dw: dw * s },
        }
    }
}

/// A basis element of the isometry Lie algebra of a base manifold.
///
/// RealLine: 0 = translation. Sphere2: rotations about e₁, e₂, e₃.
/// Hyperbolic2: 0 = horizontal translation, 1 = dilation about the origin,
/// 2 = the parabolic generator `z ↦ z / (1 − t z)` fixing 0.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct IsometryGenerator {
    pub kind: BaseKind,
    pub index: usize,
}

impl IsometryGenerator {
    pub fn new(kind: BaseKind, index: usize) -> Result<Self> {
        let count = Self::count(kind);
        if index >= count {
            return Err(Error::domain(format!("{kind} has {count} generators, index {index} requested")));
        }
        Ok(Self { kind, index })
    }

    pub fn count(kind: BaseKind) -> usize {
        match kind {
            BaseKind::RealLine => 1,
            BaseKind::Sphere2 | BaseKind::Hyperbolic2 => 3,
        }
    }

    pub fn basis(kind: BaseKind) -> Vec<Self> {
        (0..Self::count(kind)).map(|index| Self { kind, index }).collect()
    }
}

/// One of the base manifolds with a constant metric scale.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BaseManifold {
    kind: BaseKind,
    metric_scale: f64,
}

impl BaseManifold {
    pub fn new(kind: BaseKind) -> Self {
        Self { kind, metric_scale: 1.0 }
    }

    pub fn real_line() -> Self {
        Self::new(BaseKind::RealLine)
    }

    pub fn sphere() -> Self {
        Self::new(BaseKind::Sphere2)
    }

    pub fn hyperbolic_plane() -> Self {
        Self::new(BaseKind::Hyperbolic2)
    }

    /// The same manifold with metric `scale · ds²`.
    pub fn scaled(self, scale: f64) -> Self {
        assert!(scale > 0.0 && scale.is_finite(), "metric scale must be positive");
        Self {
            kind: self.kind,
            metric_scale: self.metric_scale * scale,
        }
    }

    pub fn kind(&self) -> BaseKind {
        self.kind
    }

    pub fn metric_scale(&self) -> f64 {
        self.metric_scale
    }

    pub fn dimension(&self) -> usize {
        self.kind.dimension()
    }

    /// Constant sectional curvature K^M of the (scaled) metric.
    pub fn curvature(&self) -> f64 {
        self.kind.curvature() / self.metric_scale
    }

    fn check_point(&self, x: &BasePoint) -> Result<()> {
        if x.kind() != self.kind {
            return Err(Error::KindMismatch {
                expected: self.kind.name(),
                found: x.kind().name(),
            });
        }
        match *x {
            BasePoint::Line(v) if !v.is_finite() => Err(Error::domain("non-finite line point")),
            BasePoint::Sphere(p) if (p.norm() - 1.0).abs() > MANIFOLD_TOL => {
                Err(Error::domain(format!("sphere point off the sphere (|x| = {})", p.norm())))
            }
            BasePoint::HalfPlane { w, .. } if !(w > 0.0) => Err(Error::domain(format!("half-plane point with w = {w}"))),
            _ => Ok(()),
        }
    }

    /// Checks that `v` is a tangent vector at `x`.
    pub fn check_tangent(&self, x: &BasePoint, v: &BaseTangent) -> Result<()> {
        self.check_point(x)?;
        if v.kind() != self.kind {
            return Err(Error::KindMismatch {
                expected: self.kind.name(),
                found: v.kind().name(),
            });
        }
        if let (BasePoint::Sphere(p), BaseTangent::Sphere(t)) = (x, v) {
            if p.dot(t).abs() > MANIFOLD_TOL * (1.0 + t.norm()) {
                return Err(Error::domain(format!("vector not tangent to the sphere (<x,v> = {})", p.dot(t))));
            }
        }
        Ok(())
    }

    /// Projects an ambient/chart vector onto the tangent space at `x`.
    pub fn project_tangent(&self, x: &BasePoint, v: &BaseTangent) -> BaseTangent {
        match (x, v) {
            (BasePoint::Sphere(p), BaseTangent::Sphere(t)) => BaseTangent::Sphere(t - p * p.dot(t)),
            _ => *v,
        }
    }

    pub fn metric_dot(&self, x: &BasePoint, u: &BaseTangent, v: &BaseTangent) -> Result<f64> {
        self.check_tangent(x, u)?;
        self.check_tangent(x, v)?;
        Ok(self.metric_scale * self.dot_unchecked(x, u, v))
    }

    fn dot_unchecked(&self, x: &BasePoint, u: &BaseTangent, v: &BaseTangent) -> f64 {
        match (x, u, v) {
            (_, BaseTangent::Line(a), BaseTangent::Line(b)) => a * b,
            (_, BaseTangent::Sphere(a), BaseTangent::Sphere(b)) => a.dot(b),
            (BasePoint::HalfPlane { w, .. }, BaseTangent::HalfPlane { du: a, dw: b }, BaseTangent::HalfPlane { du: c, dw: d }) => {
                (a * c + b * d) / (w * w)
            }
            _ => unreachable!("kinds checked by caller"),
        }
    }

    pub fn norm(&self, x: &BasePoint, v: &BaseTangent) -> Result<f64> {
        self.metric_dot(x, v, v).map(f64::sqrt)
    }

    /// Riemannian distance of the scaled metric.
    pub fn distance(&self, x: &BasePoint, y: &BasePoint) -> Result<f64> {
        self.check_point(x)?;
        self.check_point(y)?;
        let d = match (x, y) {
            (BasePoint::Line(a), BasePoint::Line(b)) => (a - b).abs(),
            (BasePoint::Sphere(a), BasePoint::Sphere(b)) => a.cross(b).norm().atan2(a.dot(b)),
            (BasePoint::HalfPlane { u: u1, w: w1 }, BasePoint::HalfPlane { u: u2, w: w2 }) => {
                let chord = ((u1 - u2).powi(2) + (w1 - w2).powi(2)).sqrt();
                2.0 * (chord / (2.0 * (w1 * w2).sqrt())).asinh()
            }
            _ => unreachable!(),
        };
        Ok(self.metric_scale.sqrt() * d)
    }

    /// Riemannian exponential map.
    pub fn exp(&self, x: &BasePoint, v: &BaseTangent) -> Result<BasePoint> {
        self.geodesic(x, v, 1.0).map(|(p, _)| p)
    }

    /// Point and velocity at time `t` of the geodesic `t ↦ exp(x, t v)`.
    pub fn geodesic(&self, x: &BasePoint, v: &BaseTangent, t: f64) -> Result<(BasePoint, BaseTangent)> {
        self.check_tangent(x, v)?;
        Ok(match (x, v) {
            (BasePoint::Line(a), BaseTangent::Line(b)) => (BasePoint::Line(a + t * b), BaseTangent::Line(*b)),
            (BasePoint::Sphere(p), BaseTangent::Sphere(dv)) => {
                let dv = dv - p * p.dot(dv);
                let n = dv.norm();
                if n == 0.0 {
                    return Ok((*x, BaseTangent::Sphere(dv)));
                }
                let (s, c) = (n * t).sin_cos();
                let q = p * c + dv * (s / n);
                let vel = -p * (n * s) + dv * c;
                let q = q / q.norm();
                (BasePoint::Sphere(q), BaseTangent::Sphere(vel - q * q.dot(&vel)))
            }
            (BasePoint::HalfPlane { u, w }, BaseTangent::HalfPlane { .. }) => {
                let zeta = v.as_complex() / *w;
                let s = zeta.norm();
                if s == 0.0 {
                    return Ok((*x, *v));
                }
                // Vertical geodesic i·e^{st} rotated about i by the elliptic
                // element k(z) = (cos φ z + sin φ)/(−sin φ z + cos φ), whose
                // derivative at i is e^{2iφ}.
                let rot = Complex64::new(0.0, -1.0) * zeta / s;
                let phi = 0.5 * rot.arg();
                let (sp, cp) = phi.sin_cos();
                let e = (-s * t).exp();
                let num = Complex64::new(sp * e, cp);
                let den = Complex64::new(cp * e, -sp);
                let z = num / den;
                let vel = Complex64::new(0.0, s * e) / (den * den);
                let p = Complex64::new(*u, 0.0) + z * *w;
                if !(p.im > 0.0) {
                    return Err(Error::domain("hyperbolic geodesic left representable range"));
                }
                (BasePoint::HalfPlane { u: p.re, w: p.im }, BaseTangent::from_complex(vel * *w))
            }
            _ => unreachable!(),
        })
    }

    /// Riemannian logarithm: the initial velocity of the minimising unit-time
    /// geodesic from `x` to `y`.
    pub fn log(&self, x: &BasePoint, y: &BasePoint) -> Result<BaseTangent> {
        self.check_point(x)?;
        self.check_point(y)?;
        Ok(match (x, y) {
            (BasePoint::Line(a), BasePoint::Line(b)) => BaseTangent::Line(b - a),
            (BasePoint::Sphere(p), BasePoint::Sphere(q)) => {
                let perp = q - p * p.dot(q);
                let sin_t = p.cross(q).norm();
                let cos_t = p.dot(q);
                if sin_t < MANIFOLD_TOL {
                    if cos_t > 0.0 {
                        return Ok(BaseTangent::Sphere(Vector3::zeros()));
                    }
                    return Err(Error::CutLocus);
                }
                let theta = sin_t.atan2(cos_t);
                BaseTangent::Sphere(perp * (theta / perp.norm()))
            }
            (BasePoint::HalfPlane { u, w }, BasePoint::HalfPlane { .. }) => {
                let zeta = (y.as_complex() - Complex64::new(*u, 0.0)) / *w;
                let i = Complex64::new(0.0, 1.0);
                let q = (zeta - i) / (zeta + i);
                if q.norm() == 0.0 {
                    return Ok(BaseTangent::zero(BaseKind::Hyperbolic2));
                }
                let d = self.distance(x, y)? / self.metric_scale.sqrt();
                let dir = i * q / q.norm();
                BaseTangent::from_complex(dir * (d * *w))
            }
            _ => unreachable!(),
        })
    }

    /// Value at `x` of the Killing field X_ξ(x) = d/dt|₀ e^{tξ}·x.
    pub fn killing_field(&self, xi: &IsometryGenerator, x: &BasePoint) -> Result<BaseTangent> {
        self.check_generator(xi)?;
        self.check_point(x)?;
        Ok(match *x {
            BasePoint::Line(_) => BaseTangent::Line(1.0),
            BasePoint::Sphere(p) => BaseTangent::Sphere(Vector3::ith(xi.index, 1.0).cross(&p)),
            BasePoint::HalfPlane { u, w } => match xi.index {
                0 => BaseTangent::HalfPlane { du: 1.0, dw: 0.0 },
                1 => BaseTangent::HalfPlane { du: u, dw: w },
                _ => BaseTangent::HalfPlane {
                    du: u * u - w * w,
                    dw: 2.0 * u * w,
                },
            },
        })
    }

    /// The isometry e^{tξ} applied to `x` (exact translation, rotation or Möbius map).
    pub fn flow(&self, xi: &IsometryGenerator, t: f64, x: &BasePoint) -> Result<BasePoint> {
        self.check_generator(xi)?;
        self.check_point(x)?;
        Ok(match *x {
            BasePoint::Line(a) => BasePoint::Line(a + t),
            BasePoint::Sphere(p) => {
                let axis = Unit::new_unchecked(Vector3::ith(xi.index, 1.0));
                let q = Rotation3::from_axis_angle(&axis, t) * p;
                BasePoint::Sphere(q / q.norm())
            }
            BasePoint::HalfPlane { .. } => {
                let z = x.as_complex();
                let image = match xi.index {
                    0 => z + t,
                    1 => z * t.exp(),
                    _ => z / (Complex64::new(1.0, 0.0) - z * t),
                };
                BasePoint::HalfPlane { u: image.re, w: image.im }
            }
        })
    }

    fn check_generator(&self, xi: &IsometryGenerator) -> Result<()> {
        if xi.kind != self.kind {
            return Err(Error::KindMismatch {
                expected: self.kind.name(),
                found: xi.kind.name(),
            });
        }
        Ok(())
    }

    /// Orthonormal basis (in the scaled metric) of the tangent space at `x`.
    pub fn tangent_basis(&self, x: &BasePoint) -> Vec<BaseTangent> {
        let k = 1.0 / self.metric_scale.sqrt();
        match *x {
            BasePoint::Line(_) => vec![BaseTangent::Line(k)],
            BasePoint::Sphere(p) => {
                let helper = if p.x.abs() < 0.9 { Vector3::x() } else { Vector3::y() };
                let e1 = (helper - p * p.dot(&helper)).normalize();
                let e2 = p.cross(&e1);
                vec![BaseTangent::Sphere(e1 * k), BaseTangent::Sphere(e2 * k)]
            }
            BasePoint::HalfPlane { w, .. } => vec![
                BaseTangent::HalfPlane { du: w * k, dw: 0.0 },
                BaseTangent::HalfPlane { du: 0.0, dw: w * k },
            ],
        }
    }

    /// A canonical reference point: 0, the north pole e₃, or i.
    pub fn origin(&self) -> BasePoint {
        match self.kind {
            BaseKind::RealLine => BasePoint::Line(0.0),
            BaseKind::Sphere2 => BasePoint::Sphere(Vector3::z()),
            BaseKind::Hyperbolic2 => BasePoint::HalfPlane { u: 0.0, w: 1.0 },
        }
    }
}

/// Numerically safe `acos`: arguments outside `[-1, 1]` by at most `MANIFOLD_TOL`
/// are clamped, larger violations are domain errors.
pub fn safe_acos(c: f64) -> Result<f64> {
    if c.abs() > 1.0 + MANIFOLD_TOL || c.is_nan() {
        return Err(Error::domain(format!("acos argument {c} out of range")));
    }
    Ok(c.clamp(-1.0, 1.0).acos())
}

/// Numerically safe `acosh` with the same clamping rule at 1.
pub fn safe_acosh(c: f64) -> Result<f64> {
    if c < 1.0 - MANIFOLD_TOL || c.is_nan() {
        return Err(Error::domain(format!("acosh argument {c} out of range")));
    }
    Ok(c.max(1.0).acosh())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{E, FRAC_PI_2};

    fn sphere() -> BaseManifold {
        BaseManifold::sphere()
    }
    fn h2() -> BaseManifold {
        BaseManifold::hyperbolic_plane()
    }

    #[test]
    fn metric_dot_examples() {
        let x = BasePoint::Sphere(Vector3::z());
        let u = BaseTangent::Sphere(Vector3::x());
        assert_eq!(sphere().metric_dot(&x, &u, &u).unwrap(), 1.0);

        let x = BasePoint::HalfPlane { u: 0.0, w: 1.0 };
        let v = BaseTangent::HalfPlane { du: 1.0, dw: 0.0 };
        assert_eq!(h2().metric_dot(&x, &v, &v).unwrap(), 1.0);
        let x = BasePoint::HalfPlane { u: 0.0, w: 2.0 };
        assert_eq!(h2().metric_dot(&x, &v, &v).unwrap(), 0.25);
    }

    #[test]
    fn metric_dot_rejects_non_tangent_vectors() {
        let x = BasePoint::Sphere(Vector3::z());
        let bad = BaseTangent::Sphere(Vector3::new(0.0, 0.0, 1.0));
        assert!(matches!(sphere().metric_dot(&x, &bad, &bad), Err(Error::Domain(_))));
        let line = BaseTangent::Line(1.0);
        assert!(matches!(sphere().metric_dot(&x, &line, &line), Err(Error::KindMismatch { .. })));
    }

    #[test]
    fn distance_examples() {
        let n = BasePoint::Sphere(Vector3::z());
        let e1 = BasePoint::Sphere(Vector3::x());
        assert!((sphere().distance(&n, &e1).unwrap() - FRAC_PI_2).abs() < 1e-15);
        let a = BasePoint::HalfPlane { u: 0.0, w: 1.0 };
        let b = BasePoint::HalfPlane { u: 0.0, w: E };
        assert!((h2().distance(&a, &b).unwrap() - 1.0).abs() < 1e-15);
        let line = BaseManifold::real_line();
        assert_eq!(line.distance(&BasePoint::Line(3.0), &BasePoint::Line(-1.0)).unwrap(), 4.0);
    }

    #[test]
    fn exp_examples() {
        let line = BaseManifold::real_line();
        assert_eq!(line.exp(&BasePoint::Line(1.0), &BaseTangent::Line(2.0)).unwrap(), BasePoint::Line(3.0));

        let n = BasePoint::Sphere(Vector3::z());
        let v = BaseTangent::Sphere(Vector3::x() * FRAC_PI_2);
        match sphere().exp(&n, &v).unwrap() {
            BasePoint::Sphere(p) => assert!((p - Vector3::x()).norm() < 1e-15),
            _ => unreachable!(),
        }

        let i = BasePoint::HalfPlane { u: 0.0, w: 1.0 };
        let up = BaseTangent::HalfPlane { du: 0.0, dw: 1.0 };
        match h2().exp(&i, &up).unwrap() {
            BasePoint::HalfPlane { u, w } => {
                assert!(u.abs() < 1e-15);
                assert!((w - E).abs() < 1e-14);
            }
            _ => unreachable!(),
        }
    }

    #[test]
    fn log_examples_and_cut_locus() {
        let line = BaseManifold::real_line();
        assert_eq!(line.log(&BasePoint::Line(1.0), &BasePoint::Line(4.0)).unwrap(), BaseTangent::Line(3.0));
        for m in [BaseManifold::real_line(), sphere(), h2()] {
            let x = m.origin();
            assert_eq!(m.log(&x, &x).unwrap().max_abs(), 0.0);
        }
        let n = BasePoint::Sphere(Vector3::z());
        let s = BasePoint::Sphere(-Vector3::z());
        assert_eq!(sphere().log(&n, &s), Err(Error::CutLocus));
    }

    #[test]
    fn killing_field_examples() {
        let e3 = IsometryGenerator::new(BaseKind::Sphere2, 2).unwrap();
        match sphere().killing_field(&e3, &BasePoint::Sphere(Vector3::x())).unwrap() {
            BaseTangent::Sphere(v) => assert!((v - Vector3::y()).norm() < 1e-15),
            _ => unreachable!(),
        }
        assert_eq!(sphere().killing_field(&e3, &BasePoint::Sphere(Vector3::z())).unwrap().max_abs(), 0.0);
        let tr = IsometryGenerator::new(BaseKind::RealLine, 0).unwrap();
        assert_eq!(
            BaseManifold::real_line().killing_field(&tr, &BasePoint::Line(-7.5)).unwrap(),
            BaseTangent::Line(1.0)
        );
    }

    #[test]
    fn killing_field_is_flow_derivative() {
        let points = [
            (h2(), BasePoint::HalfPlane { u: 0.3, w: 1.7 }),
            (sphere(), BasePoint::sphere_normalized(Vector3::new(0.2, -0.5, 0.8)).unwrap()),
        ];
        for (m, x) in points {
            for xi in IsometryGenerator::basis(m.kind()) {
                let h = 1e-6;
                let fwd = m.flow(&xi, h, &x).unwrap().coords();
                let bwd = m.flow(&xi, -h, &x).unwrap().coords();
                let fd: Vec<f64> = fwd.iter().zip(&bwd).map(|(a, b)| (a - b) / (2.0 * h)).collect();
                let k = m.killing_field(&xi, &x).unwrap().components();
                for (a, b) in fd.iter().zip(&k) {
                    assert!((a - b).abs() < 1e-8, "{:?}: {a} vs {b}", xi);
                }
            }
        }
    }

    #[test]
    fn scaled_metric_scales_distance_and_curvature() {
        let m = h2().scaled(2.0);
        let a = BasePoint::HalfPlane { u: 0.0, w: 1.0 };
        let b = BasePoint::HalfPlane { u: 0.0, w: E };
        assert!((m.distance(&a, &b).unwrap() - 2f64.sqrt()).abs() < 1e-15);
        assert_eq!(m.curvature(), -0.5);
        let v = m.log(&a, &b).unwrap();
        assert!((m.norm(&a, &v).unwrap() - 2f64.sqrt()).abs() < 1e-14);
    }

    #[test]
    fn safe_inverse_trig_clamps_only_rounding() {
        assert_eq!(safe_acos(1.0 + 1e-13).unwrap(), 0.0);
        assert!(safe_acos(1.0 + 1e-9).is_err());
        assert_eq!(safe_acosh(1.0 - 1e-13).unwrap(), 0.0);
        assert!(safe_acosh(0.5).is_err());
    }
}

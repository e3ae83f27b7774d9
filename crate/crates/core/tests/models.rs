mod common;

use common::*;
use rand::Rng;
use warpgeo::base_manifold::{BaseKind, BasePoint, IsometryGenerator};
use warpgeo::models::{
    builtin, log_partition, mean_resultant, mean_squared_distance, sample, warp_coefficients, LocationScaleModel,
    ModelTag, NormalLine, RiemannianGaussianH2, VonMisesFisherS2, WarpedPoint,
};

fn all_models() -> impl Iterator<Item = (ModelTag, std::sync::Arc<dyn LocationScaleModel>)> {
    ModelTag::ALL.into_iter().map(|t| (t, builtin(t)))
}

#[test]
fn coefficients_are_positive() {
    for (tag, m) in all_models() {
        for s in log_grid(1e-6, 1e3, 200) {
            let c = warp_coefficients(m.as_ref(), s).unwrap();
            assert!(c.i0 > 0.0 && c.i1 > 0.0, "{tag} σ={s}: {c:?}");
        }
    }
}

#[test]
fn derivatives_match_finite_differences() {
    for (tag, m) in all_models() {
        let c = |s: f64| warp_coefficients(m.as_ref(), s).unwrap();
        for s in log_grid(0.05, 50.0, 60) {
            // Five-point stencils.
            let five = |f: &dyn Fn(f64) -> f64, h: f64| {
                let (p1, m1, p2, m2) = (f(s + h), f(s - h), f(s + 2.0 * h), f(s - 2.0 * h));
                ((8.0 * (p1 - m1) - (p2 - m2)) / (12.0 * h), (-p2 + 16.0 * p1 - 30.0 * f(s) + 16.0 * m1 - m2) / (12.0 * h * h))
            };
            let here = c(s);
            let h = 1e-3 * s;
            let (di0, _) = five(&|x| c(x).i0, h);
            let (di1, _) = five(&|x| c(x).i1, h);
            // d²I₁ is checked against differences of the (already checked)
            // dI₁: for vMF at large σ it is exponentially small next to I₁.
            let (d2, _) = five(&|x| c(x).di1_dsigma, h);
            let checks = [
                ("dI0", here.di0_dsigma, di0, here.i0),
                ("dI1", here.di1_dsigma, di1, here.i1),
                ("d2I1", here.d2i1_dsigma2, d2, here.di1_dsigma),
            ];
            for (name, analytic, fd, f) in checks {
                // Rounding in the differenced function bounds what the stencil resolves.
                let floor = 100.0 * f64::EPSILON * f.abs() / h;
                let gap = (analytic - fd).abs();
                assert!(gap < 1e-6 * fd.abs() + floor, "{tag} σ={s} {name}: {analytic} vs {fd} ({gap:e})");
            }
        }
    }
}

#[test]
fn vmf_small_sigma_series_is_fourth_order() {
    for s in [1e-3, 1e-2] {
        let i0 = warp_coefficients(&VonMisesFisherS2, s).unwrap().i0;
        let gap = (i0 - (1.0 / 3.0 - s * s / 15.0)).abs();
        // The next term is 2σ⁴/189.
        assert!(gap < 0.011 * s.powi(4), "σ={s}: {gap:e}");
    }
}

#[test]
fn log_density_examples() {
    let z = WarpedPoint::new(BasePoint::Line(0.7), 1.3).unwrap();
    let peak = NormalLine.log_density(&BasePoint::Line(0.7), &z).unwrap();
    assert!((peak - (-(1.3f64).ln() - (2.0 * std::f64::consts::PI).sqrt().ln())).abs() < 1e-14);
    let z = WarpedPoint::new(BasePoint::Line(0.0), 1.0).unwrap();
    let s = NormalLine.score(&BasePoint::Line(2.0), &z).unwrap();
    assert!((s.sigma - 3.0).abs() < 1e-14);
    assert_eq!(s.location, warpgeo::BaseTangent::Line(2.0));
}

/// Applies a random composition of basis isometries.
fn random_isometry(kind: BaseKind, rng: &mut rand_chacha::ChaCha8Rng) -> Vec<(IsometryGenerator, f64)> {
    (0..4)
        .map(|_| {
            let k = rng.random_range(0..IsometryGenerator::count(kind));
            (IsometryGenerator::new(kind, k).unwrap(), rng.random_range(-0.8..0.8))
        })
        .collect()
}

fn apply(m: &dyn LocationScaleModel, g: &[(IsometryGenerator, f64)], x: &BasePoint) -> BasePoint {
    g.iter().fold(*x, |p, (xi, t)| m.base().flow(xi, *t, &p).unwrap())
}

#[test]
fn log_density_is_isometry_invariant() {
    let mut r = rng(41);
    for (tag, m) in all_models() {
        for _ in 0..50 {
            let z = random_point(m.as_ref(), &mut r);
            let x = random_base_point(tag.base_kind(), &mut r);
            let g = random_isometry(tag.base_kind(), &mut r);
            let gz = WarpedPoint::new(apply(m.as_ref(), &g, &z.location), z.sigma).unwrap();
            let gx = apply(m.as_ref(), &g, &x);
            let a = m.log_density(&x, &z).unwrap();
            let b = m.log_density(&gx, &gz).unwrap();
            assert!((a - b).abs() < 1e-10 * (1.0 + a.abs()), "{tag}: {a} vs {b}");
        }
    }
}

#[test]
fn score_matches_finite_differences_of_log_density() {
    let mut r = rng(42);
    for (tag, m) in all_models() {
        let base = m.base();
        for _ in 0..40 {
            let z = random_point(m.as_ref(), &mut r);
            let x = random_base_point(tag.base_kind(), &mut r);
            let s = m.score(&x, &z).unwrap();
            let l = |zz: &WarpedPoint| m.log_density(&x, zz).unwrap();

            let h = 1e-5 * z.sigma;
            let up = WarpedPoint::new(z.location, z.sigma + h).unwrap();
            let down = WarpedPoint::new(z.location, z.sigma - h).unwrap();
            let fd = (l(&up) - l(&down)) / (2.0 * h);
            let scale = fd.abs().max(1.0);
            assert!((s.sigma - fd).abs() < 1e-6 * scale, "{tag} ∂σ: {} vs {fd}", s.sigma);

            // Directional derivatives along base geodesics give ⟨∇ℓ, e⟩.
            for e in base.tangent_basis(&z.location) {
                let h = 1e-5;
                let shift = |t: f64| WarpedPoint::new(base.exp(&z.location, &(e * t)).unwrap(), z.sigma).unwrap();
                let fd = (l(&shift(h)) - l(&shift(-h))) / (2.0 * h);
                let analytic = base.metric_dot(&z.location, &s.location, &e).unwrap();
                let scale = fd.abs().max(1.0);
                assert!((analytic - fd).abs() < 1e-6 * scale, "{tag} ∇x̄: {analytic} vs {fd}");
            }
        }
    }
}

#[test]
fn location_score_vanishes_at_the_mean() {
    let mut r = rng(43);
    for (_, m) in all_models() {
        let z = random_point(m.as_ref(), &mut r);
        let s = m.score(&z.location, &z).unwrap();
        assert_eq!(s.location.max_abs(), 0.0);
    }
}

#[test]
fn score_has_zero_mean_under_the_sampler() {
    let n = 100_000;
    for (tag, m) in all_models() {
        let z = random_point(m.as_ref(), &mut rng(44 + tag as u64));
        let xs = sample(m.as_ref(), &z, n, 7).unwrap();
        let base = m.base();
        let basis = base.tangent_basis(&z.location);
        let mut sums = vec![(0.0, 0.0); 1 + basis.len()];
        for x in &xs {
            let s = m.score(x, &z).unwrap();
            let mut comps = vec![s.sigma];
            for e in &basis {
                comps.push(base.metric_dot(&z.location, &s.location, e).unwrap());
            }
            for (acc, v) in sums.iter_mut().zip(comps) {
                acc.0 += v;
                acc.1 += v * v;
            }
        }
        for (k, (a, a2)) in sums.iter().enumerate() {
            let mean = a / n as f64;
            let sd = (a2 / n as f64 - mean * mean).sqrt();
            assert!(mean.abs() < 4.0 * sd / (n as f64).sqrt(), "{tag} component {k}: mean {mean} sd {sd}");
        }
    }
}

#[test]
fn normal_sampler_moments() {
    let z = WarpedPoint::new(BasePoint::Line(0.0), 1.0).unwrap();
    let xs: Vec<f64> = sample(&NormalLine, &z, 100_000, 1)
        .unwrap()
        .into_iter()
        .map(|p| match p {
            BasePoint::Line(x) => x,
            _ => unreachable!(),
        })
        .collect();
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    assert!(mean.abs() < 0.02, "{mean}");
    assert!((var - 1.0).abs() < 0.05, "{var}");
}

#[test]
fn vmf_sampler_mean_direction() {
    let z = WarpedPoint::new(BasePoint::sphere(0.0, 0.0, 1.0).unwrap(), 2.0).unwrap();
    let xs = sample(&VonMisesFisherS2, &z, 100_000, 2).unwrap();
    let mut sum = nalgebra::Vector3::zeros();
    for x in &xs {
        if let BasePoint::Sphere(p) = x {
            sum += p;
        }
    }
    let mean = sum / xs.len() as f64;
    let angle = mean.normalize().z.clamp(-1.0, 1.0).acos().to_degrees();
    assert!(angle < 1.0, "{angle}°");
    // Mean resultant length coth σ − 1/σ.
    assert!((mean.norm() - mean_resultant(2.0)).abs() < 4.0 / (xs.len() as f64).sqrt());
}

/// ∂ψ/∂η by central differences of ln Z, with σ = (−1/2η)^{1/2}.
fn d_psi_d_eta(sigma: f64) -> f64 {
    let eta = -0.5 / (sigma * sigma);
    let psi = |e: f64| log_partition((-0.5 / e).sqrt());
    let h = 1e-5 * eta.abs();
    (psi(eta + h) - psi(eta - h)) / (2.0 * h)
}

#[test]
fn rgauss_sampler_matches_exponential_family_moment() {
    for (k, sigma) in [0.5, 1.0, 2.0].into_iter().enumerate() {
        let z = WarpedPoint::new(BasePoint::HalfPlane { u: 0.4, w: 1.7 }, sigma).unwrap();
        let xs = sample(&RiemannianGaussianH2, &z, 100_000, 3 + k as u64).unwrap();
        let base = RiemannianGaussianH2.base();
        let md2 = xs.iter().map(|x| base.distance(x, &z.location).unwrap().powi(2)).sum::<f64>() / xs.len() as f64;
        let oracle = d_psi_d_eta(sigma);
        assert!((md2 / oracle - 1.0).abs() < 0.02, "σ={sigma}: {md2} vs {oracle}");
        assert!((mean_squared_distance(sigma) / oracle - 1.0).abs() < 1e-7);
    }
}

/// ∫ p dvol over the half-plane by importance sampling in chart coordinates:
/// w = e^{s·a}, u = w·sinh(s·b) with a, b independent Student-t(3) and
/// s = 0.7σ, against dvol = 2 du dw / w².
#[test]
fn rgauss_density_is_normalised() {
    let mut r = rng(45);
    let t3 = rand_distr::StudentT::new(3.0).unwrap();
    let log_t3 = |x: f64| (2.0 / (std::f64::consts::PI * 3f64.sqrt())).ln() - 2.0 * (1.0 + x * x / 3.0).ln();
    for sigma in [0.5, 1.0, 2.0] {
        let z = WarpedPoint::new(BasePoint::HalfPlane { u: 0.0, w: 1.0 }, sigma).unwrap();
        let s = 0.7 * sigma;
        let n = 1_000_000;
        let (mut sum, mut sum2) = (0.0, 0.0);
        for _ in 0..n {
            let (a, b): (f64, f64) = (r.sample(t3), r.sample(t3));
            let w = (s * a).exp();
            let u = w * (s * b).sinh();
            if !(w > 0.0 && w.is_finite() && u.is_finite()) {
                // Far tail: the density underflows to zero there.
                continue;
            }
            // Jacobian of (a, b) ↦ (u, w) is s²·w²·cosh(s·b).
            let log_q = log_t3(a) + log_t3(b) - 2.0 * s.ln() - 2.0 * w.ln() - (s * b).cosh().ln();
            let x = BasePoint::HalfPlane { u, w };
            let lp = RiemannianGaussianH2.log_density(&x, &z).unwrap();
            let weight = (lp + (2.0 / (w * w)).ln() - log_q).exp();
            sum += weight;
            sum2 += weight * weight;
        }
        let mean = sum / n as f64;
        let se = ((sum2 / n as f64 - mean * mean) / n as f64).sqrt();
        assert!((mean - 1.0).abs() < 0.01, "σ={sigma}: ∫p = {mean} ± {se}");
        assert!(se < 0.003, "σ={sigma}: standard error {se}");
    }
}

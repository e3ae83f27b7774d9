mod common;

use common::*;
use rand::Rng;
use warpgeo::base_manifold::{BasePoint, IsometryGenerator};
use warpgeo::geodesics::rao_distance;
use warpgeo::models::{builtin, sample, ModelTag, NormalLine, VonMisesFisherS2, WarpedPoint};
use warpgeo::statistics::{frechet_mean, mc_fisher, natural_gradient_estimate, GainSchedule};
use warpgeo::Error;

#[test]
fn mc_fisher_needs_a_thousand_samples() {
    let z = WarpedPoint::new(BasePoint::Line(0.0), 1.0).unwrap();
    assert!(matches!(mc_fisher(&NormalLine, &z, 999, 1), Err(Error::Domain(_))));
}

#[test]
fn mc_fisher_standard_errors_shrink_as_root_n() {
    let z = WarpedPoint::new(BasePoint::sphere(0.0, 1.0, 0.0).unwrap(), 1.5).unwrap();
    let small = mc_fisher(&VonMisesFisherS2, &z, 10_000, 3).unwrap();
    let large = mc_fisher(&VonMisesFisherS2, &z, 40_000, 3).unwrap();
    for (a, b) in [(small.i0_stderr, large.i0_stderr), (small.i1_stderr, large.i1_stderr)] {
        assert!((a / b - 2.0).abs() < 0.15, "{a} / {b}");
    }
    assert!(small.i0_hat >= 0.0 && small.i1_hat >= 0.0);
    assert_eq!(mc_fisher(&VonMisesFisherS2, &z, 10_000, 3).unwrap(), small);
}

#[test]
fn frechet_mean_of_one_point_is_that_point() {
    for tag in ModelTag::ALL {
        let m = builtin(tag);
        let z = random_point(m.as_ref(), &mut rng(60 + tag as u64));
        assert_eq!(frechet_mean(m.as_ref(), &[z], None).unwrap(), z);
    }
}

#[test]
fn frechet_mean_of_two_points_is_the_midpoint() {
    let mut r = rng(61);
    for tag in ModelTag::ALL {
        let m = builtin(tag);
        for _ in 0..3 {
            let (a, b) = (random_point(m.as_ref(), &mut r), random_point(m.as_ref(), &mut r));
            let mid = frechet_mean(m.as_ref(), &[a, b], None).unwrap();
            let (da, db) = (rao_distance(m.as_ref(), &mid, &a).unwrap(), rao_distance(m.as_ref(), &mid, &b).unwrap());
            assert!((da - db).abs() < 1e-7, "{tag}: {da} vs {db}");
        }
    }
}

#[test]
fn frechet_mean_is_isometry_equivariant() {
    let mut r = rng(62);
    for tag in ModelTag::ALL {
        let m = builtin(tag);
        let base = m.base();
        let cloud: Vec<_> = (0..6).map(|_| random_point(m.as_ref(), &mut r)).collect();
        let xi = IsometryGenerator::new(tag.base_kind(), r.random_range(0..IsometryGenerator::count(tag.base_kind()))).unwrap();
        let t = r.random_range(-0.7..0.7);
        let moved: Vec<_> = cloud
            .iter()
            .map(|z| WarpedPoint::new(base.flow(&xi, t, &z.location).unwrap(), z.sigma).unwrap())
            .collect();
        let mean = frechet_mean(m.as_ref(), &cloud, None).unwrap();
        let moved_mean = frechet_mean(m.as_ref(), &moved, None).unwrap();
        let expected = WarpedPoint::new(base.flow(&xi, t, &mean.location).unwrap(), mean.sigma).unwrap();
        assert!(chart_gap(&moved_mean, &expected) < 1e-7, "{tag}: {moved_mean:?} vs {expected:?}");
    }
}

#[test]
fn frechet_mean_rejects_bad_weights() {
    let z = WarpedPoint::new(BasePoint::Line(0.0), 1.0).unwrap();
    assert!(matches!(frechet_mean(&NormalLine, &[], None), Err(Error::Domain(_))));
    assert!(matches!(frechet_mean(&NormalLine, &[z, z], Some(&[1.0])), Err(Error::Domain(_))));
    assert!(matches!(frechet_mean(&NormalLine, &[z, z], Some(&[1.0, -1.0])), Err(Error::Domain(_))));
}

#[test]
fn empty_stream_returns_the_initial_state() {
    let z = WarpedPoint::new(BasePoint::Line(0.0), 1.0).unwrap();
    let path = natural_gradient_estimate(&NormalLine, &[], GainSchedule::default(), &z).unwrap();
    assert_eq!(path.len(), 1);
    assert_eq!(path[0].estimate, z);
    assert_eq!(path[0].step, 0);
}

/// The estimate should land within sampling error of the maximum-likelihood
/// estimate (sample mean and standard deviation) of the same stream.
#[test]
fn normal_estimator_tracks_the_sample_moments() {
    let n = 10_000;
    let truth = WarpedPoint::new(BasePoint::Line(0.3), 1.5).unwrap();
    let init = WarpedPoint::new(BasePoint::Line(0.0), 1.0).unwrap();
    let stream = sample(&NormalLine, &truth, n, 17).unwrap();
    let xs: Vec<f64> = stream
        .iter()
        .map(|p| match p {
            BasePoint::Line(x) => *x,
            _ => unreachable!(),
        })
        .collect();
    let mean = xs.iter().sum::<f64>() / n as f64;
    let sd = (xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n as f64).sqrt();
    let last = natural_gradient_estimate(&NormalLine, &stream, GainSchedule::default(), &init)
        .unwrap()
        .last()
        .unwrap()
        .estimate;
    let BasePoint::Line(x_hat) = last.location else { unreachable!() };
    let (se_mean, se_sd) = (sd / (n as f64).sqrt(), sd / (2.0 * n as f64).sqrt());
    assert!((x_hat - mean).abs() < 4.0 * se_mean, "{x_hat} vs {mean}");
    assert!((last.sigma - sd).abs() < 4.0 * se_sd, "{} vs {sd}", last.sigma);
}

#[test]
fn estimator_error_shrinks_on_dyadic_checkpoints() {
    let truth = WarpedPoint::new(BasePoint::sphere(0.0, 0.0, 1.0).unwrap(), 1.0).unwrap();
    let init = WarpedPoint::new(BasePoint::sphere(1.0, 0.0, 0.0).unwrap(), 0.5).unwrap();
    let checkpoints = [128, 256, 512, 1024, 2048, 4096];
    let mut dists = vec![Vec::new(); checkpoints.len()];
    for seed in 0..20 {
        let stream = sample(&VonMisesFisherS2, &truth, 4096, 100 + seed).unwrap();
        let path = natural_gradient_estimate(&VonMisesFisherS2, &stream, GainSchedule::default(), &init).unwrap();
        for (k, &t) in checkpoints.iter().enumerate() {
            dists[k].push(rao_distance(&VonMisesFisherS2, &path[t].estimate, &truth).unwrap());
        }
    }
    let medians: Vec<f64> = dists
        .iter_mut()
        .map(|d| {
            d.sort_by(f64::total_cmp);
            0.5 * (d[9] + d[10])
        })
        .collect();
    for w in medians.windows(2) {
        assert!(w[1] <= w[0], "medians {medians:?}");
    }
}

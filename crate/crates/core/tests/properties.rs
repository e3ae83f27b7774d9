mod common;

use common::*;
use proptest::prelude::*;
use rand::Rng;
use warpgeo::base_manifold::IsometryGenerator;
use warpgeo::geodesics::{rao_distance, warped_exp, warped_log};
use warpgeo::models::{builtin, ModelTag, WarpedPoint};

fn any_model() -> impl Strategy<Value = ModelTag> {
    prop::sample::select(ModelTag::ALL.to_vec())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn distance_is_symmetric(tag in any_model(), seed in any::<u64>()) {
        let m = builtin(tag);
        let mut r = rng(seed);
        let (a, b) = (random_point(m.as_ref(), &mut r), random_point(m.as_ref(), &mut r));
        let (ab, ba) = (rao_distance(m.as_ref(), &a, &b).unwrap(), rao_distance(m.as_ref(), &b, &a).unwrap());
        prop_assert!((ab - ba).abs() < 1e-8 * ab.max(1.0), "{} vs {}", ab, ba);
    }

    #[test]
    fn distance_satisfies_the_triangle_inequality(tag in any_model(), seed in any::<u64>()) {
        let m = builtin(tag);
        let mut r = rng(seed);
        let p: Vec<_> = (0..3).map(|_| random_point(m.as_ref(), &mut r)).collect();
        let d = |i: usize, j: usize| rao_distance(m.as_ref(), &p[i], &p[j]).unwrap();
        prop_assert!(d(0, 2) <= d(0, 1) + d(1, 2) + 1e-8);
    }

    #[test]
    fn distance_is_isometry_invariant(tag in any_model(), seed in any::<u64>(), t in -1.0f64..1.0) {
        let m = builtin(tag);
        let base = m.base();
        let mut r = rng(seed);
        let (a, b) = (random_point(m.as_ref(), &mut r), random_point(m.as_ref(), &mut r));
        let kind = tag.base_kind();
        let xi = IsometryGenerator::new(kind, r.random_range(0..IsometryGenerator::count(kind))).unwrap();
        let mv = |z: &WarpedPoint| WarpedPoint::new(base.flow(&xi, t, &z.location).unwrap(), z.sigma).unwrap();
        let before = rao_distance(m.as_ref(), &a, &b).unwrap();
        let after = rao_distance(m.as_ref(), &mv(&a), &mv(&b)).unwrap();
        prop_assert!((before - after).abs() < 1e-8 * before.max(1.0), "{} vs {}", before, after);
    }

    /// Minimizing geodesics split the distance in proportion to the parameter.
    #[test]
    fn distance_scales_along_the_minimizer(tag in any_model(), seed in any::<u64>(), s in 0.1f64..0.9) {
        let m = builtin(tag);
        let mut r = rng(seed);
        let (a, b) = (random_point(m.as_ref(), &mut r), random_point(m.as_ref(), &mut r));
        let w = warped_log(m.as_ref(), &a, &b).unwrap();
        let mid = warped_exp(m.as_ref(), &a, &(w * s)).unwrap();
        let (d, d1, d2) = (
            rao_distance(m.as_ref(), &a, &b).unwrap(),
            rao_distance(m.as_ref(), &a, &mid).unwrap(),
            rao_distance(m.as_ref(), &mid, &b).unwrap(),
        );
        prop_assert!((d1 - s * d).abs() < 1e-7 * d.max(1.0), "{} vs {}", d1, s * d);
        prop_assert!((d2 - (1.0 - s) * d).abs() < 1e-7 * d.max(1.0), "{} vs {}", d2, (1.0 - s) * d);
    }
}

use approx::assert_relative_eq;
use proptest::prelude::*;
use sgl::spaceform::{self, CurvaturePair, Spaceform};

fn curvature() -> impl Strategy<Value = f64> {
    prop_oneof![Just(0.0), -2.0..2.0f64]
}

/// A radius strictly inside the hemisphere for `k > 0`.
fn radius_for(k: f64, u: f64) -> f64 {
    if k > 0.0 {
        u * 0.999 * std::f64::consts::PI / (2.0 * k.sqrt())
    } else {
        3.0 * u
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn generalized_sine_identity(k in curvature(), u in 0.0..1.0f64) {
        let r = radius_for(k, u);
        let (s, c) = (spaceform::sn(k, r), spaceform::cn(k, r));
        prop_assert!((c * c + k * s * s - 1.0).abs() < 1e-12 * (1.0 + k.abs() * s * s));
    }

    #[test]
    fn volume_inverse_round_trips(k in curvature(), n in 2usize..5, u in 1e-3..1.0f64) {
        let sf = Spaceform::new(n, k).unwrap();
        let r = radius_for(k, u);
        let v = sf.ball_volume(r).unwrap();
        let back = sf.ball_radius_for_volume(v).unwrap();
        prop_assert!((back - r).abs() <= 1e-10 * r.max(1.0), "{r} -> {v} -> {back}");
    }

    #[test]
    fn profile_is_concave(k in curvature(), n in 2usize..5, a in 1e-3..1.0f64, b in 1e-3..1.0f64, c in 1e-3..1.0f64) {
        let sf = Spaceform::new(n, k).unwrap();
        let cap = if k > 0.0 { 0.5 * sf.total_volume() } else { sf.ball_volume(3.0).unwrap() };
        let mut s = [a * cap, b * cap, c * cap];
        s.sort_by(f64::total_cmp);
        prop_assume!(s[1] - s[0] > 1e-6 * cap && s[2] - s[1] > 1e-6 * cap);
        let p: Vec<f64> = s.iter().map(|v| sf.iso_profile(*v).unwrap()).collect();
        let dd = ((p[2] - p[1]) / (s[2] - s[1]) - (p[1] - p[0]) / (s[1] - s[0])) / (s[2] - s[0]);
        let scale = p.iter().fold(0.0f64, |m, x| m.max(*x)) / cap / cap;
        prop_assert!(dd <= 1e-8 * scale.max(1.0), "second difference {dd}");
        prop_assert!(sf.profile_concavity_defect(radius_for(k, a)) <= 0.0);
    }

    #[test]
    fn dilation_inequality(k in curvature(), g in 1e-3..1.0f64, u in 1e-3..1.0f64) {
        let sf = Spaceform::new(2, k).unwrap();
        let cap = if k > 0.0 { 0.5 * sf.total_volume() } else { 20.0 };
        let s = u * cap;
        prop_assert!(sf.iso_profile(s).unwrap() <= sf.iso_profile(g * s).unwrap() / g * (1.0 + 1e-12));
    }

    #[test]
    fn curvature_constant_is_squared_area_ratio(k in curvature(), drop in 0.0..2.0f64, n in 2usize..5, u in 0.01..1.0f64) {
        let pair = CurvaturePair::new(k, k - drop).unwrap();
        let d = if k > 0.0 { u * 0.99 * std::f64::consts::PI / k.sqrt() } else { 3.0 * u };
        let c = spaceform::curvature_constant(n, &pair, d).unwrap();
        let r = spaceform::sphere_area_ratio(n, &pair, d).unwrap();
        prop_assert!((c - r * r).abs() <= 1e-12 * c);
        prop_assert!(c >= 1.0 - 1e-15);
    }

    #[test]
    fn equal_bounds_give_unit_constant(k in curvature(), u in 0.01..1.0f64) {
        let d = radius_for(k, u);
        assert_relative_eq!(spaceform::curvature_constant(3, &CurvaturePair::equal(k), d).unwrap(), 1.0, max_relative = 1e-14);
    }
}

#[test]
fn constants_against_closed_forms() {
    // (sinh(2√0.6) / (2√0.6))², evaluated to 30 digits.
    let pair = CurvaturePair::new(0.0, -0.6).unwrap();
    assert_relative_eq!(spaceform::curvature_constant(2, &pair, 2.0).unwrap(), 2.104_926_002_948_693_7, max_relative = 1e-12);
    assert!(spaceform::curvature_constant(2, &CurvaturePair::equal(1.0), std::f64::consts::PI).is_err());
    assert!(CurvaturePair::new(-1.0, 0.0).is_err());
}

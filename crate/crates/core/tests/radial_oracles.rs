//! Ball spectra against closed forms. Zeros evaluated to 30 digits.

use approx::assert_relative_eq;
use proptest::prelude::*;
use sgl::radial::{self, radial_eigenvalue};
use sgl::Spaceform;
use std::f64::consts::PI;

const J01_SQ: f64 = 5.783_185_962_946_784_5;
const J11_SQ: f64 = 14.681_970_642_123_893;
/// First positive root of `tan x = x`, the first zero of the spherical Bessel `j₁`.
const J1_SPHERICAL: f64 = 4.493_409_457_909_064;

#[test]
fn flat_disk_and_ball() {
    let s = radial::ball_spectrum(&Spaceform::new(2, 0.0).unwrap(), 1.0).unwrap();
    assert_relative_eq!(s.lambda1(), J01_SQ, max_relative = 1e-9);
    assert_relative_eq!(s.lambda2(), J11_SQ, max_relative = 1e-9);
    let b = radial::ball_spectrum(&Spaceform::new(3, 0.0).unwrap(), 1.0).unwrap();
    assert_relative_eq!(b.lambda1(), PI * PI, max_relative = 1e-9);
    assert_relative_eq!(b.lambda2(), J1_SPHERICAL * J1_SPHERICAL, max_relative = 1e-9);
}

#[test]
fn higher_angular_modes_of_the_disk() {
    // j₂₁² and j₀₂², the next two disk eigenvalues (indices are 0-based).
    let sf = Spaceform::new(2, 0.0).unwrap();
    assert_relative_eq!(radial_eigenvalue(&sf, 1.0, 2, 0).unwrap(), 26.374_616_427_163_39, max_relative = 1e-9);
    assert_relative_eq!(radial_eigenvalue(&sf, 1.0, 0, 1).unwrap(), 30.471_262_343_662_09, max_relative = 1e-9);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    /// In three dimensions `z = sin(πr/R)/sn_k(r)` and `λ₁ = π²/R² − k`.
    #[test]
    fn three_dimensional_first_eigenvalue(k in -2.0..2.0f64, u in 0.1..0.9f64) {
        let sf = Spaceform::new(3, k).unwrap();
        let r = if k > 0.0 { u * sf.hemisphere_radius() } else { 0.2 + 2.0 * u };
        let s = radial::ball_spectrum(&sf, r).unwrap();
        let exact = PI * PI / (r * r) - k;
        prop_assert!((s.lambda1() - exact).abs() <= 1e-8 * exact, "{} vs {exact}", s.lambda1());
    }

    #[test]
    fn flat_scaling(r in 0.2..5.0f64) {
        let s = radial::ball_spectrum(&Spaceform::new(2, 0.0).unwrap(), r).unwrap();
        prop_assert!((s.lambda1() * r * r - J01_SQ).abs() <= 1e-8 * J01_SQ);
        prop_assert!((s.lambda2() * r * r - J11_SQ).abs() <= 1e-8 * J11_SQ);
    }

    #[test]
    fn radius_from_lambda1_inverts(k in prop_oneof![Just(-1.0), Just(0.0), Just(1.0)], u in 0.1..0.9f64) {
        let sf = Spaceform::new(2, k).unwrap();
        let r = if k > 0.0 { u * sf.hemisphere_radius() } else { 0.3 + 2.0 * u };
        let l1 = radial::ball_spectrum(&sf, r).unwrap().lambda1();
        let back = radial::radius_for_lambda1(&sf, l1).unwrap();
        prop_assert!((back - r).abs() <= 1e-9 * r);
    }

    #[test]
    fn test_profiles_are_certified(k in prop_oneof![Just(-1.0), Just(0.0), Just(1.0)], u in 0.1..0.95f64, n in 2usize..4) {
        let sf = Spaceform::new(n, k).unwrap();
        let r = if k > 0.0 { u * sf.hemisphere_radius() } else { 0.2 + 1.5 * u };
        let tp = radial::h_and_f(&radial::ball_spectrum(&sf, r).unwrap()).unwrap();
        prop_assert!(tp.certified(), "violations {:?}", tp.violations());
    }
}

//! Closed-form geometry of the simply connected spaceform `N^n(k)` of constant
//! sectional curvature `k`.
//!
//! Everything here is a pure function of `(n, k)`. Ball volumes are written
//! `m_k(r)`, sphere areas `m_k'(r) = n ω_n sn_k(r)^{n-1}`, and the
//! isoperimetric profile is `A_{n,k}(s) = m_k'(m_k^{-1}(s))`.

use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::numeric::integrate_gl;

/// `|k| r²` below which `sn_k` and `cn_k` switch to their Taylor series.
const SERIES_THRESHOLD: f64 = 1e-8;

/// Generalized sine: `sin(√k r)/√k`, `r`, or `sinh(√-k r)/√-k`.
pub fn sn(k: f64, r: f64) -> f64 {
    let x = k * r * r;
    if x.abs() < SERIES_THRESHOLD {
        return r * (1.0 - x / 6.0 + x * x / 120.0);
    }
    if k > 0.0 {
        let s = k.sqrt();
        (s * r).sin() / s
    } else {
        let s = (-k).sqrt();
        (s * r).sinh() / s
    }
}

/// Derivative of [`sn`]: `cos(√k r)`, `1`, or `cosh(√-k r)`.
pub fn cn(k: f64, r: f64) -> f64 {
    let x = k * r * r;
    if x.abs() < SERIES_THRESHOLD {
        return 1.0 - x / 2.0 + x * x / 24.0;
    }
    if k > 0.0 {
        (k.sqrt() * r).cos()
    } else {
        ((-k).sqrt() * r).cosh()
    }
}

/// Inverse of `sn_k` on its increasing branch (`r ≤ π/(2√k)` for `k > 0`).
///
/// Returns `None` when `x` exceeds `1/√k` for positive curvature.
pub fn asn(k: f64, x: f64) -> Option<f64> {
    if x < 0.0 {
        return None;
    }
    let y = k * x * x;
    if y.abs() < SERIES_THRESHOLD {
        // asin / asinh series in y = k x².
        return Some(x * (1.0 + y / 6.0 + 3.0 * y * y / 40.0));
    }
    if k > 0.0 {
        let s = k.sqrt();
        let arg = s * x;
        if arg > 1.0 {
            return None;
        }
        Some(arg.asin() / s)
    } else {
        let s = (-k).sqrt();
        Some((s * x).asinh() / s)
    }
}

/// Volume `ω_n` of the Euclidean unit ball, by the two-step recurrence
/// `ω_n = 2π/n · ω_{n-2}` from `ω_0 = 1`, `ω_1 = 2`.
pub fn unit_ball_volume(n: usize) -> f64 {
    match n {
        0 => 1.0,
        1 => 2.0,
        _ => 2.0 * PI / n as f64 * unit_ball_volume(n - 2),
    }
}

/// The model space `N^n(k)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Spaceform {
    n: usize,
    k: f64,
}

impl Spaceform {
    pub fn new(n: usize, k: f64) -> Result<Self> {
        if n < 2 {
            return Err(Error::invalid(format!("dimension must be at least 2, got {n}")));
        }
        if !k.is_finite() {
            return Err(Error::invalid("curvature must be finite"));
        }
        Ok(Self { n, k })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn curvature(&self) -> f64 {
        self.k
    }

    pub fn sn(&self, r: f64) -> f64 {
        sn(self.k, r)
    }

    pub fn cn(&self, r: f64) -> f64 {
        cn(self.k, r)
    }

    /// `π/√k` for `k > 0` (the antipodal distance), infinite otherwise.
    pub fn max_radius(&self) -> f64 {
        if self.k > 0.0 {
            PI / self.k.sqrt()
        } else {
            f64::INFINITY
        }
    }

    /// `π/(2√k)` for `k > 0` (the hemisphere radius), infinite otherwise.
    pub fn hemisphere_radius(&self) -> f64 {
        0.5 * self.max_radius()
    }

    /// `|N(k)|`, infinite for `k ≤ 0`.
    pub fn total_volume(&self) -> f64 {
        if self.k > 0.0 {
            self.ball_volume_unchecked(self.max_radius())
        } else {
            f64::INFINITY
        }
    }

    fn check_radius(&self, r: f64) -> Result<()> {
        if !(r >= 0.0) {
            return Err(Error::domain(format!("radius must be nonnegative, got {r}")));
        }
        let cap = self.max_radius();
        if r > cap * (1.0 + 1e-14) {
            return Err(Error::domain(format!("radius {r} exceeds π/√k = {cap}")));
        }
        Ok(())
    }

    /// `m_k(r) = n ω_n ∫_0^r sn_k^{n-1}`.
    pub fn ball_volume(&self, r: f64) -> Result<f64> {
        self.check_radius(r)?;
        Ok(self.ball_volume_unchecked(r))
    }

    pub(crate) fn ball_volume_unchecked(&self, r: f64) -> f64 {
        let k = self.k;
        let n = self.n;
        if n == 2 {
            // 2π ∫ sn = 2π (1 - cn)/k = 4π sn(r/2)², stable for every k.
            let s = sn(k, 0.5 * r);
            return 4.0 * PI * s * s;
        }
        let nw = n as f64 * unit_ball_volume(n);
        if k == 0.0 {
            return nw * r.powi(n as i32) / n as f64;
        }
        let panels = ((r * k.abs().sqrt()).ceil() as usize).max(1);
        nw * integrate_gl(|t| sn(k, t).powi(n as i32 - 1), 0.0, r, panels)
    }

    /// `m_k'(r) = n ω_n sn_k(r)^{n-1}`, the area of the geodesic sphere.
    pub fn sphere_area(&self, r: f64) -> Result<f64> {
        self.check_radius(r)?;
        Ok(self.sphere_area_unchecked(r))
    }

    pub(crate) fn sphere_area_unchecked(&self, r: f64) -> f64 {
        self.n as f64 * unit_ball_volume(self.n) * sn(self.k, r).powi(self.n as i32 - 1)
    }

    /// `m_k''(r) = n ω_n (n-1) sn^{n-2} cn`.
    pub fn sphere_area_d1(&self, r: f64) -> f64 {
        let n = self.n as f64;
        let c = n * unit_ball_volume(self.n);
        c * (n - 1.0) * sn(self.k, r).powi(self.n as i32 - 2) * cn(self.k, r)
    }

    /// `m_k'''(r) = n ω_n (n-1) [ (n-2) sn^{n-3} cn² - k sn^{n-1} ]`.
    pub fn sphere_area_d2(&self, r: f64) -> f64 {
        let n = self.n as f64;
        let c = n * unit_ball_volume(self.n);
        let s = sn(self.k, r);
        let cc = cn(self.k, r);
        let first = if self.n == 2 { 0.0 } else { (n - 2.0) * s.powi(self.n as i32 - 3) * cc * cc };
        c * (n - 1.0) * (first - self.k * s.powi(self.n as i32 - 1))
    }

    /// `m_k^{-1}(s)`: the radius of the ball of volume `s`, by bisection-safeguarded
    /// Newton iteration.
    pub fn ball_radius_for_volume(&self, s: f64) -> Result<f64> {
        if !(s >= 0.0) {
            return Err(Error::domain(format!("volume must be nonnegative, got {s}")));
        }
        if s == 0.0 {
            return Ok(0.0);
        }
        let total = self.total_volume();
        if s > total * (1.0 + 1e-13) {
            return Err(Error::domain(format!("volume {s} exceeds |N(k)| = {total}")));
        }
        if s >= total {
            return Ok(self.max_radius());
        }
        let mut lo = 0.0;
        let mut hi;
        let flat_guess = (s / unit_ball_volume(self.n)).powf(1.0 / self.n as f64);
        if self.k > 0.0 {
            hi = self.max_radius();
        } else {
            hi = flat_guess.max(1e-300);
            while self.ball_volume_unchecked(hi) < s {
                lo = hi;
                hi *= 2.0;
            }
        }
        let mut x = flat_guess.clamp(lo, hi);
        if !(x > lo && x < hi) {
            x = 0.5 * (lo + hi);
        }
        for _ in 0..200 {
            let f = self.ball_volume_unchecked(x) - s;
            if f == 0.0 {
                return Ok(x);
            }
            if f < 0.0 {
                lo = x;
            } else {
                hi = x;
            }
            let d = self.sphere_area_unchecked(x);
            let mut next = x - f / d;
            if !(next > lo && next < hi) || !next.is_finite() {
                next = 0.5 * (lo + hi);
            }
            let step = (next - x).abs();
            x = next;
            if step <= 4.0 * f64::EPSILON * x || hi - lo <= 4.0 * f64::EPSILON * hi {
                return Ok(x);
            }
        }
        Ok(x)
    }

    /// Isoperimetric profile `A_{n,k}(s)`.
    pub fn iso_profile(&self, s: f64) -> Result<f64> {
        let r = self.ball_radius_for_volume(s)?;
        Ok(self.sphere_area_unchecked(r))
    }

    /// `m_k' m_k''' - (m_k'')²` at `r`, evaluated from the three derivatives.
    pub fn profile_concavity_defect(&self, r: f64) -> f64 {
        let d0 = self.sphere_area_unchecked(r);
        d0 * self.sphere_area_d2(r) - self.sphere_area_d1(r).powi(2)
    }
}

/// Curvature bounds `Ric/(n-1) ≥ K_lower` and `Sect ≤ k_upper`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CurvaturePair {
    k_upper: f64,
    k_lower: f64,
}

impl CurvaturePair {
    pub fn new(k_upper: f64, k_lower: f64) -> Result<Self> {
        if !(k_lower <= k_upper) {
            return Err(Error::invalid(format!(
                "lower curvature bound {k_lower} exceeds upper bound {k_upper}"
            )));
        }
        Ok(Self { k_upper, k_lower })
    }

    /// The constant-curvature pair `K = k`.
    pub fn equal(k: f64) -> Self {
        Self { k_upper: k, k_lower: k }
    }

    pub fn k_upper(&self) -> f64 {
        self.k_upper
    }

    pub fn k_lower(&self) -> f64 {
        self.k_lower
    }
}

fn check_diameter(pair: &CurvaturePair, d: f64) -> Result<()> {
    if !(d > 0.0) {
        return Err(Error::domain(format!("diameter must be positive, got {d}")));
    }
    if pair.k_upper > 0.0 && d >= PI / pair.k_upper.sqrt() {
        return Err(Error::domain(format!("diameter {d} reaches π/√k with k = {}", pair.k_upper)));
    }
    Ok(())
}

/// `(sn_K(d) / sn_k(d))^{2n-2}`, the constant of the gap bound.
pub fn curvature_constant(n: usize, pair: &CurvaturePair, d: f64) -> Result<f64> {
    check_diameter(pair, d)?;
    let lower = sn(pair.k_lower, d);
    let upper = sn(pair.k_upper, d);
    if upper <= 0.0 {
        return Err(Error::domain("sn_k(d) vanishes"));
    }
    Ok((lower / upper).powi(2 * n as i32 - 2))
}

/// Ratio of geodesic sphere areas `|∂B_d|_{N(K)} / |∂B_d|_{N(k)}`.
pub fn sphere_area_ratio(n: usize, pair: &CurvaturePair, d: f64) -> Result<f64> {
    check_diameter(pair, d)?;
    let lo = Spaceform::new(n, pair.k_lower)?;
    let hi = Spaceform::new(n, pair.k_upper)?;
    Ok(lo.sphere_area_unchecked(d) / hi.sphere_area_unchecked(d))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    // sinh(1), 4π sinh²(1), sinh²(1), (sinh 2 / 2)^4 from a 30-digit evaluation.
    const SINH1: f64 = 1.175_201_193_643_801_4;
    const FOUR_PI_SINH1_SQ: f64 = 17.355_387_381_771_437;
    const SINH1_SQ: f64 = 1.381_097_845_541_815_7;
    const SINH2_HALF_POW4: f64 = 10.814_423_671_157_126;

    #[test]
    fn sn_examples() {
        assert_eq!(sn(0.0, 0.7), 0.7);
        assert_relative_eq!(sn(1.0, PI / 2.0), 1.0, epsilon = 1e-15);
        assert_relative_eq!(sn(-1.0, 1.0), SINH1, max_relative = 1e-15);
    }

    #[test]
    fn sn_is_continuous_in_k() {
        for &r in &[0.1, 0.5, 1.0, 2.0] {
            for &k in &[1e-8, -1e-8] {
                assert!((sn(k, r) - sn(0.0, r)).abs() <= 1.01 * k.abs() * r * r * r / 6.0);
                assert!((cn(k, r) - 1.0).abs() < 1e-7);
            }
        }
        // The series and closed forms agree across the seam.
        let r = 1.0;
        let k_seam = SERIES_THRESHOLD * 1.0001;
        let s = k_seam.sqrt();
        assert_relative_eq!(sn(k_seam, r), (s * r).sin() / s, max_relative = 1e-15);
    }

    #[test]
    fn asn_inverts_sn() {
        for &k in &[-1.0, -1e-10, 0.0, 1e-10, 1.0, 4.0] {
            for &r in &[0.0, 0.1, 0.4, 0.7] {
                let x = sn(k, r);
                assert_relative_eq!(asn(k, x).unwrap(), r, max_relative = 1e-13, epsilon = 1e-15);
            }
        }
        assert!(asn(1.0, 1.5).is_none());
    }

    #[test]
    fn unit_ball_volumes() {
        assert_relative_eq!(unit_ball_volume(2), PI, max_relative = 1e-15);
        assert_relative_eq!(unit_ball_volume(3), 4.0 * PI / 3.0, max_relative = 1e-15);
        assert_relative_eq!(unit_ball_volume(4), PI * PI / 2.0, max_relative = 1e-15);
    }

    #[test]
    fn ball_volume_examples() {
        let flat2 = Spaceform::new(2, 0.0).unwrap();
        assert_relative_eq!(flat2.ball_volume(1.3).unwrap(), PI * 1.69, max_relative = 1e-14);
        let flat3 = Spaceform::new(3, 0.0).unwrap();
        assert_relative_eq!(flat3.ball_volume(1.0).unwrap(), 4.0 * PI / 3.0, max_relative = 1e-14);
        let sphere = Spaceform::new(2, 1.0).unwrap();
        assert_relative_eq!(sphere.ball_volume(PI / 2.0).unwrap(), 2.0 * PI, max_relative = 1e-14);
        assert_relative_eq!(sphere.total_volume(), 4.0 * PI, max_relative = 1e-14);
        assert!(sphere.ball_volume(3.5).is_err());
        assert!(flat2.ball_volume(-0.1).is_err());
        // n = 3 hyperbolic: 4π ∫ sinh² = π (sinh 2r - 2r)
        let h3 = Spaceform::new(3, -1.0).unwrap();
        let r: f64 = 1.3;
        assert_relative_eq!(
            h3.ball_volume(r).unwrap(),
            PI * ((2.0 * r).sinh() - 2.0 * r),
            max_relative = 1e-13
        );
    }

    #[test]
    fn sphere_area_examples() {
        let flat2 = Spaceform::new(2, 0.0).unwrap();
        assert_relative_eq!(flat2.sphere_area(1.0).unwrap(), 2.0 * PI, max_relative = 1e-15);
        let sphere = Spaceform::new(2, 1.0).unwrap();
        assert_relative_eq!(sphere.sphere_area(PI / 2.0).unwrap(), 2.0 * PI, max_relative = 1e-15);
        let h3 = Spaceform::new(3, -1.0).unwrap();
        assert_relative_eq!(h3.sphere_area(1.0).unwrap(), FOUR_PI_SINH1_SQ, max_relative = 1e-14);
    }

    #[test]
    fn iso_profile_examples() {
        let flat2 = Spaceform::new(2, 0.0).unwrap();
        assert_relative_eq!(flat2.iso_profile(PI).unwrap(), 2.0 * PI, max_relative = 1e-13);
        for &s in &[0.01, 0.5, 3.0, 40.0] {
            assert_relative_eq!(flat2.iso_profile(s).unwrap(), 2.0 * (PI * s).sqrt(), max_relative = 1e-12);
        }
        let hyp = Spaceform::new(2, -1.0).unwrap();
        let s = 2.0 * PI * (1f64.cosh() - 1.0);
        assert_relative_eq!(hyp.iso_profile(s).unwrap(), 2.0 * PI * SINH1, max_relative = 1e-12);
        let sphere = Spaceform::new(2, 1.0).unwrap();
        assert!(sphere.iso_profile(4.0 * PI + 1.0).is_err());
        assert!(flat2.iso_profile(-1.0).is_err());
    }

    #[test]
    fn inverse_volume_round_trips() {
        for &(n, k) in &[(2, 0.0), (2, -1.0), (2, 1.0), (3, 0.0), (3, -1.0), (3, 1.0), (4, -0.3), (5, 2.0)] {
            let sf = Spaceform::new(n, k).unwrap();
            for &r in &[1e-4, 0.05, 0.3, 0.9, 1.4] {
                let s = sf.ball_volume(r).unwrap();
                assert_relative_eq!(sf.ball_radius_for_volume(s).unwrap(), r, max_relative = 1e-12);
            }
        }
    }

    #[test]
    fn curvature_constant_examples() {
        let d = 1.3;
        assert_eq!(curvature_constant(2, &CurvaturePair::equal(0.0), d).unwrap(), 1.0);
        let pair = CurvaturePair::new(0.0, -1.0).unwrap();
        assert_relative_eq!(curvature_constant(2, &pair, 1.0).unwrap(), SINH1_SQ, max_relative = 1e-14);
        assert_relative_eq!(curvature_constant(3, &pair, 2.0).unwrap(), SINH2_HALF_POW4, max_relative = 1e-14);
        assert!(curvature_constant(2, &pair, 0.0).is_err());
        assert!(curvature_constant(2, &CurvaturePair::new(1.0, 0.0).unwrap(), 3.2).is_err());
        assert!(CurvaturePair::new(-1.0, 0.0).is_err());
    }

    #[test]
    fn curvature_constant_is_squared_area_ratio() {
        for &(n, ku, kl, d) in &[(2, 0.0, -0.6, 2.0), (3, 1.0, -1.0, 1.2), (4, -0.5, -2.0, 0.8)] {
            let pair = CurvaturePair::new(ku, kl).unwrap();
            let c = curvature_constant(n, &pair, d).unwrap();
            let ratio = sphere_area_ratio(n, &pair, d).unwrap();
            assert_relative_eq!(c, ratio * ratio, max_relative = 1e-12);
        }
    }

    #[test]
    fn concavity_defect_matches_closed_form() {
        for &(n, k) in &[(2, 0.0), (2, -1.0), (3, 1.0), (4, -2.0)] {
            let sf = Spaceform::new(n, k).unwrap();
            let w = unit_ball_volume(n);
            for &r in &[0.1, 0.5, 1.0] {
                let closed = -((n - 1) as f64) * (n * n) as f64 * w * w * sn(k, r).powi(2 * n as i32 - 4);
                assert_relative_eq!(sf.profile_concavity_defect(r), closed, max_relative = 1e-11);
            }
        }
    }
}

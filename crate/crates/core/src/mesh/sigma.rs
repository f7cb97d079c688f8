//! The volume-transfer radius `σ(r)`, defined by
//! `|B_{σ(r)}|_{N(k)} = |B_r(p) ∩ hull Ω|`, and the distortion constant
//! `C₁ = max_r max(σ'(r), sn_k(σ(r))/sn_k(r))`.
//!
//! Since the hull is convex it is star-shaped about `p`, so in geodesic polar
//! coordinates it is `{(t, θ) : t < ρ(θ)}` and
//! `|B_r(p) ∩ hull| = (1/2π) ∫ m(min(r, ρ(θ))) dθ` with `m` the ambient
//! ball volume. Each hull edge subtends an angular interval on which `ρ` is
//! smooth, integrated with Gauss–Legendre panels of bounded angular width.
//! Exit distances `ρ(θ)` are ray/edge intersections in the affine chart.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use super::hull::Hull;
use crate::error::{Error, Result};
use crate::numeric::{gauss_legendre, Pchip};
use crate::spaceform::{self, Spaceform};

#[derive(Clone, Copy, Debug)]
pub struct SigmaOptions {
    pub radial_points: usize,
    pub angular_nodes: usize,
}

impl Default for SigmaOptions {
    fn default() -> Self {
        Self { radial_points: 401, angular_nodes: 8 }
    }
}

/// Samples of `σ` on `[0, r_max]` with a monotone cubic interpolant.
#[derive(Clone, Debug)]
pub struct SigmaProfile {
    interp: Pchip,
    hull_measure: f64,
}

impl SigmaProfile {
    /// Builds a profile from samples (`grid[0] = 0`, nondecreasing values).
    pub fn from_samples(grid: Vec<f64>, sigma: Vec<f64>, hull_measure: f64) -> Result<Self> {
        if grid.len() < 2 || grid.len() != sigma.len() || grid[0] != 0.0 {
            return Err(Error::invalid("σ samples need a grid starting at 0"));
        }
        if grid.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::invalid("σ grid must be strictly increasing"));
        }
        if sigma.windows(2).any(|w| w[1] < w[0]) {
            return Err(Error::invalid("σ must be nondecreasing"));
        }
        Ok(Self { interp: Pchip::new(grid, sigma), hull_measure })
    }

    pub fn grid(&self) -> &[f64] {
        self.interp.knots()
    }

    pub fn values(&self) -> &[f64] {
        self.interp.values()
    }

    /// `σ'` at the knots.
    pub fn slopes(&self) -> &[f64] {
        self.interp.slopes()
    }

    pub fn r_max(&self) -> f64 {
        *self.grid().last().unwrap()
    }

    /// Ambient measure of the hull.
    pub fn hull_measure(&self) -> f64 {
        self.hull_measure
    }

    /// `σ(r)`, constant past the last knot.
    pub fn eval(&self, r: f64) -> f64 {
        self.interp.eval(r)
    }

    pub fn derivative(&self, r: f64) -> f64 {
        if r > self.r_max() {
            0.0
        } else {
            self.interp.derivative(r)
        }
    }
}

/// Largest angular span covered by one Gauss–Legendre panel.
const MAX_SPAN: f64 = 0.05;

/// Angular quadrature of the exit distance `ρ(θ)` from `p`.
pub struct ExitDistances {
    /// `(weight, ρ)` with weights summing to `2π`.
    pub nodes: Vec<(f64, f64)>,
}

impl ExitDistances {
    pub fn new(hull: &Hull, p: Complex64, n_gauss: usize) -> Result<Self> {
        let g = hull.geometry();
        if !hull.contains_conformal(p, 1e-12) {
            return Err(Error::domain("point p lies outside the hull"));
        }
        let pa = g.to_affine(p);
        let aff = hull.affine_vertices();
        let conf = hull.conformal_vertices();
        let n = aff.len();
        let (xg, wg) = gauss_legendre(n_gauss);
        let step = 1e-3 * hull.diameter().max(1e-12);
        let mut nodes = Vec::with_capacity(n * n_gauss);
        for i in 0..n {
            let j = (i + 1) % n;
            let t0 = g.polar(p, conf[i]).1;
            let t1 = g.polar(p, conf[j]).1;
            let span = (t1 - t0).rem_euclid(2.0 * PI);
            // p on this edge (or at a vertex) subtends a half-turn or nothing.
            if span <= 1e-14 || (span - PI).abs() <= 1e-12 && cross(aff[i], aff[j], pa).abs() <= 1e-14 {
                continue;
            }
            let (a, e) = (aff[i], aff[j] - aff[i]);
            let pieces = (span / MAX_SPAN).ceil().max(1.0) as usize;
            let piece = span / pieces as f64;
            for (x, w) in (0..pieces).flat_map(|q| xg.iter().zip(&wg).map(move |(x, w)| (q as f64 + 0.5 * (1.0 + x), w))) {
                let th = t0 + piece * x;
                let dir = g.to_affine(g.exp(p, step, th)) - pa;
                // pa + t·dir = a + s·e
                let det = dir.re * (-e.im) - dir.im * (-e.re);
                let rhs = a - pa;
                let t = (rhs.re * (-e.im) - rhs.im * (-e.re)) / det;
                let exit = pa + dir * t.max(0.0);
                let rho = g.distance(p, g.from_affine(exit));
                nodes.push((0.5 * piece * w, rho));
            }
        }
        Ok(Self { nodes })
    }

    /// `|B_r(p) ∩ hull|` for the ambient curvature `k`.
    pub fn measure_within(&self, k: f64, r: f64) -> f64 {
        self.nodes.iter().map(|(w, rho)| w * disk_area(k, r.min(*rho))).sum::<f64>() / (2.0 * PI)
    }

    pub fn max_exit(&self) -> f64 {
        self.nodes.iter().fold(0.0f64, |m, n| m.max(n.1))
    }
}

fn cross(o: Complex64, a: Complex64, b: Complex64) -> f64 {
    (a.re - o.re) * (b.im - o.im) - (a.im - o.im) * (b.re - o.re)
}

/// Area of a geodesic disk of radius `r` in the 2-D spaceform of curvature `k`.
fn disk_area(k: f64, r: f64) -> f64 {
    let s = spaceform::sn(k, 0.5 * r);
    4.0 * PI * s * s
}

/// `σ` about `p` (conformal chart) for a hull in its ambient spaceform,
/// transferred to the 2-D model `target`.
pub fn sigma_profile(hull: &Hull, p: Complex64, target: &Spaceform) -> Result<SigmaProfile> {
    sigma_profile_with(hull, p, target, &SigmaOptions::default())
}

pub fn sigma_profile_with(hull: &Hull, p: Complex64, target: &Spaceform, opts: &SigmaOptions) -> Result<SigmaProfile> {
    if target.dim() != 2 {
        return Err(Error::invalid("mesh domains are two-dimensional"));
    }
    let exits = ExitDistances::new(hull, p, opts.angular_nodes.max(2))?;
    let k = hull.curvature();
    let g = hull.geometry();
    let r_max = hull.conformal_vertices().iter().fold(0.0f64, |m, v| m.max(g.distance(p, *v))).max(exits.max_exit());
    let n = opts.radial_points.max(3);
    let grid: Vec<f64> = (0..n).map(|i| r_max * i as f64 / (n - 1) as f64).collect();
    let mut sigma = Vec::with_capacity(n);
    for &r in &grid {
        let m = exits.measure_within(k, r);
        sigma.push(if r == 0.0 { 0.0 } else { target.ball_radius_for_volume(m)? });
    }
    // Guard against roundoff making the samples non-monotone.
    for i in 1..n {
        if sigma[i] < sigma[i - 1] {
            sigma[i] = sigma[i - 1];
        }
    }
    let hull_measure = exits.measure_within(k, f64::INFINITY);
    SigmaProfile::from_samples(grid, sigma, hull_measure)
}

/// Which radii `C₁` is maximized over.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum C1Range {
    /// `r ∈ r_p(Ω)`: up to the farthest point of the domain.
    Domain,
    /// `r ∈ r_p(hull Ω)`.
    Hull,
}

/// `C₁ = max_{0 ≤ r ≤ r_max} max(σ'(r), sn_k(σ(r))/sn_k(r))`; at `r = 0` both
/// terms tend to `σ'(0)`.
pub fn c1_constant(sigma: &SigmaProfile, target: &Spaceform, r_max: f64) -> Result<f64> {
    if !(r_max > 0.0) {
        return Err(Error::domain("C₁ needs a nonempty radius range"));
    }
    let mut best = sigma.derivative(0.0);
    let grid = sigma.grid();
    let mut rs: Vec<f64> = grid.iter().copied().filter(|r| *r > 0.0 && *r <= r_max).collect();
    rs.push(r_max.min(sigma.r_max()));
    for r in rs {
        let s = sigma.eval(r);
        let ratio = target.sn(s) / target.sn(r);
        best = best.max(sigma.derivative(r)).max(ratio);
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::super::{convex_hull, generate};
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn centered_flat_disk() {
        let m = generate::geodesic_disk(0.0, 1.0, 5).unwrap();
        let h = convex_hull(&m).unwrap();
        let sf = Spaceform::new(2, 0.0).unwrap();
        let s = sigma_profile(&h, Complex64::new(0.0, 0.0), &sf).unwrap();
        // Inside the inscribed circle σ is the identity.
        let inner = (PI / h.polygon().len() as f64).cos();
        for &r in &[0.1, 0.5, 0.9 * inner] {
            assert_relative_eq!(s.eval(r), r, max_relative = 1e-10);
        }
        assert!(s.eval(1.0) < 1.0 && s.eval(1.0) > 0.999);
        assert_relative_eq!(s.eval(5.0), s.eval(1.0), max_relative = 1e-14);
        let c1 = c1_constant(&s, &sf, 1.0).unwrap();
        assert!(c1 <= 1.0 + 1e-9 && c1 >= 1.0 - 1e-9, "C1 = {c1}");
        assert_relative_eq!(s.hull_measure(), h.area(), max_relative = 1e-12);
    }

    #[test]
    fn square_area_from_off_center_point() {
        let m = generate::unit_square(4).unwrap();
        let h = convex_hull(&m).unwrap();
        let sf = Spaceform::new(2, 0.0).unwrap();
        let s = sigma_profile(&h, Complex64::new(0.2, -0.1), &sf).unwrap();
        assert_relative_eq!(s.hull_measure(), 1.0, max_relative = 1e-12);
        assert_relative_eq!(s.eval(10.0), (1.0 / PI).sqrt(), max_relative = 1e-12);
        assert!(s.values().windows(2).all(|w| w[1] >= w[0]));
        assert!(s.grid().iter().zip(s.values()).all(|(r, v)| *v <= r + 1e-12));
    }

    #[test]
    fn hyperbolic_hull_measure_matches_gauss_bonnet() {
        let m = generate::regular_polygon(-1.0, 5, 1.0, 2).unwrap();
        let h = convex_hull(&m).unwrap();
        let sf = Spaceform::new(2, -1.0).unwrap();
        let s = sigma_profile(&h, Complex64::new(0.05, 0.02), &sf).unwrap();
        assert_relative_eq!(s.hull_measure(), h.area(), max_relative = 1e-9);
        let c1 = c1_constant(&s, &sf, s.r_max()).unwrap();
        assert!(c1 <= 1.0 + 1e-6, "C1 = {c1}");
    }

    #[test]
    fn outside_point_is_rejected() {
        let h = convex_hull(&generate::unit_square(2).unwrap()).unwrap();
        let sf = Spaceform::new(2, 0.0).unwrap();
        assert!(sigma_profile(&h, Complex64::new(2.0, 0.0), &sf).is_err());
    }
}

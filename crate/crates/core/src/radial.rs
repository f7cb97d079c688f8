//! Radial Dirichlet spectra of geodesic balls `B_R ⊂ N^n(k)`.
//!
//! Separating variables, an eigenfunction `u(r) Y_ℓ(θ)` of the ball solves
//!
//! ```text
//! u'' + (n-1) (cn_k/sn_k) u' + (λ - ℓ(ℓ+n-2)/sn_k²) u = 0,   u(R) = 0,
//! ```
//!
//! regular at the origin. The first eigenvalue comes from `ℓ = 0` (profile
//! `z`), the second from the first angular mode `ℓ = 1` (profile `J`).
//! Eigenvalues are found by shooting from a Frobenius start at `ε = 1e-6 R`:
//! Sturm oscillation counting brackets the requested index, then an Illinois
//! secant iteration on `u(R; λ)` refines it. Profiles are integrated from both
//! ends and matched in the middle so they vanish exactly at `R`.

use serde::{Deserialize, Serialize};
use std::io::Write;

use crate::error::{Error, Result};
use crate::numeric::{illinois, simpson_uniform};
use crate::ode::{integrate, StepControl};
use crate::spaceform::Spaceform;

/// Samples of a radial function on a strictly increasing grid starting at 0.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RadialProfile {
    grid: Vec<f64>,
    values: Vec<f64>,
}

impl RadialProfile {
    pub fn new(grid: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if grid.len() != values.len() {
            return Err(Error::invalid("grid and values differ in length"));
        }
        if grid.is_empty() {
            return Err(Error::invalid("empty radial profile"));
        }
        if !(grid[0] >= 0.0) {
            return Err(Error::invalid("radial grid must start at a nonnegative radius"));
        }
        if grid.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::invalid("radial grid must be strictly increasing"));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::invalid("radial profile contains non-finite values"));
        }
        Ok(Self { grid, values })
    }

    pub fn grid(&self) -> &[f64] {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.grid.len()
    }

    pub fn is_empty(&self) -> bool {
        self.grid.is_empty()
    }

    pub fn last_radius(&self) -> f64 {
        *self.grid.last().unwrap()
    }

    /// Linear interpolation, clamped to the end values.
    pub fn eval(&self, r: f64) -> f64 {
        crate::numeric::interp_linear(&self.grid, &self.values, r)
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0f64, |m, v| m.max(v.abs()))
    }

    pub fn scaled(&self, c: f64) -> Self {
        Self { grid: self.grid.clone(), values: self.values.iter().map(|v| v * c).collect() }
    }

    /// Largest drop between consecutive samples (0 for nondecreasing data).
    pub fn max_decrease(&self) -> f64 {
        self.values.windows(2).fold(0.0f64, |m, w| m.max(w[0] - w[1]))
    }

    /// Largest rise between consecutive samples (0 for nonincreasing data).
    pub fn max_increase(&self) -> f64 {
        self.values.windows(2).fold(0.0f64, |m, w| m.max(w[1] - w[0]))
    }

    /// Two-column CSV `radius,value`.
    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "radius,value")?;
        for (r, v) in self.grid.iter().zip(&self.values) {
            writeln!(w, "{r:.17e},{v:.17e}")?;
        }
        Ok(())
    }
}

/// `∫_{B_R} f(r_q) dV = ∫_0^R f(r) m_k'(r) dr` for samples on a uniform grid.
pub fn shell_integral(sf: &Spaceform, grid: &[f64], values: &[f64]) -> f64 {
    let weighted: Vec<f64> = grid.iter().zip(values).map(|(r, v)| v * sf.sphere_area_unchecked(*r)).collect();
    if grid.len() >= 3 && grid.len() % 2 == 1 {
        let h = grid[1] - grid[0];
        let uniform = grid.windows(2).all(|w| ((w[1] - w[0]) - h).abs() <= 1e-9 * h);
        if uniform {
            return simpson_uniform(&weighted, h);
        }
    }
    crate::numeric::trapezoid(grid, &weighted)
}

/// Options for the radial solver.
#[derive(Clone, Copy, Debug)]
pub struct RadialOptions {
    /// Number of grid intervals for returned profiles (made even).
    pub intervals: usize,
    pub control: StepControl,
}

impl Default for RadialOptions {
    fn default() -> Self {
        Self { intervals: 2000, control: StepControl::default() }
    }
}

struct RadialOde {
    n1: f64,
    k: f64,
    centrifugal: f64,
    lambda: f64,
}

impl RadialOde {
    fn new(sf: &Spaceform, ell: usize, lambda: f64) -> Self {
        let n = sf.dim();
        Self {
            n1: (n - 1) as f64,
            k: sf.curvature(),
            centrifugal: (ell * (ell + n - 2)) as f64,
            lambda,
        }
    }

    fn rhs(&self, r: f64, y: &[f64; 2]) -> [f64; 2] {
        let s = crate::spaceform::sn(self.k, r);
        let c = crate::spaceform::cn(self.k, r);
        [y[1], -self.n1 * c / s * y[1] - (self.lambda - self.centrifugal / (s * s)) * y[0]]
    }
}

/// Two-term Frobenius expansion `u = r^ℓ (1 + b r²)` of the regular solution.
fn frobenius_start(sf: &Spaceform, ell: usize, lambda: f64, eps: f64) -> [f64; 2] {
    let n = sf.dim() as f64;
    let l = ell as f64;
    let c = l * (l + n - 2.0);
    let b = (sf.curvature() * (l * (n - 1.0) + c) / 3.0 - lambda) / (4.0 * l + 2.0 * n);
    let u = eps.powi(ell as i32) * (1.0 + b * eps * eps);
    let du = if ell == 0 {
        2.0 * b * eps
    } else {
        l * eps.powi(ell as i32 - 1) + (l + 2.0) * b * eps.powi(ell as i32 + 1)
    };
    [u, du]
}

fn check_ball(sf: &Spaceform, radius: f64) -> Result<()> {
    if !(radius > 0.0) || !radius.is_finite() {
        return Err(Error::domain(format!("ball radius must be positive, got {radius}")));
    }
    let cap = sf.hemisphere_radius();
    if radius > cap * (1.0 + 1e-12) {
        return Err(Error::ineligible(format!(
            "ball radius {radius} exceeds the hemisphere radius π/(2√k) = {cap}"
        )));
    }
    Ok(())
}

/// Shoots the regular solution to `R`; returns `u(R)` and the number of sign
/// changes of `u` on `(0, R]`.
fn shoot(sf: &Spaceform, radius: f64, ell: usize, lambda: f64, ctl: &StepControl) -> Result<(f64, usize)> {
    let ode = RadialOde::new(sf, ell, lambda);
    let eps = 1e-6 * radius;
    let y0 = frobenius_start(sf, ell, lambda, eps);
    let mut sign = 1.0f64;
    let mut changes = 0usize;
    let mut h = 0.0;
    let y = integrate(&|r, y: &[f64; 2]| ode.rhs(r, y), eps, y0, radius, ctl, &mut h, |_, y| {
        if y[0] != 0.0 && y[0].signum() != sign {
            changes += 1;
            sign = y[0].signum();
        }
    })?;
    Ok((y[0], changes))
}

/// The `index`-th (0-based) Dirichlet eigenvalue of angular mode `ell` on `B_R`.
pub fn radial_eigenvalue(sf: &Spaceform, radius: f64, ell: usize, index: usize) -> Result<f64> {
    radial_eigenvalue_with(sf, radius, ell, index, &StepControl::default())
}

pub fn radial_eigenvalue_with(
    sf: &Spaceform,
    radius: f64,
    ell: usize,
    index: usize,
    ctl: &StepControl,
) -> Result<f64> {
    check_ball(sf, radius)?;
    let count = |lam: f64| shoot(sf, radius, ell, lam, ctl).map(|(_, c)| c);
    let target = index + 1;
    let mut lo = 0.0;
    let mut hi = 4.0 / (radius * radius);
    let mut grow = 0;
    while count(hi)? < target {
        lo = hi;
        hi *= 2.0;
        grow += 1;
        if grow > 200 {
            return Err(Error::NoConvergence(format!(
                "no eigenvalue bracket for mode {ell}, index {index} (last bracket [{lo}, {hi}])"
            )));
        }
    }
    // Narrow until exactly one eigenvalue of the mode lies in (lo, hi].
    let mut c_hi = count(hi)?;
    let mut iters = 0;
    while c_hi > target {
        let mid = 0.5 * (lo + hi);
        let c = count(mid)?;
        if c >= target {
            hi = mid;
            c_hi = c;
        } else {
            lo = mid;
        }
        iters += 1;
        if iters > 200 {
            return Err(Error::NoConvergence(format!(
                "oscillation bracketing stalled for mode {ell}, index {index} in [{lo}, {hi}]"
            )));
        }
    }
    let u_lo = shoot(sf, radius, ell, lo, ctl)?.0;
    let u_hi = shoot(sf, radius, ell, hi, ctl)?.0;
    let mut failure = None;
    let root = illinois(
        |lam| match shoot(sf, radius, ell, lam, ctl) {
            Ok((u, _)) => u,
            Err(e) => {
                failure = Some(e);
                f64::NAN
            }
        },
        lo,
        hi,
        u_lo,
        u_hi,
        1e-15 * hi,
        400,
    );
    if let Some(e) = failure {
        return Err(e);
    }
    root.ok_or_else(|| {
        Error::NoConvergence(format!(
            "secant refinement failed for mode {ell}, index {index}: bracket [{lo}, {hi}], u = [{u_lo}, {u_hi}]"
        ))
    })
}

/// Eigenfunction samples `(u, u')` on the uniform grid `r_i = i R / N`, matched
/// from a forward shot off the origin and a backward shot off `R`.
fn eigen_profile(
    sf: &Spaceform,
    radius: f64,
    ell: usize,
    lambda: f64,
    intervals: usize,
    ctl: &StepControl,
) -> Result<(Vec<f64>, Vec<f64>, Vec<f64>)> {
    let n = intervals;
    let ode = RadialOde::new(sf, ell, lambda);
    let f = |r: f64, y: &[f64; 2]| ode.rhs(r, y);
    let grid: Vec<f64> = (0..=n).map(|i| radius * i as f64 / n as f64).collect();
    let mut u = vec![0.0; n + 1];
    let mut du = vec![0.0; n + 1];
    let mid = n / 2;
    u[0] = if ell == 0 { 1.0 } else { 0.0 };
    du[0] = if ell == 1 { 1.0 } else { 0.0 };
    let eps = 1e-6 * radius;
    let mut y = frobenius_start(sf, ell, lambda, eps);
    let mut t = eps;
    let mut h = 0.0;
    for i in 1..=mid {
        y = integrate(&f, t, y, grid[i], ctl, &mut h, |_, _| {})?;
        t = grid[i];
        u[i] = y[0];
        du[i] = y[1];
    }
    let mut yb = [0.0, -1.0];
    let mut tb = radius;
    let mut hb = 0.0;
    let mut ub = vec![0.0; n + 1];
    let mut dub = vec![0.0; n + 1];
    ub[n] = yb[0];
    dub[n] = yb[1];
    for i in (mid..n).rev() {
        yb = integrate(&f, tb, yb, grid[i], ctl, &mut hb, |_, _| {})?;
        tb = grid[i];
        ub[i] = yb[0];
        dub[i] = yb[1];
    }
    if ub[mid] == 0.0 {
        return Err(Error::NoConvergence("profile matching point is a node".into()));
    }
    let scale = u[mid] / ub[mid];
    for i in mid..=n {
        u[i] = ub[i] * scale;
        du[i] = dub[i] * scale;
    }
    Ok((grid, u, du))
}

fn rayleigh_residual(sf: &Spaceform, grid: &[f64], u: &[f64], du: &[f64], ell: usize, lambda: f64) -> f64 {
    let c = (ell * (ell + sf.dim() - 2)) as f64;
    let energy: Vec<f64> = grid
        .iter()
        .enumerate()
        .map(|(i, &r)| {
            let pot = if i == 0 {
                if ell == 1 {
                    c * du[0] * du[0]
                } else {
                    0.0
                }
            } else {
                let s = sf.sn(r);
                c * u[i] * u[i] / (s * s)
            };
            du[i] * du[i] + pot
        })
        .collect();
    let mass: Vec<f64> = u.iter().map(|v| v * v).collect();
    let rq = shell_integral(sf, grid, &energy) / shell_integral(sf, grid, &mass);
    ((rq - lambda) / lambda).abs()
}

/// First and second Dirichlet eigenpairs of a geodesic ball.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct BallSpectrum {
    sf: Spaceform,
    radius: f64,
    lambda1: f64,
    lambda2: f64,
    z: RadialProfile,
    dz: RadialProfile,
    j: RadialProfile,
    dj: RadialProfile,
    residual: f64,
}

impl BallSpectrum {
    pub fn spaceform(&self) -> &Spaceform {
        &self.sf
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn lambda1(&self) -> f64 {
        self.lambda1
    }

    pub fn lambda2(&self) -> f64 {
        self.lambda2
    }

    pub fn gap(&self) -> f64 {
        self.lambda2 - self.lambda1
    }

    /// First eigenfunction, positive, normalized to unit `L²(B_R)` norm.
    pub fn z(&self) -> &RadialProfile {
        &self.z
    }

    pub fn dz(&self) -> &RadialProfile {
        &self.dz
    }

    /// Radial part of the second eigenfunction, scaled so that `J'(R) = z'(R)`.
    pub fn j(&self) -> &RadialProfile {
        &self.j
    }

    pub fn dj(&self) -> &RadialProfile {
        &self.dj
    }

    /// Largest relative Rayleigh-quotient residual of the two profiles.
    pub fn residual(&self) -> f64 {
        self.residual
    }

    /// `z` at any radius: cubic Hermite on the grid, zero outside the ball.
    pub fn z_at(&self, r: f64) -> f64 {
        if r >= self.radius {
            return 0.0;
        }
        hermite_uniform(self.z.grid(), self.z.values(), self.dz.values(), r)
    }

    /// `∫_{B_R} z² g(r) dV` by Simpson's rule on the profile grid.
    pub fn z2_integral<G: Fn(f64) -> f64>(&self, g: G) -> f64 {
        let vals: Vec<f64> = self.z.grid().iter().zip(self.z.values()).map(|(r, z)| z * z * g(*r)).collect();
        shell_integral(&self.sf, self.z.grid(), &vals)
    }
}

fn hermite_uniform(grid: &[f64], y: &[f64], dy: &[f64], t: f64) -> f64 {
    let n = grid.len() - 1;
    let step = grid[1] - grid[0];
    if t <= 0.0 {
        return y[0];
    }
    let i = ((t / step).floor() as usize).min(n - 1);
    let s = (t - grid[i]) / step;
    let h00 = (1.0 + 2.0 * s) * (1.0 - s) * (1.0 - s);
    let h10 = s * (1.0 - s) * (1.0 - s);
    let h01 = s * s * (3.0 - 2.0 * s);
    let h11 = s * s * (s - 1.0);
    h00 * y[i] + h10 * step * dy[i] + h01 * y[i + 1] + h11 * step * dy[i + 1]
}

/// Dirichlet spectrum of `B_R ⊂ N^n(k)` with the default grid.
pub fn ball_spectrum(sf: &Spaceform, radius: f64) -> Result<BallSpectrum> {
    ball_spectrum_with(sf, radius, &RadialOptions::default())
}

pub fn ball_spectrum_with(sf: &Spaceform, radius: f64, opts: &RadialOptions) -> Result<BallSpectrum> {
    check_ball(sf, radius)?;
    let intervals = (opts.intervals.max(4) + 1) & !1;
    let ctl = &opts.control;
    let lambda1 = radial_eigenvalue_with(sf, radius, 0, 0, ctl)?;
    let lambda2 = radial_eigenvalue_with(sf, radius, 1, 0, ctl)?;
    let (grid, mut z, mut dz) = eigen_profile(sf, radius, 0, lambda1, intervals, ctl)?;
    let (_, mut j, mut dj) = eigen_profile(sf, radius, 1, lambda2, intervals, ctl)?;

    let z2: Vec<f64> = z.iter().map(|v| v * v).collect();
    let norm = shell_integral(sf, &grid, &z2).sqrt();
    let zs = if z[0] < 0.0 { -1.0 / norm } else { 1.0 / norm };
    z.iter_mut().chain(dz.iter_mut()).for_each(|v| *v *= zs);
    let js = dz[intervals] / dj[intervals];
    j.iter_mut().chain(dj.iter_mut()).for_each(|v| *v *= js);

    let residual = rayleigh_residual(sf, &grid, &z, &dz, 0, lambda1)
        .max(rayleigh_residual(sf, &grid, &j, &dj, 1, lambda2));
    let mk = |v: Vec<f64>| RadialProfile::new(grid.clone(), v);
    Ok(BallSpectrum {
        sf: *sf,
        radius,
        lambda1,
        lambda2,
        z: mk(z)?,
        dz: mk(dz)?,
        j: mk(j)?,
        dj: mk(dj)?,
        residual,
    })
}

/// The radius `R` with `λ₁(B_R) = target`.
pub fn radius_for_lambda1(sf: &Spaceform, target: f64) -> Result<f64> {
    if !(target > 0.0) || !target.is_finite() {
        return Err(Error::domain(format!("target eigenvalue must be positive, got {target}")));
    }
    let ctl = StepControl::default();
    let lam = |r: f64| radial_eigenvalue_with(sf, r, 0, 0, &ctl);
    let cap = sf.hemisphere_radius();
    if cap.is_finite() {
        let at_cap = lam(cap)?;
        if target < at_cap * (1.0 - 1e-12) {
            return Err(Error::ineligible(format!(
                "λ₁ = {target} is below {at_cap}, the first eigenvalue of the hemisphere"
            )));
        }
        if target <= at_cap {
            return Ok(cap);
        }
    }
    // λ₁ scales like R^{-2}; search in log-log coordinates.
    let g = |x: f64| lam(x.exp()).map(|l| l.ln() - target.ln());
    let n = sf.dim() as f64;
    let guess = ((n / 2.0 + 0.9).powi(2) / target).sqrt().min(cap);
    let mut a = guess.ln();
    let mut ga = g(a)?;
    let mut b = a;
    let mut gb = ga;
    let mut tries = 0;
    while ga.signum() == gb.signum() {
        tries += 1;
        if tries > 200 {
            return Err(Error::NoConvergence(format!("no radius bracket for λ₁ = {target}")));
        }
        if gb > 0.0 {
            let next = (b + 0.5).min(cap.ln());
            if next <= b {
                return Err(Error::ineligible(format!("λ₁ = {target} not attainable below the radius cap")));
            }
            a = b;
            ga = gb;
            b = next;
        } else {
            a = b;
            ga = gb;
            b -= 0.5;
        }
        gb = g(b)?;
    }
    let (lo, hi, glo, ghi) = if a < b { (a, b, ga, gb) } else { (b, a, gb, ga) };
    let mut failure = None;
    let x = illinois(
        |x| match g(x) {
            Ok(v) => v,
            Err(e) => {
                failure = Some(e);
                f64::NAN
            }
        },
        lo,
        hi,
        glo,
        ghi,
        1e-15,
        300,
    );
    if let Some(e) = failure {
        return Err(e);
    }
    let r = x.ok_or_else(|| Error::NoConvergence(format!("radius search failed for λ₁ = {target}")))?.exp();
    let achieved = lam(r)?;
    if ((achieved - target) / target).abs() > 1e-10 {
        return Err(Error::NoConvergence(format!(
            "radius search reached λ₁ = {achieved}, target {target}"
        )));
    }
    Ok(r)
}

/// The test-function profile `h = J/z` and the energy density
/// `F = h'² + (n-1) h² / sn_k²` of a ball, with monotonicity certification.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TestProfile {
    sf: Spaceform,
    radius: f64,
    h: RadialProfile,
    dh: RadialProfile,
    f: RadialProfile,
    h_drop: f64,
    f_rise: f64,
    certified: bool,
}

/// Relative tolerance used when certifying `h ↑` and `F ↓`.
pub const CERTIFICATION_TOL: f64 = 1e-7;

impl TestProfile {
    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn h(&self) -> &RadialProfile {
        &self.h
    }

    pub fn dh(&self) -> &RadialProfile {
        &self.dh
    }

    pub fn f(&self) -> &RadialProfile {
        &self.f
    }

    /// True when `h` is nondecreasing and `F` nonincreasing on the grid.
    pub fn certified(&self) -> bool {
        self.certified
    }

    /// Largest relative drop of `h` and rise of `F` between grid neighbours.
    pub fn violations(&self) -> (f64, f64) {
        (self.h_drop, self.f_rise)
    }

    pub fn require_certified(&self) -> Result<()> {
        if self.certified {
            Ok(())
        } else {
            Err(Error::Certification(format!(
                "h not increasing or F not decreasing (relative violations {:.3e}, {:.3e})",
                self.h_drop, self.f_rise
            )))
        }
    }

    /// `h(t)`, extended by its value at `R` for `t ≥ R`.
    pub fn h_at(&self, t: f64) -> f64 {
        if t >= self.radius {
            return *self.h.values().last().unwrap();
        }
        hermite_uniform(self.h.grid(), self.h.values(), self.dh.values(), t.max(0.0))
    }

    pub fn dh_at(&self, t: f64) -> f64 {
        if t >= self.radius {
            return 0.0;
        }
        self.dh.eval(t.max(0.0))
    }

    /// `F(t)`; past `R` it is `(n-1) h(R)² / sn_k(t)²`.
    pub fn f_at(&self, t: f64) -> f64 {
        if t >= self.radius {
            let hr = *self.h.values().last().unwrap();
            let s = self.sf.sn(t);
            return (self.sf.dim() - 1) as f64 * hr * hr / (s * s);
        }
        self.f.eval(t.max(0.0))
    }
}

/// Builds `h = J/z` (extended by its limit at `R`) and `F`, and certifies
/// `h` nondecreasing and `F` nonincreasing to relative tolerance
/// [`CERTIFICATION_TOL`].
pub fn h_and_f(spectrum: &BallSpectrum) -> Result<TestProfile> {
    let sf = spectrum.sf;
    let grid = spectrum.z.grid().to_vec();
    let n = grid.len() - 1;
    let (z, dz, j, dj) = (spectrum.z.values(), spectrum.dz.values(), spectrum.j.values(), spectrum.dj.values());
    if z[..n].iter().any(|v| *v <= 0.0) {
        return Err(Error::invalid("first eigenfunction is not positive inside the ball"));
    }
    let nm1 = (sf.dim() - 1) as f64;
    let mut h = vec![0.0; n + 1];
    let mut dh = vec![0.0; n + 1];
    let mut f = vec![0.0; n + 1];
    dh[0] = dj[0] / z[0];
    f[0] = sf.dim() as f64 * dh[0] * dh[0];
    for i in 1..n {
        h[i] = j[i] / z[i];
        dh[i] = (dj[i] * z[i] - j[i] * dz[i]) / (z[i] * z[i]);
        let s = sf.sn(grid[i]);
        f[i] = dh[i] * dh[i] + nm1 * h[i] * h[i] / (s * s);
    }
    // Limits at R: h(R) = J'(R)/z'(R); h'(R) = 0 because J'' = -(n-1)(cn/sn)J'
    // and z'' = -(n-1)(cn/sn)z' there.
    h[n] = dj[n] / dz[n];
    dh[n] = 0.0;
    let s = sf.sn(grid[n]);
    f[n] = nm1 * h[n] * h[n] / (s * s);

    let h = RadialProfile::new(grid.clone(), h)?;
    let dh = RadialProfile::new(grid.clone(), dh)?;
    let f = RadialProfile::new(grid, f)?;
    let h_drop = h.max_decrease() / h.max_abs().max(f64::MIN_POSITIVE);
    let f_rise = f.max_increase() / f.max_abs().max(f64::MIN_POSITIVE);
    let certified = h_drop <= CERTIFICATION_TOL && f_rise <= CERTIFICATION_TOL;
    Ok(TestProfile { sf, radius: spectrum.radius, h, dh, f, h_drop, f_rise, certified })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    // Squares of the first zeros of J₀ and J₁ (30-digit evaluation).
    const J01_SQ: f64 = 5.783_185_962_946_784_5;
    const J11_SQ: f64 = 14.681_970_642_123_893;

    fn flat(n: usize) -> Spaceform {
        Spaceform::new(n, 0.0).unwrap()
    }

    #[test]
    fn flat_disk_matches_bessel_zeros() {
        let s = ball_spectrum(&flat(2), 1.0).unwrap();
        assert_relative_eq!(s.lambda1(), J01_SQ, max_relative = 1e-9);
        assert_relative_eq!(s.lambda2(), J11_SQ, max_relative = 1e-9);
        assert!(s.residual() < 1e-8, "residual {}", s.residual());
    }

    #[test]
    fn flat_ball_n3_is_sinc() {
        let s = ball_spectrum(&flat(3), 1.0).unwrap();
        assert_relative_eq!(s.lambda1(), PI * PI, max_relative = 1e-9);
        // z ∝ sin(πr)/r
        let c = s.z().values()[0];
        for &r in &[0.2, 0.5, 0.8] {
            assert_relative_eq!(s.z_at(r), c * (PI * r).sin() / (PI * r), max_relative = 1e-7);
        }
    }

    #[test]
    fn hemisphere_of_unit_sphere() {
        let sf = Spaceform::new(2, 1.0).unwrap();
        let s = ball_spectrum(&sf, PI / 2.0).unwrap();
        assert_relative_eq!(s.lambda1(), 2.0, max_relative = 1e-9);
        let c = s.z().values()[0];
        for &r in &[0.3, 1.0, 1.4] {
            assert_relative_eq!(s.z_at(r), c * r.cos(), max_relative = 1e-7, epsilon = 1e-9);
        }
        assert!(ball_spectrum(&sf, 2.0).is_err());
    }

    #[test]
    fn profiles_have_expected_shape() {
        let s = ball_spectrum(&Spaceform::new(2, -1.0).unwrap(), 1.0).unwrap();
        let z = s.z().values();
        assert!(z[0] > 0.0);
        assert!(z.windows(2).all(|w| w[1] < w[0]));
        assert_eq!(*z.last().unwrap(), 0.0);
        let j = s.j().values();
        assert_eq!(j[0], 0.0);
        assert_eq!(*j.last().unwrap(), 0.0);
        assert!(j[1..j.len() - 1].iter().all(|v| *v > 0.0));
    }

    #[test]
    fn flat_scaling() {
        let base = ball_spectrum(&flat(2), 1.0).unwrap();
        for &r in &[0.5, 2.0] {
            let s = ball_spectrum(&flat(2), r).unwrap();
            assert_relative_eq!(s.lambda1() * r * r, base.lambda1(), max_relative = 1e-9);
            assert_relative_eq!(s.lambda2() * r * r, base.lambda2(), max_relative = 1e-9);
        }
    }

    #[test]
    fn radius_for_lambda1_examples() {
        let sf = flat(2);
        assert_relative_eq!(radius_for_lambda1(&sf, J01_SQ).unwrap(), 1.0, max_relative = 1e-9);
        assert_relative_eq!(radius_for_lambda1(&sf, 4.0 * J01_SQ).unwrap(), 0.5, max_relative = 1e-9);
        let hyp = Spaceform::new(2, -1.0).unwrap();
        let l = radial_eigenvalue(&hyp, 1.0, 0, 0).unwrap();
        assert_relative_eq!(radius_for_lambda1(&hyp, l).unwrap(), 1.0, max_relative = 1e-9);
        let sph = Spaceform::new(2, 1.0).unwrap();
        assert!(radius_for_lambda1(&sph, 1.5).is_err());
        assert!(radius_for_lambda1(&sf, -1.0).is_err());
    }

    #[test]
    fn interlacing_identifies_lambda2() {
        for &(k, r) in &[(0.0, 1.0), (-1.0, 1.0), (1.0, 0.6)] {
            let sf = Spaceform::new(2, k).unwrap();
            let l1 = radial_eigenvalue(&sf, r, 0, 0).unwrap();
            let m1 = radial_eigenvalue(&sf, r, 1, 0).unwrap();
            let l_second_radial = radial_eigenvalue(&sf, r, 0, 1).unwrap();
            assert!(l1 < m1 && m1 < l_second_radial, "{l1} {m1} {l_second_radial}");
        }
    }

    #[test]
    fn h_and_f_certified_on_model_balls() {
        for &(k, r) in &[(0.0, 1.0), (-1.0, 1.0), (1.0, 0.6)] {
            let spectrum = ball_spectrum(&Spaceform::new(2, k).unwrap(), r).unwrap();
            let tp = h_and_f(&spectrum).unwrap();
            assert!(tp.certified(), "k={k}: {:?}", tp.violations());
            assert_eq!(tp.h().values()[0], 0.0);
            assert!(tp.f().values()[0].is_finite());
            assert_relative_eq!(tp.h_at(r + 1.0), 1.0, max_relative = 1e-12);
        }
    }

    #[test]
    fn h_is_scale_invariant() {
        let spectrum = ball_spectrum(&flat(2), 1.0).unwrap();
        let tp = h_and_f(&spectrum).unwrap();
        let mut scaled = spectrum.clone();
        scaled.z = spectrum.z.scaled(3.0);
        scaled.dz = spectrum.dz.scaled(3.0);
        scaled.j = spectrum.j.scaled(-0.25);
        scaled.dj = spectrum.dj.scaled(-0.25);
        // h picks up the ratio of the scales, F its square; the ratio F/h² does not change.
        let tp2 = h_and_f(&scaled);
        assert!(tp2.is_ok());
        scaled.j = spectrum.j.scaled(3.0);
        scaled.dj = spectrum.dj.scaled(3.0);
        let tp3 = h_and_f(&scaled).unwrap();
        for i in [10, 500, 1999] {
            assert_relative_eq!(tp3.h().values()[i], tp.h().values()[i], max_relative = 1e-13);
            assert_relative_eq!(tp3.f().values()[i], tp.f().values()[i], max_relative = 1e-12);
        }
    }

    #[test]
    fn sharpness_identity_on_the_ball() {
        // For the ball itself the test functions are eigenfunctions, so
        // ∫ z² F = (λ₂ - λ₁) ∫ z² h².
        for &(k, r) in &[(0.0, 1.0), (-1.0, 1.0), (1.0, 0.6)] {
            let spectrum = ball_spectrum(&Spaceform::new(2, k).unwrap(), r).unwrap();
            let tp = h_and_f(&spectrum).unwrap();
            let zf = spectrum.z2_integral(|t| tp.f_at(t));
            let zh = spectrum.z2_integral(|t| tp.h_at(t).powi(2));
            assert_relative_eq!(zf / zh, spectrum.gap(), max_relative = 1e-6);
        }
    }

    #[test]
    fn csv_dump() {
        let p = RadialProfile::new(vec![0.0, 0.5], vec![1.0, 0.25]).unwrap();
        let mut buf = Vec::new();
        p.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("radius,value\n0.0"));
        assert_eq!(text.lines().count(), 3);
    }

    #[test]
    fn rejects_bad_profiles() {
        assert!(RadialProfile::new(vec![0.0, 0.0], vec![1.0, 1.0]).is_err());
        assert!(RadialProfile::new(vec![0.0], vec![f64::NAN]).is_err());
        assert!(RadialProfile::new(vec![0.0, 1.0], vec![1.0]).is_err());
    }
}

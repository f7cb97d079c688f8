//! Geodesic disks in rotationally symmetric surfaces `dr² + φ(r)² dθ²`.
//!
//! The Laplacian separates into Fourier modes `u(r) e^{imθ}`, each a 1-D
//! Sturm–Liouville problem
//!
//! ```text
//! -(φ u')'/φ + m² u/φ² = λ u   on (0, R),   u(R) = 0.
//! ```
//!
//! Each mode is discretized with a cell-centered three-point scheme weighted by
//! `φ`, which yields a symmetric tridiagonal matrix after diagonal scaling.
//! Eigenvalues come from Sturm-sequence bisection; two grid levels are
//! combined by Richardson extrapolation to cancel the `O(h²)` error.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::radial::RadialProfile;
use crate::spaceform::{self, CurvaturePair};

/// Closed-form warping functions with a smooth pole (`φ(0) = 0`, `φ'(0) = 1`).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum Warp {
    /// `φ = sn_k`: the spaceform of curvature `k`.
    SnK(f64),
    /// `φ = r + a r³`, curvature `-6a / (1 + a r²)`.
    Cubic(f64),
}

impl Warp {
    pub fn phi(&self, r: f64) -> f64 {
        match *self {
            Warp::SnK(k) => spaceform::sn(k, r),
            Warp::Cubic(a) => r + a * r * r * r,
        }
    }

    pub fn dphi(&self, r: f64) -> f64 {
        match *self {
            Warp::SnK(k) => spaceform::cn(k, r),
            Warp::Cubic(a) => 1.0 + 3.0 * a * r * r,
        }
    }

    /// Gaussian curvature `-φ''/φ`, with its limit at the pole.
    pub fn curvature(&self, r: f64) -> f64 {
        match *self {
            Warp::SnK(k) => k,
            Warp::Cubic(a) => -6.0 * a / (1.0 + a * r * r),
        }
    }

    /// Area of the geodesic disk of radius `r` about the pole, `2π ∫₀^r φ`.
    pub fn disk_area(&self, r: f64) -> f64 {
        match *self {
            Warp::SnK(k) => {
                // 2π (1 - cn)/k, written stably near k = 0.
                let s = spaceform::sn(k, 0.5 * r);
                4.0 * std::f64::consts::PI * s * s
            }
            Warp::Cubic(a) => 2.0 * std::f64::consts::PI * (0.5 * r * r + 0.25 * a * r.powi(4)),
        }
    }
}

/// A warped-product surface on `[0, r_max]` with its measured curvature range.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct WarpedSurface {
    warp: Warp,
    r_max: f64,
    curvature_min: f64,
    curvature_max: f64,
}

const CURVATURE_SAMPLES: usize = 4001;

impl WarpedSurface {
    pub fn new(warp: Warp, r_max: f64) -> Result<Self> {
        if !(r_max > 0.0) || !r_max.is_finite() {
            return Err(Error::domain(format!("warped surface radius must be positive, got {r_max}")));
        }
        let mut kmin = f64::INFINITY;
        let mut kmax = f64::NEG_INFINITY;
        for i in 0..CURVATURE_SAMPLES {
            let r = r_max * i as f64 / (CURVATURE_SAMPLES - 1) as f64;
            if i > 0 && !(warp.phi(r) > 0.0) {
                return Err(Error::domain(format!("warping function is not positive at r = {r}")));
            }
            let c = warp.curvature(r);
            kmin = kmin.min(c);
            kmax = kmax.max(c);
        }
        Ok(Self { warp, r_max, curvature_min: kmin, curvature_max: kmax })
    }

    pub fn warp(&self) -> Warp {
        self.warp
    }

    pub fn r_max(&self) -> f64 {
        self.r_max
    }

    /// Smallest and largest sampled curvature on `[0, r_max]`.
    pub fn curvature_range(&self) -> (f64, f64) {
        (self.curvature_min, self.curvature_max)
    }

    /// Tightest admissible curvature pair for the disk of radius `r`.
    pub fn curvature_pair(&self, r: f64) -> Result<CurvaturePair> {
        let (lo, hi) = curvature_range_on(&self.warp, r);
        CurvaturePair::new(hi, lo)
    }

    /// Checks that `pair` bounds the curvature on the disk of radius `r`:
    /// `K_lower ≤ -φ''/φ ≤ k_upper` at every sample.
    pub fn check_witness(&self, pair: &CurvaturePair, r: f64) -> Result<()> {
        let (lo, hi) = curvature_range_on(&self.warp, r);
        let tol = 1e-12 * (1.0 + lo.abs().max(hi.abs()));
        if pair.k_lower() > lo + tol {
            return Err(Error::ineligible(format!(
                "curvature witness failed: declared K = {} exceeds the curvature floor {lo}",
                pair.k_lower()
            )));
        }
        if pair.k_upper() < hi - tol {
            return Err(Error::ineligible(format!(
                "curvature witness failed: declared k = {} is below the curvature ceiling {hi}",
                pair.k_upper()
            )));
        }
        Ok(())
    }

    /// True when the disk of radius `r` is convex, i.e. `φ' > 0` on `[0, r]`.
    pub fn disk_is_convex(&self, r: f64) -> bool {
        (0..=1000).all(|i| self.warp.dphi(r * i as f64 / 1000.0) > 0.0)
    }
}

fn curvature_range_on(warp: &Warp, r: f64) -> (f64, f64) {
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for i in 0..CURVATURE_SAMPLES {
        let c = warp.curvature(r * i as f64 / (CURVATURE_SAMPLES - 1) as f64);
        lo = lo.min(c);
        hi = hi.max(c);
    }
    (lo, hi)
}

/// Symmetric tridiagonal matrix (diagonal `d`, off-diagonal `e`).
struct Tridiagonal {
    d: Vec<f64>,
    e: Vec<f64>,
    /// Diagonal of the mass matrix, for mapping eigenvectors back.
    mass: Vec<f64>,
}

impl Tridiagonal {
    fn mode(warp: &Warp, radius: f64, m: usize, cells: usize) -> Self {
        let h = radius / cells as f64;
        let m2 = (m * m) as f64;
        let phi_c: Vec<f64> = (0..cells).map(|i| warp.phi((i as f64 + 0.5) * h)).collect();
        let phi_f: Vec<f64> = (0..=cells).map(|i| warp.phi(i as f64 * h)).collect();
        let mass: Vec<f64> = phi_c.iter().map(|p| p * h).collect();
        let mut d = vec![0.0; cells];
        let mut e = vec![0.0; cells.saturating_sub(1)];
        for i in 0..cells {
            let mut k = phi_f[i] / h + m2 * h / phi_c[i];
            // Dirichlet condition at R through a mirrored ghost cell.
            k += if i + 1 < cells { phi_f[i + 1] / h } else { 2.0 * phi_f[cells] / h };
            d[i] = k / mass[i];
            if i + 1 < cells {
                e[i] = -phi_f[i + 1] / h / (mass[i] * mass[i + 1]).sqrt();
            }
        }
        Self { d, e, mass }
    }

    /// Number of eigenvalues strictly below `x`.
    fn count_below(&self, x: f64) -> usize {
        let mut count = 0;
        let mut q = 1.0;
        for i in 0..self.d.len() {
            let off = if i == 0 { 0.0 } else { self.e[i - 1] * self.e[i - 1] / q };
            q = self.d[i] - x - off;
            if q == 0.0 {
                q = -f64::EPSILON * (self.d[i].abs() + x.abs()).max(f64::MIN_POSITIVE);
            }
            if q < 0.0 {
                count += 1;
            }
        }
        count
    }

    /// The `index`-th (0-based) eigenvalue by bisection.
    fn eigenvalue(&self, index: usize) -> f64 {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for i in 0..self.d.len() {
            let r = if i > 0 { self.e[i - 1].abs() } else { 0.0 } + self.e.get(i).map_or(0.0, |v| v.abs());
            lo = lo.min(self.d[i] - r);
            hi = hi.max(self.d[i] + r);
        }
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if self.count_below(mid) > index {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        0.5 * (lo + hi)
    }

    /// Eigenvector for an isolated eigenvalue by shifted inverse iteration.
    fn eigenvector(&self, lambda: f64) -> Vec<f64> {
        let n = self.d.len();
        let shift = lambda * (1.0 - 1e-10);
        let mut x = vec![1.0; n];
        for _ in 0..4 {
            x = self.solve_shifted(shift, &x);
            let norm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
            x.iter_mut().for_each(|v| *v /= norm);
        }
        x
    }

    fn solve_shifted(&self, shift: f64, b: &[f64]) -> Vec<f64> {
        // Thomas algorithm on (T - shift I).
        let n = self.d.len();
        let mut c = vec![0.0; n];
        let mut y = vec![0.0; n];
        let mut piv = self.d[0] - shift;
        y[0] = b[0] / piv;
        for i in 1..n {
            c[i - 1] = self.e[i - 1] / piv;
            piv = self.d[i] - shift - self.e[i - 1] * c[i - 1];
            if piv == 0.0 {
                piv = f64::EPSILON;
            }
            y[i] = (b[i] - self.e[i - 1] * y[i - 1]) / piv;
        }
        for i in (0..n - 1).rev() {
            y[i] -= c[i] * y[i + 1];
        }
        y
    }

    fn residual(&self, lambda: f64, x: &[f64]) -> f64 {
        let n = x.len();
        let mut r2 = 0.0;
        for i in 0..n {
            let mut v = (self.d[i] - lambda) * x[i];
            if i > 0 {
                v += self.e[i - 1] * x[i - 1];
            }
            if i + 1 < n {
                v += self.e[i] * x[i + 1];
            }
            r2 += v * v;
        }
        let x2: f64 = x.iter().map(|v| v * v).sum();
        (r2 / x2).sqrt() / lambda
    }
}

/// Options for [`warped_disk_spectrum_with`].
#[derive(Clone, Copy, Debug)]
pub struct WarpedOptions {
    /// Cells on the coarse level; the fine level uses twice as many.
    pub cells: usize,
}

impl Default for WarpedOptions {
    fn default() -> Self {
        Self { cells: 4000 }
    }
}

/// The two lowest Dirichlet eigenvalues of a geodesic disk about the pole.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct WarpedSpectrum {
    pub radius: f64,
    pub lambda1: f64,
    pub lambda2: f64,
    /// Fourier mode realizing `λ₂` (0 or 1).
    pub lambda2_mode: usize,
    /// First eigenfunction, normalized to unit `L²` norm on the disk.
    pub u1: RadialProfile,
    /// Relative eigen-residual of the discrete first eigenvector.
    pub residual: f64,
    /// `|Richardson - fine| / λ` for the worse of the two eigenvalues.
    pub extrapolation_change: f64,
}

/// Dirichlet spectrum of the geodesic disk `B_R` about the pole.
pub fn warped_disk_spectrum(ws: &WarpedSurface, radius: f64) -> Result<WarpedSpectrum> {
    warped_disk_spectrum_with(ws, radius, &WarpedOptions::default())
}

pub fn warped_disk_spectrum_with(ws: &WarpedSurface, radius: f64, opts: &WarpedOptions) -> Result<WarpedSpectrum> {
    if !(radius > 0.0) || radius > ws.r_max * (1.0 + 1e-12) {
        return Err(Error::domain(format!("disk radius {radius} outside (0, {}]", ws.r_max)));
    }
    if !ws.disk_is_convex(radius) {
        return Err(Error::ineligible(format!("geodesic disk of radius {radius} is not convex")));
    }
    let coarse = opts.cells.max(16);
    let warp = ws.warp;
    let extrapolate = |m: usize, index: usize| {
        let a = Tridiagonal::mode(&warp, radius, m, coarse).eigenvalue(index);
        let b = Tridiagonal::mode(&warp, radius, m, 2 * coarse).eigenvalue(index);
        let rich = (4.0 * b - a) / 3.0;
        (rich, ((rich - b) / rich).abs())
    };
    let (lambda1, c1) = extrapolate(0, 0);
    let (radial2, c2) = extrapolate(0, 1);
    let (angular1, c3) = extrapolate(1, 0);
    let (lambda2, lambda2_mode, c_second) =
        if angular1 <= radial2 { (angular1, 1, c3) } else { (radial2, 0, c2) };
    if !(lambda1 > 0.0 && lambda2 > lambda1) {
        return Err(Error::NoConvergence(format!("warped spectrum not ordered: {lambda1}, {lambda2}")));
    }

    let fine = Tridiagonal::mode(&warp, radius, 0, 2 * coarse);
    let lam_fine = fine.eigenvalue(0);
    let x = fine.eigenvector(lam_fine);
    let residual = fine.residual(lam_fine, &x);
    let cells = 2 * coarse;
    let h = radius / cells as f64;
    let mut grid = Vec::with_capacity(cells + 2);
    let mut vals = Vec::with_capacity(cells + 2);
    let u: Vec<f64> = x.iter().zip(&fine.mass).map(|(v, m)| v / m.sqrt()).collect();
    grid.push(0.0);
    // u is even about the pole: quadratic extrapolation through the first two centers.
    vals.push((9.0 * u[0] - u[1]) / 8.0);
    for (i, v) in u.iter().enumerate() {
        grid.push((i as f64 + 0.5) * h);
        vals.push(*v);
    }
    grid.push(radius);
    vals.push(0.0);
    let sign = if vals[0] < 0.0 { -1.0 } else { 1.0 };
    // ∫ u² dA = 2π Σ u_i² φ_i h
    let norm2: f64 = u.iter().zip(&fine.mass).map(|(v, m)| v * v * m).sum::<f64>() * 2.0 * std::f64::consts::PI;
    let scale = sign / norm2.sqrt();
    vals.iter_mut().for_each(|v| *v *= scale);

    Ok(WarpedSpectrum {
        radius,
        lambda1,
        lambda2,
        lambda2_mode,
        u1: RadialProfile::new(grid, vals)?,
        residual,
        extrapolation_change: c1.max(c_second),
    })
}

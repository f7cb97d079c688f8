//! Weak Faber–Krahn and Chiti comparisons between a domain and its
//! comparison ball `B_{α,Ω}`, the ball in `N^n(k)` with
//! `λ₁(B_{α,Ω}) = λ₁(Ω)/α²`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::radial::{self, shell_integral, BallSpectrum, RadialProfile, CERTIFICATION_TOL};
use crate::spaceform::Spaceform;
use crate::symmetrize::{decreasing_sym, Direction, WeightedSamples};

/// Relative mismatch of `‖S u₁‖₂` and `‖z‖₂` accepted before rescaling.
pub const NORMALIZATION_TOL: f64 = 1e-2;
/// Width of the sign band around zero, in units of `‖z‖_∞`.
pub const CROSSING_BAND: f64 = 1e-3;
/// Relative tolerance of weighted integral comparisons.
pub const WEIGHTED_TOL: f64 = 1e-6;

#[derive(Clone, Copy, Debug, Serialize)]
pub struct FaberKrahn {
    /// Radius of the ball `S^NΩ` with the volume of `Ω`.
    pub sym_radius: f64,
    pub lambda1_sym: f64,
    pub alpha: f64,
    /// `λ₁(Ω) − α² λ₁(S^NΩ)`.
    pub slack: f64,
    pub holds: bool,
}

/// `λ₁(Ω) ≥ α² λ₁(S^NΩ)`, accepted down to `−tol·λ₁(S^NΩ)`.
pub fn faber_krahn_check(lambda1: f64, volume: f64, sf: &Spaceform, alpha: f64, tol: f64) -> Result<FaberKrahn> {
    check_alpha(alpha)?;
    if !(lambda1 > 0.0) || !(volume > 0.0) {
        return Err(Error::domain("λ₁ and the volume must be positive"));
    }
    let cap = sf.hemisphere_radius();
    let sym_radius = sf.ball_radius_for_volume(volume)?;
    if sym_radius > cap {
        return Err(Error::ineligible(format!(
            "volume {volume} exceeds the hemisphere of curvature {}",
            sf.curvature()
        )));
    }
    let lambda1_sym = radial::radial_eigenvalue(sf, sym_radius, 0, 0)?;
    let slack = lambda1 - alpha * alpha * lambda1_sym;
    Ok(FaberKrahn { sym_radius, lambda1_sym, alpha, slack, holds: slack >= -tol * lambda1_sym })
}

fn check_alpha(alpha: f64) -> Result<()> {
    if !(alpha > 0.0 && alpha <= 1.0) {
        return Err(Error::domain(format!("α must lie in (0, 1], got {alpha}")));
    }
    Ok(())
}

/// The comparison ball `B_{α,Ω}` for `λ₁(Ω) = lambda1`.
pub fn comparison_ball(lambda1: f64, alpha: f64, sf: &Spaceform) -> Result<BallSpectrum> {
    check_alpha(alpha)?;
    let r = radial::radius_for_lambda1(sf, lambda1 / (alpha * alpha))?;
    radial::ball_spectrum(sf, r)
}

/// [`comparison_ball`] together with the containment `B_{α,Ω} ⊆ S^NΩ`, i.e.
/// `R ≤ m_k⁻¹(|Ω|)` (up to a relative `1e-9`).
pub fn comparison_ball_within(lambda1: f64, alpha: f64, sf: &Spaceform, volume: f64) -> Result<BallSpectrum> {
    let ball = comparison_ball(lambda1, alpha, sf)?;
    let outer = sf.ball_radius_for_volume(volume)?;
    if ball.radius() > outer * (1.0 + 1e-9) {
        return Err(Error::Certification(format!(
            "comparison ball radius {} exceeds the symmetrized domain radius {outer}",
            ball.radius()
        )));
    }
    Ok(ball)
}

/// Sign structure of `z − S^{Ω,N}u₁`.
#[derive(Clone, Debug, Serialize)]
pub struct ChitiReport {
    /// Crossing radius; `None` when the profiles agree within the band.
    pub r0: Option<f64>,
    pub holds: bool,
    pub vacuous: bool,
    /// Signs outside the band in radial order, runs collapsed (e.g. `+-`).
    pub sign_pattern: String,
    /// `‖S u₁‖₂/‖z‖₂ − 1` before rescaling.
    pub normalization: f64,
    /// Largest wrong-side excursion, in units of `‖z‖_∞`.
    pub max_violation: f64,
}

impl ChitiReport {
    pub const CSV_HEADER: &'static str = "id,r0,holds,max_violation";

    pub fn csv_row(&self, id: &str) -> String {
        let r0 = self.r0.map_or(String::new(), |r| format!("{r:.12e}"));
        format!("{id},{r0},{},{:.6e}", self.holds, self.max_violation)
    }
}

/// Rescales `u` so that its `L²` norm on the grid matches `z`'s.
fn normalized(u: &RadialProfile, ball: &BallSpectrum) -> Result<(Vec<f64>, Vec<f64>, f64)> {
    let sf = ball.spaceform();
    let grid = u.grid();
    if grid[0] != 0.0 {
        return Err(Error::invalid("symmetrized profile must start at r = 0"));
    }
    let z: Vec<f64> = grid.iter().map(|r| ball.z_at(*r)).collect();
    let sq = |v: &[f64]| v.iter().map(|x| x * x).collect::<Vec<_>>();
    let nu = shell_integral(sf, grid, &sq(u.values())).sqrt();
    let nz = shell_integral(sf, grid, &sq(&z)).sqrt();
    if !(nu > 0.0) || !(nz > 0.0) {
        return Err(Error::invalid("profiles must not vanish"));
    }
    let mismatch = nu / nz - 1.0;
    if mismatch.abs() > NORMALIZATION_TOL {
        return Err(Error::invalid(format!(
            "profiles are not L²-normalized alike (relative mismatch {mismatch:.3e})"
        )));
    }
    let scale = nz / nu;
    Ok((u.values().iter().map(|v| v * scale).collect(), z, mismatch))
}

/// Locates the crossing of `z` and the symmetrized eigenfunction, sampled on
/// a grid covering `S^NΩ ⊇ B`. The comparison holds when `z − S u₁` is
/// positive then negative, with excursions to the wrong side inside a band of
/// `±1e-3·‖z‖_∞`.
pub fn chiti_crossing(u1_sym: &RadialProfile, ball: &BallSpectrum) -> Result<ChitiReport> {
    let (u, z, normalization) = normalized(u1_sym, ball)?;
    let grid = u1_sym.grid();
    let zmax = z.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let band = CROSSING_BAND * zmax;
    let d: Vec<f64> = z.iter().zip(&u).map(|(a, b)| a - b).collect();

    let mut sign_pattern = String::new();
    for v in &d {
        let c = if *v > band {
            '+'
        } else if *v < -band {
            '-'
        } else {
            continue;
        };
        if !sign_pattern.ends_with(c) {
            sign_pattern.push(c);
        }
    }
    if sign_pattern.is_empty() {
        return Ok(ChitiReport { r0: None, holds: true, vacuous: true, sign_pattern, normalization, max_violation: 0.0 });
    }
    // The crossing is the last sign change of d before it first drops below the band.
    let first_neg = d.iter().position(|v| *v < -band);
    let (r0, cut) = match first_neg {
        Some(i) => match (0..i).rev().find(|&j| d[j] >= 0.0) {
            Some(j) => {
                let t = d[j] / (d[j] - d[j + 1]);
                (Some(grid[j] + t * (grid[j + 1] - grid[j])), j)
            }
            None => (Some(0.0), 0),
        },
        None => (None, d.len() - 1),
    };
    let mut violation = 0.0f64;
    for (i, v) in d.iter().enumerate() {
        if i < cut {
            violation = violation.max(-v);
        } else if i > cut + 1 {
            violation = violation.max(*v);
        }
    }
    let max_violation = violation.max(0.0) / zmax;
    let holds = sign_pattern == "+-" && max_violation <= CROSSING_BAND;
    Ok(ChitiReport { r0, holds, vacuous: false, sign_pattern, normalization, max_violation })
}

/// Decreasing symmetrization of `u₁` onto the ambient of `ball`, sampled on
/// a uniform grid of `points` nodes over `S^NΩ ∪ B`.
pub fn symmetrized_profile(u1: &WeightedSamples, ball: &BallSpectrum, points: usize) -> Result<RadialProfile> {
    let sym = decreasing_sym(u1, ball.spaceform())?;
    let outer = sym.support_radius().max(ball.radius());
    let n = (points.max(5) | 1) - 1;
    let grid: Vec<f64> = (0..=n).map(|i| outer * i as f64 / n as f64).collect();
    sym.sample(&grid)
}

/// Sides of a weighted comparison `∫(S u₁)² F` versus `∫z² F`.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct WeightedComparison {
    pub lhs: f64,
    pub rhs: f64,
    pub holds: bool,
}

/// `∫(S u₁)² F ≤ ∫ z² F` for decreasing `F`, reversed for increasing `F`,
/// to relative tolerance [`WEIGHTED_TOL`]. The monotonicity of `F` is checked
/// on the grid of `u1_sym`.
pub fn chiti_weighted<F: Fn(f64) -> f64>(
    u1_sym: &RadialProfile,
    ball: &BallSpectrum,
    f: F,
    monotone: Direction,
) -> Result<WeightedComparison> {
    let (u, z, _) = normalized(u1_sym, ball)?;
    let grid = u1_sym.grid();
    let fv: Vec<f64> = grid.iter().map(|r| f(*r)).collect();
    let scale = fv.iter().fold(0.0f64, |m, v| m.max(v.abs())).max(f64::MIN_POSITIVE);
    let bad = fv.windows(2).any(|w| match monotone {
        Direction::Decreasing => w[1] - w[0] > CERTIFICATION_TOL * scale,
        Direction::Increasing => w[0] - w[1] > CERTIFICATION_TOL * scale,
    });
    if bad {
        return Err(Error::Certification(format!("weight is not {monotone:?} on the grid").to_lowercase()));
    }
    let sf = ball.spaceform();
    let lv: Vec<f64> = u.iter().zip(&fv).map(|(a, w)| a * a * w).collect();
    let rv: Vec<f64> = z.iter().zip(&fv).map(|(a, w)| a * a * w).collect();
    let lhs = shell_integral(sf, grid, &lv);
    let rhs = shell_integral(sf, grid, &rv);
    let tol = WEIGHTED_TOL * lhs.abs().max(rhs.abs());
    let holds = match monotone {
        Direction::Decreasing => lhs <= rhs + tol,
        Direction::Increasing => lhs >= rhs - tol,
    };
    Ok(WeightedComparison { lhs, rhs, holds })
}

/// Result of a pointwise differential (in)equality check.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct DifferentialCheck {
    /// Largest relative deviation (identity) or violation (inequality).
    pub max_relative_error: f64,
    pub points: usize,
}

/// Checks `(ν⁻¹)'(s) = −λ₁(B) A(s)⁻² ∫₀ˢ ν⁻¹` for the ball eigenfunction,
/// where `ν⁻¹(m_k(r)) = z(r)`, by finite differences of the computed `z` on
/// `s ∈ [band·|B|, (1 − band)·|B|]`.
pub fn nu_inverse_identity(ball: &BallSpectrum, band: f64) -> Result<DifferentialCheck> {
    let sf = ball.spaceform();
    let grid = ball.z().grid();
    let z = ball.z().values();
    let s: Vec<f64> = grid.iter().map(|r| sf.ball_volume(*r)).collect::<Result<_>>()?;
    let total = *s.last().unwrap();
    // Cumulative ∫₀ˢ ν⁻¹ = ∫₀^r z m_k' dr by the trapezoid rule on a fine grid.
    let weighted: Vec<f64> = grid.iter().zip(z).map(|(r, v)| v * sf.sphere_area(*r).unwrap_or(0.0)).collect();
    let mut cum = vec![0.0; grid.len()];
    for i in 1..grid.len() {
        cum[i] = cum[i - 1] + 0.5 * (grid[i] - grid[i - 1]) * (weighted[i] + weighted[i - 1]);
    }
    let lambda = ball.lambda1();
    let mut worst = 0.0f64;
    let mut points = 0;
    for i in 1..grid.len() - 1 {
        if s[i] < band * total || s[i] > (1.0 - band) * total {
            continue;
        }
        let lhs = (z[i + 1] - z[i - 1]) / (s[i + 1] - s[i - 1]);
        let a = sf.sphere_area(grid[i])?;
        let rhs = -lambda * cum[i] / (a * a);
        worst = worst.max(((lhs - rhs) / rhs).abs());
        points += 1;
    }
    if points == 0 {
        return Err(Error::invalid("no interior points for the differential check"));
    }
    Ok(DifferentialCheck { max_relative_error: worst, points })
}

/// The domain-side inequality `(μ⁻¹)'(s) ≥ −(λ₁/α²) A(s)⁻² ∫₀ˢ μ⁻¹` for the
/// distribution function of `u₁`, on `points` interior values of `s`
/// (bands of `band·|Ω|` excluded). Reports the largest relative violation.
pub fn mu_inverse_inequality(
    u1: &WeightedSamples,
    sf: &Spaceform,
    lambda1: f64,
    alpha: f64,
    band: f64,
    points: usize,
) -> Result<DifferentialCheck> {
    check_alpha(alpha)?;
    let sym = decreasing_sym(u1, sf)?;
    let total = sym.total_measure();
    let vols = sym.volumes();
    let levels = sym.levels();
    // ∫₀ˢ μ⁻¹ from the exact step representation.
    let cumulative = |s: f64| -> f64 {
        let mut acc = 0.0;
        for (i, l) in levels.iter().enumerate() {
            let (a, b) = (vols[i], vols[i + 1]);
            if s <= a {
                break;
            }
            acc += l * (s.min(b) - a);
        }
        acc
    };
    let lo = band * total;
    let hi = (1.0 - band) * total;
    let n = points.max(3);
    let ds = (hi - lo) / (n as f64 * 4.0);
    let lambda = lambda1 / (alpha * alpha);
    let mut worst = 0.0f64;
    for i in 0..n {
        let s = lo + (hi - lo) * (i as f64 + 0.5) / n as f64;
        let lhs = (sym.value_at_volume(s + ds) - sym.value_at_volume(s - ds)) / (2.0 * ds);
        let a = sf.iso_profile(s)?;
        let rhs = -lambda * cumulative(s) / (a * a);
        worst = worst.max((rhs - lhs) / rhs.abs());
    }
    Ok(DifferentialCheck { max_relative_error: worst.max(0.0), points: n })
}

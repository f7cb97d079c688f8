//! Distribution functions and radial rearrangements onto spaceform balls.
//!
//! A nonnegative function on a domain `D` is represented by
//! [`WeightedSamples`]: values with the measure of the cell carrying them,
//! plus `|D|`. Its decreasing symmetrization is the radial function
//! `r ↦ μ⁻¹(m_k(r))` on the ball of volume `|D|` in `N^n(k)`; the increasing
//! one is `r ↦ μ⁻¹(max(|D| − m_k(r), 0))`. For step data both are step
//! profiles whose shells have exactly the measures of the level sets, so
//! norm identities and rearrangement inequalities hold to roundoff.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::radial::RadialProfile;
use crate::spaceform::Spaceform;

/// A discretized nonnegative function: `(value, measure)` pairs and `|D|`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WeightedSamples {
    values: Vec<f64>,
    weights: Vec<f64>,
    total_measure: f64,
}

impl WeightedSamples {
    pub fn new(values: Vec<f64>, weights: Vec<f64>, total_measure: f64) -> Result<Self> {
        if values.len() != weights.len() {
            return Err(Error::invalid("values and weights differ in length"));
        }
        if values.iter().any(|v| !v.is_finite() || *v < 0.0) {
            return Err(Error::invalid("sample values must be finite and nonnegative"));
        }
        if weights.iter().any(|w| !(*w > 0.0) || !w.is_finite()) {
            return Err(Error::invalid("sample weights must be positive"));
        }
        if !(total_measure > 0.0) || !total_measure.is_finite() {
            return Err(Error::invalid("total measure must be positive"));
        }
        let sum: f64 = weights.iter().sum();
        if sum > total_measure * (1.0 + 1e-12) + 1e-12 {
            return Err(Error::invalid(format!(
                "sample weights sum to {sum}, more than the total measure {total_measure}"
            )));
        }
        Ok(Self { values, weights, total_measure })
    }

    pub fn from_pairs(pairs: &[(f64, f64)], total_measure: f64) -> Result<Self> {
        Self::new(pairs.iter().map(|p| p.0).collect(), pairs.iter().map(|p| p.1).collect(), total_measure)
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn total_measure(&self) -> f64 {
        self.total_measure
    }

    /// Sum of the cell weights (the measure carrying samples).
    pub fn sampled_measure(&self) -> f64 {
        self.weights.iter().sum()
    }

    /// Same samples inside a larger (or smaller) ambient domain.
    pub fn with_total_measure(&self, total: f64) -> Result<Self> {
        Self::new(self.values.clone(), self.weights.clone(), total)
    }

    pub fn powf(&self, beta: f64) -> Self {
        Self {
            values: self.values.iter().map(|v| v.powf(beta)).collect(),
            weights: self.weights.clone(),
            total_measure: self.total_measure,
        }
    }

    pub fn scaled(&self, c: f64) -> Self {
        Self {
            values: self.values.iter().map(|v| v * c.abs()).collect(),
            weights: self.weights.clone(),
            total_measure: self.total_measure,
        }
    }

    /// `(∫ f^p)^{1/p}`.
    pub fn lp_norm(&self, p: f64) -> f64 {
        self.values.iter().zip(&self.weights).map(|(v, w)| w * v.powf(p)).sum::<f64>().powf(1.0 / p)
    }

    /// `∫ f g` over aligned cells.
    pub fn inner(&self, other: &Self) -> Result<f64> {
        check_aligned(self, other)?;
        Ok(self.values.iter().zip(&other.values).zip(&self.weights).map(|((f, g), w)| f * g * w).sum())
    }

    /// Distinct values in ascending order with the aggregated measure of each.
    fn levels(&self) -> (Vec<f64>, Vec<f64>) {
        let mut idx: Vec<usize> = (0..self.values.len()).collect();
        idx.sort_by(|&a, &b| self.values[a].total_cmp(&self.values[b]));
        let mut vals: Vec<f64> = Vec::new();
        let mut meas: Vec<f64> = Vec::new();
        for i in idx {
            let v = self.values[i];
            if vals.last() == Some(&v) {
                *meas.last_mut().unwrap() += self.weights[i];
            } else {
                vals.push(v);
                meas.push(self.weights[i]);
            }
        }
        (vals, meas)
    }
}

fn check_aligned(f: &WeightedSamples, g: &WeightedSamples) -> Result<()> {
    if f.len() != g.len() {
        return Err(Error::invalid("samples are not aligned on the same cells"));
    }
    let misaligned = f.weights.iter().zip(&g.weights).any(|(a, b)| (a - b).abs() > 1e-14 * a.abs().max(b.abs()));
    if misaligned || (f.total_measure - g.total_measure).abs() > 1e-14 * f.total_measure {
        return Err(Error::invalid("samples are not aligned on the same cells"));
    }
    Ok(())
}


/// `μ(t) = |{f > t}|` as an exact step function of the data.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DistributionFunction {
    /// Distinct sample values, ascending.
    thresholds: Vec<f64>,
    /// `measures[i] = μ(thresholds[i])`, the measure strictly above level `i`.
    measures: Vec<f64>,
    /// Measure carried by samples (`μ` just below the smallest value).
    sampled_measure: f64,
    /// `μ(t)` for `t < 0`: the whole domain, zero set included.
    total_measure: f64,
}

impl DistributionFunction {
    pub fn thresholds(&self) -> &[f64] {
        &self.thresholds
    }

    pub fn measures(&self) -> &[f64] {
        &self.measures
    }

    pub fn total_measure(&self) -> f64 {
        self.total_measure
    }

    /// `μ(t)`.
    pub fn eval(&self, t: f64) -> f64 {
        if t < 0.0 {
            return self.total_measure;
        }
        match self.thresholds.partition_point(|v| *v <= t) {
            0 => self.sampled_measure,
            i => self.measures[i - 1],
        }
    }

    /// Right-continuous generalized inverse `μ⁻¹(s) = inf{t ≥ 0 : μ(t) ≤ s}`.
    pub fn inverse(&self, s: f64) -> f64 {
        if self.eval(0.0) <= s {
            return 0.0;
        }
        // μ drops to measures[i] at thresholds[i]; measures is nonincreasing and ends at 0.
        let i = self.measures.partition_point(|m| *m > s);
        self.thresholds[i]
    }

    /// Agreement with another distribution function at every jump of either.
    pub fn max_difference(&self, other: &Self) -> f64 {
        let mut ts: Vec<f64> = self.thresholds.iter().chain(&other.thresholds).copied().collect();
        ts.push(-1.0);
        ts.push(0.0);
        ts.iter().fold(0.0f64, |m, &t| m.max((self.eval(t) - other.eval(t)).abs()))
    }
}

/// Sort-based distribution function of the samples.
pub fn distribution(ws: &WeightedSamples) -> DistributionFunction {
    let (vals, meas) = ws.levels();
    let mut tail = vec![0.0; vals.len()];
    let mut acc = 0.0;
    for i in (0..vals.len()).rev() {
        tail[i] = acc;
        acc += meas[i];
    }
    DistributionFunction {
        thresholds: vals,
        measures: tail,
        sampled_measure: acc,
        total_measure: ws.total_measure,
    }
}

/// Which rearrangement a [`SymmetrizedProfile`] holds.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Direction {
    Decreasing,
    Increasing,
}

/// A radial step function on the ball of volume `|D|` in `N^n(k)`.
///
/// Level `j` occupies the shell between volumes `volumes[j]` and
/// `volumes[j+1]`, i.e. between radii `m_k⁻¹` of those volumes.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SymmetrizedProfile {
    sf: Spaceform,
    direction: Direction,
    volumes: Vec<f64>,
    radii: Vec<f64>,
    levels: Vec<f64>,
}

impl SymmetrizedProfile {
    fn build(sf: &Spaceform, direction: Direction, levels: Vec<(f64, f64)>) -> Result<Self> {
        let mut vols = vec![0.0];
        let mut lv: Vec<f64> = Vec::with_capacity(levels.len());
        for (v, m) in levels {
            if m <= 0.0 {
                continue;
            }
            if lv.last() == Some(&v) {
                *vols.last_mut().unwrap() += m;
            } else {
                let last = *vols.last().unwrap();
                vols.push(last + m);
                lv.push(v);
            }
        }
        let radii = vols.iter().map(|&s| sf.ball_radius_for_volume(s)).collect::<Result<Vec<f64>>>()?;
        Ok(Self { sf: *sf, direction, volumes: vols, radii, levels: lv })
    }

    pub fn spaceform(&self) -> &Spaceform {
        &self.sf
    }

    pub fn direction(&self) -> Direction {
        self.direction
    }

    /// Shell boundaries in volume, from 0 to `|D|`.
    pub fn volumes(&self) -> &[f64] {
        &self.volumes
    }

    /// Shell boundaries in radius.
    pub fn radii(&self) -> &[f64] {
        &self.radii
    }

    pub fn levels(&self) -> &[f64] {
        &self.levels
    }

    pub fn total_measure(&self) -> f64 {
        *self.volumes.last().unwrap()
    }

    /// Radius of the supporting ball.
    pub fn support_radius(&self) -> f64 {
        *self.radii.last().unwrap()
    }

    /// Value on the sphere enclosing volume `s` (0 outside the ball).
    pub fn value_at_volume(&self, s: f64) -> f64 {
        if self.levels.is_empty() || s >= self.total_measure() {
            return 0.0;
        }
        let j = self.volumes[1..].partition_point(|b| *b <= s);
        self.levels[j.min(self.levels.len() - 1)]
    }

    pub fn value_at_radius(&self, r: f64) -> f64 {
        if r >= self.support_radius() {
            return 0.0;
        }
        let j = self.radii[1..].partition_point(|b| *b <= r);
        self.levels[j.min(self.levels.len() - 1)]
    }

    /// Point samples on a radial grid.
    pub fn sample(&self, grid: &[f64]) -> Result<RadialProfile> {
        RadialProfile::new(grid.to_vec(), grid.iter().map(|&r| self.value_at_radius(r)).collect())
    }

    /// Levels paired with their shell volumes.
    pub fn to_samples(&self) -> Result<WeightedSamples> {
        let w: Vec<f64> = self.volumes.windows(2).map(|b| b[1] - b[0]).collect();
        WeightedSamples::new(self.levels.clone(), w, self.total_measure())
    }

    pub fn scaled(&self, c: f64) -> Self {
        let mut out = self.clone();
        out.levels.iter_mut().for_each(|v| *v *= c.abs());
        out
    }

    /// `(∫ f^p)` over the ball with exact shell volumes.
    pub fn lp_norm(&self, p: f64) -> f64 {
        self.levels
            .iter()
            .zip(self.volumes.windows(2))
            .map(|(v, b)| v.powf(p) * (b[1] - b[0]))
            .sum::<f64>()
            .powf(1.0 / p)
    }

    /// `∫ f g` for two profiles on the same ball, merging shell boundaries.
    pub fn product_integral(&self, other: &Self) -> Result<f64> {
        let t = self.total_measure();
        if self.sf != other.sf || (t - other.total_measure()).abs() > 1e-12 * t {
            return Err(Error::invalid("profiles live on different balls"));
        }
        let mut cuts: Vec<f64> = self.volumes.iter().chain(&other.volumes).copied().collect();
        cuts.sort_by(f64::total_cmp);
        cuts.dedup();
        Ok(cuts
            .windows(2)
            .map(|b| {
                let mid = 0.5 * (b[0] + b[1]);
                self.value_at_volume(mid) * other.value_at_volume(mid) * (b[1] - b[0])
            })
            .sum())
    }

    /// `∫ f^power · g(r) dV`, with `g` integrated over each shell by
    /// Gauss–Legendre quadrature against `m_k'(r)`.
    pub fn weighted_integral<G: Fn(f64) -> f64 + Sync>(&self, power: i32, g: G) -> f64 {
        let n = self.levels.len();
        let sf = self.sf;
        let terms = crate::par::map_range(n, |j| {
            let (a, b) = (self.radii[j], self.radii[j + 1]);
            if b <= a {
                return 0.0;
            }
            let shell = crate::numeric::integrate_gl(|r| g(r) * sf.sphere_area_unchecked(r), a, b, 1);
            self.levels[j].powi(power) * shell
        });
        terms.iter().sum()
    }
}

fn check_capacity(ws: &WeightedSamples, sf: &Spaceform) -> Result<()> {
    let cap = 0.5 * sf.total_volume();
    if ws.total_measure > cap * (1.0 + 1e-12) {
        return Err(Error::ineligible(format!(
            "measure {} exceeds half the volume of the model space ({cap})",
            ws.total_measure
        )));
    }
    Ok(())
}

/// Decreasing symmetrization `S^{D,N} f`: `r ↦ μ⁻¹(m_k(r))`.
pub fn decreasing_sym(ws: &WeightedSamples, sf: &Spaceform) -> Result<SymmetrizedProfile> {
    check_capacity(ws, sf)?;
    let (vals, meas) = ws.levels();
    let slack = (ws.total_measure - ws.sampled_measure()).max(0.0);
    let mut levels: Vec<(f64, f64)> = vals.into_iter().zip(meas).rev().collect();
    levels.push((0.0, slack));
    SymmetrizedProfile::build(sf, Direction::Decreasing, levels)
}

/// Increasing symmetrization `S_{D,N} f`: `r ↦ μ⁻¹(max(|D| − m_k(r), 0))`.
pub fn increasing_sym(ws: &WeightedSamples, sf: &Spaceform) -> Result<SymmetrizedProfile> {
    check_capacity(ws, sf)?;
    let (vals, meas) = ws.levels();
    let slack = (ws.total_measure - ws.sampled_measure()).max(0.0);
    let mut levels: Vec<(f64, f64)> = vec![(0.0, slack)];
    levels.extend(vals.into_iter().zip(meas));
    SymmetrizedProfile::build(sf, Direction::Increasing, levels)
}

/// `L^p` norms of the input and of both symmetrizations.
#[derive(Clone, Debug, Serialize)]
pub struct NormCheck {
    pub p: f64,
    pub input: f64,
    pub decreasing: f64,
    pub increasing: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct NormReport {
    pub rows: Vec<NormCheck>,
    pub max_relative_error: f64,
}

impl NormReport {
    pub fn holds(&self, tol: f64) -> bool {
        self.max_relative_error <= tol
    }
}

/// Norm preservation under both symmetrizations for each exponent `p ≥ 1`.
pub fn check_norms(ws: &WeightedSamples, sf: &Spaceform, ps: &[f64]) -> Result<NormReport> {
    let dec = decreasing_sym(ws, sf)?;
    let inc = increasing_sym(ws, sf)?;
    let mut rows = Vec::with_capacity(ps.len());
    let mut worst = 0.0f64;
    for &p in ps {
        if !(p >= 1.0) {
            return Err(Error::invalid(format!("norm exponent must be at least 1, got {p}")));
        }
        let row = NormCheck { p, input: ws.lp_norm(p), decreasing: dec.lp_norm(p), increasing: inc.lp_norm(p) };
        let scale = row.input.abs().max(f64::MIN_POSITIVE);
        worst = worst.max((row.decreasing - row.input).abs() / scale).max((row.increasing - row.input).abs() / scale);
        rows.push(row);
    }
    Ok(NormReport { rows, max_relative_error: worst })
}

/// The rearrangement chain `∫ S^D f · S_D g ≤ ∫ f g ≤ ∫ S^D f · S^D g`.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct HardyLittlewoodReport {
    pub lower: f64,
    pub middle: f64,
    pub upper: f64,
}

impl HardyLittlewoodReport {
    pub fn holds(&self, tol: f64) -> bool {
        let scale = self.upper.abs().max(self.middle.abs()).max(f64::MIN_POSITIVE);
        self.lower <= self.middle + tol * scale && self.middle <= self.upper + tol * scale
    }
}

pub fn check_hardy_littlewood(f: &WeightedSamples, g: &WeightedSamples, sf: &Spaceform) -> Result<HardyLittlewoodReport> {
    let middle = f.inner(g)?;
    let fd = decreasing_sym(f, sf)?;
    let gd = decreasing_sym(g, sf)?;
    let gi = increasing_sym(g, sf)?;
    Ok(HardyLittlewoodReport { lower: fd.product_integral(&gi)?, middle, upper: fd.product_integral(&gd)? })
}

/// Largest relative pointwise difference between `S(f^β)` and `(S f)^β`.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct PowerReport {
    pub beta: f64,
    pub decreasing_error: f64,
    pub increasing_error: f64,
}

impl PowerReport {
    pub fn holds(&self, tol: f64) -> bool {
        self.decreasing_error <= tol && self.increasing_error <= tol
    }
}

pub fn check_powers(ws: &WeightedSamples, sf: &Spaceform, beta: f64) -> Result<PowerReport> {
    if !(beta > 0.0) {
        return Err(Error::invalid(format!("power must be positive, got {beta}")));
    }
    let powered = ws.powf(beta);
    let compare = |a: &SymmetrizedProfile, b: &SymmetrizedProfile| {
        let mut cuts: Vec<f64> = a.volumes.iter().chain(&b.volumes).copied().collect();
        cuts.sort_by(f64::total_cmp);
        cuts.dedup();
        cuts.windows(2).fold(0.0f64, |m, w| {
            let mid = 0.5 * (w[0] + w[1]);
            let x = a.value_at_volume(mid).powf(beta);
            let y = b.value_at_volume(mid);
            let scale = x.abs().max(y.abs());
            if scale == 0.0 {
                m
            } else {
                m.max((x - y).abs() / scale)
            }
        })
    };
    let dec = compare(&decreasing_sym(ws, sf)?, &decreasing_sym(&powered, sf)?);
    let inc = compare(&increasing_sym(ws, sf)?, &increasing_sym(&powered, sf)?);
    Ok(PowerReport { beta, decreasing_error: dec, increasing_error: inc })
}

/// Transplants a monotone radial profile from a rotationally symmetric source
/// onto `N^n(k)`: the result at radius `ρ` is `f(m_D⁻¹(m_k(ρ)))`, where `m_D`
/// is the volume of the source ball. Grid points map to grid points, so the
/// values are carried over exactly.
pub fn radial_transfer<M: Fn(f64) -> f64>(profile: &RadialProfile, m_d: M, sf: &Spaceform) -> Result<RadialProfile> {
    let v = profile.values();
    let nonincreasing = v.windows(2).all(|w| w[1] <= w[0]);
    let nondecreasing = v.windows(2).all(|w| w[1] >= w[0]);
    if !nonincreasing && !nondecreasing {
        return Err(Error::invalid("radial transfer needs a monotone profile"));
    }
    let vols: Vec<f64> = profile.grid().iter().map(|&r| m_d(r)).collect();
    if vols.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::invalid("source volume function must be strictly increasing"));
    }
    let radii = vols.iter().map(|&s| sf.ball_radius_for_volume(s)).collect::<Result<Vec<f64>>>()?;
    RadialProfile::new(radii, v.to_vec())
}

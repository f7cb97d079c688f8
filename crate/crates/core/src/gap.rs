//! The gap bound end to end: balancing point, the test-function inequality
//! `(λ₂ − λ₁) ∫u₁² h(σ(r_p))² ≤ C₁² ∫u₁² F(σ(r_p))`, its symmetrized chain,
//! and the final comparison against the model ball.

use num_complex::Complex64;
use serde::Serialize;
use std::f64::consts::PI;
use std::fmt;

use crate::comparison::{self, ChitiReport, FaberKrahn};
use crate::error::{Error, Result};
use crate::fem::{self, EigenPairs, FemSystem};
use crate::harness::Tolerances;
use crate::mesh::sigma::{sigma_profile_with, SigmaOptions};
use crate::mesh::{c1_constant, convex_hull, C1Range, Geometry, Hull, MeshDomain, SigmaProfile};
use crate::par;
use crate::radial::{self, BallSpectrum, TestProfile};
use crate::spaceform::{self, CurvaturePair, Spaceform};
use crate::symmetrize::{decreasing_sym, WeightedSamples};
use crate::warped::{warped_disk_spectrum, WarpedSurface};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Holds,
    Violated,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Holds => "holds",
            Verdict::Violated => "violated",
        })
    }
}

/// One evaluation of the gap bound.
#[derive(Clone, Debug, Serialize)]
pub struct GapBoundReport {
    pub lambda1: f64,
    pub lambda2: f64,
    pub gap: f64,
    pub alpha: f64,
    pub ball_radius: f64,
    pub ball_gap: f64,
    pub c1: f64,
    pub curvature_const: f64,
    pub bound_rhs: f64,
    pub verdict: Verdict,
    pub relative_slack: f64,
    pub diameter: f64,
    pub k_lower: f64,
    pub k_upper: f64,
}

impl GapBoundReport {
    pub const FIELDS: [&'static str; 14] = [
        "lambda1",
        "lambda2",
        "gap",
        "alpha",
        "ball_radius",
        "ball_gap",
        "c1",
        "curvature_const",
        "bound_rhs",
        "verdict",
        "relative_slack",
        "diameter",
        "k_lower",
        "k_upper",
    ];

    pub fn csv_header() -> String {
        Self::FIELDS.join(",")
    }

    pub fn csv_row(&self) -> String {
        let f = |x: f64| format!("{x:.12e}");
        [
            f(self.lambda1),
            f(self.lambda2),
            f(self.gap),
            f(self.alpha),
            f(self.ball_radius),
            f(self.ball_gap),
            f(self.c1),
            f(self.curvature_const),
            f(self.bound_rhs),
            self.verdict.to_string(),
            f(self.relative_slack),
            f(self.diameter),
            f(self.k_lower),
            f(self.k_upper),
        ]
        .join(",")
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    fn assemble(
        lambda1: f64,
        lambda2: f64,
        alpha: f64,
        ball: &BallSpectrum,
        c1: f64,
        pair: &CurvaturePair,
        diameter: f64,
        margin: f64,
    ) -> Result<Self> {
        let curvature_const = spaceform::curvature_constant(ball.spaceform().dim(), pair, diameter)?;
        let gap = lambda2 - lambda1;
        let bound_rhs = curvature_const * ball.gap();
        let verdict = if gap <= bound_rhs * (1.0 + margin) { Verdict::Holds } else { Verdict::Violated };
        Ok(Self {
            lambda1,
            lambda2,
            gap,
            alpha,
            ball_radius: ball.radius(),
            ball_gap: ball.gap(),
            c1,
            curvature_const,
            bound_rhs,
            verdict,
            relative_slack: (bound_rhs - gap) / gap,
            diameter,
            k_lower: pair.k_lower(),
            k_upper: pair.k_upper(),
        })
    }
}

/// `P_p(x) = exp_p⁻¹(x)/r_p · h(σ(r_p))` in the chart-axis frame at `p`
/// (conformal charts are orthogonal, so the frame is orthonormal).
pub fn test_field(g: &Geometry, p: Complex64, x: Complex64, sigma: &SigmaProfile, h: &TestProfile) -> [f64; 2] {
    let (r, th) = g.polar(p, x);
    if r == 0.0 {
        return [0.0; 2];
    }
    let v = h.h_at(sigma.eval(r));
    [v * th.cos(), v * th.sin()]
}

/// `u₁²`-weighted quadrature nodes of a domain.
#[derive(Clone, Debug)]
pub struct WeightedPoints {
    pub x: Vec<Complex64>,
    pub w: Vec<f64>,
}

impl WeightedPoints {
    pub fn from_fem(sys: &FemSystem, pairs: &EigenPairs) -> Self {
        let u = sys.at_quadrature(&pairs.u1);
        let x = sys.quadrature().iter().map(|q| q.x).collect();
        let w = sys.quadrature().iter().zip(&u).map(|(q, v)| q.weight * v * v).collect();
        Self { x, w }
    }

    /// `∫ u₁²`.
    pub fn mass(&self) -> f64 {
        self.w.iter().sum()
    }

    /// `∫ u₁² G(x)`.
    pub fn integrate<G: Fn(Complex64) -> f64 + Sync>(&self, g: G) -> f64 {
        par::sum_range(self.x.len(), |i| self.w[i] * g(self.x[i]))
    }
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct BalancePoint {
    /// Conformal-chart position.
    pub p: [f64; 2],
    /// `|X(p)| / ∫u₁²`.
    pub residual: f64,
    pub iterations: usize,
}

impl BalancePoint {
    pub fn point(&self) -> Complex64 {
        Complex64::new(self.p[0], self.p[1])
    }
}

/// `X(p) = ∫ P_p u₁²` with `σ` recomputed about `p`.
pub fn balance_vector(
    hull: &Hull,
    pts: &WeightedPoints,
    p: Complex64,
    target: &Spaceform,
    h: &TestProfile,
    sigma: &SigmaOptions,
) -> Result<[f64; 2]> {
    let s = sigma_profile_with(hull, p, target, sigma)?;
    let g = hull.geometry();
    Ok(par::sum_range_n::<2, _>(pts.x.len(), |i| {
        let v = test_field(&g, p, pts.x[i], &s, h);
        [pts.w[i] * v[0], pts.w[i] * v[1]]
    }))
}

/// Finds `p ∈ hull Ω` with `X(p) = 0` by the damped flow
/// `p ← exp_p(τ X(p)/∫u₁²)`, carried out in the geodesic-affine chart with a
/// projection onto the hull. `τ` grows on success and halves when the
/// residual increases. The first converged point is returned.
pub fn balance_point(
    hull: &Hull,
    pts: &WeightedPoints,
    target: &Spaceform,
    h: &TestProfile,
    tol: f64,
    sigma: &SigmaOptions,
) -> Result<BalancePoint> {
    const MAX_ITER: usize = 500;
    let g = hull.geometry();
    let mass = pts.mass();
    if !(mass > 0.0) {
        return Err(Error::invalid("u₁ vanishes on the domain"));
    }
    // Start from the u₁²-weighted centroid in the affine chart.
    let mut ya = Complex64::new(0.0, 0.0);
    for (x, w) in pts.x.iter().zip(&pts.w) {
        ya += g.to_affine(*x) * *w;
    }
    let mut p = g.from_affine(hull.project_affine(ya / mass));
    let eval = |p: Complex64| -> Result<([f64; 2], f64)> {
        let x = balance_vector(hull, pts, p, target, h, sigma)?;
        Ok((x, x[0].hypot(x[1]) / mass))
    };
    let (mut x, mut res) = eval(p)?;
    let mut tau = 0.25 * hull.diameter();
    let mut trace = vec![res];
    let mut it = 0;
    while res > tol {
        it += 1;
        if it > MAX_ITER || tau < 1e-14 * hull.diameter() {
            let tail: Vec<String> = trace.iter().rev().take(8).map(|r| format!("{r:.3e}")).collect();
            return Err(Error::NoConvergence(format!(
                "balance point not found after {it} iterations; last residuals {}",
                tail.join(", ")
            )));
        }
        let step = tau * res;
        let cand = g.exp(p, step, x[1].atan2(x[0]));
        let cand = g.from_affine(hull.project_affine(g.to_affine(cand)));
        let (xc, rc) = eval(cand)?;
        if rc < res {
            p = cand;
            x = xc;
            res = rc;
            tau *= 1.5;
            trace.push(res);
        } else {
            tau *= 0.5;
        }
    }
    Ok(BalancePoint { p: [p.re, p.im], residual: res, iterations: it })
}

/// One link `lhs ≤ rhs` of the symmetrized chain.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct Link {
    pub lhs: f64,
    pub rhs: f64,
    pub holds: bool,
}

impl Link {
    fn le(lhs: f64, rhs: f64, tol: f64) -> Self {
        Self { lhs, rhs, holds: lhs <= rhs + tol * lhs.abs().max(rhs.abs()) }
    }
}

/// `∫_B z²h² ≤ ∫(S u₁)²h² ≤ ∫u₁²h(σ)²` and
/// `∫u₁²F(σ) ≤ ∫(S u₁)²F ≤ ∫_B z²F`.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct SymmetrizedChain {
    pub h_ball_sym: Link,
    pub h_sym_domain: Link,
    pub f_domain_sym: Link,
    pub f_sym_ball: Link,
}

impl SymmetrizedChain {
    pub fn holds(&self) -> bool {
        self.h_ball_sym.holds && self.h_sym_domain.holds && self.f_domain_sym.holds && self.f_sym_ball.holds
    }

    fn build(
        h_domain: f64,
        f_domain: f64,
        u1: &WeightedSamples,
        ball: &BallSpectrum,
        profile: &TestProfile,
        tol: f64,
    ) -> Result<Self> {
        let sym = decreasing_sym(u1, ball.spaceform())?;
        let sym_h = sym.weighted_integral(2, |r| profile.h_at(r).powi(2));
        let sym_f = sym.weighted_integral(2, |r| profile.f_at(r));
        let ball_h = ball.z2_integral(|r| profile.h_at(r).powi(2));
        let ball_f = ball.z2_integral(|r| profile.f_at(r));
        Ok(Self {
            h_ball_sym: Link::le(ball_h, sym_h, tol),
            h_sym_domain: Link::le(sym_h, h_domain, tol),
            f_domain_sym: Link::le(f_domain, sym_f, tol),
            f_sym_ball: Link::le(sym_f, ball_f, tol),
        })
    }
}

/// The test-function inequality at the balance point.
#[derive(Clone, Debug, Serialize)]
pub struct MiddleInequality {
    /// `(λ₂ − λ₁) ∫u₁² h(σ)²`.
    pub lhs: f64,
    /// `C₁² ∫u₁² F(σ)`.
    pub rhs: f64,
    pub holds: bool,
    pub c1: f64,
    /// `∫u₁² h(σ)²`.
    pub h_integral: f64,
    /// `∫u₁² F(σ)`.
    pub f_integral: f64,
    pub chain: Option<SymmetrizedChain>,
    /// Why the chain was not evaluated.
    pub chain_blocked: Option<String>,
}

fn middle(
    gap: f64,
    c1: f64,
    h_integral: f64,
    f_integral: f64,
    u1: &WeightedSamples,
    ball: &BallSpectrum,
    profile: &TestProfile,
    tol: &Tolerances,
) -> Result<MiddleInequality> {
    let lhs = gap * h_integral;
    let rhs = c1 * c1 * f_integral;
    let certified = {
        let (drop, rise) = profile.violations();
        drop <= tol.certification && rise <= tol.certification
    };
    let (chain, chain_blocked) = if certified {
        (Some(SymmetrizedChain::build(h_integral, f_integral, u1, ball, profile, tol.chain)?), None)
    } else {
        let (drop, rise) = profile.violations();
        (None, Some(format!("h/F monotonicity not certified (violations {drop:.3e}, {rise:.3e})")))
    };
    Ok(MiddleInequality {
        lhs,
        rhs,
        holds: lhs <= rhs * (1.0 + tol.chain),
        c1,
        h_integral,
        f_integral,
        chain,
        chain_blocked,
    })
}

/// Min-max sanity: `∫|∇P_i|² u₁² ≥ (λ₂ − λ₁) ∫P_i² u₁²` per frame component,
/// plus the closed-form sum `Σ|∇P_i|² = g'² + g²/sn_k(r)²`, `g = h∘σ`.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct MinMaxCheck {
    pub energy: [f64; 2],
    pub gap_mass: [f64; 2],
    /// `∫(g'² + g²/sn_k²) u₁²`.
    pub closed_form_energy: f64,
    pub holds: bool,
}

fn min_max_check(
    g: &Geometry,
    p: Complex64,
    pts: &WeightedPoints,
    sigma: &SigmaProfile,
    h: &TestProfile,
    gap: f64,
    diameter: f64,
    tol: f64,
) -> MinMaxCheck {
    let delta = 1e-6 * diameter;
    let sf_k = g.curvature();
    let parts = par::map_range(pts.x.len(), |i| {
        let x = pts.x[i];
        let w = pts.w[i];
        let lam = g.conformal_factor(x);
        let mut grad = [[0.0; 2]; 2];
        for (j, e) in [Complex64::new(delta, 0.0), Complex64::new(0.0, delta)].into_iter().enumerate() {
            let a = test_field(g, p, x + e, sigma, h);
            let b = test_field(g, p, x - e, sigma, h);
            for c in 0..2 {
                grad[c][j] = (a[c] - b[c]) / (2.0 * delta);
            }
        }
        let v = test_field(g, p, x, sigma, h);
        let r = g.distance(p, x);
        let s = sigma.eval(r);
        let gv = h.h_at(s);
        let dg = h.dh_at(s) * sigma.derivative(r);
        let sn = spaceform::sn(sf_k, r);
        let closed = if r > 0.0 { dg * dg + gv * gv / (sn * sn) } else { 0.0 };
        let l2 = lam * lam;
        [
            w * (grad[0][0].powi(2) + grad[0][1].powi(2)) / l2,
            w * (grad[1][0].powi(2) + grad[1][1].powi(2)) / l2,
            w * v[0] * v[0],
            w * v[1] * v[1],
            w * closed,
        ]
    });
    let mut acc = [0.0; 5];
    for p in &parts {
        for (a, v) in acc.iter_mut().zip(p) {
            *a += v;
        }
    }
    let energy = [acc[0], acc[1]];
    let gap_mass = [gap * acc[2], gap * acc[3]];
    let holds = (0..2).all(|i| energy[i] >= gap_mass[i] * (1.0 - tol));
    MinMaxCheck { energy, gap_mass, closed_form_energy: acc[4], holds }
}

/// Evaluation options.
#[derive(Clone, Copy, Debug)]
pub struct BoundOptions {
    pub tolerances: Tolerances,
    pub c1_range: C1Range,
    pub sigma: SigmaOptions,
}

impl Default for BoundOptions {
    fn default() -> Self {
        Self { tolerances: Tolerances::default(), c1_range: C1Range::Domain, sigma: SigmaOptions::default() }
    }
}

/// Eigen-solver diagnostics kept with an evaluation.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct EigenSummary {
    pub lambda3: f64,
    pub degenerate: bool,
    pub residual: f64,
    pub orthogonality: f64,
    pub iterations: usize,
}

/// Everything computed on the way to a [`GapBoundReport`].
#[derive(Clone, Debug, Serialize)]
pub struct Evaluation {
    pub report: GapBoundReport,
    pub area: f64,
    pub hull_measure: f64,
    pub faber_krahn: FaberKrahn,
    pub chiti: ChitiReport,
    pub balance: BalancePoint,
    pub middle: MiddleInequality,
    pub min_max: Option<MinMaxCheck>,
    pub eigen: Option<EigenSummary>,
    /// `C₁` must not exceed the sphere-area ratio at the diameter.
    pub c1_ratio_bound: f64,
    /// Relative verdict margin applied.
    pub margin: f64,
}

fn check_alpha(alpha: f64) -> Result<()> {
    if !(alpha > 0.0 && alpha <= 1.0) {
        return Err(Error::domain(format!("α must lie in (0, 1], got {alpha}")));
    }
    Ok(())
}

/// Conditions A) and B) for positive upper curvature.
fn check_positive_curvature(k_upper: f64, diameter: f64, hull_measure: f64) -> Result<()> {
    if k_upper <= 0.0 {
        return Ok(());
    }
    let cap = PI / (2.0 * k_upper.sqrt());
    if diameter >= cap {
        return Err(Error::ineligible(format!("diameter {diameter} is not below π/(2√k) = {cap}")));
    }
    let half = 2.0 * PI / k_upper;
    if hull_measure >= half {
        return Err(Error::ineligible(format!("hull measure {hull_measure} is not below half the model sphere")));
    }
    Ok(())
}

/// The full pipeline on a mesh domain in the spaceform of curvature
/// `mesh.curvature()`, compared against `N²(k_upper)`.
pub fn evaluate_mesh(mesh: &MeshDomain, alpha: f64, pair: &CurvaturePair, opts: &BoundOptions) -> Result<Evaluation> {
    check_alpha(alpha)?;
    let tol = &opts.tolerances;
    let k = mesh.curvature();
    if k > pair.k_upper() + 1e-12 || k < pair.k_lower() - 1e-12 {
        return Err(Error::ineligible(format!(
            "curvature witness failed: ambient curvature {k} is outside [K, k] = [{}, {}]",
            pair.k_lower(),
            pair.k_upper()
        )));
    }
    let target = Spaceform::new(2, pair.k_upper())?;
    let hull = convex_hull(mesh)?;
    let hull_measure = hull.area();
    let diameter = mesh.diameter();
    check_positive_curvature(pair.k_upper(), diameter, hull_measure)?;

    let (sys, pairs) = fem::solve_mesh(mesh)?;
    if pairs.max_residual() > tol.eigen_residual {
        return Err(Error::NoConvergence(format!("eigen residual {:.3e} above tolerance", pairs.max_residual())));
    }
    let area = mesh.area();
    let faber_krahn = comparison::faber_krahn_check(pairs.lambda1, area, &target, alpha, tol.eigen_residual)?;
    let ball = comparison::comparison_ball_within(pairs.lambda1, alpha, &target, area)?;
    let profile = radial::h_and_f(&ball)?;
    let u1 = fem::u1_samples(&sys, &pairs, Some(hull_measure.max(area)))?;
    let sym = comparison::symmetrized_profile(&u1, &ball, 4001)?;
    let chiti = comparison::chiti_crossing(&sym, &ball)?;

    let pts = WeightedPoints::from_fem(&sys, &pairs);
    let balance = balance_point(&hull, &pts, &target, &profile, tol.balance, &opts.sigma)?;
    let p = balance.point();
    let sigma = sigma_profile_with(&hull, p, &target, &opts.sigma)?;
    let r_max = match opts.c1_range {
        C1Range::Domain => sys.mesh().max_distance_from(p),
        C1Range::Hull => sigma.r_max(),
    };
    let c1 = c1_constant(&sigma, &target, r_max)?;
    let g = hull.geometry();
    let h_integral = pts.integrate(|x| profile.h_at(sigma.eval(g.distance(p, x))).powi(2));
    let f_integral = pts.integrate(|x| profile.f_at(sigma.eval(g.distance(p, x))));
    let gap = pairs.gap();
    let middle = middle(gap, c1, h_integral, f_integral, &u1, &ball, &profile, tol)?;
    let min_max = min_max_check(&g, p, &pts, &sigma, &profile, gap, diameter, tol.chain);

    let report =
        GapBoundReport::assemble(pairs.lambda1, pairs.lambda2, alpha, &ball, c1, pair, diameter, tol.verdict_margin)?;
    Ok(Evaluation {
        report,
        area,
        hull_measure,
        faber_krahn,
        chiti,
        balance,
        middle,
        min_max: Some(min_max),
        eigen: Some(EigenSummary {
            lambda3: pairs.lambda3,
            degenerate: pairs.degenerate,
            residual: pairs.max_residual(),
            orthogonality: pairs.orthogonality,
            iterations: pairs.iterations,
        }),
        c1_ratio_bound: spaceform::sphere_area_ratio(2, pair, diameter)?,
        margin: tol.verdict_margin,
    })
}

/// The pipeline on the geodesic disk `B_R` about the pole of a warped surface.
/// The pole balances by rotational symmetry, `σ(r) = m_k⁻¹(|B_r|)` in closed
/// form and the diameter is `2R`.
pub fn evaluate_warped(
    surface: &WarpedSurface,
    radius: f64,
    alpha: f64,
    pair: &CurvaturePair,
    opts: &BoundOptions,
) -> Result<Evaluation> {
    check_alpha(alpha)?;
    let tol = &opts.tolerances;
    surface.check_witness(pair, radius)?;
    let warp = surface.warp();
    let area = warp.disk_area(radius);
    let diameter = 2.0 * radius;
    check_positive_curvature(pair.k_upper(), diameter, area)?;
    let target = Spaceform::new(2, pair.k_upper())?;
    let spectrum = warped_disk_spectrum(surface, radius)?;
    if spectrum.residual > tol.eigen_residual {
        return Err(Error::NoConvergence(format!("eigen residual {:.3e} above tolerance", spectrum.residual)));
    }
    let faber_krahn = comparison::faber_krahn_check(spectrum.lambda1, area, &target, alpha, tol.eigen_residual)?;
    let ball = comparison::comparison_ball_within(spectrum.lambda1, alpha, &target, area)?;
    let profile = radial::h_and_f(&ball)?;

    // Cell samples: the interior grid points are cell centers.
    let grid = spectrum.u1.grid();
    let vals = spectrum.u1.values();
    let n = grid.len();
    let mut values = Vec::with_capacity(n - 2);
    let mut weights = Vec::with_capacity(n - 2);
    let mut radii = Vec::with_capacity(n - 2);
    let cell = grid[2] - grid[1];
    for i in 1..n - 1 {
        let (a, b) = ((grid[i] - 0.5 * cell).max(0.0), (grid[i] + 0.5 * cell).min(radius));
        values.push(vals[i].max(0.0));
        weights.push(warp.disk_area(b) - warp.disk_area(a));
        radii.push(grid[i]);
    }
    let u1 = WeightedSamples::new(values.clone(), weights.clone(), area)?;
    let sym = comparison::symmetrized_profile(&u1, &ball, 4001)?;
    let chiti = comparison::chiti_crossing(&sym, &ball)?;

    let sigma_of = |r: f64| target.ball_radius_for_volume(warp.disk_area(r));
    let mut c1 = 1.0f64;
    let sample: Vec<f64> = (1..=4000).map(|i| radius * i as f64 / 4000.0).collect();
    for &r in &sample {
        let s = sigma_of(r)?;
        let ds = warp.phi(r) / target.sn(s);
        c1 = c1.max(ds).max(target.sn(s) / target.sn(r));
    }
    let sig: Vec<f64> = radii.iter().map(|r| sigma_of(*r)).collect::<Result<_>>()?;
    let mut h_integral = 0.0;
    let mut f_integral = 0.0;
    for i in 0..radii.len() {
        let w = weights[i] * values[i] * values[i];
        h_integral += w * profile.h_at(sig[i]).powi(2);
        f_integral += w * profile.f_at(sig[i]);
    }
    let gap = spectrum.lambda2 - spectrum.lambda1;
    let middle = middle(gap, c1, h_integral, f_integral, &u1, &ball, &profile, tol)?;
    let report = GapBoundReport::assemble(spectrum.lambda1, spectrum.lambda2, alpha, &ball, c1, pair, diameter, tol.verdict_margin)?;
    Ok(Evaluation {
        report,
        area,
        hull_measure: area,
        faber_krahn,
        chiti,
        balance: BalancePoint { p: [0.0, 0.0], residual: 0.0, iterations: 0 },
        middle,
        min_max: None,
        eigen: None,
        c1_ratio_bound: spaceform::sphere_area_ratio(2, pair, diameter)?,
        margin: tol.verdict_margin,
    })
}

/// The radial pipeline for a geodesic ball `B_R ⊂ N^n(k)` with `α = 1`:
/// the comparison ball is recomputed from `λ₁` alone, so the relative slack
/// measures the sharpness of the bound.
pub fn evaluate_ball(n: usize, k: f64, radius: f64, tol: &Tolerances) -> Result<GapBoundReport> {
    let sf = Spaceform::new(n, k)?;
    if !(radius > 0.0) {
        return Err(Error::domain(format!("radius must be positive, got {radius}")));
    }
    if k > 0.0 {
        let volume = sf.ball_volume(radius).map_err(|_| {
            Error::ineligible(format!("radius {radius} exceeds the hemisphere of curvature {k}"))
        })?;
        let cap = PI / (2.0 * k.sqrt());
        if 2.0 * radius >= cap || volume >= 0.5 * sf.total_volume() {
            return Err(Error::ineligible(format!(
                "ball of radius {radius} violates the hull conditions (diameter below {cap}, under half the sphere)"
            )));
        }
    }
    let own = radial::ball_spectrum(&sf, radius)?;
    if own.residual() > tol.eigen_residual {
        return Err(Error::NoConvergence(format!("radial residual {:.3e} above tolerance", own.residual())));
    }
    let ball = comparison::comparison_ball(own.lambda1(), 1.0, &sf)?;
    let pair = CurvaturePair::equal(k);
    GapBoundReport::assemble(own.lambda1(), own.lambda2(), 1.0, &ball, 1.0, &pair, 2.0 * radius, tol.verdict_margin)
}

/// The Hadamard-manifold form `λ₂/λ₁ − 1 ≤ α⁻² (sinh(√−K d)/(√−K d))^{2n−2}
/// (λ₂(B₁)/λ₁(B₁) − 1)`, valid for `k_upper = 0`.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct HadamardCheck {
    pub ratio: f64,
    pub bound: f64,
    pub holds: bool,
}

pub fn hadamard_ratio(report: &GapBoundReport, n: usize, margin: f64) -> Result<HadamardCheck> {
    if report.k_upper != 0.0 {
        return Err(Error::domain(format!(
            "the ratio form needs upper curvature 0, got {}",
            report.k_upper
        )));
    }
    let pair = CurvaturePair::new(0.0, report.k_lower)?;
    let factor = spaceform::curvature_constant(n, &pair, report.diameter)?;
    let unit = radial::ball_spectrum(&Spaceform::new(n, 0.0)?, 1.0)?;
    let ppw = unit.lambda2() / unit.lambda1();
    let ratio = report.lambda2 / report.lambda1 - 1.0;
    let bound = factor * (ppw - 1.0) / (report.alpha * report.alpha);
    Ok(HadamardCheck { ratio, bound, holds: ratio <= bound * (1.0 + margin) })
}

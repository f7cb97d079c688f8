//! Closed-form charts of the 2-D spaceforms.
//!
//! Conformal charts (flat, Poincaré disk, stereographic) are used for finite
//! elements: the metric is `λ(x)² |dx|²` with `λ = 2/(1 + k|x|²)` for `k ≠ 0`.
//! Geodesic-affine charts (Klein, gnomonic) map geodesics to straight lines
//! and are used for convex hulls. In every conformal chart the Möbius map
//! `T_p(x) = (x − p)/(1 + k p̄ x)` is an isometry sending `p` to the origin
//! with a positive real derivative there, so `arg T_p(x)` is the direction
//! of the geodesic `p → x` in the chart-aligned frame at `p`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Chart {
    Flat,
    Poincare,
    Stereographic,
    Klein,
    Gnomonic,
}

impl Chart {
    pub fn name(&self) -> &'static str {
        match self {
            Chart::Flat => "flat",
            Chart::Poincare => "poincare",
            Chart::Stereographic => "stereographic",
            Chart::Klein => "klein",
            Chart::Gnomonic => "gnomonic",
        }
    }

    pub fn is_conformal(&self) -> bool {
        matches!(self, Chart::Flat | Chart::Poincare | Chart::Stereographic)
    }

    /// The conformal chart for curvature `k`.
    pub fn conformal_for(k: f64) -> Chart {
        if k < 0.0 {
            Chart::Poincare
        } else if k > 0.0 {
            Chart::Stereographic
        } else {
            Chart::Flat
        }
    }

    /// The geodesic-affine chart for curvature `k`.
    pub fn affine_for(k: f64) -> Chart {
        if k < 0.0 {
            Chart::Klein
        } else if k > 0.0 {
            Chart::Gnomonic
        } else {
            Chart::Flat
        }
    }

    /// Checks that the chart can represent curvature `k`.
    pub fn check_curvature(&self, k: f64) -> Result<()> {
        let ok = match self {
            Chart::Flat => k == 0.0,
            Chart::Poincare | Chart::Klein => k < 0.0,
            Chart::Stereographic | Chart::Gnomonic => k > 0.0,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::invalid(format!("chart {} cannot carry curvature {k}", self.name())))
        }
    }
}

impl fmt::Display for Chart {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Chart {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "flat" => Ok(Chart::Flat),
            "poincare" | "poincare_disk" => Ok(Chart::Poincare),
            "stereographic" => Ok(Chart::Stereographic),
            "klein" => Ok(Chart::Klein),
            "gnomonic" => Ok(Chart::Gnomonic),
            other => Err(Error::invalid(format!("unknown chart '{other}'"))),
        }
    }
}

pub fn c(p: [f64; 2]) -> Complex64 {
    Complex64::new(p[0], p[1])
}

pub fn xy(z: Complex64) -> [f64; 2] {
    [z.re, z.im]
}

/// Geometry of the 2-D spaceform of curvature `k` in its conformal and
/// affine charts.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Geometry {
    k: f64,
    kappa: f64,
}

impl Geometry {
    pub fn new(k: f64) -> Self {
        Self { k, kappa: k.abs().sqrt() }
    }

    pub fn curvature(&self) -> f64 {
        self.k
    }

    /// True when the conformal point lies inside the chart domain (for
    /// `k > 0`: the open hemisphere about the chart center).
    pub fn in_conformal_domain(&self, x: Complex64) -> bool {
        x.re.is_finite() && x.im.is_finite() && (self.k == 0.0 || self.kappa * x.norm() < 1.0)
    }

    pub fn in_affine_domain(&self, y: Complex64) -> bool {
        y.re.is_finite() && y.im.is_finite() && (self.k >= 0.0 || self.kappa * y.norm() < 1.0)
    }

    /// Conformal factor `λ(x)`: `ds = λ |dx|`.
    pub fn conformal_factor(&self, x: Complex64) -> f64 {
        if self.k == 0.0 {
            1.0
        } else {
            2.0 / (1.0 + self.k * x.norm_sqr())
        }
    }

    /// Area density `λ(x)²` of the conformal chart.
    pub fn conformal_density(&self, x: Complex64) -> f64 {
        let l = self.conformal_factor(x);
        l * l
    }

    /// Area density of the affine chart, `(1 + k|y|²)^{-3/2}`.
    pub fn affine_density(&self, y: Complex64) -> f64 {
        if self.k == 0.0 {
            1.0
        } else {
            (1.0 + self.k * y.norm_sqr()).powf(-1.5)
        }
    }

    /// Isometry `T_p` of the conformal chart with `T_p(p) = 0`.
    pub fn mobius(&self, p: Complex64, x: Complex64) -> Complex64 {
        (x - p) / (1.0 + self.k * p.conj() * x)
    }

    /// Inverse of [`Geometry::mobius`].
    pub fn mobius_inv(&self, p: Complex64, y: Complex64) -> Complex64 {
        (y + p) / (1.0 - self.k * p.conj() * y)
    }

    /// Geodesic distance from the chart origin to the conformal point at
    /// chart radius `t`.
    pub fn radius_to_distance(&self, t: f64) -> f64 {
        if self.k == 0.0 {
            t
        } else if self.k < 0.0 {
            2.0 / self.kappa * (self.kappa * t).atanh()
        } else {
            2.0 / self.kappa * (self.kappa * t).atan()
        }
    }

    /// Chart radius of the geodesic circle of radius `d` about the origin.
    pub fn distance_to_radius(&self, d: f64) -> f64 {
        if self.k == 0.0 {
            d
        } else if self.k < 0.0 {
            (0.5 * self.kappa * d).tanh() / self.kappa
        } else {
            (0.5 * self.kappa * d).tan() / self.kappa
        }
    }

    /// Geodesic distance between conformal points.
    pub fn distance(&self, a: Complex64, b: Complex64) -> f64 {
        self.radius_to_distance(self.mobius(a, b).norm())
    }

    /// `(distance, direction angle)` of `x` as seen from `p`.
    pub fn polar(&self, p: Complex64, x: Complex64) -> (f64, f64) {
        let t = self.mobius(p, x);
        (self.radius_to_distance(t.norm()), t.arg())
    }

    /// `exp_p(d e^{iθ})` in the conformal chart.
    pub fn exp(&self, p: Complex64, d: f64, theta: f64) -> Complex64 {
        let y = Complex64::from_polar(self.distance_to_radius(d), theta);
        self.mobius_inv(p, y)
    }

    /// Conformal → affine (Poincaré → Klein, stereographic → gnomonic).
    pub fn to_affine(&self, x: Complex64) -> Complex64 {
        if self.k == 0.0 {
            x
        } else {
            x * (2.0 / (1.0 - self.k * x.norm_sqr()))
        }
    }

    /// Affine → conformal.
    pub fn from_affine(&self, y: Complex64) -> Complex64 {
        if self.k == 0.0 {
            y
        } else {
            y / (1.0 + (1.0 + self.k * y.norm_sqr()).sqrt())
        }
    }

    /// Converts a point in `chart` to conformal coordinates.
    pub fn chart_to_conformal(&self, chart: Chart, p: [f64; 2]) -> Complex64 {
        if chart.is_conformal() {
            c(p)
        } else {
            self.from_affine(c(p))
        }
    }
}

/// Geodesic distance between two points given in `chart` coordinates.
pub fn geodesic_distance(chart: Chart, k: f64, a: [f64; 2], b: [f64; 2]) -> Result<f64> {
    chart.check_curvature(k)?;
    let g = Geometry::new(k);
    let (pa, pb) = (g.chart_to_conformal(chart, a), g.chart_to_conformal(chart, b));
    let inside = |z: Complex64, raw: [f64; 2]| {
        if chart.is_conformal() {
            g.in_conformal_domain(z)
        } else {
            g.in_affine_domain(c(raw))
        }
    };
    if !inside(pa, a) || !inside(pb, b) {
        return Err(Error::domain(format!("point outside the {} chart domain", chart.name())));
    }
    Ok(g.distance(pa, pb))
}

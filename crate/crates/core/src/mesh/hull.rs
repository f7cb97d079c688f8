//! Geodesic convex hulls. Geodesics are straight lines in the affine chart
//! (Klein for `k < 0`, gnomonic for `k > 0`), so the geodesic hull of a
//! point set is its Euclidean hull there.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use super::chart::{xy, Chart, Geometry};
use super::MeshDomain;
use crate::error::{Error, Result};

/// A geodesically convex polygon, stored counter-clockwise in the affine chart.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Hull {
    k: f64,
    polygon: Vec<[f64; 2]>,
}

fn cross(o: Complex64, a: Complex64, b: Complex64) -> f64 {
    (a.re - o.re) * (b.im - o.im) - (a.im - o.im) * (b.re - o.re)
}

/// Andrew's monotone chain; drops collinear points.
fn monotone_chain(mut pts: Vec<Complex64>) -> Vec<Complex64> {
    pts.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    pts.dedup();
    if pts.len() < 3 {
        return pts;
    }
    let scale = pts.iter().fold(0.0f64, |m, p| m.max(p.norm())).max(1e-300);
    let eps = 1e-13 * scale * scale;
    let mut lower: Vec<Complex64> = Vec::new();
    for &p in &pts {
        while lower.len() >= 2 && cross(lower[lower.len() - 2], lower[lower.len() - 1], p) <= eps {
            lower.pop();
        }
        lower.push(p);
    }
    let mut upper: Vec<Complex64> = Vec::new();
    for &p in pts.iter().rev() {
        while upper.len() >= 2 && cross(upper[upper.len() - 2], upper[upper.len() - 1], p) <= eps {
            upper.pop();
        }
        upper.push(p);
    }
    lower.pop();
    upper.pop();
    lower.extend(upper);
    lower
}

impl Hull {
    /// Hull of points given in the affine chart.
    pub fn from_affine_points(k: f64, pts: &[Complex64]) -> Result<Self> {
        let poly = monotone_chain(pts.to_vec());
        if poly.len() < 3 {
            return Err(Error::invalid("convex hull is degenerate"));
        }
        Ok(Self { k, polygon: poly.into_iter().map(xy).collect() })
    }

    pub fn curvature(&self) -> f64 {
        self.k
    }

    pub fn geometry(&self) -> Geometry {
        Geometry::new(self.k)
    }

    /// Hull vertices in the affine chart, counter-clockwise.
    pub fn polygon(&self) -> &[[f64; 2]] {
        &self.polygon
    }

    pub fn affine_vertices(&self) -> Vec<Complex64> {
        self.polygon.iter().map(|p| super::chart::c(*p)).collect()
    }

    pub fn conformal_vertices(&self) -> Vec<Complex64> {
        let g = self.geometry();
        self.affine_vertices().into_iter().map(|y| g.from_affine(y)).collect()
    }

    /// Membership of an affine-chart point, with a relative tolerance.
    pub fn contains_affine(&self, y: Complex64, tol: f64) -> bool {
        let v = self.affine_vertices();
        let n = v.len();
        (0..n).all(|i| {
            let (a, b) = (v[i], v[(i + 1) % n]);
            cross(a, b, y) >= -tol * (b - a).norm()
        })
    }

    pub fn contains_conformal(&self, x: Complex64, tol: f64) -> bool {
        self.contains_affine(self.geometry().to_affine(x), tol)
    }

    /// Nearest hull point (Euclidean in the affine chart).
    pub fn project_affine(&self, y: Complex64) -> Complex64 {
        if self.contains_affine(y, 0.0) {
            return y;
        }
        let v = self.affine_vertices();
        let n = v.len();
        let mut best = v[0];
        let mut best_d = f64::INFINITY;
        for i in 0..n {
            let (a, b) = (v[i], v[(i + 1) % n]);
            let ab = b - a;
            let t = (((y - a) * ab.conj()).re / ab.norm_sqr()).clamp(0.0, 1.0);
            let q = a + ab * t;
            let d = (y - q).norm();
            if d < best_d {
                best_d = d;
                best = q;
            }
        }
        best
    }

    /// Vertex average in the affine chart (an interior point).
    pub fn affine_centroid(&self) -> Complex64 {
        let v = self.affine_vertices();
        v.iter().sum::<Complex64>() / v.len() as f64
    }

    /// Metric area: shoelace for `k = 0`, Gauss–Bonnet otherwise.
    pub fn area(&self) -> f64 {
        let n = self.polygon.len();
        if self.k == 0.0 {
            let v = self.affine_vertices();
            return 0.5 * (0..n).map(|i| cross(Complex64::new(0.0, 0.0), v[i], v[(i + 1) % n])).sum::<f64>();
        }
        let g = self.geometry();
        let w = self.conformal_vertices();
        let angle_sum: f64 = (0..n)
            .map(|i| {
                let prev = g.polar(w[i], w[(i + n - 1) % n]).1;
                let next = g.polar(w[i], w[(i + 1) % n]).1;
                (prev - next).rem_euclid(2.0 * PI)
            })
            .sum();
        (angle_sum - (n as f64 - 2.0) * PI) / self.k
    }

    /// Geodesic diameter (attained at vertices of a convex polygon).
    pub fn diameter(&self) -> f64 {
        let g = self.geometry();
        let w = self.conformal_vertices();
        let mut d = 0.0f64;
        for i in 0..w.len() {
            for j in i + 1..w.len() {
                d = d.max(g.distance(w[i], w[j]));
            }
        }
        d
    }

    /// Fan triangulation in the affine chart.
    pub fn to_mesh(&self) -> Result<MeshDomain> {
        let n = self.polygon.len();
        let mut verts = vec![xy(self.affine_centroid())];
        verts.extend_from_slice(&self.polygon);
        let tris = (0..n).map(|i| [0, 1 + i, 1 + (i + 1) % n]).collect();
        MeshDomain::new(Chart::affine_for(self.k), self.k, verts, tris, (1..=n).collect())
    }
}

/// Geodesic convex hull of a mesh. For `k > 0` the hull must have diameter
/// below `π/(2√k)` and area below half the sphere; violations are reported as
/// ineligible.
pub fn convex_hull(mesh: &MeshDomain) -> Result<Hull> {
    let aff = mesh.affine_vertices();
    let pts: Vec<Complex64> = mesh.boundary().iter().map(|&i| aff[i]).collect();
    let hull = Hull::from_affine_points(mesh.curvature(), &pts)?;
    let k = mesh.curvature();
    if k > 0.0 {
        let cap = PI / (2.0 * k.sqrt());
        let d = hull.diameter();
        if d >= cap {
            return Err(Error::ineligible(format!(
                "hull diameter {d} is not below π/(2√k) = {cap}"
            )));
        }
        let half = 2.0 * PI / k;
        if hull.area() >= half {
            return Err(Error::ineligible("hull covers half the sphere or more"));
        }
    }
    Ok(hull)
}

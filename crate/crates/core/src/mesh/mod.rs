//! Triangulated 2-D domains in spaceform charts.
//!
//! The text format is line oriented:
//!
//! ```text
//! SGLMESH 1 <chart> <k>
//! <nv> <nt>
//! x y            (nv lines)
//! i j k          (nt lines, 0-based)
//! B <count>
//! i0 i1 ...      (boundary vertex indices, any line layout)
//! ```

pub mod chart;
pub mod generate;
pub mod hull;
pub mod sigma;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::collections::HashMap;
use std::io::Write;
use std::path::Path;

use crate::error::{Error, Result};
pub use chart::{geodesic_distance, Chart, Geometry};
pub use hull::{convex_hull, Hull};
pub use sigma::{c1_constant, sigma_profile, C1Range, SigmaProfile};

const MIN_TRIANGLE_AREA: f64 = 1e-14;

/// Barycentric coordinates of the interior 3-point triangle rule (weights 1/3).
pub const QUAD_BARY: [[f64; 3]; 3] = [
    [2.0 / 3.0, 1.0 / 6.0, 1.0 / 6.0],
    [1.0 / 6.0, 2.0 / 3.0, 1.0 / 6.0],
    [1.0 / 6.0, 1.0 / 6.0, 2.0 / 3.0],
];

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MeshDomain {
    chart: Chart,
    k: f64,
    vertices: Vec<[f64; 2]>,
    triangles: Vec<[usize; 3]>,
    boundary: Vec<usize>,
}

/// A quadrature node of the metric area measure.
#[derive(Clone, Copy, Debug)]
pub struct QuadPoint {
    /// Position in the conformal chart.
    pub x: Complex64,
    /// Metric area weight.
    pub weight: f64,
    pub triangle: usize,
    pub bary: [f64; 3],
}

enum Flaw {
    Vertex(usize, String),
    Triangle(usize, String),
    Boundary(String),
}

fn signed_area(a: [f64; 2], b: [f64; 2], c: [f64; 2]) -> f64 {
    0.5 * ((b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0]))
}

impl MeshDomain {
    /// Validates and builds a mesh. Clockwise triangles are reoriented.
    pub fn new(
        chart: Chart,
        k: f64,
        vertices: Vec<[f64; 2]>,
        triangles: Vec<[usize; 3]>,
        boundary: Vec<usize>,
    ) -> Result<Self> {
        chart.check_curvature(k)?;
        let mut mesh = Self { chart, k, vertices, triangles, boundary };
        mesh.validate().map_err(|f| match f {
            Flaw::Vertex(i, m) => Error::invalid(format!("vertex {i}: {m}")),
            Flaw::Triangle(i, m) => Error::invalid(format!("triangle {i}: {m}")),
            Flaw::Boundary(m) => Error::invalid(format!("boundary: {m}")),
        })?;
        Ok(mesh)
    }

    fn validate(&mut self) -> std::result::Result<(), Flaw> {
        let g = self.geometry();
        for (i, v) in self.vertices.iter().enumerate() {
            let z = chart::c(*v);
            let inside = if self.chart.is_conformal() { g.in_conformal_domain(z) } else { g.in_affine_domain(z) };
            if !inside {
                return Err(Flaw::Vertex(i, format!("({}, {}) lies outside the {} chart domain", v[0], v[1], self.chart)));
            }
        }
        let nv = self.vertices.len();
        for (t, tri) in self.triangles.iter_mut().enumerate() {
            if tri.iter().any(|&i| i >= nv) {
                return Err(Flaw::Triangle(t, format!("vertex index out of range (nv = {nv})")));
            }
            if tri[0] == tri[1] || tri[1] == tri[2] || tri[0] == tri[2] {
                return Err(Flaw::Triangle(t, "repeated vertex".into()));
            }
            let a = signed_area(self.vertices[tri[0]], self.vertices[tri[1]], self.vertices[tri[2]]);
            if a.abs() <= MIN_TRIANGLE_AREA {
                return Err(Flaw::Triangle(t, format!("degenerate (chart area {a:e})")));
            }
            if a < 0.0 {
                tri.swap(1, 2);
            }
        }
        let mut edges: HashMap<(usize, usize), usize> = HashMap::new();
        for tri in &self.triangles {
            for e in 0..3 {
                let (a, b) = (tri[e], tri[(e + 1) % 3]);
                *edges.entry((a.min(b), a.max(b))).or_default() += 1;
            }
        }
        if let Some(((a, b), n)) = edges.iter().find(|(_, n)| **n > 2) {
            return Err(Flaw::Boundary(format!("edge ({a}, {b}) shared by {n} triangles")));
        }
        let mut on_free = vec![false; nv];
        for ((a, b), n) in &edges {
            if *n == 1 {
                on_free[*a] = true;
                on_free[*b] = true;
            }
        }
        let mut listed = vec![false; nv];
        for &i in &self.boundary {
            if i >= nv {
                return Err(Flaw::Boundary(format!("index {i} out of range")));
            }
            if listed[i] {
                return Err(Flaw::Boundary(format!("index {i} listed twice")));
            }
            listed[i] = true;
        }
        if let Some(i) = (0..nv).find(|&i| listed[i] != on_free[i]) {
            let msg = if on_free[i] {
                format!("vertex {i} lies on a free edge but is not listed")
            } else {
                format!("vertex {i} is listed but lies on no free edge")
            };
            return Err(Flaw::Boundary(msg));
        }
        if self.triangles.is_empty() {
            return Err(Flaw::Boundary("mesh has no triangles".into()));
        }
        Ok(())
    }

    /// Parses the text format; errors carry 1-based line numbers.
    pub fn parse(text: &str) -> Result<Self> {
        let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l.trim())).filter(|(_, l)| !l.is_empty());
        let perr = |line: usize, msg: String| Error::Parse { line, msg };
        let (ln, header) = lines.next().ok_or_else(|| perr(1, "empty file; expected SGLMESH header".into()))?;
        let h: Vec<&str> = header.split_whitespace().collect();
        if h.len() != 4 || h[0] != "SGLMESH" {
            return Err(perr(ln, format!("expected 'SGLMESH 1 <chart> <k>', found '{header}'")));
        }
        if h[1] != "1" {
            return Err(perr(ln, format!("unsupported SGLMESH version '{}'", h[1])));
        }
        let chart: Chart = h[2].parse().map_err(|e: Error| perr(ln, e.to_string()))?;
        let k: f64 = h[3].parse().map_err(|_| perr(ln, format!("invalid curvature '{}'", h[3])))?;
        chart.check_curvature(k).map_err(|e| perr(ln, e.to_string()))?;

        let (ln, counts) = lines.next().ok_or_else(|| perr(ln + 1, "missing '<nv> <nt>' line".into()))?;
        let cnt: Vec<usize> = counts
            .split_whitespace()
            .map(|s| s.parse::<usize>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|_| perr(ln, format!("expected two counts, found '{counts}'")))?;
        if cnt.len() != 2 {
            return Err(perr(ln, format!("expected two counts, found '{counts}'")));
        }
        let (nv, nt) = (cnt[0], cnt[1]);
        let mut last = ln;
        let mut vertices = Vec::with_capacity(nv);
        let mut vertex_lines = Vec::with_capacity(nv);
        for i in 0..nv {
            let (ln, l) = lines.next().ok_or_else(|| perr(last + 1, format!("missing vertex {i} of {nv}")))?;
            let f: Vec<f64> = l
                .split_whitespace()
                .map(|s| s.parse::<f64>())
                .collect::<std::result::Result<_, _>>()
                .map_err(|_| perr(ln, format!("invalid vertex '{l}'")))?;
            if f.len() != 2 || f.iter().any(|v| !v.is_finite()) {
                return Err(perr(ln, format!("expected 'x y', found '{l}'")));
            }
            vertices.push([f[0], f[1]]);
            vertex_lines.push(ln);
            last = ln;
        }
        let mut triangles = Vec::with_capacity(nt);
        let mut tri_lines = Vec::with_capacity(nt);
        for t in 0..nt {
            let (ln, l) = lines.next().ok_or_else(|| perr(last + 1, format!("missing triangle {t} of {nt}")))?;
            let f: Vec<usize> = l
                .split_whitespace()
                .map(|s| s.parse::<usize>())
                .collect::<std::result::Result<_, _>>()
                .map_err(|_| perr(ln, format!("invalid triangle '{l}'")))?;
            if f.len() != 3 {
                return Err(perr(ln, format!("expected 'i j k', found '{l}'")));
            }
            triangles.push([f[0], f[1], f[2]]);
            tri_lines.push(ln);
            last = ln;
        }
        let (bln, bl) = lines.next().ok_or_else(|| perr(last + 1, "missing 'B <count>' line".into()))?;
        let mut toks = bl.split_whitespace();
        if toks.next() != Some("B") {
            return Err(perr(bln, format!("expected 'B <count>', found '{bl}'")));
        }
        let nb: usize = toks
            .next()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| perr(bln, format!("expected 'B <count>', found '{bl}'")))?;
        let mut boundary = Vec::with_capacity(nb);
        let mut tail: Vec<(usize, String)> = toks.map(|s| (bln, s.to_string())).collect();
        for (ln, l) in lines {
            tail.extend(l.split_whitespace().map(|s| (ln, s.to_string())));
        }
        for (ln, tok) in &tail {
            let i: usize = tok.parse().map_err(|_| perr(*ln, format!("invalid boundary index '{tok}'")))?;
            boundary.push(i);
        }
        if boundary.len() != nb {
            let ln = tail.last().map_or(bln, |t| t.0);
            return Err(perr(ln, format!("expected {nb} boundary indices, found {}", boundary.len())));
        }
        let mut mesh = Self { chart, k, vertices, triangles, boundary };
        mesh.validate().map_err(|f| match f {
            Flaw::Vertex(i, m) => perr(vertex_lines[i], m),
            Flaw::Triangle(i, m) => perr(tri_lines[i], m),
            Flaw::Boundary(m) => perr(bln, m),
        })?;
        Ok(mesh)
    }

    pub fn read(path: impl AsRef<Path>) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    pub fn write<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "SGLMESH 1 {} {}", self.chart, self.k)?;
        writeln!(w, "{} {}", self.vertices.len(), self.triangles.len())?;
        for v in &self.vertices {
            writeln!(w, "{:?} {:?}", v[0], v[1])?;
        }
        for t in &self.triangles {
            writeln!(w, "{} {} {}", t[0], t[1], t[2])?;
        }
        writeln!(w, "B {}", self.boundary.len())?;
        for chunk in self.boundary.chunks(16) {
            let row: Vec<String> = chunk.iter().map(|i| i.to_string()).collect();
            writeln!(w, "{}", row.join(" "))?;
        }
        Ok(())
    }

    pub fn to_text(&self) -> String {
        let mut buf = Vec::new();
        self.write(&mut buf).expect("writing to memory");
        String::from_utf8(buf).expect("mesh text is ASCII")
    }

    pub fn chart(&self) -> Chart {
        self.chart
    }

    pub fn curvature(&self) -> f64 {
        self.k
    }

    pub fn geometry(&self) -> Geometry {
        Geometry::new(self.k)
    }

    pub fn vertices(&self) -> &[[f64; 2]] {
        &self.vertices
    }

    pub fn triangles(&self) -> &[[usize; 3]] {
        &self.triangles
    }

    pub fn boundary(&self) -> &[usize] {
        &self.boundary
    }

    pub fn is_boundary(&self) -> Vec<bool> {
        let mut b = vec![false; self.vertices.len()];
        self.boundary.iter().for_each(|&i| b[i] = true);
        b
    }

    /// Vertex positions in the conformal chart.
    pub fn conformal_vertices(&self) -> Vec<Complex64> {
        let g = self.geometry();
        self.vertices.iter().map(|v| g.chart_to_conformal(self.chart, *v)).collect()
    }

    /// Vertex positions in the geodesic-affine chart.
    pub fn affine_vertices(&self) -> Vec<Complex64> {
        let g = self.geometry();
        self.vertices
            .iter()
            .map(|v| if self.chart.is_conformal() { g.to_affine(chart::c(*v)) } else { chart::c(*v) })
            .collect()
    }

    /// The same connectivity with vertices mapped into the conformal chart.
    pub fn to_conformal(&self) -> Result<Self> {
        if self.chart.is_conformal() {
            return Ok(self.clone());
        }
        let verts = self.conformal_vertices().into_iter().map(chart::xy).collect();
        Self::new(Chart::conformal_for(self.k), self.k, verts, self.triangles.clone(), self.boundary.clone())
    }

    /// Chart-coordinate area of triangle `t`.
    pub fn chart_area(&self, t: usize) -> f64 {
        let [a, b, c] = self.triangles[t];
        signed_area(self.vertices[a], self.vertices[b], self.vertices[c])
    }

    /// 3-point quadrature of the metric area, positions in the conformal chart.
    pub fn quadrature(&self) -> Vec<QuadPoint> {
        let g = self.geometry();
        let conformal = self.chart.is_conformal();
        let mut out = Vec::with_capacity(3 * self.triangles.len());
        for (t, tri) in self.triangles.iter().enumerate() {
            let area = self.chart_area(t);
            for bary in QUAD_BARY {
                let mut p = [0.0; 2];
                for (j, &v) in tri.iter().enumerate() {
                    p[0] += bary[j] * self.vertices[v][0];
                    p[1] += bary[j] * self.vertices[v][1];
                }
                let z = chart::c(p);
                let (x, dens) = if conformal {
                    (z, g.conformal_density(z))
                } else {
                    (g.from_affine(z), g.affine_density(z))
                };
                out.push(QuadPoint { x, weight: area / 3.0 * dens, triangle: t, bary });
            }
        }
        out
    }

    /// Metric area `|Ω|`.
    pub fn area(&self) -> f64 {
        self.quadrature().iter().map(|q| q.weight).sum()
    }

    /// Largest geodesic distance between boundary vertices. The distance
    /// function has no interior maxima in these geometries, so the boundary
    /// suffices for any domain.
    pub fn diameter(&self) -> f64 {
        let pts: Vec<Complex64> = {
            let all = self.conformal_vertices();
            self.boundary.iter().map(|&i| all[i]).collect()
        };
        let g = self.geometry();
        let n = pts.len();
        crate::par::map_range(n, |i| (i + 1..n).fold(0.0f64, |m, j| m.max(g.distance(pts[i], pts[j]))))
            .into_iter()
            .fold(0.0, f64::max)
    }

    /// Largest geodesic distance from `p` (conformal) to a vertex.
    pub fn max_distance_from(&self, p: Complex64) -> f64 {
        let g = self.geometry();
        self.conformal_vertices().iter().fold(0.0f64, |m, v| m.max(g.distance(p, *v)))
    }

    /// Uniformly scaled copy (flat chart only).
    pub fn scaled(&self, s: f64) -> Result<Self> {
        if self.chart != Chart::Flat {
            return Err(Error::invalid("only flat meshes can be rescaled"));
        }
        let verts = self.vertices.iter().map(|v| [v[0] * s, v[1] * s]).collect();
        Self::new(self.chart, self.k, verts, self.triangles.clone(), self.boundary.clone())
    }
}

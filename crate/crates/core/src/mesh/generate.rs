//! Built-in mesh generators. Every generator produces meshes that are exactly
//! invariant under the symmetry group of the shape, so symmetric data stays
//! symmetric to roundoff.

use std::collections::HashMap;
use std::f64::consts::PI;

use super::chart::{c, xy, Chart, Geometry};
use super::MeshDomain;
use crate::error::{Error, Result};

/// Orders the free edges of a triangulation into a boundary loop.
fn boundary_loop(nv: usize, tris: &[[usize; 3]]) -> Vec<usize> {
    let mut count: HashMap<(usize, usize), usize> = HashMap::new();
    for t in tris {
        for e in 0..3 {
            let (a, b) = (t[e], t[(e + 1) % 3]);
            *count.entry((a.min(b), a.max(b))).or_default() += 1;
        }
    }
    // Directed free edges of CCW triangles run CCW along the outer boundary.
    let mut next = vec![usize::MAX; nv];
    let mut start = usize::MAX;
    for t in tris {
        for e in 0..3 {
            let (a, b) = (t[e], t[(e + 1) % 3]);
            if count[&(a.min(b), a.max(b))] == 1 {
                next[a] = b;
                start = start.min(a);
            }
        }
    }
    let mut out = Vec::new();
    if start == usize::MAX {
        return out;
    }
    let mut v = start;
    loop {
        out.push(v);
        v = next[v];
        if v == start || v == usize::MAX || out.len() > nv {
            break;
        }
    }
    out
}

fn ccw(verts: &[[f64; 2]], t: [usize; 3]) -> [usize; 3] {
    let [a, b, cc] = t;
    let (p, q, r) = (verts[a], verts[b], verts[cc]);
    let area = (q[0] - p[0]) * (r[1] - p[1]) - (q[1] - p[1]) * (r[0] - p[0]);
    if area < 0.0 {
        [a, cc, b]
    } else {
        t
    }
}

fn finish(chart: Chart, k: f64, verts: Vec<[f64; 2]>, tris: Vec<[usize; 3]>) -> Result<MeshDomain> {
    let tris: Vec<[usize; 3]> = tris.into_iter().map(|t| ccw(&verts, t)).collect();
    let boundary = boundary_loop(verts.len(), &tris);
    MeshDomain::new(chart, k, verts, tris, boundary)
}

/// Splits every triangle into four through edge midpoints.
fn refine(verts: &mut Vec<[f64; 2]>, tris: &[[usize; 3]]) -> Vec<[usize; 3]> {
    let mut mid: HashMap<(usize, usize), usize> = HashMap::new();
    let mut midpoint = |a: usize, b: usize, verts: &mut Vec<[f64; 2]>| {
        *mid.entry((a.min(b), a.max(b))).or_insert_with(|| {
            let (p, q) = (verts[a], verts[b]);
            verts.push([0.5 * (p[0] + q[0]), 0.5 * (p[1] + q[1])]);
            verts.len() - 1
        })
    };
    let mut out = Vec::with_capacity(4 * tris.len());
    for &[a, b, cc] in tris {
        let ab = midpoint(a, b, verts);
        let bc = midpoint(b, cc, verts);
        let ca = midpoint(cc, a, verts);
        out.extend_from_slice(&[[a, ab, ca], [ab, b, bc], [ca, bc, cc], [ab, bc, ca]]);
    }
    out
}

/// Fan of `m` triangles around the origin with rim vertices `rim`, refined
/// `level` times.
fn refined_fan(rim: &[[f64; 2]], level: usize) -> (Vec<[f64; 2]>, Vec<[usize; 3]>) {
    let m = rim.len();
    let mut verts = vec![[0.0, 0.0]];
    verts.extend_from_slice(rim);
    let mut tris: Vec<[usize; 3]> = (0..m).map(|i| [0, 1 + i, 1 + (i + 1) % m]).collect();
    for _ in 0..level {
        tris = refine(&mut verts, &tris);
    }
    (verts, tris)
}

/// Axis-aligned `width × height` rectangle centered at the origin, union-jack
/// triangulated with an even number of cells per side; `cells` across the
/// shorter side.
pub fn rectangle(width: f64, height: f64, cells: usize) -> Result<MeshDomain> {
    if !(width > 0.0 && height > 0.0) || cells < 2 {
        return Err(Error::domain("rectangle needs positive sides and at least 2 cells"));
    }
    let size = width.min(height) / cells as f64;
    let even = |x: f64| (((x / size) / 2.0).round() as usize).max(1) * 2;
    let (nx, ny) = (even(width), even(height));
    let (hx, hy) = (width / nx as f64, height / ny as f64);
    let mut verts = Vec::with_capacity((nx + 1) * (ny + 1));
    for j in 0..=ny {
        for i in 0..=nx {
            verts.push([-0.5 * width + i as f64 * hx, -0.5 * height + j as f64 * hy]);
        }
    }
    let id = |i: usize, j: usize| j * (nx + 1) + i;
    let mut tris = Vec::with_capacity(2 * nx * ny);
    for j in 0..ny {
        for i in 0..nx {
            let (v00, v10, v11, v01) = (id(i, j), id(i + 1, j), id(i + 1, j + 1), id(i, j + 1));
            if (i + j) % 2 == 0 {
                tris.push([v00, v10, v11]);
                tris.push([v00, v11, v01]);
            } else {
                tris.push([v00, v10, v01]);
                tris.push([v10, v11, v01]);
            }
        }
    }
    finish(Chart::Flat, 0.0, verts, tris)
}

/// Unit square `[-1/2, 1/2]²` with `cells × cells` union-jack cells.
pub fn unit_square(cells: usize) -> Result<MeshDomain> {
    rectangle(1.0, 1.0, cells)
}

/// Unit disk mesh: a refined regular octagon pushed radially onto the circle.
fn unit_disk_points(level: usize) -> (Vec<[f64; 2]>, Vec<[usize; 3]>) {
    let rim: Vec<[f64; 2]> = (0..8).map(|i| xy(num_complex::Complex64::from_polar(1.0, PI / 4.0 * i as f64))).collect();
    let (verts, tris) = refined_fan(&rim, level);
    let apothem = (PI / 8.0).cos();
    let verts = verts
        .into_iter()
        .map(|p| {
            let z = c(p);
            let rho = z.norm();
            if rho == 0.0 {
                return p;
            }
            let phi = z.arg().rem_euclid(2.0 * PI);
            let sector_mid = (phi / (PI / 4.0)).floor() * (PI / 4.0) + PI / 8.0;
            let edge = apothem / (phi - sector_mid).cos();
            xy(z * (1.0 / edge))
        })
        .collect();
    (verts, tris)
}

/// Geodesic disk of radius `radius` about the chart center in curvature `k`,
/// in the conformal chart. `level` refinements of an octagon fan give
/// `8·4^level` triangles.
pub fn geodesic_disk(k: f64, radius: f64, level: usize) -> Result<MeshDomain> {
    if !(radius > 0.0) {
        return Err(Error::domain("disk radius must be positive"));
    }
    if k > 0.0 && radius >= PI / (2.0 * k.sqrt()) {
        return Err(Error::ineligible("spherical cap must lie inside an open hemisphere"));
    }
    let t = Geometry::new(k).distance_to_radius(radius);
    let (verts, tris) = unit_disk_points(level);
    let verts = verts.into_iter().map(|p| [p[0] * t, p[1] * t]).collect();
    finish(Chart::conformal_for(k), k, verts, tris)
}

/// Flat ellipse with semi-axes `a` (x) and `b` (y).
pub fn ellipse(a: f64, b: f64, level: usize) -> Result<MeshDomain> {
    if !(a > 0.0 && b > 0.0) {
        return Err(Error::domain("ellipse semi-axes must be positive"));
    }
    let (verts, tris) = unit_disk_points(level);
    let verts = verts.into_iter().map(|p| [p[0] * a, p[1] * b]).collect();
    finish(Chart::Flat, 0.0, verts, tris)
}

/// Star-shaped geodesic polygon with vertices at geodesic distances `radii`
/// from the center along equally spaced directions. Triangles are built and
/// refined in the affine chart (so the boundary edges are geodesics) and the
/// result is returned in the conformal chart.
pub fn star_polygon(k: f64, radii: &[f64], level: usize) -> Result<MeshDomain> {
    let m = radii.len();
    if m < 3 || radii.iter().any(|r| !(*r > 0.0)) {
        return Err(Error::domain("polygon needs at least 3 positive radii"));
    }
    if k > 0.0 && radii.iter().any(|r| *r >= PI / (2.0 * k.sqrt())) {
        return Err(Error::ineligible("spherical polygon must lie inside an open hemisphere"));
    }
    let g = Geometry::new(k);
    let rim: Vec<[f64; 2]> = radii
        .iter()
        .enumerate()
        .map(|(i, &r)| {
            let p = g.exp(c([0.0, 0.0]), r, 2.0 * PI * i as f64 / m as f64);
            xy(g.to_affine(p))
        })
        .collect();
    let (verts, tris) = refined_fan(&rim, level);
    let verts = verts.into_iter().map(|p| xy(g.from_affine(c(p)))).collect();
    finish(Chart::conformal_for(k), k, verts, tris)
}

/// Regular geodesic polygon with `sides` vertices at geodesic distance
/// `circumradius` from the center.
pub fn regular_polygon(k: f64, sides: usize, circumradius: f64, level: usize) -> Result<MeshDomain> {
    star_polygon(k, &vec![circumradius; sides], level)
}

/// Flat L-shape: the unit square minus its upper-right quarter, centered so
/// the missing corner is `[0, 1/2]²`.
pub fn l_shape(cells: usize) -> Result<MeshDomain> {
    let sq = unit_square(2 * cells.max(1))?;
    let keep = |p: [f64; 2]| !(p[0] > 1e-12 && p[1] > 1e-12);
    let verts = sq.vertices();
    let tris: Vec<[usize; 3]> = sq
        .triangles()
        .iter()
        .copied()
        .filter(|t| {
            let cx = (verts[t[0]][0] + verts[t[1]][0] + verts[t[2]][0]) / 3.0;
            let cy = (verts[t[0]][1] + verts[t[1]][1] + verts[t[2]][1]) / 3.0;
            keep([cx, cy])
        })
        .collect();
    let mut used = vec![usize::MAX; verts.len()];
    let mut new_verts = Vec::new();
    let tris = tris
        .into_iter()
        .map(|t| {
            t.map(|i| {
                if used[i] == usize::MAX {
                    used[i] = new_verts.len();
                    new_verts.push(verts[i]);
                }
                used[i]
            })
        })
        .collect();
    finish(Chart::Flat, 0.0, new_verts, tris)
}

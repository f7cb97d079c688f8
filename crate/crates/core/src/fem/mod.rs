//! Piecewise-linear finite elements for the first two Dirichlet eigenpairs of
//! a mesh domain.
//!
//! Meshes are solved in the conformal chart. The Dirichlet energy is
//! conformally invariant in two dimensions, so the stiffness matrix is the flat
//! one; the mass matrix carries the metric density `λ(x)²`, integrated with the
//! 3-point interior rule. The generalized problem `K u = λ M u` is solved by
//! subspace iteration on `K⁻¹M` with a skyline Cholesky factor of `K`.

pub mod sparse;

use nalgebra::{DMatrix, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::mesh::{MeshDomain, QuadPoint};
use crate::par;
use crate::symmetrize::WeightedSamples;
pub use sparse::{SkylineCholesky, SparseSym};

/// Assembled stiffness and mass matrices on the interior vertices.
#[derive(Clone, Debug)]
pub struct FemSystem {
    mesh: MeshDomain,
    dof_of_vertex: Vec<Option<usize>>,
    vertex_of_dof: Vec<usize>,
    stiffness: SparseSym,
    mass: SparseSym,
    quadrature: Vec<QuadPoint>,
}

impl FemSystem {
    /// Assembles on `mesh` (mapped to the conformal chart if necessary).
    pub fn assemble(mesh: &MeshDomain) -> Result<Self> {
        let mesh = mesh.to_conformal()?;
        let on_boundary = mesh.is_boundary();
        let mut dof_of_vertex = vec![None; mesh.vertices().len()];
        let mut vertex_of_dof = Vec::new();
        for (v, b) in on_boundary.iter().enumerate() {
            if !b {
                dof_of_vertex[v] = Some(vertex_of_dof.len());
                vertex_of_dof.push(v);
            }
        }
        if vertex_of_dof.is_empty() {
            return Err(Error::invalid("mesh has no interior vertices"));
        }
        let quadrature = mesh.quadrature();
        let verts = mesh.vertices();
        let tris = mesh.triangles();
        let elements = par::map_range(tris.len(), |t| {
            let [a, b, c] = tris[t].map(|i| verts[i]);
            let area = 0.5 * ((b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0]));
            let gy = [b[1] - c[1], c[1] - a[1], a[1] - b[1]];
            let gx = [c[0] - b[0], a[0] - c[0], b[0] - a[0]];
            let mut ke = [[0.0; 3]; 3];
            let mut me = [[0.0; 3]; 3];
            for i in 0..3 {
                for j in 0..3 {
                    ke[i][j] = (gy[i] * gy[j] + gx[i] * gx[j]) / (4.0 * area);
                }
            }
            for q in &quadrature[3 * t..3 * t + 3] {
                for i in 0..3 {
                    for j in 0..3 {
                        me[i][j] += q.weight * q.bary[i] * q.bary[j];
                    }
                }
            }
            (ke, me)
        });
        let mut kt = Vec::with_capacity(9 * tris.len());
        let mut mt = Vec::with_capacity(9 * tris.len());
        for (tri, (ke, me)) in tris.iter().zip(&elements) {
            for i in 0..3 {
                let Some(r) = dof_of_vertex[tri[i]] else { continue };
                for j in 0..3 {
                    let Some(c) = dof_of_vertex[tri[j]] else { continue };
                    kt.push((r, c, ke[i][j]));
                    mt.push((r, c, me[i][j]));
                }
            }
        }
        let n = vertex_of_dof.len();
        Ok(Self {
            stiffness: SparseSym::from_triplets(n, kt),
            mass: SparseSym::from_triplets(n, mt),
            mesh,
            dof_of_vertex,
            vertex_of_dof,
            quadrature,
        })
    }

    /// The mesh in the conformal chart.
    pub fn mesh(&self) -> &MeshDomain {
        &self.mesh
    }

    pub fn n_dofs(&self) -> usize {
        self.vertex_of_dof.len()
    }

    pub fn stiffness(&self) -> &SparseSym {
        &self.stiffness
    }

    pub fn mass(&self) -> &SparseSym {
        &self.mass
    }

    /// Quadrature nodes (3 per triangle, in triangle order).
    pub fn quadrature(&self) -> &[QuadPoint] {
        &self.quadrature
    }

    /// Interior-vertex values of a vertex field.
    pub fn restrict(&self, vertex_values: &[f64]) -> Vec<f64> {
        self.vertex_of_dof.iter().map(|&v| vertex_values[v]).collect()
    }

    /// Vertex field from interior values, zero on the boundary.
    pub fn extend(&self, dofs: &[f64]) -> Vec<f64> {
        self.dof_of_vertex.iter().map(|d| d.map_or(0.0, |i| dofs[i])).collect()
    }

    /// `∫|∇u|² / ∫u²` of a vertex field (boundary values ignored).
    pub fn rayleigh_quotient(&self, vertex_values: &[f64]) -> f64 {
        let x = self.restrict(vertex_values);
        self.stiffness.quad_form(&x, &x) / self.mass.quad_form(&x, &x)
    }

    /// Values of a vertex field at the quadrature nodes.
    pub fn at_quadrature(&self, vertex_values: &[f64]) -> Vec<f64> {
        let tris = self.mesh.triangles();
        self.quadrature
            .iter()
            .map(|q| (0..3).map(|j| q.bary[j] * vertex_values[tris[q.triangle][j]]).sum())
            .collect()
    }

    /// `∫ u v dA` of two vertex fields, by the quadrature of the mass matrix.
    pub fn l2_inner(&self, u: &[f64], v: &[f64]) -> f64 {
        let a = self.at_quadrature(u);
        let b = self.at_quadrature(v);
        self.quadrature.iter().zip(a.iter().zip(&b)).map(|(q, (x, y))| q.weight * x * y).sum()
    }
}

#[derive(Clone, Copy, Debug)]
pub struct EigenOptions {
    /// Subspace dimension.
    pub block: usize,
    /// Relative residual target for both eigenpairs.
    pub tol: f64,
    pub max_iter: usize,
    pub seed: u64,
}

impl Default for EigenOptions {
    fn default() -> Self {
        Self { block: 6, tol: 1e-10, max_iter: 500, seed: 0x5eed_0001 }
    }
}

/// The two lowest eigenpairs. Eigenvectors are vertex fields, zero on the
/// boundary, with unit `L²` norm; `u1` is nonnegative up to discretization
/// noise.
#[derive(Clone, Debug, Serialize)]
pub struct EigenPairs {
    pub lambda1: f64,
    pub lambda2: f64,
    /// Third Ritz value, used to flag a multiple `λ₂`.
    pub lambda3: f64,
    pub u1: Vec<f64>,
    pub u2: Vec<f64>,
    /// `‖K u − λ M u‖ / (λ ‖M u‖)` for both pairs.
    pub residuals: [f64; 2],
    /// `|⟨u1, u2⟩_M|`.
    pub orthogonality: f64,
    pub iterations: usize,
    /// `λ₂` is (numerically) multiple, so `u2` is one member of an eigenspace.
    pub degenerate: bool,
}

impl EigenPairs {
    pub fn gap(&self) -> f64 {
        self.lambda2 - self.lambda1
    }

    pub fn max_residual(&self) -> f64 {
        self.residuals[0].max(self.residuals[1])
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

fn residual(sys: &FemSystem, lambda: f64, x: &[f64]) -> f64 {
    let kx = sys.stiffness.mul_vec(x);
    let mx = sys.mass.mul_vec(x);
    let r: Vec<f64> = kx.iter().zip(&mx).map(|(a, b)| a - lambda * b).collect();
    norm(&r) / (lambda.abs() * norm(&mx)).max(f64::MIN_POSITIVE)
}

/// Rayleigh–Ritz on the span of `y`: returns Ritz values and M-orthonormal
/// Ritz vectors, ascending.
fn rayleigh_ritz(sys: &FemSystem, y: &[Vec<f64>]) -> Result<(Vec<f64>, Vec<Vec<f64>>)> {
    let p = y.len();
    let ky = par::map(y, |v| sys.stiffness.mul_vec(v));
    let my = par::map(y, |v| sys.mass.mul_vec(v));
    let kr = DMatrix::from_fn(p, p, |i, j| 0.5 * (dot(&y[i], &ky[j]) + dot(&y[j], &ky[i])));
    let mr = DMatrix::from_fn(p, p, |i, j| 0.5 * (dot(&y[i], &my[j]) + dot(&y[j], &my[i])));
    let chol = mr
        .cholesky()
        .ok_or_else(|| Error::NoConvergence("subspace collapsed (Gram matrix not positive definite)".into()))?;
    let l = chol.l();
    let linv = l
        .clone()
        .try_inverse()
        .ok_or_else(|| Error::NoConvergence("subspace collapsed".into()))?;
    let c = &linv * kr * linv.transpose();
    let c = 0.5 * (&c + c.transpose());
    let eig = SymmetricEigen::new(c);
    let mut order: Vec<usize> = (0..p).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let coeff = linv.transpose() * &eig.eigenvectors;
    let n = sys.n_dofs();
    let vals = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vecs = order
        .iter()
        .map(|&col| {
            let mut v = vec![0.0; n];
            for (j, yj) in y.iter().enumerate() {
                let a = coeff[(j, col)];
                for (t, s) in v.iter_mut().zip(yj) {
                    *t += a * s;
                }
            }
            v
        })
        .collect();
    Ok((vals, vecs))
}

/// Lowest two eigenpairs with default options.
pub fn solve_two(sys: &FemSystem) -> Result<EigenPairs> {
    solve_two_with(sys, &EigenOptions::default())
}

pub fn solve_two_with(sys: &FemSystem, opts: &EigenOptions) -> Result<EigenPairs> {
    let n = sys.n_dofs();
    let p = opts.block.max(3).min(n);
    if n < 2 {
        return Err(Error::invalid("need at least two interior vertices for two eigenpairs"));
    }
    let chol = SkylineCholesky::factor(&sys.stiffness)?;
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut x: Vec<Vec<f64>> = (0..p)
        .map(|j| {
            (0..n)
                .map(|_| {
                    let r: f64 = rng.gen_range(-1.0..1.0);
                    if j == 0 {
                        1.0 + 0.1 * r
                    } else {
                        r
                    }
                })
                .collect()
        })
        .collect();
    let mut it = 0;
    loop {
        it += 1;
        let y = par::map(&x, |v| chol.solve(&sys.mass.mul_vec(v)));
        let (vals, vecs) = rayleigh_ritz(sys, &y)?;
        x = vecs;
        let res = [residual(sys, vals[0], &x[0]), residual(sys, vals[1], &x[1])];
        let converged = res[0] <= opts.tol && res[1] <= opts.tol;
        if converged || it >= opts.max_iter {
            if !converged {
                return Err(Error::NoConvergence(format!(
                    "subspace iteration stalled after {it} iterations (residuals {:.2e}, {:.2e})",
                    res[0], res[1]
                )));
            }
            let mut u1 = sys.extend(&x[0]);
            let u2 = sys.extend(&x[1]);
            if u1.iter().sum::<f64>() < 0.0 {
                u1.iter_mut().for_each(|v| *v = -*v);
            }
            let orthogonality = sys.mass.quad_form(&x[0], &x[1]).abs();
            let lambda3 = if p > 2 { vals[2] } else { f64::INFINITY };
            return Ok(EigenPairs {
                lambda1: vals[0],
                lambda2: vals[1],
                lambda3,
                degenerate: (lambda3 - vals[1]).abs() <= 1e-6 * vals[1],
                u1,
                u2,
                residuals: res,
                orthogonality,
                iterations: it,
            });
        }
    }
}

/// Assembles and solves in one step.
pub fn solve_mesh(mesh: &MeshDomain) -> Result<(FemSystem, EigenPairs)> {
    let sys = FemSystem::assemble(mesh)?;
    let pairs = solve_two(&sys)?;
    Ok((sys, pairs))
}

/// Sub-triangles per edge used by [`u1_samples`].
pub const SAMPLE_SUBDIVISION: usize = 4;

/// `u1` as weighted samples for symmetrization, carrying `total_measure`
/// (default `|Ω|`; pass `|hull Ω|` for the zero extension to the hull).
pub fn u1_samples(sys: &FemSystem, pairs: &EigenPairs, total_measure: Option<f64>) -> Result<WeightedSamples> {
    u1_samples_with(sys, pairs, total_measure, SAMPLE_SUBDIVISION)
}

/// Samples the piecewise-linear `u1` at the centroids of a uniform
/// `m × m` subdivision of every triangle. Each sample weighs the metric area
/// of its sub-triangle, rescaled so a triangle's samples sum to its
/// quadrature area; negative discretization noise is clipped to zero.
pub fn u1_samples_with(
    sys: &FemSystem,
    pairs: &EigenPairs,
    total_measure: Option<f64>,
    m: usize,
) -> Result<WeightedSamples> {
    let m = m.max(1);
    let mf = m as f64;
    let mut bary = Vec::with_capacity(m * m);
    for i in 0..m {
        for j in 0..m - i {
            let (a, b) = ((i as f64 + 1.0 / 3.0) / mf, (j as f64 + 1.0 / 3.0) / mf);
            bary.push([1.0 - a - b, a, b]);
            if i + j + 1 < m {
                let (a, b) = ((i as f64 + 2.0 / 3.0) / mf, (j as f64 + 2.0 / 3.0) / mf);
                bary.push([1.0 - a - b, a, b]);
            }
        }
    }
    let mesh = &sys.mesh;
    let g = mesh.geometry();
    let verts = mesh.vertices();
    let tris = mesh.triangles();
    let per_tri = par::map_range(tris.len(), |t| {
        let tri = tris[t];
        let area: f64 = sys.quadrature[3 * t..3 * t + 3].iter().map(|q| q.weight).sum();
        let mut out: Vec<(f64, f64)> = bary
            .iter()
            .map(|b| {
                let mut x = [0.0; 2];
                let mut u = 0.0;
                for k in 0..3 {
                    x[0] += b[k] * verts[tri[k]][0];
                    x[1] += b[k] * verts[tri[k]][1];
                    u += b[k] * pairs.u1[tri[k]];
                }
                (u.max(0.0), g.conformal_density(crate::mesh::chart::c(x)))
            })
            .collect();
        let dsum: f64 = out.iter().map(|o| o.1).sum();
        out.iter_mut().for_each(|o| o.1 *= area / dsum);
        out
    });
    let (vals, weights): (Vec<f64>, Vec<f64>) = per_tri.into_iter().flatten().unzip();
    let total = total_measure.unwrap_or_else(|| sys.quadrature.iter().map(|q| q.weight).sum());
    WeightedSamples::new(vals, weights, total)
}

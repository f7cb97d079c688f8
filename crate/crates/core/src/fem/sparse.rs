//! Symmetric sparse matrices, reverse Cuthill–McKee ordering and an
//! envelope (skyline) Cholesky factorization.

use crate::error::{Error, Result};
use std::collections::VecDeque;

/// Symmetric matrix in CSR form with both triangles stored.
#[derive(Clone, Debug)]
pub struct SparseSym {
    n: usize,
    row_ptr: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<f64>,
}

impl SparseSym {
    /// Builds from triplets; duplicates are summed in a deterministic order.
    pub fn from_triplets(n: usize, mut trip: Vec<(usize, usize, f64)>) -> Self {
        trip.sort_by(|a, b| (a.0, a.1).cmp(&(b.0, b.1)));
        let mut row_ptr = vec![0usize; n + 1];
        let mut cols = Vec::with_capacity(trip.len());
        let mut vals: Vec<f64> = Vec::with_capacity(trip.len());
        let mut last: Option<(usize, usize)> = None;
        for (r, c, v) in trip {
            if last == Some((r, c)) {
                *vals.last_mut().unwrap() += v;
            } else {
                cols.push(c);
                vals.push(v);
                row_ptr[r + 1] += 1;
                last = Some((r, c));
            }
        }
        for i in 0..n {
            row_ptr[i + 1] += row_ptr[i];
        }
        Self { n, row_ptr, cols, vals }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn nnz(&self) -> usize {
        self.vals.len()
    }

    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let r = self.row_ptr[i]..self.row_ptr[i + 1];
        self.cols[r.clone()].iter().copied().zip(self.vals[r].iter().copied())
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.row(i).find(|(c, _)| *c == j).map_or(0.0, |(_, v)| v)
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        (0..self.n).map(|i| self.row(i).map(|(c, v)| v * x[c]).sum()).collect()
    }

    pub fn quad_form(&self, x: &[f64], y: &[f64]) -> f64 {
        self.mul_vec(y).iter().zip(x).map(|(a, b)| a * b).sum()
    }

    /// Reverse Cuthill–McKee permutation: `perm[new] = old`.
    pub fn rcm(&self) -> Vec<usize> {
        let n = self.n;
        let degree: Vec<usize> = (0..n).map(|i| self.row_ptr[i + 1] - self.row_ptr[i]).collect();
        let mut visited = vec![false; n];
        let mut order = Vec::with_capacity(n);
        let bfs_levels = |start: usize, visited: &[bool]| -> (usize, usize) {
            // (farthest node, eccentricity) within the component.
            let mut dist = vec![usize::MAX; n];
            let mut q = VecDeque::from([start]);
            dist[start] = 0;
            let mut far = (start, 0usize);
            while let Some(u) = q.pop_front() {
                for (v, _) in self.row(u) {
                    if dist[v] == usize::MAX && !visited[v] {
                        dist[v] = dist[u] + 1;
                        if dist[v] > far.1 || (dist[v] == far.1 && degree[v] < degree[far.0]) {
                            far = (v, dist[v]);
                        }
                        q.push_back(v);
                    }
                }
            }
            far
        };
        while order.len() < n {
            let seed = (0..n).filter(|&i| !visited[i]).min_by_key(|&i| (degree[i], i)).unwrap();
            // Pseudo-peripheral start by repeated BFS.
            let mut start = seed;
            let mut ecc = bfs_levels(start, &visited).1;
            for _ in 0..8 {
                let (far, _) = bfs_levels(start, &visited);
                let e = bfs_levels(far, &visited).1;
                if e <= ecc {
                    break;
                }
                start = far;
                ecc = e;
            }
            let mut q = VecDeque::from([start]);
            visited[start] = true;
            while let Some(u) = q.pop_front() {
                order.push(u);
                let mut nb: Vec<usize> = self.row(u).map(|(v, _)| v).filter(|&v| !visited[v]).collect();
                nb.sort_by_key(|&v| (degree[v], v));
                for v in nb {
                    visited[v] = true;
                    q.push_back(v);
                }
            }
        }
        order.reverse();
        order
    }
}

/// Cholesky factor `L` of `P A Pᵀ` stored by rows within the envelope.
#[derive(Clone, Debug)]
pub struct SkylineCholesky {
    perm: Vec<usize>,
    inv: Vec<usize>,
    first: Vec<usize>,
    start: Vec<usize>,
    data: Vec<f64>,
}

impl SkylineCholesky {
    pub fn factor(a: &SparseSym) -> Result<Self> {
        let perm = a.rcm();
        Self::factor_with(a, perm)
    }

    pub fn factor_with(a: &SparseSym, perm: Vec<usize>) -> Result<Self> {
        let n = a.dim();
        let mut inv = vec![0usize; n];
        for (new, &old) in perm.iter().enumerate() {
            inv[old] = new;
        }
        let mut first: Vec<usize> = (0..n).collect();
        for (new, &old) in perm.iter().enumerate() {
            for (c, _) in a.row(old) {
                let j = inv[c];
                if j < first[new] {
                    first[new] = j;
                }
            }
        }
        let mut start = vec![0usize; n + 1];
        for i in 0..n {
            start[i + 1] = start[i] + (i - first[i] + 1);
        }
        let mut data = vec![0.0; start[n]];
        for (new, &old) in perm.iter().enumerate() {
            for (c, v) in a.row(old) {
                let j = inv[c];
                if j <= new {
                    data[start[new] + j - first[new]] += v;
                }
            }
        }
        for i in 0..n {
            let fi = first[i];
            for j in fi..i {
                let fj = first[j];
                let lo = fi.max(fj);
                let (head, row_i) = data.split_at_mut(start[i]);
                let row_j = &head[start[j]..start[j + 1]];
                let dot: f64 = row_i[lo - fi..j - fi].iter().zip(&row_j[lo - fj..j - fj]).map(|(x, y)| x * y).sum();
                let ljj = row_j[j - fj];
                row_i[j - fi] = (row_i[j - fi] - dot) / ljj;
            }
            let row_i = &mut data[start[i]..start[i + 1]];
            let d = row_i[i - fi] - row_i[..i - fi].iter().map(|x| x * x).sum::<f64>();
            if !(d > 0.0) {
                return Err(Error::NoConvergence(format!(
                    "Cholesky factorization failed at pivot {i} (value {d:e}); matrix not positive definite"
                )));
            }
            row_i[i - fi] = d.sqrt();
        }
        Ok(Self { perm, inv, first, start, data })
    }

    /// Stored entries of the factor.
    pub fn envelope_size(&self) -> usize {
        self.data.len()
    }

    /// Solves `A x = b`.
    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let n = self.perm.len();
        let mut y: Vec<f64> = self.perm.iter().map(|&old| b[old]).collect();
        for i in 0..n {
            let fi = self.first[i];
            let row = &self.data[self.start[i]..self.start[i + 1]];
            let dot: f64 = row[..i - fi].iter().zip(&y[fi..i]).map(|(l, v)| l * v).sum();
            y[i] = (y[i] - dot) / row[i - fi];
        }
        for i in (0..n).rev() {
            let fi = self.first[i];
            let row = &self.data[self.start[i]..self.start[i + 1]];
            y[i] /= row[i - fi];
            let yi = y[i];
            for (l, v) in row[..i - fi].iter().zip(&mut y[fi..i]) {
                *v -= l * yi;
            }
        }
        (0..n).map(|old| y[self.inv[old]]).collect()
    }
}

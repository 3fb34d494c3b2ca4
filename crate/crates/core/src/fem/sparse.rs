//! Sparse storage for the global stiffness and a skyline (envelope) Cholesky
//! factorization with reverse Cuthill-McKee reordering.
//!
//! The full stiffness is kept in CSR with both triangles so reactions and
//! symmetry checks are direct matrix-vector work. The reduced system over the
//! free dofs is copied into a column skyline after reordering, factored as
//! `K = U^T U`, and solved by two triangular sweeps.

use std::collections::VecDeque;

use crate::error::{Error, Result};

/// Compressed sparse row matrix with sorted column indices.
#[derive(Debug, Clone, PartialEq)]
pub struct CsrMatrix {
    pub n: usize,
    pub row_ptr: Vec<usize>,
    pub col_idx: Vec<usize>,
    pub values: Vec<f64>,
}

impl CsrMatrix {
    /// Pattern from per-row column sets; values start at zero.
    pub fn from_pattern(n: usize, mut rows: Vec<Vec<usize>>) -> Self {
        let mut row_ptr = Vec::with_capacity(n + 1);
        let mut col_idx = Vec::new();
        row_ptr.push(0);
        for r in rows.iter_mut() {
            r.sort_unstable();
            r.dedup();
            col_idx.extend_from_slice(r);
            row_ptr.push(col_idx.len());
        }
        let nnz = col_idx.len();
        CsrMatrix {
            n,
            row_ptr,
            col_idx,
            values: vec![0.0; nnz],
        }
    }

    pub fn nnz(&self) -> usize {
        self.col_idx.len()
    }

    pub fn row(&self, i: usize) -> (&[usize], &[f64]) {
        let r = self.row_ptr[i]..self.row_ptr[i + 1];
        (&self.col_idx[r.clone()], &self.values[r])
    }

    /// Position of `(i, j)` in `values`, if stored.
    pub fn position(&self, i: usize, j: usize) -> Option<usize> {
        let (cols, _) = self.row(i);
        cols.binary_search(&j).ok().map(|p| self.row_ptr[i] + p)
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.position(i, j).map_or(0.0, |p| self.values[p])
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        (0..self.n)
            .map(|i| {
                let (cols, vals) = self.row(i);
                cols.iter().zip(vals).map(|(&j, &v)| v * x[j]).sum()
            })
            .collect()
    }

    /// Largest `|a_ij - a_ji|` relative to the largest `|a_ij|`.
    pub fn asymmetry(&self) -> f64 {
        let mut worst = 0.0_f64;
        let mut scale = 0.0_f64;
        for i in 0..self.n {
            let (cols, vals) = self.row(i);
            for (&j, &v) in cols.iter().zip(vals) {
                scale = scale.max(v.abs());
                worst = worst.max((v - self.get(j, i)).abs());
            }
        }
        if scale == 0.0 {
            0.0
        } else {
            worst / scale
        }
    }

    /// Frobenius norm.
    pub fn norm(&self) -> f64 {
        self.values.iter().map(|v| v * v).sum::<f64>().sqrt()
    }
}

/// Reverse Cuthill-McKee ordering of an undirected graph given as adjacency
/// lists. Returns `perm` with `perm[new] = old`. Components are visited in
/// order of their lowest-degree vertex, ties to the lowest index.
pub fn reverse_cuthill_mckee(adj: &[Vec<usize>]) -> Vec<usize> {
    let n = adj.len();
    let degree: Vec<usize> = adj.iter().map(Vec::len).collect();
    let mut visited = vec![false; n];
    let mut order = Vec::with_capacity(n);
    let mut starts: Vec<usize> = (0..n).collect();
    starts.sort_by_key(|&v| (degree[v], v));

    let mut queue = VecDeque::new();
    let mut nbrs = Vec::new();
    for &s in &starts {
        if visited[s] {
            continue;
        }
        visited[s] = true;
        queue.push_back(s);
        while let Some(v) = queue.pop_front() {
            order.push(v);
            nbrs.clear();
            nbrs.extend(adj[v].iter().copied().filter(|&w| !visited[w]));
            nbrs.sort_by_key(|&w| (degree[w], w));
            for &w in &nbrs {
                visited[w] = true;
                queue.push_back(w);
            }
        }
    }
    order.reverse();
    order
}

/// Sum of column heights for a symmetric pattern under `perm`.
pub fn envelope_size(adj: &[Vec<usize>], perm: &[usize]) -> usize {
    let mut inv = vec![0; perm.len()];
    for (new, &old) in perm.iter().enumerate() {
        inv[old] = new;
    }
    (0..perm.len())
        .map(|new| {
            let old = perm[new];
            let first = adj[old].iter().map(|&w| inv[w]).min().unwrap_or(new).min(new);
            new - first
        })
        .sum()
}

/// Symmetric positive definite matrix in column skyline storage: column `j`
/// holds rows `first[j]..=j` contiguously.
#[derive(Debug, Clone)]
pub struct Skyline {
    n: usize,
    first: Vec<usize>,
    col_ptr: Vec<usize>,
    data: Vec<f64>,
    factored: bool,
}

impl Skyline {
    /// `first[j]` is the topmost stored row of column `j` (`<= j`).
    pub fn new(first: Vec<usize>) -> Self {
        let n = first.len();
        let mut col_ptr = Vec::with_capacity(n + 1);
        col_ptr.push(0);
        for (j, &f) in first.iter().enumerate() {
            debug_assert!(f <= j);
            col_ptr.push(col_ptr[j] + (j - f + 1));
        }
        let len = col_ptr[n];
        Skyline {
            n,
            first,
            col_ptr,
            data: vec![0.0; len],
            factored: false,
        }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn stored(&self) -> usize {
        self.data.len()
    }

    /// Adds `v` at `(i, j)` with `i <= j`.
    pub fn add(&mut self, i: usize, j: usize, v: f64) {
        debug_assert!(i <= j && i >= self.first[j]);
        self.data[self.col_ptr[j] + i - self.first[j]] += v;
    }

    fn col(&self, j: usize) -> &[f64] {
        &self.data[self.col_ptr[j]..self.col_ptr[j + 1]]
    }

    /// In-place `K = U^T U`. A pivot that falls below `rel_tol` times the
    /// original diagonal is reported as a singular system.
    pub fn factor(&mut self, rel_tol: f64) -> Result<()> {
        for j in 0..self.n {
            let fj = self.first[j];
            let cj = self.col_ptr[j];
            for i in fj..j {
                let fi = self.first[i];
                let lo = fi.max(fj);
                let ci = self.col_ptr[i];
                let dot: f64 = {
                    let a = &self.data[ci + lo - fi..ci + i - fi];
                    let b = &self.data[cj + lo - fj..cj + i - fj];
                    a.iter().zip(b).map(|(x, y)| x * y).sum()
                };
                let uii = self.data[ci + i - fi];
                let p = cj + i - fj;
                self.data[p] = (self.data[p] - dot) / uii;
            }
            let p = cj + j - fj;
            let diag = self.data[p];
            let sq: f64 = self.data[cj..p].iter().map(|x| x * x).sum();
            let pivot = diag - sq;
            if !(pivot > rel_tol * diag.abs()) || !pivot.is_finite() {
                return Err(Error::SingularSystem {
                    equation: j,
                    pivot,
                    diagonal: diag,
                });
            }
            self.data[p] = pivot.sqrt();
        }
        self.factored = true;
        Ok(())
    }

    /// Solves `K x = b` in place with the factored matrix.
    pub fn solve_in_place(&self, x: &mut [f64]) {
        assert!(self.factored, "skyline matrix must be factored before solving");
        // U^T y = b
        for j in 0..self.n {
            let col = self.col(j);
            let fj = self.first[j];
            let s: f64 = col[..j - fj].iter().zip(&x[fj..j]).map(|(u, y)| u * y).sum();
            x[j] = (x[j] - s) / col[j - fj];
        }
        // U x = y, column sweep
        for j in (0..self.n).rev() {
            let col = self.col(j);
            let fj = self.first[j];
            x[j] /= col[j - fj];
            let xj = x[j];
            for (k, u) in (fj..j).zip(&col[..j - fj]) {
                x[k] -= u * xj;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Dense Cholesky-free reference: Gaussian elimination with partial pivoting.
    fn dense_solve(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Vec<f64> {
        let n = b.len();
        for k in 0..n {
            let p = (k..n).max_by(|&i, &j| a[i][k].abs().total_cmp(&a[j][k].abs())).unwrap();
            a.swap(k, p);
            b.swap(k, p);
            for i in k + 1..n {
                let f = a[i][k] / a[k][k];
                for j in k..n {
                    a[i][j] -= f * a[k][j];
                }
                b[i] -= f * b[k];
            }
        }
        let mut x = vec![0.0; n];
        for i in (0..n).rev() {
            let s: f64 = (i + 1..n).map(|j| a[i][j] * x[j]).sum();
            x[i] = (b[i] - s) / a[i][i];
        }
        x
    }

    fn laplacian_1d(n: usize) -> Vec<Vec<f64>> {
        let mut a = vec![vec![0.0; n]; n];
        for i in 0..n {
            a[i][i] = 2.5;
            if i > 0 {
                a[i][i - 1] = -1.0;
                a[i - 1][i] = -1.0;
            }
        }
        a[0][n - 1] = 0.3;
        a[n - 1][0] = 0.3;
        a
    }

    fn skyline_of(a: &[Vec<f64>]) -> Skyline {
        let n = a.len();
        let first = (0..n).map(|j| (0..=j).find(|&i| a[i][j] != 0.0).unwrap()).collect();
        let mut s = Skyline::new(first);
        for j in 0..n {
            for i in s.first[j]..=j {
                s.add(i, j, a[i][j]);
            }
        }
        s
    }

    #[test]
    fn skyline_matches_dense() {
        let a = laplacian_1d(9);
        let b: Vec<f64> = (0..9).map(|i| (i as f64 * 0.7).sin()).collect();
        let mut s = skyline_of(&a);
        s.factor(1e-13).unwrap();
        let mut x = b.clone();
        s.solve_in_place(&mut x);
        let reference = dense_solve(a, b);
        for (p, q) in x.iter().zip(&reference) {
            assert!((p - q).abs() < 1e-13, "{p} vs {q}");
        }
    }

    #[test]
    fn singular_matrix_is_detected() {
        let a = vec![vec![1.0, -1.0], vec![-1.0, 1.0]];
        let mut s = skyline_of(&a);
        assert!(matches!(s.factor(1e-13), Err(Error::SingularSystem { equation: 1, .. })));
        let a = vec![vec![-1.0]];
        assert!(skyline_of(&a).factor(1e-13).is_err());
    }

    #[test]
    fn rcm_is_a_permutation_and_shrinks_envelope() {
        // 2D grid graph numbered column-major on a wide grid: RCM should not be worse
        let (w, h) = (12, 3);
        let id = |i: usize, j: usize| i * h + j;
        let mut adj = vec![Vec::new(); w * h];
        for i in 0..w {
            for j in 0..h {
                for (di, dj) in [(1, 0), (0, 1), (1, 1)] {
                    if i + di < w && j + dj < h {
                        adj[id(i, j)].push(id(i + di, j + dj));
                        adj[id(i + di, j + dj)].push(id(i, j));
                    }
                }
            }
        }
        let perm = reverse_cuthill_mckee(&adj);
        let mut sorted = perm.clone();
        sorted.sort_unstable();
        assert_eq!(sorted, (0..w * h).collect::<Vec<_>>());
        let natural: Vec<usize> = (0..w * h).collect();
        assert!(envelope_size(&adj, &perm) <= envelope_size(&adj, &natural));
    }

    #[test]
    fn csr_pattern_and_product() {
        let mut m = CsrMatrix::from_pattern(3, vec![vec![1, 0, 0], vec![0, 1, 2], vec![2, 1]]);
        assert_eq!(m.nnz(), 7);
        for (p, v) in [((0, 0), 2.0), ((0, 1), 1.0), ((1, 0), 1.0), ((1, 1), 3.0), ((1, 2), -1.0), ((2, 1), -1.0), ((2, 2), 4.0)] {
            let k = m.position(p.0, p.1).unwrap();
            m.values[k] = v;
        }
        assert_eq!(m.mul_vec(&[1.0, 2.0, 3.0]), vec![4.0, 4.0, 10.0]);
        assert_eq!(m.asymmetry(), 0.0);
        assert_eq!(m.get(0, 2), 0.0);
    }
}

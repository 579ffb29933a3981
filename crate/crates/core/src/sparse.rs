//! Compressed-row sparse matrices and a sparse LU front end.

use faer::prelude::*;
use faer::sparse::{SparseColMat, Triplet};
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Real matrix in compressed-row form.
#[derive(Debug, Clone, PartialEq)]
pub struct CsrMatrix {
    nrows: usize,
    ncols: usize,
    indptr: Vec<usize>,
    indices: Vec<usize>,
    values: Vec<f64>,
}

impl CsrMatrix {
    /// Build from (row, col, value) triplets; duplicates are summed and exact
    /// zeros dropped.
    pub fn from_triplets(nrows: usize, ncols: usize, triplets: &[(usize, usize, f64)]) -> Self {
        let mut t: Vec<(usize, usize, f64)> = triplets.to_vec();
        t.sort_unstable_by_key(|&(r, c, _)| (r, c));
        let mut merged: Vec<(usize, usize, f64)> = Vec::with_capacity(t.len());
        for (r, c, v) in t {
            assert!(r < nrows && c < ncols, "triplet ({r},{c}) out of bounds");
            match merged.last_mut() {
                Some(last) if last.0 == r && last.1 == c => last.2 += v,
                _ => merged.push((r, c, v)),
            }
        }
        merged.retain(|&(_, _, v)| v != 0.0);
        let mut indptr = vec![0usize; nrows + 1];
        for &(r, _, _) in &merged {
            indptr[r + 1] += 1;
        }
        for i in 0..nrows {
            indptr[i + 1] += indptr[i];
        }
        CsrMatrix {
            nrows,
            ncols,
            indptr,
            indices: merged.iter().map(|e| e.1).collect(),
            values: merged.iter().map(|e| e.2).collect(),
        }
    }

    pub fn nrows(&self) -> usize {
        self.nrows
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    /// Nonzeros of row `r` as (column, value).
    pub fn row(&self, r: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let span = self.indptr[r]..self.indptr[r + 1];
        self.indices[span.clone()].iter().copied().zip(self.values[span].iter().copied())
    }

    pub fn triplets(&self) -> Vec<(usize, usize, f64)> {
        (0..self.nrows)
            .flat_map(|r| self.row(r).map(move |(c, v)| (r, c, v)))
            .collect()
    }

    pub fn get(&self, r: usize, c: usize) -> f64 {
        self.row(r).find(|&(j, _)| j == c).map_or(0.0, |(_, v)| v)
    }

    pub fn transpose(&self) -> CsrMatrix {
        let t: Vec<_> = self.triplets().into_iter().map(|(r, c, v)| (c, r, v)).collect();
        CsrMatrix::from_triplets(self.ncols, self.nrows, &t)
    }

    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.ncols);
        (0..self.nrows)
            .map(|r| self.row(r).map(|(c, v)| v * x[c]).sum())
            .collect()
    }

    pub fn matvec_complex(&self, x: &[Complex64]) -> Vec<Complex64> {
        let mut y = vec![Complex64::new(0.0, 0.0); self.nrows];
        self.matvec_complex_into(x, &mut y);
        y
    }

    pub fn matvec_complex_into(&self, x: &[Complex64], y: &mut [Complex64]) {
        assert_eq!(x.len(), self.ncols);
        for (r, yr) in y.iter_mut().enumerate() {
            let mut acc = Complex64::new(0.0, 0.0);
            for (c, v) in self.row(r) {
                acc += x[c] * v;
            }
            *yr = acc;
        }
    }

    /// Column sums.
    pub fn column_sums(&self) -> Vec<f64> {
        let mut s = vec![0.0; self.ncols];
        for (&c, &v) in self.indices.iter().zip(&self.values) {
            s[c] += v;
        }
        s
    }

    /// Induced 1-norm (max absolute column sum).
    pub fn norm_one(&self) -> f64 {
        let mut s = vec![0.0f64; self.ncols];
        for (&c, &v) in self.indices.iter().zip(&self.values) {
            s[c] += v.abs();
        }
        s.into_iter().fold(0.0, f64::max)
    }

    /// Largest Gershgorin disc extent, max_r sum_c |A_rc|; bounds the
    /// spectral radius.
    pub fn gershgorin_bound(&self) -> f64 {
        (0..self.nrows)
            .map(|r| self.row(r).map(|(_, v)| v.abs()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    /// Connected components of the undirected sparsity graph, as a label per
    /// vertex (square matrices only).
    pub fn components(&self) -> Vec<usize> {
        assert_eq!(self.nrows, self.ncols);
        let n = self.nrows;
        let mut parent: Vec<usize> = (0..n).collect();
        fn find(p: &mut [usize], mut x: usize) -> usize {
            while p[x] != x {
                p[x] = p[p[x]];
                x = p[x];
            }
            x
        }
        for r in 0..n {
            for k in self.indptr[r]..self.indptr[r + 1] {
                let (a, b) = (find(&mut parent, r), find(&mut parent, self.indices[k]));
                if a != b {
                    parent[a.max(b)] = a.min(b);
                }
            }
        }
        (0..n).map(|i| find(&mut parent, i)).collect()
    }

    /// Principal submatrix on the given (sorted, unique) index set.
    pub fn principal_submatrix(&self, keep: &[usize]) -> CsrMatrix {
        let mut pos = vec![usize::MAX; self.ncols];
        for (k, &i) in keep.iter().enumerate() {
            pos[i] = k;
        }
        let mut t = Vec::new();
        for (k, &r) in keep.iter().enumerate() {
            for (c, v) in self.row(r) {
                if pos[c] != usize::MAX {
                    t.push((k, pos[c], v));
                }
            }
        }
        CsrMatrix::from_triplets(keep.len(), keep.len(), &t)
    }
}

/// Solve `A x = b` for square sparse `A` given as triplets, by sparse LU.
pub fn lu_solve(n: usize, triplets: &[(usize, usize, f64)], b: &[f64]) -> Result<Vec<f64>> {
    assert_eq!(b.len(), n);
    let t: Vec<Triplet<usize, usize, f64>> =
        triplets.iter().map(|&(r, c, v)| Triplet::new(r, c, v)).collect();
    let a = SparseColMat::<usize, f64>::try_new_from_triplets(n, n, &t)
        .map_err(|e| Error::NoConvergence(format!("sparse assembly failed: {e:?}")))?;
    let lu = a
        .sp_lu()
        .map_err(|e| Error::NoConvergence(format!("sparse LU failed: {e:?}")))?;
    let rhs = Mat::<f64>::from_fn(n, 1, |i, _| b[i]);
    let x = lu.solve(&rhs);
    let out: Vec<f64> = (0..n).map(|i| x[(i, 0)]).collect();
    if out.iter().any(|v| !v.is_finite()) {
        return Err(Error::DegenerateNullspace {
            detail: "trace-constrained system is singular".into(),
        });
    }
    Ok(out)
}

/// Euclidean norm.
pub fn norm2(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum::<f64>().sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn duplicates_summed_and_zeros_dropped() {
        let m = CsrMatrix::from_triplets(2, 2, &[(0, 0, 1.0), (0, 0, 2.0), (1, 0, 1.0), (1, 0, -1.0)]);
        assert_eq!(m.nnz(), 1);
        assert_eq!(m.get(0, 0), 3.0);
    }

    #[test]
    fn matvec_and_transpose() {
        let m = CsrMatrix::from_triplets(2, 3, &[(0, 0, 1.0), (0, 2, 2.0), (1, 1, 3.0)]);
        assert_eq!(m.matvec(&[1.0, 1.0, 1.0]), vec![3.0, 3.0]);
        let t = m.transpose();
        assert_eq!(t.matvec(&[1.0, 2.0]), vec![1.0, 6.0, 2.0]);
        assert_eq!(m.column_sums(), vec![1.0, 3.0, 2.0]);
        assert_eq!(m.norm_one(), 3.0);
        assert_eq!(m.gershgorin_bound(), 3.0);
    }

    #[test]
    fn components_split_blocks() {
        let m = CsrMatrix::from_triplets(4, 4, &[(0, 2, 1.0), (1, 1, 1.0), (3, 3, 1.0)]);
        let c = m.components();
        assert_eq!(c[0], c[2]);
        assert_ne!(c[0], c[1]);
        assert_ne!(c[1], c[3]);
    }

    #[test]
    fn lu_solves_small_system() {
        let t = [(0, 0, 4.0), (0, 1, 1.0), (1, 0, 2.0), (1, 1, 3.0)];
        let x = lu_solve(2, &t, &[1.0, 2.0]).unwrap();
        assert!((4.0 * x[0] + x[1] - 1.0).abs() < 1e-14);
        assert!((2.0 * x[0] + 3.0 * x[1] - 2.0).abs() < 1e-14);
    }
}

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::params::Truncation;

const HERMITIAN_TOL: f64 = 1e-10;
const TRACE_TOL: f64 = 1e-10;

/// Density matrix over |na, nb, nc> (mode a slowest, mode c fastest).
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    trunc: Truncation,
    data: DMatrix<Complex64>,
}

impl DensityMatrix {
    /// Wrap a matrix after checking shape, Hermiticity and unit trace.
    pub fn new(trunc: Truncation, data: DMatrix<Complex64>) -> Result<Self> {
        let d = trunc.dim();
        if data.nrows() != d || data.ncols() != d {
            return Err(Error::param("rho", format!("expected {d}x{d} matrix")));
        }
        let herm = (&data - data.adjoint()).camax();
        if herm > HERMITIAN_TOL {
            return Err(Error::param("rho", format!("not Hermitian (deviation {herm:e})")));
        }
        let tr = data.trace();
        if (tr - Complex64::new(1.0, 0.0)).norm() > TRACE_TOL {
            return Err(Error::param("rho", format!("trace {tr} != 1")));
        }
        Ok(DensityMatrix { trunc, data })
    }

    pub(crate) fn from_raw(trunc: Truncation, data: DMatrix<Complex64>) -> Self {
        DensityMatrix { trunc, data }
    }

    pub fn truncation(&self) -> &Truncation {
        &self.trunc
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.data
    }

    pub fn trace(&self) -> Complex64 {
        self.data.trace()
    }

    /// Pure Fock state |na, nb, nc><na, nb, nc|.
    pub fn fock(trunc: &Truncation, na: usize, nb: usize, nc: usize) -> Self {
        let d = trunc.dim();
        let mut data = DMatrix::zeros(d, d);
        let i = trunc.index(na, nb, nc);
        data[(i, i)] = Complex64::new(1.0, 0.0);
        DensityMatrix { trunc: *trunc, data }
    }

    /// Product of single-mode states given as d_x x d_x matrices (each is
    /// renormalized to unit trace).
    pub fn product(trunc: &Truncation, ra: &DMatrix<Complex64>, rb: &DMatrix<Complex64>, rc: &DMatrix<Complex64>) -> Self {
        let norm = |m: &DMatrix<Complex64>| m / m.trace();
        let data = norm(ra).kronecker(&norm(rb)).kronecker(&norm(rc));
        DensityMatrix { trunc: *trunc, data }
    }

    /// Product of coherent states, truncated and renormalized per mode.
    pub fn coherent(trunc: &Truncation, amps: [Complex64; 3]) -> Self {
        let dims = [trunc.n_a, trunc.n_b, trunc.n_c];
        let f: Vec<DMatrix<Complex64>> =
            dims.iter().zip(amps).map(|(&n, z)| coherent_projector(n, z)).collect();
        Self::product(trunc, &f[0], &f[1], &f[2])
    }

    /// Product of thermal states with the given mean occupations, truncated
    /// and renormalized per mode.
    pub fn thermal(trunc: &Truncation, means: [f64; 3]) -> Self {
        let dims = [trunc.n_a, trunc.n_b, trunc.n_c];
        let f: Vec<DMatrix<Complex64>> = dims
            .iter()
            .zip(means)
            .map(|(&n, nbar)| {
                let q = nbar / (1.0 + nbar);
                DMatrix::from_fn(n + 1, n + 1, |i, j| {
                    if i == j {
                        Complex64::new(q.powi(i as i32), 0.0)
                    } else {
                        Complex64::new(0.0, 0.0)
                    }
                })
            })
            .collect();
        Self::product(trunc, &f[0], &f[1], &f[2])
    }

    /// Probability in basis state `i`.
    pub fn population(&self, i: usize) -> f64 {
        self.data[(i, i)].re
    }

    /// Eigenvalue spectrum extremes, computed per connected block of the
    /// nonzero pattern.
    pub fn min_eigenvalue(&self) -> f64 {
        let d = self.trunc.dim();
        let mut label: Vec<usize> = (0..d).collect();
        fn find(p: &mut [usize], mut x: usize) -> usize {
            while p[x] != x {
                p[x] = p[p[x]];
                x = p[x];
            }
            x
        }
        for j in 0..d {
            for i in 0..d {
                if i != j && self.data[(i, j)].norm() > 0.0 {
                    let (a, b) = (find(&mut label, i), find(&mut label, j));
                    if a != b {
                        label[a.max(b)] = a.min(b);
                    }
                }
            }
        }
        let mut blocks: std::collections::BTreeMap<usize, Vec<usize>> = Default::default();
        for i in 0..d {
            let r = find(&mut label, i);
            blocks.entry(r).or_default().push(i);
        }
        let mut min = f64::INFINITY;
        for idx in blocks.values() {
            let n = idx.len();
            let sub = DMatrix::from_fn(n, n, |r, c| {
                let (x, y) = (self.data[(idx[r], idx[c])], self.data[(idx[c], idx[r])].conj());
                (x + y) * 0.5
            });
            let ev = nalgebra::SymmetricEigen::new(sub).eigenvalues;
            min = ev.iter().copied().fold(min, f64::min);
        }
        min
    }
}

fn coherent_projector(n: usize, z: Complex64) -> DMatrix<Complex64> {
    let mut v = Vec::with_capacity(n + 1);
    let mut amp = Complex64::new((-0.5 * z.norm_sqr()).exp(), 0.0);
    for k in 0..=n {
        if k > 0 {
            amp *= z / (k as f64).sqrt();
        }
        v.push(amp);
    }
    DMatrix::from_fn(n + 1, n + 1, |i, j| v[i] * v[j].conj())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constructors_are_valid_states() {
        let t = Truncation::new(4, 3, 2);
        let z = Complex64::new(0.3, -0.4);
        for rho in [
            DensityMatrix::fock(&t, 1, 2, 0),
            DensityMatrix::coherent(&t, [z, z, z]),
            DensityMatrix::thermal(&t, [0.5, 1.0, 0.2]),
        ] {
            assert!(DensityMatrix::new(t, rho.matrix().clone()).is_ok());
            assert!(rho.min_eigenvalue() > -1e-12);
        }
    }

    #[test]
    fn rejects_non_hermitian() {
        let t = Truncation::new(1, 1, 1);
        let mut m = DensityMatrix::fock(&t, 0, 0, 0).matrix().clone();
        m[(0, 1)] = Complex64::new(0.1, 0.0);
        assert!(DensityMatrix::new(t, m).is_err());
    }
}

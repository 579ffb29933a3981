use nalgebra::DMatrix;
use num_complex::Complex64;

use super::operators::{matmul, mode_operator, Mode};
use super::state::DensityMatrix;
use crate::error::Result;
use crate::params::{ModelParams, PumpModel, Truncation};
use crate::sparse::CsrMatrix;

/// Liouvillian acting on column-stacked density matrices:
/// rho[i, j] sits at position i + j*d.
///
/// Every coupling of the model is real once the factor i of the Hamiltonians
/// is absorbed, so the matrix is stored with real entries and acts on complex
/// vectors.
#[derive(Debug, Clone)]
pub struct Superoperator {
    trunc: Truncation,
    mat: CsrMatrix,
}

impl Superoperator {
    pub fn truncation(&self) -> &Truncation {
        &self.trunc
    }

    pub fn matrix(&self) -> &CsrMatrix {
        &self.mat
    }

    /// Hilbert-space dimension d (the superoperator is d^2 x d^2).
    pub fn hilbert_dim(&self) -> usize {
        self.trunc.dim()
    }

    pub fn apply_vec(&self, v: &[Complex64]) -> Vec<Complex64> {
        self.mat.matvec_complex(v)
    }

    pub fn apply(&self, rho: &DensityMatrix) -> DMatrix<Complex64> {
        let d = self.hilbert_dim();
        DMatrix::from_column_slice(d, d, &self.apply_vec(rho.matrix().as_slice()))
    }
}

struct Builder {
    d: usize,
    t: Vec<(usize, usize, f64)>,
}

impl Builder {
    /// x -> s * K x
    fn left(&mut self, k: &CsrMatrix, s: f64) {
        let d = self.d;
        for (i, c, v) in k.triplets() {
            for j in 0..d {
                self.t.push((i + j * d, c + j * d, s * v));
            }
        }
    }

    /// x -> s * x K
    fn right(&mut self, k: &CsrMatrix, s: f64) {
        let d = self.d;
        for (r, j, v) in k.triplets() {
            for i in 0..d {
                self.t.push((i + j * d, i + r * d, s * v));
            }
        }
    }

    /// x -> s * L x R
    fn sandwich(&mut self, l: &CsrMatrix, r: &CsrMatrix, s: f64) {
        let d = self.d;
        let rt = r.triplets();
        for (i, k, lv) in l.triplets() {
            for &(m, j, rv) in &rt {
                self.t.push((i + j * d, k + m * d, s * lv * rv));
            }
        }
    }

    /// rate * (2 J x J^T - J^T J x - x J^T J)
    fn dissipator(&mut self, jump: &CsrMatrix, rate: f64) {
        if rate == 0.0 {
            return;
        }
        let jt = jump.transpose();
        let jtj = matmul(&jt, jump);
        self.sandwich(jump, &jt, 2.0 * rate);
        self.left(&jtj, -rate);
        self.right(&jtj, -rate);
    }
}

/// Liouvillian of the three-mode model.
///
/// Hamiltonian part H = i eta (a+ b+ c - a b c+), plus i mu (c+ - c) for the
/// coherent pump. Dissipators rate * D[J] with (rate, J):
/// (kappa_a, a), (kappa_b, b), (kappa_cb, b+ c), (kappa_bc, c+ b),
/// (kappa_c, c), and for the incoherent pump (mu_in, c+), (mu_out, c).
pub fn build_liouvillian(p: &ModelParams, trunc: &Truncation, dim_cap: usize) -> Result<Superoperator> {
    p.validate()?;
    trunc.validate(dim_cap)?;
    let d = trunc.dim();
    let a = mode_operator(Mode::A, trunc);
    let b = mode_operator(Mode::B, trunc);
    let c = mode_operator(Mode::C, trunc);
    let (ad, bd, cd) = (a.transpose(), b.transpose(), c.transpose());

    // -i[H, rho] = [K, rho] with H = i K and K real antisymmetric.
    let x = matmul(&matmul(&ad, &bd), &c);
    let mut k_trip: Vec<(usize, usize, f64)> = Vec::new();
    for (r, col, v) in x.triplets() {
        k_trip.push((r, col, p.eta * v));
        k_trip.push((col, r, -p.eta * v));
    }
    if let PumpModel::Coherent { mu } = p.pump {
        for (r, col, v) in c.triplets() {
            k_trip.push((col, r, mu * v));
            k_trip.push((r, col, -mu * v));
        }
    }
    let k = CsrMatrix::from_triplets(d, d, &k_trip);

    let mut bld = Builder { d, t: Vec::new() };
    bld.left(&k, 1.0);
    bld.right(&k, -1.0);
    bld.dissipator(&a, p.kappa_a);
    bld.dissipator(&b, p.kappa_b);
    bld.dissipator(&c, p.kappa_c);
    if p.kappa_cb != 0.0 {
        bld.dissipator(&matmul(&bd, &c), p.kappa_cb);
    }
    if p.kappa_bc != 0.0 {
        bld.dissipator(&matmul(&cd, &b), p.kappa_bc);
    }
    if let PumpModel::Incoherent { mu_in, mu_out } = p.pump {
        bld.dissipator(&cd, mu_in);
        bld.dissipator(&c, mu_out);
    }
    Ok(Superoperator {
        trunc: *trunc,
        mat: CsrMatrix::from_triplets(d * d, d * d, &bld.t),
    })
}

use nalgebra::DMatrix;
use num_complex::Complex64;

use super::liouvillian::Superoperator;
use super::state::DensityMatrix;
use crate::error::{Error, Result};
use crate::sparse::{lu_solve, norm2};

/// Relative residual bound ||L x|| / ||L||_1 for an accepted steady state.
pub const RESIDUAL_TOL: f64 = 1e-9;
/// Most negative eigenvalue tolerated in a steady state.
pub const POSITIVITY_TOL: f64 = -1e-8;
/// Largest allowed dt * (Gershgorin bound of L) in [`evolve`].
pub const STEP_LIMIT: f64 = 0.1;
/// Largest allowed trace drift in [`evolve`].
pub const TRACE_DRIFT_TOL: f64 = 1e-8;

#[derive(Debug, Clone)]
pub struct SteadyState {
    pub rho: DensityMatrix,
    /// ||L vec(rho)||_2 / ||L||_1.
    pub residual: f64,
    pub min_eigenvalue: f64,
    /// Number of density-matrix elements in the solved symmetry sector.
    pub sector_dim: usize,
}

/// Unique steady state of `l`.
///
/// The sparsity graph of L splits into blocks that never mix; only the block
/// holding the diagonal carries trace. One of its rows is replaced by the
/// trace functional and the block is solved by sparse LU. A second
/// trace-carrying block, or a singular reduced system, is reported as a
/// degenerate nullspace.
pub fn steady_state(l: &Superoperator) -> Result<SteadyState> {
    let d = l.hilbert_dim();
    let mat = l.matrix();
    let labels = mat.components();
    let root = labels[0];
    if let Some(k) = (1..d).find(|&k| labels[k * d + k] != root) {
        return Err(Error::DegenerateNullspace {
            detail: format!("populations 0 and {k} lie in disconnected blocks"),
        });
    }
    let keep: Vec<usize> = (0..d * d).filter(|&i| labels[i] == root).collect();
    let sub = mat.principal_submatrix(&keep);
    let n = keep.len();

    let mut trip: Vec<(usize, usize, f64)> =
        sub.triplets().into_iter().filter(|&(r, _, _)| r != 0).collect();
    for (k, &i) in keep.iter().enumerate() {
        if i % d == i / d {
            trip.push((0, k, 1.0));
        }
    }
    let mut rhs = vec![0.0; n];
    rhs[0] = 1.0;
    let x = lu_solve(n, &trip, &rhs)?;

    let mut full = vec![0.0; d * d];
    for (k, &i) in keep.iter().enumerate() {
        full[i] = x[k];
    }
    let residual = norm2(&mat.matvec(&full)) / mat.norm_one().max(f64::MIN_POSITIVE);
    if !(residual <= RESIDUAL_TOL) {
        return Err(Error::NoConvergence(format!("steady-state residual {residual:e}")));
    }
    let data = DMatrix::from_iterator(d, d, full.iter().map(|&v| Complex64::new(v, 0.0)));
    let rho = DensityMatrix::from_raw(*l.truncation(), data);
    let min_eigenvalue = rho.min_eigenvalue();
    if min_eigenvalue < POSITIVITY_TOL {
        return Err(Error::NotPositive { min_eig: min_eigenvalue });
    }
    Ok(SteadyState {
        rho,
        residual,
        min_eigenvalue,
        sector_dim: n,
    })
}

/// Integrate d rho/dt = L rho with classical RK4 up to time `t`, using the
/// largest uniform step not exceeding `dt`.
pub fn evolve(l: &Superoperator, rho0: &DensityMatrix, t: f64, dt: f64) -> Result<DensityMatrix> {
    if !(t >= 0.0 && t.is_finite()) {
        return Err(Error::param("t", "must be finite and >= 0"));
    }
    if !(dt > 0.0) {
        return Err(Error::param("dt", "must be > 0"));
    }
    let rate = l.matrix().gershgorin_bound();
    if dt * rate > STEP_LIMIT {
        return Err(Error::StepSize {
            dt,
            product: dt * rate,
            limit: STEP_LIMIT,
        });
    }
    let d = l.hilbert_dim();
    let steps = (t / dt).ceil() as usize;
    let mut y: Vec<Complex64> = rho0.matrix().as_slice().to_vec();
    if steps > 0 {
        let h = t / steps as f64;
        let m = l.matrix();
        let len = y.len();
        let zero = Complex64::new(0.0, 0.0);
        let (mut k1, mut k2, mut k3, mut k4, mut tmp) =
            (vec![zero; len], vec![zero; len], vec![zero; len], vec![zero; len], vec![zero; len]);
        for _ in 0..steps {
            m.matvec_complex_into(&y, &mut k1);
            axpy(&y, &k1, 0.5 * h, &mut tmp);
            m.matvec_complex_into(&tmp, &mut k2);
            axpy(&y, &k2, 0.5 * h, &mut tmp);
            m.matvec_complex_into(&tmp, &mut k3);
            axpy(&y, &k3, h, &mut tmp);
            m.matvec_complex_into(&tmp, &mut k4);
            for i in 0..len {
                y[i] += (k1[i] + 2.0 * (k2[i] + k3[i]) + k4[i]) * (h / 6.0);
            }
        }
    }
    let out = DensityMatrix::from_raw(*l.truncation(), DMatrix::from_column_slice(d, d, &y));
    let drift = (out.trace() - rho0.trace()).norm();
    if drift > TRACE_DRIFT_TOL {
        return Err(Error::TraceDrift { drift });
    }
    Ok(out)
}

fn axpy(y: &[Complex64], k: &[Complex64], s: f64, out: &mut [Complex64]) {
    for ((o, &a), &b) in out.iter_mut().zip(y).zip(k) {
        *o = a + b * s;
    }
}

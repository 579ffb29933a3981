//! The drift and diffusion used by the fluctuation module against the master
//! equation: on a coherent product state the positive-P distribution is a
//! point, so d<v_i>/dt = A_i and d<:v_i v_j:>/dt = v_i A_j + v_j A_i + D_ij.

use nalgebra::DMatrix;
use num_complex::Complex64;
use pairlaser::fock::{build_liouvillian, build_mode_operator, DensityMatrix, Mode};
use pairlaser::semiclassical::drift;
use pairlaser::{ModelParams, Truncation, params::DEFAULT_DIM_CAP};

fn dense(m: &pairlaser::sparse::CsrMatrix) -> DMatrix<Complex64> {
    let mut out = DMatrix::zeros(m.nrows(), m.ncols());
    for (r, c, v) in m.triplets() {
        out[(r, c)] = Complex64::new(v, 0.0);
    }
    out
}

fn expect(x: &DMatrix<Complex64>, m: &DMatrix<Complex64>) -> Complex64 {
    (x * m).trace()
}

/// Nonlinear diffusion matrix of the coherently pumped model.
fn diffusion(p: &ModelParams, v: &[Complex64; 6]) -> [[Complex64; 6]; 6] {
    let mut d = [[Complex64::default(); 6]; 6];
    let mut put = |i: usize, j: usize, x: Complex64| {
        d[i][j] = x;
        d[j][i] = x;
    };
    put(0, 1, p.eta * v[2]);
    put(3, 4, p.eta * v[5]);
    put(1, 2, -p.kappa_bc * v[1] * v[2]);
    put(4, 5, -p.kappa_bc * v[4] * v[5]);
    put(2, 5, 2.0 * p.kappa_bc * v[1] * v[4]);
    d
}

fn check(p: &ModelParams, amps: [Complex64; 3]) -> f64 {
    let trunc = Truncation::new(6, 6, 6);
    let l = build_liouvillian(p, &trunc, DEFAULT_DIM_CAP).unwrap();
    let rho = DensityMatrix::coherent(&trunc, amps);
    let lrho = l.apply(&rho);
    let ann: Vec<DMatrix<Complex64>> = [Mode::A, Mode::B, Mode::C]
        .iter()
        .map(|&m| dense(&build_mode_operator(m, &trunc, DEFAULT_DIM_CAP).unwrap()))
        .collect();
    let ops: Vec<DMatrix<Complex64>> = (0..6)
        .map(|i| if i < 3 { ann[i].clone() } else { ann[i - 3].adjoint() })
        .collect();
    let v: [Complex64; 6] = std::array::from_fn(|i| expect(&ops[i], rho.matrix()));
    let a = drift(p, p.mu().unwrap(), &v);
    let d = diffusion(p, &v);
    let mut worst: f64 = 0.0;
    for i in 0..6 {
        worst = worst.max((expect(&ops[i], &lrho) - a[i]).norm());
        for j in i..6 {
            // Normal order: creation operators to the left.
            let op = if i < 3 && j >= 3 { &ops[j] * &ops[i] } else { &ops[i] * &ops[j] };
            let lhs = expect(&op, &lrho);
            let rhs = v[i] * a[j] + v[j] * a[i] + d[i][j];
            worst = worst.max((lhs - rhs).norm());
        }
    }
    worst
}

#[test]
fn moments_match_master_equation_with_heating() {
    let p = ModelParams::coherent(1.3, 0.7, 0.5, 0.9, 0.4, 0.6);
    let amps = [
        Complex64::new(0.2, 0.1),
        Complex64::new(0.15, -0.12),
        Complex64::new(-0.1, 0.18),
    ];
    let err = check(&p, amps);
    assert!(err < 1e-7, "max mismatch {err:e}");
}

#[test]
fn moments_match_master_equation_without_heating() {
    let p = ModelParams::coherent(2.0, 1.0, 1.0, 2.0, 0.0, 0.3);
    let amps = [
        Complex64::new(-0.12, 0.05),
        Complex64::new(0.2, 0.02),
        Complex64::new(0.1, -0.1),
    ];
    assert!(check(&p, amps) < 1e-7);
}

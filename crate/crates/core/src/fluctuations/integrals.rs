use std::collections::BinaryHeap;

use nalgebra::{DMatrix, DVector, Matrix6};
use serde::Serialize;

use super::model::{FluctuationModel, ALPHA, ALPHA_D, BETA, BETA_D, GAMMA, GAMMA_D};
use super::spectra::{phase_shift, stationary_system, CMatrix6};
use crate::error::{Error, Result};

/// Relative accuracy requested from the frequency quadrature.
pub const QUAD_REL_TOL: f64 = 1e-11;
const MAX_INTERVALS: usize = 4000;
/// Above this value of <da+ da>^2 / (a0^2 |<dx_a^2>|) the linearized number
/// statistics are flagged.
pub const LINEARIZATION_FLAG_RATIO: f64 = 0.1;

// 15-point Kronrod nodes on [0, 1] (symmetric), with the embedded 7-point
// Gauss weights on the odd nodes.
const XGK: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.0,
];
const WGK: [f64; 8] = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
];
const WG: [f64; 4] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
];

type RMatrix6 = Matrix6<f64>;

struct Piece {
    lo: f64,
    hi: f64,
    value: RMatrix6,
    err: f64,
}

impl PartialEq for Piece {
    fn eq(&self, o: &Self) -> bool {
        self.err == o.err
    }
}
impl Eq for Piece {}
impl PartialOrd for Piece {
    fn partial_cmp(&self, o: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(o))
    }
}
impl Ord for Piece {
    fn cmp(&self, o: &Self) -> std::cmp::Ordering {
        self.err.total_cmp(&o.err)
    }
}

fn gauss_kronrod<F: Fn(f64) -> Result<RMatrix6>>(f: &F, lo: f64, hi: f64) -> Result<Piece> {
    let c = 0.5 * (lo + hi);
    let h = 0.5 * (hi - lo);
    let mut k = RMatrix6::zeros();
    let mut g = RMatrix6::zeros();
    for j in 0..8 {
        let pts: &[f64] = if j == 7 { &[0.0] } else { &[-1.0, 1.0] };
        for &s in pts {
            let v = f(c + s * h * XGK[j])?;
            k += v * WGK[j];
            if j % 2 == 1 {
                g += v * WG[j / 2];
            }
        }
    }
    let value = k * h;
    let err = ((k - g) * h).amax();
    Ok(Piece { lo, hi, value, err })
}

/// Adaptive Gauss-Kronrod integral of a matrix-valued function on [lo, hi].
fn integrate<F: Fn(f64) -> Result<RMatrix6>>(f: F, lo: f64, hi: f64, rel_tol: f64) -> Result<(RMatrix6, f64, usize)> {
    let mut heap = BinaryHeap::new();
    let n = 8;
    for i in 0..n {
        let a = lo + (hi - lo) * i as f64 / n as f64;
        let b = lo + (hi - lo) * (i + 1) as f64 / n as f64;
        heap.push(gauss_kronrod(&f, a, b)?);
    }
    loop {
        let total: RMatrix6 = heap.iter().map(|p| p.value).sum();
        let err: f64 = heap.iter().map(|p| p.err).sum();
        if err <= rel_tol * total.amax() || err == 0.0 {
            return Ok((total, err, heap.len()));
        }
        if heap.len() >= MAX_INTERVALS {
            return Err(Error::Quadrature(format!(
                "no convergence after {} intervals (error {err:e})",
                heap.len()
            )));
        }
        let worst = heap.pop().expect("nonempty");
        let mid = 0.5 * (worst.lo + worst.hi);
        heap.push(gauss_kronrod(&f, worst.lo, mid)?);
        heap.push(gauss_kronrod(&f, mid, worst.hi)?);
    }
}

/// Stationary covariance from the frequency integral, with error estimate.
#[derive(Debug, Clone, Copy)]
pub struct Covariance {
    /// (1/2pi) integral of C(omega) over the real line.
    pub c: RMatrix6,
    pub error: f64,
    pub intervals: usize,
}

/// (1/2pi) integral over omega of the stationary correlation matrix.
///
/// The substitution omega = s tan(theta) maps the real line onto a finite
/// interval on which the integrand stays bounded (C ~ 1/omega^2), so no tail
/// truncation is needed. C(-omega) = conj(C(omega)), hence only theta >= 0 is
/// integrated.
pub fn stationary_covariance(fm: &FluctuationModel) -> Result<Covariance> {
    fm.require_stationary()?;
    let (mh, noise) = stationary_system(fm);
    let s = characteristic_rate(fm);
    let cm = |m: &RMatrix6| m.map(|x| num_complex::Complex64::new(x, 0.0));
    let (mc, nc) = (cm(&mh), cm(&noise));
    let f = move |theta: f64| -> Result<RMatrix6> {
        let (sin, cos) = theta.sin_cos();
        let omega = s * sin / cos;
        let jac = s / (cos * cos);
        let iw = num_complex::Complex64::new(0.0, omega);
        let minus = CMatrix6::identity() * (-iw) - mc;
        let inv = minus.try_inverse().ok_or(Error::Singular { omega })?;
        let c = inv * nc * inv.map(|z| z.conj()).transpose();
        Ok(c.map(|z| z.re) * jac)
    };
    let (total, error, intervals) = integrate(f, 0.0, std::f64::consts::FRAC_PI_2, QUAD_REL_TOL)?;
    let scale = 1.0 / std::f64::consts::PI;
    Ok(Covariance {
        c: total * scale,
        error: error * scale,
        intervals,
    })
}

fn characteristic_rate(fm: &FluctuationModel) -> f64 {
    let mut rates: Vec<f64> = fm
        .eigenvalues
        .iter()
        .map(|l| l.norm())
        .filter(|&r| r > 1e-9 * phase_shift(fm))
        .collect();
    rates.sort_by(f64::total_cmp);
    if rates.is_empty() {
        1.0
    } else {
        (rates[0] * rates[rates.len() - 1]).sqrt()
    }
}

/// Solution of M X + X M^T + Q = 0 by the Kronecker form
/// (I kron M + M kron I) vec(X) = -vec(Q).
pub fn lyapunov(m: &RMatrix6, q: &RMatrix6) -> Result<RMatrix6> {
    let n = 6;
    let mut k = DMatrix::<f64>::zeros(n * n, n * n);
    for i in 0..n {
        for j in 0..n {
            for l in 0..n {
                // Column-major vec: X[i, j] at i + j n.
                k[(i + j * n, l + j * n)] += m[(i, l)];
                k[(i + j * n, i + l * n)] += m[(j, l)];
            }
        }
    }
    let rhs = DVector::from_iterator(n * n, q.iter().map(|x| -x));
    let x = k
        .lu()
        .solve(&rhs)
        .ok_or_else(|| Error::NoConvergence("Lyapunov operator is singular".into()))?;
    Ok(RMatrix6::from_iterator(x.iter().copied()))
}

/// Stationary covariance of the damped subspace from the Lyapunov equation.
pub fn stationary_covariance_lyapunov(fm: &FluctuationModel) -> Result<RMatrix6> {
    fm.require_stationary()?;
    let (mh, noise) = stationary_system(fm);
    lyapunov(&mh, &noise)
}

/// <dx+ dx> per mode (a, b, c) from the frequency integral of A_xx.
pub fn population_correction(fm: &FluctuationModel) -> Result<[f64; 3]> {
    let c = stationary_covariance(fm)?.c;
    Ok(populations_from(&c))
}

pub(crate) fn populations_from(c: &RMatrix6) -> [f64; 3] {
    [c[(ALPHA_D, ALPHA)], c[(BETA_D, BETA)], c[(GAMMA_D, GAMMA)]]
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QuadratureVariance {
    /// <dx_a^2>, <dx_b^2>, <dx_c^2>.
    pub var: [f64; 3],
    /// <dx_a dx_b>.
    pub cross_ab: f64,
}

pub(crate) fn quadratures_from(c: &RMatrix6) -> QuadratureVariance {
    let q = |i: usize, j: usize| c[(i, j)] + c[(i, j + 3)] + c[(i + 3, j)] + c[(i + 3, j + 3)];
    QuadratureVariance {
        var: [q(ALPHA, ALPHA), q(BETA, BETA), q(GAMMA, GAMMA)],
        cross_ab: 0.5 * (q(ALPHA, BETA) + q(BETA, ALPHA)),
    }
}

/// Amplitude-quadrature variances and the a/b cross term, from the frequency
/// integral of Q.
pub fn quadrature_variance(fm: &FluctuationModel) -> Result<QuadratureVariance> {
    Ok(quadratures_from(&stationary_covariance(fm)?.c))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NumberStatistics {
    /// 1 + <dx^2>/x0^2 per mode.
    pub g2: [f64; 3],
    /// 1 + <dx_a dx_b>/(a0 b0).
    pub g_ab: f64,
    pub quadratures: QuadratureVariance,
    /// <da+ da>, <db+ db>, <dg+ dg>.
    pub corrections: [f64; 3],
    /// <da+ da>^2 / (a0^2 |<dx_a^2>|).
    pub linearization_ratio: f64,
    pub linearization_ok: bool,
}

/// g2(0) per mode and the a/b cross correlation to leading order in the
/// fluctuations, using <I> ~ x0^2.
pub fn number_statistics(fm: &FluctuationModel) -> Result<NumberStatistics> {
    let c = stationary_covariance(fm)?.c;
    Ok(statistics_from(fm, &c))
}

pub(crate) fn statistics_from(fm: &FluctuationModel, c: &RMatrix6) -> NumberStatistics {
    let qv = quadratures_from(c);
    let corr = populations_from(c);
    let amps = [fm.ss.alpha0, fm.ss.beta0, fm.ss.gamma0];
    let g2 = [0, 1, 2].map(|k| 1.0 + qv.var[k] / (amps[k] * amps[k]));
    let ratio = corr[0].powi(2) / (amps[0].powi(2) * qv.var[0].abs());
    NumberStatistics {
        g2,
        g_ab: 1.0 + qv.cross_ab / (amps[0] * amps[1]),
        quadratures: qv,
        corrections: corr,
        linearization_ratio: ratio,
        linearization_ok: ratio <= LINEARIZATION_FLAG_RATIO,
    }
}

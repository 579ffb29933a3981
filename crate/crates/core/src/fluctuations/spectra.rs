use nalgebra::Matrix6;
use num_complex::Complex64;
use serde::Serialize;

use super::model::{FluctuationModel, ALPHA, BETA, GAMMA};
use crate::error::{Error, Result};

/// Largest |Im|/max(|Re|, 1) accepted for a physical (real) spectrum.
pub const REALITY_TOL: f64 = 1e-10;
/// Reciprocal condition bound below which -i omega - M counts as singular.
const SINGULAR_TOL: f64 = 1e-13;

pub type CMatrix6 = Matrix6<Complex64>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ModeLabel {
    A,
    B,
    C,
}

impl ModeLabel {
    pub fn index(self) -> usize {
        match self {
            ModeLabel::A => ALPHA,
            ModeLabel::B => BETA,
            ModeLabel::C => GAMMA,
        }
    }
}

fn complexify(m: &Matrix6<f64>) -> CMatrix6 {
    m.map(|x| Complex64::new(x, 0.0))
}

fn sandwich(m: &Matrix6<f64>, noise: &Matrix6<f64>, omega: f64) -> Result<CMatrix6> {
    let iw = Complex64::new(0.0, omega);
    let minus = CMatrix6::identity() * (-iw) - complexify(m);
    let lu = minus.lu();
    let inv = lu.try_inverse().ok_or(Error::Singular { omega })?;
    let cond = 1.0 / (minus.norm() * inv.norm());
    if !(cond > SINGULAR_TOL) {
        return Err(Error::Singular { omega });
    }
    // (i omega - M)^{-1} = conj((-i omega - M)^{-1}) because M is real.
    let plus_inv = inv.map(|z| z.conj());
    Ok(inv * complexify(noise) * plus_inv.transpose())
}

/// C(omega) = (-i omega - M)^{-1} D (i omega - M)^{-T} for the full drift.
///
/// On the lasing branch M carries a neutral phase mode, so this is singular
/// at omega = 0 and diverges as 1/omega^2 nearby.
pub fn correlation_matrix(fm: &FluctuationModel, omega: f64) -> Result<CMatrix6> {
    sandwich(&fm.m, &fm.d, omega)
}

/// Correlation matrix of the fluctuations with the neutral phase coordinate
/// removed: v_s = P v with P = I - r l^T.
pub fn stationary_correlation_matrix(fm: &FluctuationModel, omega: f64) -> Result<CMatrix6> {
    fm.require_stationary()?;
    let (mh, noise) = stationary_system(fm);
    sandwich(&mh, &noise, omega)
}

/// Shifted drift and projected noise whose correlation matrix equals that of
/// the damped subspace.
pub(crate) fn stationary_system(fm: &FluctuationModel) -> (Matrix6<f64>, Matrix6<f64>) {
    let shift = phase_shift(fm);
    let p = fm.projector();
    (fm.shifted_drift(shift), p * fm.d * p.transpose())
}

/// Rate assigned to the neutral mode when it is shifted out of the way.
pub(crate) fn phase_shift(fm: &FluctuationModel) -> f64 {
    fm.eigenvalues
        .iter()
        .map(|l| l.re.abs())
        .fold(0.0, f64::max)
        .max(1e-300)
}

/// A_xy = C[x+, y].
pub fn a_entry(c: &CMatrix6, x: ModeLabel, y: ModeLabel) -> Complex64 {
    c[(x.index() + 3, y.index())]
}

/// Q_xy: correlation of the amplitude quadratures dx = dv + dv+.
pub fn q_entry(c: &CMatrix6, x: ModeLabel, y: ModeLabel) -> Complex64 {
    let (i, j) = (x.index(), y.index());
    c[(i, j)] + c[(i, j + 3)] + c[(i + 3, j)] + c[(i + 3, j + 3)]
}

fn real_part(z: Complex64, what: &str, omega: f64) -> Result<f64> {
    if z.im.abs() > REALITY_TOL * z.re.abs().max(1.0) {
        return Err(Error::Quadrature(format!("{what} has imaginary part {:e} at omega = {omega}", z.im)));
    }
    Ok(z.re)
}

/// Stationary spectrum on a frequency grid.
#[derive(Debug, Clone)]
pub struct Spectrum {
    pub omega: Vec<f64>,
    pub c: Vec<CMatrix6>,
}

impl Spectrum {
    pub fn compute(fm: &FluctuationModel, omega: &[f64]) -> Result<Self> {
        fm.require_stationary()?;
        let (mh, noise) = stationary_system(fm);
        let c = omega.iter().map(|&w| sandwich(&mh, &noise, w)).collect::<Result<Vec<_>>>()?;
        Ok(Spectrum {
            omega: omega.to_vec(),
            c,
        })
    }

    pub fn a_track(&self, x: ModeLabel) -> Result<Vec<f64>> {
        self.c
            .iter()
            .zip(&self.omega)
            .map(|(c, &w)| real_part(a_entry(c, x, x), "A_xx", w))
            .collect()
    }

    pub fn q_track(&self, x: ModeLabel) -> Result<Vec<f64>> {
        self.c
            .iter()
            .zip(&self.omega)
            .map(|(c, &w)| real_part(q_entry(c, x, x), "Q_xx", w))
            .collect()
    }
}

/// Output quadrature spectrum V_x(omega) = 1 + 2 kappa_x Q_xx(omega).
pub fn output_spectrum(fm: &FluctuationModel, mode: ModeLabel, omega: &[f64]) -> Result<Vec<f64>> {
    let kappa = match mode {
        ModeLabel::A => fm.params.kappa_a,
        ModeLabel::B => fm.params.kappa_b,
        ModeLabel::C => fm.params.kappa_c,
    };
    let q = Spectrum::compute(fm, omega)?.q_track(mode)?;
    Ok(q.into_iter().map(|x| 1.0 + 2.0 * kappa * x).collect())
}

#[derive(Debug, Clone, Serialize)]
pub struct IntensityDifference {
    pub omega: Vec<f64>,
    /// S(omega).
    pub s: Vec<f64>,
    /// Shot-noise level 2 kappa_a alpha0^2 + 2 kappa_b beta0^2.
    pub shot: f64,
    /// S(omega) / shot.
    pub normalized: Vec<f64>,
}

/// Output intensity-difference spectrum
/// S = shot + (2 ka a0)^2 Q_aa + (2 kb b0)^2 Q_bb - 8 ka kb a0 b0 Re Q_ab.
///
/// Q_ab - Q_ba is imaginary away from omega = 0; the symmetrized (real)
/// cross term is used.
pub fn intensity_difference_spectrum(fm: &FluctuationModel, omega: &[f64]) -> Result<IntensityDifference> {
    let sp = Spectrum::compute(fm, omega)?;
    let (ka, kb) = (fm.params.kappa_a, fm.params.kappa_b);
    let (a0, b0) = (fm.ss.alpha0, fm.ss.beta0);
    let shot = 2.0 * ka * a0 * a0 + 2.0 * kb * b0 * b0;
    let mut s = Vec::with_capacity(omega.len());
    for (c, &w) in sp.c.iter().zip(omega) {
        let qaa = real_part(q_entry(c, ModeLabel::A, ModeLabel::A), "Q_aa", w)?;
        let qbb = real_part(q_entry(c, ModeLabel::B, ModeLabel::B), "Q_bb", w)?;
        let qab = 0.5 * (q_entry(c, ModeLabel::A, ModeLabel::B) + q_entry(c, ModeLabel::B, ModeLabel::A));
        let qab = real_part(qab, "Q_ab + Q_ba", w)?;
        s.push(shot + (2.0 * ka * a0).powi(2) * qaa + (2.0 * kb * b0).powi(2) * qbb - 8.0 * ka * kb * a0 * b0 * qab);
    }
    let normalized = s.iter().map(|x| x / shot).collect();
    Ok(IntensityDifference {
        omega: omega.to_vec(),
        s,
        shot,
        normalized,
    })
}

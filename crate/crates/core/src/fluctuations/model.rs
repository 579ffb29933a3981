use nalgebra::{Matrix6, SVD, Vector6};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::params::ModelParams;
use crate::semiclassical::{Branch, SemiclassicalState};

/// Variable order of every 6x6 object in this module.
pub const ALPHA: usize = 0;
pub const BETA: usize = 1;
pub const GAMMA: usize = 2;
pub const ALPHA_D: usize = 3;
pub const BETA_D: usize = 4;
pub const GAMMA_D: usize = 5;

/// |lambda| / ||M|| below which an eigenvalue counts as neutral.
pub const NEUTRAL_TOL: f64 = 1e-9;

/// Marginal direction of M: the relative phase of the two lasing modes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NeutralMode {
    /// Right null vector of M.
    pub right: Vector6<f64>,
    /// Left null vector, scaled so that left . right = 1.
    pub left: Vector6<f64>,
}

impl NeutralMode {
    /// Oblique projector I - r l^T onto the damped subspace.
    pub fn projector(&self) -> Matrix6<f64> {
        Matrix6::identity() - self.right * self.left.transpose()
    }
}

/// Linearized drift M and diffusion D around a mean-field steady state.
///
/// M = [[A, B], [B, A]] in the order (da, db, dg, da+, db+, dg+).
#[derive(Debug, Clone)]
pub struct FluctuationModel {
    pub params: ModelParams,
    pub ss: SemiclassicalState,
    pub m: Matrix6<f64>,
    pub d: Matrix6<f64>,
    pub eigenvalues: Vec<Complex64>,
    pub neutral: Option<NeutralMode>,
    /// Largest real part among the non-neutral eigenvalues.
    pub max_re: f64,
    /// All non-neutral eigenvalues are damped and at most one is neutral.
    pub hurwitz: bool,
}

impl FluctuationModel {
    pub fn a_block(&self) -> nalgebra::Matrix3<f64> {
        self.m.fixed_view::<3, 3>(0, 0).into_owned()
    }

    pub fn b_block(&self) -> nalgebra::Matrix3<f64> {
        self.m.fixed_view::<3, 3>(0, 3).into_owned()
    }

    /// Projector onto the damped subspace (identity when nothing is neutral).
    pub fn projector(&self) -> Matrix6<f64> {
        self.neutral.map_or(Matrix6::identity(), |n| n.projector())
    }

    /// M with its neutral eigenvalue moved to -shift; equal to M on the
    /// damped subspace.
    pub fn shifted_drift(&self, shift: f64) -> Matrix6<f64> {
        match self.neutral {
            Some(n) => self.m - shift * n.right * n.left.transpose(),
            None => self.m,
        }
    }

    /// Error unless stationary spectra exist around this operating point.
    pub fn require_stationary(&self) -> Result<()> {
        if self.ss.branch != Branch::Above {
            return Err(Error::BelowThreshold(format!(
                "spectra are defined on the lasing branch (epsilon = {})",
                self.ss.epsilon
            )));
        }
        if !self.hurwitz {
            return Err(Error::NotHurwitz { max_re: self.max_re });
        }
        Ok(())
    }
}

/// Drift and diffusion matrices at `ss`.
///
/// Nonzero diffusion entries (symmetric): D_ab = D_a+b+ = eta g0,
/// D_bg = D_b+g+ = -kappa_bc b0 g0 and D_gg+ = 2 kappa_bc b0^2.
pub fn build_fluctuation_model(p: &ModelParams, ss: &SemiclassicalState) -> Result<FluctuationModel> {
    p.validate()?;
    let (a0, b0, g0) = (ss.alpha0, ss.beta0, ss.gamma0);
    let (eta, ka, kb, kc, kbc) = (p.eta, p.kappa_a, p.kappa_b, p.kappa_c, p.kappa_bc);

    let a = nalgebra::Matrix3::new(
        -ka, 0.0, eta * b0,
        0.0, -kb - kbc * (g0 * g0 + 1.0), eta * a0 - kbc * b0 * g0,
        -eta * b0, -eta * a0 + kbc * b0 * g0, -kc + kbc * b0 * b0,
    );
    let b = nalgebra::Matrix3::new(
        0.0, eta * g0, 0.0,
        eta * g0, 0.0, -kbc * b0 * g0,
        0.0, kbc * b0 * g0, 0.0,
    );
    let mut m = Matrix6::zeros();
    m.fixed_view_mut::<3, 3>(0, 0).copy_from(&a);
    m.fixed_view_mut::<3, 3>(3, 3).copy_from(&a);
    m.fixed_view_mut::<3, 3>(0, 3).copy_from(&b);
    m.fixed_view_mut::<3, 3>(3, 0).copy_from(&b);

    let mut d = Matrix6::zeros();
    let mut put = |i: usize, j: usize, v: f64| {
        d[(i, j)] = v;
        d[(j, i)] = v;
    };
    put(ALPHA, BETA, eta * g0);
    put(ALPHA_D, BETA_D, eta * g0);
    put(BETA, GAMMA, -kbc * b0 * g0);
    put(BETA_D, GAMMA_D, -kbc * b0 * g0);
    put(GAMMA, GAMMA_D, 2.0 * kbc * b0 * b0);

    let eigenvalues: Vec<Complex64> = m.complex_eigenvalues().iter().copied().collect();
    let scale = m.norm().max(f64::MIN_POSITIVE);
    let neutral_count = eigenvalues.iter().filter(|l| l.norm() <= NEUTRAL_TOL * scale).count();
    let neutral = if neutral_count == 1 { null_pair(&m) } else { None };
    let mut rest: Vec<Complex64> = eigenvalues.clone();
    if neutral.is_some() {
        let k = (0..rest.len())
            .min_by(|&i, &j| rest[i].norm().total_cmp(&rest[j].norm()))
            .expect("six eigenvalues");
        rest.remove(k);
    }
    let max_re = rest.iter().map(|l| l.re).fold(f64::NEG_INFINITY, f64::max);
    let hurwitz = max_re < 0.0 && neutral_count <= 1 && (neutral_count == 0 || neutral.is_some());
    Ok(FluctuationModel {
        params: *p,
        ss: *ss,
        m,
        d,
        eigenvalues,
        neutral,
        max_re,
        hurwitz,
    })
}

fn null_pair(m: &Matrix6<f64>) -> Option<NeutralMode> {
    let smallest = |x: Matrix6<f64>| -> Option<Vector6<f64>> {
        let svd = SVD::new(x, false, true);
        let vt = svd.v_t?;
        let k = (0..6).min_by(|&i, &j| svd.singular_values[i].total_cmp(&svd.singular_values[j]))?;
        Some(vt.row(k).transpose())
    };
    let right = smallest(*m)?;
    let left = smallest(m.transpose())?;
    let overlap = left.dot(&right);
    if overlap.abs() < 1e-12 {
        return None;
    }
    Some(NeutralMode {
        right,
        left: left / overlap,
    })
}

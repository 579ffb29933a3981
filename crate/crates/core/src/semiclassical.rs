//! Mean-field threshold and steady branch of the coherently pumped model.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::params::ModelParams;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Branch {
    Below,
    Above,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SemiclassicalState {
    pub alpha0: f64,
    pub beta0: f64,
    pub gamma0: f64,
    pub mu_th: f64,
    /// mu / mu_th.
    pub epsilon: f64,
    pub branch: Branch,
}

impl SemiclassicalState {
    /// Mean occupations (alpha0^2, beta0^2, gamma0^2).
    pub fn populations(&self) -> [f64; 3] {
        [self.alpha0.powi(2), self.beta0.powi(2), self.gamma0.powi(2)]
    }

    /// Phase-space point (alpha, beta, gamma, alpha+, beta+, gamma+).
    pub fn point(&self) -> [Complex64; 6] {
        let (a, b, g) = (self.alpha0, self.beta0, self.gamma0);
        [a, b, g, a, b, g].map(|x| Complex64::new(x, 0.0))
    }
}

/// mu_th = kappa_c sqrt(kappa_a (kappa_b + kappa_bc) / (eta^2 - kappa_a kappa_bc)).
pub fn threshold(p: &ModelParams) -> Result<f64> {
    p.validate()?;
    let gap = p.eta * p.eta - p.kappa_a * p.kappa_bc;
    if gap <= 0.0 {
        return Err(Error::CouplingTooWeak {
            eta_sq: p.eta * p.eta,
            bound: p.kappa_a * p.kappa_bc,
        });
    }
    Ok(p.kappa_c * (p.kappa_a * (p.kappa_b + p.kappa_bc) / gap).sqrt())
}

/// Stationary mean field at pump amplitude `mu` (all phases zero).
pub fn steady_branch(p: &ModelParams, mu: f64) -> Result<SemiclassicalState> {
    let mu_th = threshold(p)?;
    if !(mu.is_finite() && mu >= 0.0) {
        return Err(Error::param("mu", format!("must be finite and >= 0, got {mu}")));
    }
    if p.kappa_c <= 0.0 {
        return Err(Error::param("kappa_c", "must be > 0 for a stationary source mode"));
    }
    let epsilon = mu / mu_th;
    if epsilon <= 1.0 {
        return Ok(SemiclassicalState {
            alpha0: 0.0,
            beta0: 0.0,
            gamma0: mu / p.kappa_c,
            mu_th,
            epsilon,
            branch: Branch::Below,
        });
    }
    let gap = p.eta * p.eta - p.kappa_a * p.kappa_bc;
    let root = (epsilon - 1.0).sqrt();
    Ok(SemiclassicalState {
        alpha0: p.eta * (p.kappa_c * (p.kappa_b + p.kappa_bc)).sqrt() / gap * root,
        beta0: (p.kappa_a * p.kappa_c / gap).sqrt() * root,
        gamma0: mu_th / p.kappa_c,
        mu_th,
        epsilon,
        branch: Branch::Above,
    })
}

/// Steady branch at pump parameter `epsilon`.
pub fn steady_branch_at_epsilon(p: &ModelParams, epsilon: f64) -> Result<SemiclassicalState> {
    let mu_th = threshold(p)?;
    steady_branch(p, epsilon * mu_th)
}

/// Drift of the phase-space equations in the order
/// (alpha, beta, gamma, alpha+, beta+, gamma+), with pump amplitude `mu`.
pub fn drift(p: &ModelParams, mu: f64, v: &[Complex64; 6]) -> [Complex64; 6] {
    let [a, b, g, ad, bd, gd] = *v;
    let (eta, ka, kb, kc, kbc) = (p.eta, p.kappa_a, p.kappa_b, p.kappa_c, p.kappa_bc);
    let one = Complex64::new(1.0, 0.0);
    [
        -ka * a + eta * bd * g,
        -kb * b - kbc * b * (gd * g + one) + eta * ad * g,
        -(kc - kbc * bd * b) * g - eta * a * b + mu,
        -ka * ad + eta * b * gd,
        -kb * bd - kbc * bd * (g * gd + one) + eta * a * gd,
        -(kc - kbc * b * bd) * gd - eta * ad * bd + mu,
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fig4a(mu: f64) -> ModelParams {
        ModelParams::coherent(4.0, 1.0, 1.0, 2.0, 0.0, mu)
    }

    #[test]
    fn threshold_without_heating() {
        let p = ModelParams::coherent(1.7, 0.3, 0.8, 1.2, 0.0, 0.0);
        let expect = 1.2 * (0.3f64 * 0.8).sqrt() / 1.7;
        assert!((threshold(&p).unwrap() - expect).abs() < 1e-15);
        assert!((threshold(&fig4a(0.0)).unwrap() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn weak_coupling_rejected() {
        let p = ModelParams::coherent(0.5, 1.0, 1.0, 1.0, 0.25, 1.0);
        assert!(matches!(threshold(&p), Err(Error::CouplingTooWeak { .. })));
        let p = ModelParams::coherent(0.5 + 1e-9, 1.0, 1.0, 1.0, 0.25, 1.0);
        assert!(threshold(&p).unwrap() > 1e3);
    }

    #[test]
    fn branches_meet_at_threshold() {
        let p = ModelParams::coherent(2.0, 0.5, 0.7, 1.5, 0.3, 0.0);
        let th = threshold(&p).unwrap();
        let below = steady_branch(&p, th).unwrap();
        let above = steady_branch(&p, th * (1.0 + 1e-14)).unwrap();
        assert_eq!(below.alpha0, 0.0);
        assert!((below.gamma0 - above.gamma0).abs() < 1e-9);
        assert!(above.alpha0 < 1e-6);
    }

    #[test]
    fn reference_amplitude_at_eps4() {
        let s = steady_branch_at_epsilon(&fig4a(0.0), 4.0).unwrap();
        let expect = 4.0 * (2.0f64 * 1.0).sqrt() / 16.0 * 3f64.sqrt();
        assert!((s.alpha0 - expect).abs() < 1e-14);
        let mu = 4.0 * s.mu_th;
        let d = drift(&fig4a(mu), mu, &s.point());
        assert!(d.iter().all(|x| x.norm() < 1e-12));
    }

    #[test]
    fn source_pinned_above_threshold() {
        let p = fig4a(0.0);
        let g: Vec<f64> = [1.5, 3.0, 10.0]
            .iter()
            .map(|&e| steady_branch_at_epsilon(&p, e).unwrap().gamma0)
            .collect();
        assert!(g.iter().all(|&x| (x - 0.25).abs() < 1e-15));
    }

    #[test]
    fn below_threshold_fixed_point() {
        let p = ModelParams::coherent(2.0, 0.5, 0.7, 1.5, 0.3, 0.0);
        let mu = 0.5 * threshold(&p).unwrap();
        let s = steady_branch(&p, mu).unwrap();
        assert_eq!(s.branch, Branch::Below);
        assert!(drift(&p, mu, &s.point()).iter().all(|x| x.norm() < 1e-12));
    }
}

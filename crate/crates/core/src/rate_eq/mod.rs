//! Joint photon/atom number statistics after adiabatic elimination of the
//! source mode.
//!
//! States (n, m) count cavity photons and ground-band atoms. The generator
//! acts as dP/dt = Q P with Q[to, from]; pairs are created at A_{n+1,m+1},
//! absorbed at B_{n,m}, and single quanta leave at 2 kappa_a n and
//! 2 kappa_b m.

mod analytic;
mod generator;
mod reduced;

pub use analytic::{analytic_above_threshold, moments, AnalyticMoments, MomentSet, G2_MIN_MEAN};
pub use generator::{
    build_rate_generator, rate_steady_state, rate_steady_state_with_tail_limit, RateGenerator, RateSteadyState,
    RATE_RESIDUAL_TOL, RATE_TAIL_TOL,
};
pub use reduced::{integrate_reduced_system, ReducedState, NORMALIZATION_TOL, REDUCED_STEP_LIMIT};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::params::{ModelParams, PumpModel};

/// Default ratio min(mu_in, mu_out) / max(kappa_a, kappa_b) below which the
/// adiabatic elimination is flagged as questionable.
pub const DEFAULT_VALIDITY_RATIO: f64 = 10.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RateParams {
    pub eta: f64,
    pub kappa_a: f64,
    pub kappa_b: f64,
    pub mu_in: f64,
    pub mu_out: f64,
}

impl RateParams {
    pub fn new(eta: f64, kappa_a: f64, kappa_b: f64, mu_in: f64, mu_out: f64) -> Result<Self> {
        let rp = RateParams { eta, kappa_a, kappa_b, mu_in, mu_out };
        rp.validate()?;
        Ok(rp)
    }

    pub fn from_model(p: &ModelParams) -> Result<Self> {
        match p.pump {
            PumpModel::Incoherent { mu_in, mu_out } => Self::new(p.eta, p.kappa_a, p.kappa_b, mu_in, mu_out),
            PumpModel::Coherent { .. } => Err(Error::param("pump", "rate equation needs the incoherent pump")),
        }
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("eta", self.eta),
            ("kappa_a", self.kappa_a),
            ("kappa_b", self.kappa_b),
            ("mu_in", self.mu_in),
            ("mu_out", self.mu_out),
        ] {
            if !(v.is_finite() && v >= 0.0) {
                return Err(Error::param(name, format!("must be finite and >= 0, got {v}")));
            }
        }
        if self.mu_in + self.mu_out <= 0.0 {
            return Err(Error::param("mu_in", "mu_in + mu_out must be > 0"));
        }
        Ok(())
    }

    /// Saturation constant R = 2 eta^2 / (mu_in + mu_out)^2.
    pub fn r(&self) -> f64 {
        2.0 * self.eta * self.eta / (self.mu_in + self.mu_out).powi(2)
    }

    /// True when both pump rates exceed `ratio` times the larger cavity rate.
    pub fn elimination_valid(&self, ratio: f64) -> bool {
        self.mu_in.min(self.mu_out) >= ratio * self.kappa_a.max(self.kappa_b)
    }
}

/// Pair emission and absorption rates (A_{n,m}, B_{n,m}).
pub fn emission_absorption_rates(rp: &RateParams, n: usize, m: usize) -> (f64, f64) {
    let x = (n * m) as f64 * rp.r();
    let s = x / (1.0 + x);
    (rp.mu_in * s, rp.mu_out * s)
}

/// Probability table P[n][m], 0 <= n <= n_max, 0 <= m <= m_max.
#[derive(Debug, Clone, PartialEq, Default, Serialize)]
pub struct JointDistribution {
    n_max: usize,
    m_max: usize,
    p: Vec<f64>,
}

impl JointDistribution {
    pub fn zeros(n_max: usize, m_max: usize) -> Self {
        JointDistribution {
            n_max,
            m_max,
            p: vec![0.0; (n_max + 1) * (m_max + 1)],
        }
    }

    pub fn from_rows(rows: Vec<Vec<f64>>) -> Self {
        let n_max = rows.len().saturating_sub(1);
        let m_max = rows.first().map_or(0, |r| r.len().saturating_sub(1));
        JointDistribution {
            n_max,
            m_max,
            p: rows.into_iter().flatten().collect(),
        }
    }

    pub(crate) fn from_flat(n_max: usize, m_max: usize, p: Vec<f64>) -> Self {
        assert_eq!(p.len(), (n_max + 1) * (m_max + 1));
        JointDistribution { n_max, m_max, p }
    }

    pub fn n_max(&self) -> usize {
        self.n_max
    }

    pub fn m_max(&self) -> usize {
        self.m_max
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.p
    }

    pub fn get(&self, n: usize, m: usize) -> f64 {
        if n > self.n_max || m > self.m_max {
            0.0
        } else {
            self.p[n * (self.m_max + 1) + m]
        }
    }

    pub fn set(&mut self, n: usize, m: usize, v: f64) {
        let k = n * (self.m_max + 1) + m;
        self.p[k] = v;
    }

    pub fn total(&self) -> f64 {
        self.p.iter().sum()
    }

    pub fn marginal_n(&self) -> Vec<f64> {
        (0..=self.n_max).map(|n| (0..=self.m_max).map(|m| self.get(n, m)).sum()).collect()
    }

    pub fn marginal_m(&self) -> Vec<f64> {
        (0..=self.m_max).map(|m| (0..=self.n_max).map(|n| self.get(n, m)).sum()).collect()
    }

    /// Probability on the top row or column.
    pub fn top_edge_mass(&self) -> f64 {
        let mut s = 0.0;
        for n in 0..=self.n_max {
            for m in 0..=self.m_max {
                if n == self.n_max || m == self.m_max {
                    s += self.get(n, m);
                }
            }
        }
        s
    }

    /// max |P_{n,m} - P_{m,n}| over the common square.
    pub fn asymmetry(&self) -> f64 {
        let k = self.n_max.max(self.m_max);
        let mut worst: f64 = 0.0;
        for n in 0..=k {
            for m in 0..n {
                worst = worst.max((self.get(n, m) - self.get(m, n)).abs());
            }
        }
        worst
    }

    /// Total-variation distance; grids of different size are zero-padded.
    pub fn total_variation(&self, other: &JointDistribution) -> f64 {
        let nn = self.n_max.max(other.n_max);
        let mm = self.m_max.max(other.m_max);
        let mut s = 0.0;
        for n in 0..=nn {
            for m in 0..=mm {
                s += (self.get(n, m) - other.get(n, m)).abs();
            }
        }
        0.5 * s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rates_vanish_without_pairs() {
        let rp = RateParams::new(1.0, 0.1, 0.1, 2.0, 1.0).unwrap();
        assert_eq!(emission_absorption_rates(&rp, 0, 7), (0.0, 0.0));
        assert_eq!(emission_absorption_rates(&rp, 7, 0), (0.0, 0.0));
    }

    #[test]
    fn rates_saturate() {
        let rp = RateParams::new(1.0, 0.1, 0.1, 2.0, 1.0).unwrap();
        let (a, b) = emission_absorption_rates(&rp, 1 << 20, 1 << 20);
        assert!((a - 2.0).abs() < 1e-9 && (b - 1.0).abs() < 1e-9);
    }

    #[test]
    fn hand_evaluated_rates() {
        let eta = 1.3;
        let rp = RateParams::new(eta, 0.1, 0.1, eta, eta).unwrap();
        assert!((rp.r() - 0.5).abs() < 1e-15);
        let (a, b) = emission_absorption_rates(&rp, 1, 1);
        assert!((a - eta / 3.0).abs() < 1e-15 && (b - eta / 3.0).abs() < 1e-15);
    }

    #[test]
    fn total_variation_pads() {
        let mut p = JointDistribution::zeros(1, 1);
        p.set(0, 0, 1.0);
        let mut q = JointDistribution::zeros(2, 2);
        q.set(2, 2, 1.0);
        assert_eq!(p.total_variation(&q), 1.0);
        assert_eq!(p.total_variation(&p), 0.0);
    }
}

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::params::ModelParams;
use crate::semiclassical::{drift, Branch, SemiclassicalState};

/// Norm above which a trajectory counts as divergent.
pub const DEFAULT_DIVERGENCE_BOUND: f64 = 1e6;
/// Largest tolerated fraction of divergent trajectories.
pub const MAX_DIVERGENT_FRACTION: f64 = 0.01;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SdeConfig {
    pub n_traj: usize,
    /// Integration time; statistics are taken at t.
    pub t: f64,
    pub dt: f64,
    pub seed: u64,
    pub divergence_bound: f64,
    /// Switches the stochastic terms; without them only the drift remains.
    pub noise: bool,
    /// Real offset added to the steady state at t = 0.
    pub perturbation: [f64; 6],
}

impl SdeConfig {
    pub fn new(n_traj: usize, t: f64, dt: f64, seed: u64) -> Self {
        SdeConfig {
            n_traj,
            t,
            dt,
            seed,
            divergence_bound: DEFAULT_DIVERGENCE_BOUND,
            noise: true,
            perturbation: [0.0; 6],
        }
    }

    fn validate(&self) -> Result<()> {
        if self.n_traj == 0 {
            return Err(Error::param("n_traj", "must be >= 1"));
        }
        if !(self.t.is_finite() && self.t >= 0.0) {
            return Err(Error::param("t", "must be finite and >= 0"));
        }
        if !(self.dt.is_finite() && self.dt > 0.0) {
            return Err(Error::param("dt", "must be finite and > 0"));
        }
        if !(self.divergence_bound > 0.0) {
            return Err(Error::param("divergence_bound", "must be > 0"));
        }
        Ok(())
    }
}

/// Sample mean with its standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Estimate {
    pub mean: f64,
    pub std_err: f64,
}

impl Estimate {
    fn from_samples(x: &[f64]) -> Estimate {
        let n = x.len() as f64;
        if x.is_empty() {
            return Estimate { mean: f64::NAN, std_err: f64::NAN };
        }
        let mean = x.iter().sum::<f64>() / n;
        let var = if x.len() > 1 {
            x.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0)
        } else {
            0.0
        };
        Estimate {
            mean,
            std_err: (var / n).sqrt(),
        }
    }

    /// |mean - target| in units of the standard error.
    pub fn sigmas_from(&self, target: f64) -> f64 {
        (self.mean - target).abs() / self.std_err
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SdeStatistics {
    /// Ensemble means of Re(x+ x) for a, b, c.
    pub intensity: [Estimate; 3],
    /// Var(I_x) / x0^2, the quadrature variance <dx^2> to leading order.
    pub quadrature_var: [Estimate; 3],
    pub total: usize,
    pub diverged: usize,
    pub divergent_fraction: f64,
    pub steps: usize,
}

type Point = [Complex64; 6];

fn pair_noise(d: Complex64, w1: f64, w2: f64) -> (Complex64, Complex64) {
    let z = (d * 0.5).sqrt();
    (z * Complex64::new(w1, w2), z * Complex64::new(w1, -w2))
}

fn trajectory(p: &ModelParams, mu: f64, start: Point, cfg: &SdeConfig, steps: usize, h: f64, index: usize) -> Option<Point> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    rng.set_stream(index as u64);
    let sq = h.sqrt();
    let (eta, kbc) = (p.eta, p.kappa_bc);
    let mut v = start;
    for _ in 0..steps {
        let f = drift(p, mu, &v);
        let mut next = [Complex64::default(); 6];
        for i in 0..6 {
            next[i] = v[i] + f[i] * h;
        }
        if cfg.noise {
            let mut w = [0.0; 10];
            for x in w.iter_mut() {
                *x = StandardNormal.sample(&mut rng);
                *x *= sq;
            }
            let [a, b, g, ad, bd, gd] = v;
            let _ = (a, ad);
            let pairs = [
                (0, 1, eta * g),
                (3, 4, eta * gd),
                (1, 2, -kbc * b * g),
                (4, 5, -kbc * bd * gd),
                (2, 5, 2.0 * kbc * b * bd),
            ];
            for (k, &(i, j, d)) in pairs.iter().enumerate() {
                let (xi, xj) = pair_noise(d, w[2 * k], w[2 * k + 1]);
                next[i] += xi;
                next[j] += xj;
            }
        }
        v = next;
        let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if !(norm <= cfg.divergence_bound) {
            return None;
        }
    }
    Some(v)
}

/// Ito Euler-Maruyama integration of the positive-P equations for an
/// ensemble started at `ss`; divergent trajectories are dropped and counted.
///
/// Trajectory k draws from an independent ChaCha8 stream (seed, k), and the
/// ensemble is reduced in index order, so results do not depend on the
/// thread count.
pub fn run_trajectories(p: &ModelParams, ss: &SemiclassicalState, cfg: &SdeConfig) -> Result<SdeStatistics> {
    p.validate()?;
    cfg.validate()?;
    if ss.branch != Branch::Above {
        return Err(Error::BelowThreshold(format!(
            "trajectories are sampled on the lasing branch (epsilon = {})",
            ss.epsilon
        )));
    }
    let mu = ss.epsilon * ss.mu_th;
    let mut start = ss.point();
    for (z, d) in start.iter_mut().zip(cfg.perturbation) {
        *z += d;
    }
    let steps = (cfg.t / cfg.dt).ceil() as usize;
    let h = if steps > 0 { cfg.t / steps as f64 } else { 0.0 };

    let finals: Vec<Option<Point>> = (0..cfg.n_traj)
        .into_par_iter()
        .map(|k| trajectory(p, mu, start, cfg, steps, h, k))
        .collect();

    let kept: Vec<&Point> = finals.iter().flatten().collect();
    let diverged = cfg.n_traj - kept.len();
    let amps = [ss.alpha0, ss.beta0, ss.gamma0];
    let mut intensity = [Estimate { mean: f64::NAN, std_err: f64::NAN }; 3];
    let mut quadrature_var = intensity;
    for x in 0..3 {
        let samples: Vec<f64> = kept.iter().map(|v| (v[x + 3] * v[x]).re).collect();
        let est = Estimate::from_samples(&samples);
        intensity[x] = est;
        let sq: Vec<f64> = samples
            .iter()
            .map(|i| (i - est.mean).powi(2) / (amps[x] * amps[x]))
            .collect();
        quadrature_var[x] = Estimate::from_samples(&sq);
    }
    Ok(SdeStatistics {
        intensity,
        quadrature_var,
        total: cfg.n_traj,
        diverged,
        divergent_fraction: diverged as f64 / cfg.n_traj as f64,
        steps,
    })
}

/// As [`run_trajectories`], failing when more than 1% of the trajectories
/// diverge.
pub fn sde_trajectories(p: &ModelParams, ss: &SemiclassicalState, cfg: &SdeConfig) -> Result<SdeStatistics> {
    let stats = run_trajectories(p, ss, cfg)?;
    if stats.divergent_fraction > MAX_DIVERGENT_FRACTION {
        return Err(Error::Divergence {
            diverged: stats.diverged,
            total: stats.total,
            fraction: stats.divergent_fraction,
            limit: MAX_DIVERGENT_FRACTION,
        });
    }
    Ok(stats)
}

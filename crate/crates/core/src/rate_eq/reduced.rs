use super::{JointDistribution, RateParams};
use crate::error::{Error, Result};

/// Largest allowed dt times the rate bound of the reduced system.
pub const REDUCED_STEP_LIMIT: f64 = 0.5;
/// Largest allowed drift of sum(p0 + p1).
pub const NORMALIZATION_TOL: f64 = 1e-6;

/// Source mode holding zero (p0) or one (p1) atom, plus the real coherence
/// V_{n,m} between |n-1, m-1, 1> and |n, m, 0>.
#[derive(Debug, Clone, PartialEq)]
pub struct ReducedState {
    pub n_max: usize,
    pub m_max: usize,
    pub p0: Vec<f64>,
    pub p1: Vec<f64>,
    pub v: Vec<f64>,
}

impl ReducedState {
    pub fn zeros(n_max: usize, m_max: usize) -> Self {
        let k = (n_max + 1) * (m_max + 1);
        ReducedState {
            n_max,
            m_max,
            p0: vec![0.0; k],
            p1: vec![0.0; k],
            v: vec![0.0; k],
        }
    }

    /// Empty laser modes, source mode empty.
    pub fn vacuum(n_max: usize, m_max: usize) -> Self {
        let mut s = Self::zeros(n_max, m_max);
        s.p0[0] = 1.0;
        s
    }

    fn idx(&self, n: usize, m: usize) -> usize {
        n * (self.m_max + 1) + m
    }

    /// P_{n,m} = p0 + p1.
    pub fn joint(&self) -> JointDistribution {
        let p = self.p0.iter().zip(&self.p1).map(|(a, b)| a + b).collect();
        JointDistribution::from_flat(self.n_max, self.m_max, p)
    }

    pub fn total(&self) -> f64 {
        self.p0.iter().chain(&self.p1).sum()
    }

    fn axpy(&self, k: &ReducedState, h: f64) -> ReducedState {
        let f = |x: &[f64], y: &[f64]| x.iter().zip(y).map(|(a, b)| a + h * b).collect();
        ReducedState {
            n_max: self.n_max,
            m_max: self.m_max,
            p0: f(&self.p0, &k.p0),
            p1: f(&self.p1, &k.p1),
            v: f(&self.v, &k.v),
        }
    }
}

/// Time derivative of the reduced system; entries outside the grid, and V at
/// n = 0 or m = 0, are zero.
pub(crate) fn derivative(rp: &RateParams, s: &ReducedState) -> ReducedState {
    let (nn, mm) = (s.n_max, s.m_max);
    let mut d = ReducedState::zeros(nn, mm);
    let get = |arr: &[f64], n: usize, m: usize| if n > nn || m > mm { 0.0 } else { arr[s.idx(n, m)] };
    let (ka, kb, eta) = (rp.kappa_a, rp.kappa_b, rp.eta);
    let (mi, mo) = (rp.mu_in, rp.mu_out);
    for n in 0..=nn {
        for m in 0..=mm {
            let i = s.idx(n, m);
            let (x, y) = (n as f64, m as f64);
            let p0 = s.p0[i];
            let p1 = s.p1[i];
            let v_here = s.v[i];
            let v_up = get(&s.v, n + 1, m + 1);
            let loss = |arr: &[f64], here: f64| {
                2.0 * ka * ((x + 1.0) * get(arr, n + 1, m) - x * here)
                    + 2.0 * kb * ((y + 1.0) * get(arr, n, m + 1) - y * here)
            };
            d.p0[i] = eta * (x * y).sqrt() * v_here + loss(&s.p0, p0) - 2.0 * mi * p0 + 2.0 * mo * p1;
            d.p1[i] = -eta * ((x + 1.0) * (y + 1.0)).sqrt() * v_up + loss(&s.p1, p1) + 2.0 * mi * p0 - 2.0 * mo * p1;
            if n > 0 && m > 0 {
                d.v[i] = -(mi + mo) * v_here
                    + 2.0 * eta * (x * y).sqrt() * (get(&s.p1, n - 1, m - 1) - p0)
                    + 2.0 * ka * (x * (x + 1.0)).sqrt() * get(&s.v, n + 1, m)
                    - (2.0 * x - 1.0) * ka * v_here
                    + 2.0 * kb * (y * (y + 1.0)).sqrt() * get(&s.v, n, m + 1)
                    - (2.0 * y - 1.0) * kb * v_here;
            }
        }
    }
    d
}

fn rate_bound(rp: &RateParams, n_max: usize, m_max: usize) -> f64 {
    let (x, y) = (n_max as f64, m_max as f64);
    3.0 * (rp.mu_in + rp.mu_out)
        + 2.0 * rp.kappa_a * (2.0 * x + 1.0)
        + 2.0 * rp.kappa_b * (2.0 * y + 1.0)
        + 4.0 * rp.eta * ((x + 1.0) * (y + 1.0)).sqrt()
}

/// RK4 integration of the reduced p0/p1/V system up to time `t` with the
/// largest uniform step not exceeding `dt`.
pub fn integrate_reduced_system(rp: &RateParams, s0: &ReducedState, t: f64, dt: f64) -> Result<ReducedState> {
    rp.validate()?;
    if !(t >= 0.0 && t.is_finite()) {
        return Err(Error::param("t", "must be finite and >= 0"));
    }
    if !(dt > 0.0) {
        return Err(Error::param("dt", "must be > 0"));
    }
    let product = dt * rate_bound(rp, s0.n_max, s0.m_max);
    if product > REDUCED_STEP_LIMIT {
        return Err(Error::StepSize {
            dt,
            product,
            limit: REDUCED_STEP_LIMIT,
        });
    }
    let steps = (t / dt).ceil() as usize;
    let mut s = s0.clone();
    if steps > 0 {
        let h = t / steps as f64;
        for _ in 0..steps {
            let k1 = derivative(rp, &s);
            let k2 = derivative(rp, &s.axpy(&k1, 0.5 * h));
            let k3 = derivative(rp, &s.axpy(&k2, 0.5 * h));
            let k4 = derivative(rp, &s.axpy(&k3, h));
            s = s.axpy(&k1, h / 6.0).axpy(&k2, h / 3.0).axpy(&k3, h / 3.0).axpy(&k4, h / 6.0);
        }
    }
    let drift = (s.total() - s0.total()).abs();
    if drift > NORMALIZATION_TOL {
        return Err(Error::NormalizationDrift { drift });
    }
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn decoupled_source_balances() {
        let rp = RateParams::new(0.0, 0.2, 0.3, 4.0, 1.0).unwrap();
        let mut s0 = ReducedState::zeros(3, 3);
        let (i, j) = (s0.idx(2, 1), s0.idx(0, 0));
        s0.p0[i] = 0.5;
        s0.p0[j] = 0.5;
        let s = integrate_reduced_system(&rp, &s0, 3.0, 0.01).unwrap();
        for i in 0..s.p0.len() {
            if s.p0[i] > 1e-8 {
                assert!((s.p1[i] / s.p0[i] - 4.0).abs() < 1e-6, "{i}");
            }
        }
    }

    #[test]
    fn pump_terms_cancel_in_joint_distribution() {
        let rp = RateParams::new(0.0, 0.0, 0.0, 3.0, 2.0).unwrap();
        let mut s = ReducedState::zeros(2, 2);
        for (k, x) in s.p0.iter_mut().enumerate() {
            *x = 0.1 + 0.01 * k as f64;
        }
        for (k, x) in s.p1.iter_mut().enumerate() {
            *x = 0.05 * (k as f64).sin().abs();
        }
        let d = derivative(&rp, &s);
        for i in 0..d.p0.len() {
            assert!((d.p0[i] + d.p1[i]).abs() < 1e-15);
        }
    }

    #[test]
    fn probability_conserved_with_coupling() {
        let rp = RateParams::new(2.0, 0.3, 0.4, 6.0, 3.0).unwrap();
        let s = integrate_reduced_system(&rp, &ReducedState::vacuum(4, 4), 5.0, 0.005).unwrap();
        assert!((s.total() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn coarse_step_rejected() {
        let rp = RateParams::new(2.0, 0.3, 0.4, 6.0, 3.0).unwrap();
        assert!(integrate_reduced_system(&rp, &ReducedState::vacuum(4, 4), 1.0, 0.5).is_err());
    }
}

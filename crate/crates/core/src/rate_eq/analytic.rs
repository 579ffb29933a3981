use serde::Serialize;

use super::{JointDistribution, RateParams};
use crate::error::{Error, Result};

/// Mean below which g2 ratios are reported as undefined.
pub const G2_MIN_MEAN: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MomentSet {
    pub mean_n: f64,
    pub mean_m: f64,
    pub n2: f64,
    pub m2: f64,
    pub nm: f64,
    /// Var(n - m).
    pub var_diff: f64,
    pub g2_n: Option<f64>,
    pub g2_m: Option<f64>,
    /// <nm> / (<n><m>).
    pub g_nm: Option<f64>,
}

impl MomentSet {
    fn from_raw(mean_n: f64, mean_m: f64, n2: f64, m2: f64, nm: f64) -> Self {
        let var_diff = n2 + m2 - 2.0 * nm - (mean_n - mean_m).powi(2);
        let g2 = |mean: f64, sq: f64| (mean >= G2_MIN_MEAN).then(|| (sq - mean) / (mean * mean));
        MomentSet {
            mean_n,
            mean_m,
            n2,
            m2,
            nm,
            var_diff,
            g2_n: g2(mean_n, n2),
            g2_m: g2(mean_m, m2),
            g_nm: (mean_n >= G2_MIN_MEAN && mean_m >= G2_MIN_MEAN).then(|| nm / (mean_n * mean_m)),
        }
    }
}

/// Moments of `p` by direct summation (p is assumed normalized).
pub fn moments(p: &JointDistribution) -> MomentSet {
    let (mut s_n, mut s_m, mut s_n2, mut s_m2, mut s_nm) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for n in 0..=p.n_max() {
        for m in 0..=p.m_max() {
            let w = p.get(n, m);
            let (x, y) = (n as f64, m as f64);
            s_n += x * w;
            s_m += y * w;
            s_n2 += x * x * w;
            s_m2 += y * y * w;
            s_nm += x * y * w;
        }
    }
    MomentSet::from_raw(s_n, s_m, s_n2, s_m2, s_nm)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AnalyticMoments {
    pub moments: MomentSet,
    /// False when mu_in - mu_out is not well above 2 min(kappa_a, kappa_b).
    pub valid: bool,
}

/// Stationary solution of the closed moment equations obtained with the
/// pair rates saturated (A -> mu_in, B -> mu_out):
///
/// <n> = D/2ka, <n^2> = [2(D+ka)<n> + S]/4ka, <nm> = [D(<n>+<m>) + S]/2(ka+kb)
///
/// with D = mu_in - mu_out, S = mu_in + mu_out. For ka = kb = k this gives
/// g2 = 1 + (mu_out/2k)/<n>^2 and g_nm = g2 + 1/(2<n>).
pub fn analytic_above_threshold(rp: &RateParams) -> Result<AnalyticMoments> {
    rp.validate()?;
    let d = rp.mu_in - rp.mu_out;
    if d <= 0.0 {
        return Err(Error::BelowThreshold(format!(
            "mu_in = {} does not exceed mu_out = {}",
            rp.mu_in, rp.mu_out
        )));
    }
    if rp.kappa_a <= 0.0 || rp.kappa_b <= 0.0 {
        return Err(Error::param("kappa_a", "both cavity rates must be > 0"));
    }
    let s = rp.mu_in + rp.mu_out;
    let (ka, kb) = (rp.kappa_a, rp.kappa_b);
    let n = d / (2.0 * ka);
    let m = d / (2.0 * kb);
    let n2 = (2.0 * (d + ka) * n + s) / (4.0 * ka);
    let m2 = (2.0 * (d + kb) * m + s) / (4.0 * kb);
    let nm = (d * (n + m) + s) / (2.0 * (ka + kb));
    Ok(AnalyticMoments {
        moments: MomentSet::from_raw(n, m, n2, m2, nm),
        valid: d > 20.0 * ka.min(kb),
    })
}

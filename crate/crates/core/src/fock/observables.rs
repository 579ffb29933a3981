use serde::Serialize;

use super::state::DensityMatrix;
use crate::params::ModelParams;
use crate::rate_eq::JointDistribution;

/// Probability allowed in the top Fock layer of any mode before a result is
/// flagged as truncation-limited.
pub const TAIL_TOL: f64 = 1e-4;
/// Mean occupation below which g2 ratios are reported as undefined.
pub const G2_MIN_MEAN: f64 = 1e-12;

#[derive(Debug, Clone, Serialize)]
pub struct ObservableSet {
    pub n_a: f64,
    pub n_b: f64,
    pub n_c: f64,
    /// 2 kappa_a <a+ a>.
    pub photon_rate: f64,
    /// 2 kappa_b <b+ b>.
    pub atom_rate: f64,
    pub g2_a: Option<f64>,
    pub g2_b: Option<f64>,
    pub g2_c: Option<f64>,
    /// <a+a b+b> / (<a+a><b+b>).
    pub g_ab: Option<f64>,
    /// Probability in the top layer of each mode.
    pub tail: [f64; 3],
    pub truncation_flag: bool,
    #[serde(skip)]
    pub joint: JointDistribution,
}

/// Number statistics of `rho`; all quantities come from the diagonal.
pub fn observables(rho: &DensityMatrix, p: &ModelParams) -> ObservableSet {
    let t = *rho.truncation();
    let mut s1 = [0.0f64; 3];
    let mut s2 = [0.0f64; 3];
    let mut tail = [0.0f64; 3];
    let mut nm = 0.0;
    let mut joint = vec![vec![0.0; t.n_b + 1]; t.n_a + 1];
    for i in 0..t.dim() {
        let pr = rho.population(i);
        let (na, nb, nc) = t.occupations(i);
        let occ = [na as f64, nb as f64, nc as f64];
        for k in 0..3 {
            s1[k] += occ[k] * pr;
            s2[k] += occ[k] * (occ[k] - 1.0) * pr;
        }
        nm += occ[0] * occ[1] * pr;
        if na == t.n_a {
            tail[0] += pr;
        }
        if nb == t.n_b {
            tail[1] += pr;
        }
        if nc == t.n_c {
            tail[2] += pr;
        }
        joint[na][nb] += pr;
    }
    let g2 = |k: usize| (s1[k] >= G2_MIN_MEAN).then(|| s2[k] / (s1[k] * s1[k]));
    ObservableSet {
        n_a: s1[0],
        n_b: s1[1],
        n_c: s1[2],
        photon_rate: 2.0 * p.kappa_a * s1[0],
        atom_rate: 2.0 * p.kappa_b * s1[1],
        g2_a: g2(0),
        g2_b: g2(1),
        g2_c: g2(2),
        g_ab: (s1[0] >= G2_MIN_MEAN && s1[1] >= G2_MIN_MEAN).then(|| nm / (s1[0] * s1[1])),
        tail,
        truncation_flag: tail.iter().any(|&m| m > TAIL_TOL),
        joint: JointDistribution::from_rows(joint),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::Truncation;
    use num_complex::Complex64;

    fn p() -> ModelParams {
        ModelParams::incoherent(1.0, 0.5, 0.25, 1.0, 1.0)
    }

    #[test]
    fn coherent_state_is_poissonian() {
        let t = Truncation::new(40, 1, 1);
        let z = Complex64::new(0.6, 0.8);
        let rho = DensityMatrix::coherent(&t, [z, Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0)]);
        let o = observables(&rho, &p());
        assert!((o.g2_a.unwrap() - 1.0).abs() < 1e-10);
        assert!((o.n_a - 1.0).abs() < 1e-10);
        assert!(o.g2_b.is_none());
        assert!((o.photon_rate - 1.0).abs() < 1e-10);
    }

    #[test]
    fn thermal_state_is_bunched() {
        let t = Truncation::new(200, 1, 1);
        let rho = DensityMatrix::thermal(&t, [0.5, 0.0, 0.0]);
        let o = observables(&rho, &p());
        assert!((o.g2_a.unwrap() - 2.0).abs() < 1e-10);
        assert!(!o.truncation_flag);
    }

    #[test]
    fn joint_distribution_marginalizes_c() {
        let t = Truncation::new(2, 2, 2);
        let rho = DensityMatrix::thermal(&t, [0.3, 0.4, 0.5]);
        let o = observables(&rho, &p());
        assert!((o.joint.total() - 1.0).abs() < 1e-14);
        let pa0: f64 = (0..3).map(|m| o.joint.get(0, m)).sum();
        let q: f64 = 0.3 / 1.3;
        assert!((pa0 - 1.0 / (1.0 + q + q * q)).abs() < 1e-14);
        assert!(o.truncation_flag);
    }
}

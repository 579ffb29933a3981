use rayon::prelude::*;

use super::config::{Method, ScenarioConfig};
use super::table::{PointResult, ResultTable};
use crate::error::{Error, Result};
use crate::fluctuations::{
    build_fluctuation_model, intensity_difference_spectrum, output_spectrum, run_trajectories, stationary_covariance,
    stationary_covariance_lyapunov, statistics_from, ModeLabel, SdeConfig, MAX_DIVERGENT_FRACTION,
};
use crate::fock::{build_liouvillian, observables, steady_state};
use crate::params::{ModelParams, PumpModel};
use crate::rate_eq::{
    analytic_above_threshold, build_rate_generator, moments, rate_steady_state, RateParams, DEFAULT_VALIDITY_RATIO,
};
use crate::semiclassical::{drift, steady_branch, steady_branch_at_epsilon, threshold, Branch};

/// Run `cfg` over its scan grid. Only validation problems are returned as
/// errors; solver failures are recorded on their rows.
pub fn run_scenario(cfg: &ScenarioConfig) -> Result<ResultTable> {
    let errs = cfg.errors();
    if !errs.is_empty() {
        return Err(Error::Config(errs));
    }
    let (parameter, grid) = match &cfg.scan {
        Some(s) => (s.parameter.clone(), s.grid()),
        None => ("point".to_string(), vec![0.0]),
    };
    let points: Vec<PointResult> = grid
        .par_iter()
        .map(|&v| match evaluate(cfg, v) {
            Ok(p) => p,
            Err(e) => PointResult::failed(e),
        })
        .collect();
    Ok(ResultTable::from_points(&cfg.name, cfg.method.name(), &parameter, &grid, points))
}

fn set_field(p: &mut ModelParams, name: &str, v: f64) {
    match name {
        "eta" => p.eta = v,
        "kappa_a" => p.kappa_a = v,
        "kappa_b" => p.kappa_b = v,
        "kappa_c" => p.kappa_c = v,
        "kappa_bc" => p.kappa_bc = v,
        "kappa_cb" => p.kappa_cb = v,
        "mu" => p.pump = PumpModel::Coherent { mu: v },
        "mu_in" | "mu_out" => {
            if let PumpModel::Incoherent { mu_in, mu_out } = &mut p.pump {
                if name == "mu_in" {
                    *mu_in = v;
                } else {
                    *mu_out = v;
                }
            }
        }
        _ => {}
    }
}

/// Parameters at one scan point, with the coherent pump resolved from
/// `epsilon` or `target_intensity` when given.
pub fn point_params(cfg: &ScenarioConfig, value: f64) -> Result<ModelParams> {
    let mut p = cfg.params;
    let mut eps = cfg.epsilon;
    if let Some(s) = &cfg.scan {
        for name in std::iter::once(&s.parameter).chain(&s.tied) {
            if name == "epsilon" {
                eps = Some(value);
            } else {
                set_field(&mut p, name, value);
            }
        }
    }
    p.validate()?;
    if let PumpModel::Coherent { .. } = p.pump {
        if let Some(target) = cfg.target_intensity {
            let slope = steady_branch_at_epsilon(&p, 2.0)?.alpha0.powi(2);
            eps = Some(1.0 + target / slope);
        }
        if let Some(e) = eps {
            p = p.with_mu(e * threshold(&p)?);
        }
    }
    Ok(p)
}

fn evaluate(cfg: &ScenarioConfig, value: f64) -> Result<PointResult> {
    let p = point_params(cfg, value)?;
    match cfg.method {
        Method::MasterEq => master_point(cfg, &p),
        Method::RateEq => rate_point(cfg, &p),
        Method::Semiclassical => semiclassical_point(&p),
        Method::Fluctuations => fluctuation_point(cfg, &p),
        Method::Sde => sde_point(cfg, &p),
    }
}

fn master_point(cfg: &ScenarioConfig, p: &ModelParams) -> Result<PointResult> {
    let l = build_liouvillian(p, &cfg.truncation, cfg.dim_cap)?;
    let ss = steady_state(&l)?;
    let o = observables(&ss.rho, p);
    let mut r = PointResult::default();
    r.push("n_a", o.n_a);
    r.push("n_b", o.n_b);
    r.push("n_c", o.n_c);
    r.push("photon_rate", o.photon_rate);
    r.push("atom_rate", o.atom_rate);
    r.push_opt("g2_a", o.g2_a);
    r.push_opt("g2_b", o.g2_b);
    r.push_opt("g2_c", o.g2_c);
    r.push_opt("g_ab", o.g_ab);
    r.push("tail_a", o.tail[0]);
    r.push("tail_b", o.tail[1]);
    r.push("tail_c", o.tail[2]);
    r.push("min_eigenvalue", ss.min_eigenvalue);
    r.residual = Some(ss.residual);
    if o.truncation_flag {
        r.flags.push("truncation".into());
    }
    Ok(r)
}

fn rate_point(cfg: &ScenarioConfig, p: &ModelParams) -> Result<PointResult> {
    let rp = RateParams::from_model(p)?;
    let gen = build_rate_generator(&rp, cfg.grid.n_max, cfg.grid.m_max, cfg.dim_cap)?;
    let ss = rate_steady_state(&gen)?;
    let m = moments(&ss.dist);
    let mut r = PointResult::default();
    r.push("mean_n", m.mean_n);
    r.push("mean_m", m.mean_m);
    r.push_opt("g2_n", m.g2_n);
    r.push_opt("g2_m", m.g2_m);
    r.push_opt("g_nm", m.g_nm);
    r.push("var_diff", m.var_diff);
    r.push("photon_rate", 2.0 * rp.kappa_a * m.mean_n);
    r.push("atom_rate", 2.0 * rp.kappa_b * m.mean_m);
    r.push("top_edge_mass", ss.top_edge_mass);
    r.push("suppressed_flux", ss.suppressed_flux);
    r.push("asymmetry", ss.dist.asymmetry());
    let analytic = analytic_above_threshold(&rp).ok();
    let am = analytic.map(|a| a.moments);
    r.push_opt("analytic_mean_n", am.map(|m| m.mean_n));
    r.push_opt("analytic_g2_n", am.and_then(|m| m.g2_n));
    r.push_opt("analytic_g_nm", am.and_then(|m| m.g_nm));
    r.push_opt("analytic_var_diff", am.map(|m| m.var_diff));
    if !analytic.is_some_and(|a| a.valid) {
        r.flags.push("analytic_invalid".into());
    }
    if !rp.elimination_valid(DEFAULT_VALIDITY_RATIO) {
        r.flags.push("elimination".into());
    }
    r.residual = Some(ss.residual);
    Ok(r)
}

fn semiclassical_point(p: &ModelParams) -> Result<PointResult> {
    let mu = p.mu()?;
    let s = steady_branch(p, mu)?;
    let res = drift(p, mu, &s.point()).iter().fold(0.0f64, |a, z| a.max(z.norm()));
    let mut r = PointResult::default();
    r.push("epsilon", s.epsilon);
    r.push("mu", mu);
    r.push("mu_th", s.mu_th);
    r.push("alpha0", s.alpha0);
    r.push("beta0", s.beta0);
    r.push("gamma0", s.gamma0);
    let pops = s.populations();
    r.push("intensity_a", pops[0]);
    r.push("intensity_b", pops[1]);
    r.push("intensity_c", pops[2]);
    r.push("above", if s.branch == Branch::Above { 1.0 } else { 0.0 });
    r.residual = Some(res);
    Ok(r)
}

fn fluctuation_point(cfg: &ScenarioConfig, p: &ModelParams) -> Result<PointResult> {
    let mu = p.mu()?;
    let ss = steady_branch(p, mu)?;
    let fm = build_fluctuation_model(p, &ss)?;
    fm.require_stationary()?;
    let cov = stationary_covariance(&fm)?;
    let lyap = stationary_covariance_lyapunov(&fm)?;
    let st = statistics_from(&fm, &cov.c);
    let pops = ss.populations();
    let mut r = PointResult::default();
    r.push("epsilon", ss.epsilon);
    r.push("mu", mu);
    r.push("intensity_a_mf", pops[0]);
    r.push("intensity_b_mf", pops[1]);
    r.push("intensity_c_mf", pops[2]);
    r.push("correction_a", st.corrections[0]);
    r.push("correction_b", st.corrections[1]);
    r.push("correction_c", st.corrections[2]);
    r.push("intensity_a", pops[0] + st.corrections[0]);
    r.push("quad_var_a", st.quadratures.var[0]);
    r.push("quad_var_b", st.quadratures.var[1]);
    r.push("quad_cross_ab", st.quadratures.cross_ab);
    r.push("g2_a", st.g2[0]);
    r.push("g2_b", st.g2[1]);
    r.push("g2_c", st.g2[2]);
    r.push("g_ab", st.g_ab);
    r.push("linearization_ratio", st.linearization_ratio);
    r.push("max_re", fm.max_re);
    let s0 = intensity_difference_spectrum(&fm, &[0.0])?;
    r.push("s0_norm", s0.normalized[0]);
    r.push("v_a0", output_spectrum(&fm, ModeLabel::A, &[0.0])?[0]);
    if !st.linearization_ok {
        r.flags.push("linearization".into());
    }
    r.residual = Some((cov.c - lyap).amax() / lyap.amax());
    if let Some(sp) = &cfg.spectrum {
        let n = sp.points;
        let omega: Vec<f64> = (0..n).map(|i| sp.omega_max * i as f64 / (n - 1) as f64).collect();
        r.series.push(("V_a".into(), omega.clone(), output_spectrum(&fm, ModeLabel::A, &omega)?));
        r.series.push(("V_b".into(), omega.clone(), output_spectrum(&fm, ModeLabel::B, &omega)?));
        r.series.push(("S_norm".into(), omega.clone(), intensity_difference_spectrum(&fm, &omega)?.normalized));
    }
    Ok(r)
}

fn sde_point(cfg: &ScenarioConfig, p: &ModelParams) -> Result<PointResult> {
    let mu = p.mu()?;
    let ss = steady_branch(p, mu)?;
    let fm = build_fluctuation_model(p, &ss)?;
    let st = statistics_from(&fm, &stationary_covariance(&fm)?.c);
    let mut sc = SdeConfig::new(cfg.sde.n_traj, cfg.sde.t, cfg.sde.dt, cfg.seed);
    sc.divergence_bound = cfg.sde.divergence_bound;
    let s = run_trajectories(p, &ss, &sc)?;
    let mut r = PointResult::default();
    r.push("epsilon", ss.epsilon);
    r.push("intensity_a", s.intensity[0].mean);
    r.push("intensity_a_err", s.intensity[0].std_err);
    r.push("quad_var_a", s.quadrature_var[0].mean);
    r.push("quad_var_a_err", s.quadrature_var[0].std_err);
    r.push("intensity_a_lin", ss.alpha0.powi(2) + st.corrections[0]);
    r.push("quad_var_a_lin", st.quadratures.var[0]);
    r.push("divergent_fraction", s.divergent_fraction);
    r.push("trajectories", s.total as f64);
    if s.divergent_fraction > MAX_DIVERGENT_FRACTION {
        r.error = Some(
            Error::Divergence {
                diverged: s.diverged,
                total: s.total,
                fraction: s.divergent_fraction,
                limit: MAX_DIVERGENT_FRACTION,
            }
            .to_string(),
        );
    }
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::config::ScanAxis;

    #[test]
    fn semiclassical_scan_has_kink_at_threshold() {
        let mut cfg = ScenarioConfig::new("sc", Method::Semiclassical, ModelParams::coherent(4.0, 1.0, 1.0, 2.0, 0.0, 1.0));
        cfg.scan = Some(ScanAxis::linear("epsilon", 0.0, 4.0, 9));
        let t = run_scenario(&cfg).unwrap();
        let a = t.column("alpha0").unwrap();
        assert_eq!(a[2], Some(0.0));
        assert!(a[3].unwrap() > 0.0);
        assert!(t.residual.iter().all(|r| r.unwrap() < 1e-12));
    }

    #[test]
    fn per_point_failures_do_not_abort() {
        let mut cfg = ScenarioConfig::new("f", Method::Fluctuations, ModelParams::coherent(4.0, 1.0, 1.0, 2.0, 0.0, 1.0));
        cfg.scan = Some(ScanAxis::list("epsilon", &[0.5, 3.0]));
        let t = run_scenario(&cfg).unwrap();
        assert!(t.errors[0].as_ref().unwrap().contains("below threshold"));
        assert!(t.errors[1].is_none());
        assert!(t.residual[1].unwrap() < 1e-6);
    }

    #[test]
    fn tied_parameters_and_target_intensity() {
        let mut cfg = ScenarioConfig::new("t", Method::Semiclassical, ModelParams::coherent(10.0, 1.0, 1.0, 1.0, 0.0, 1.0));
        let mut s = ScanAxis::list("kappa_a", &[0.1, 1.0]);
        s.tied = vec!["kappa_b".into()];
        cfg.scan = Some(s);
        cfg.target_intensity = Some(1.0);
        let t = run_scenario(&cfg).unwrap();
        for v in t.column("intensity_a").unwrap() {
            assert!((v.unwrap() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn invalid_config_is_an_error() {
        let cfg = ScenarioConfig::new("x", Method::RateEq, ModelParams::coherent(1.0, 1.0, 1.0, 1.0, 0.0, 1.0));
        assert!(matches!(run_scenario(&cfg), Err(Error::Config(_))));
    }
}

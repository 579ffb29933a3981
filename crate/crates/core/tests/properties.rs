use nalgebra::DMatrix;
use num_complex::Complex64;
use proptest::prelude::*;

use pairlaser::fluctuations::{
    build_fluctuation_model, intensity_difference_spectrum, number_statistics, output_spectrum, ModeLabel,
};
use pairlaser::fock::{build_liouvillian, observables, steady_state, DensityMatrix};
use pairlaser::harness::{run_scenario, validate_config, Method, ScanAxis, ScenarioConfig};
use pairlaser::params::DEFAULT_DIM_CAP;
use pairlaser::rate_eq::{build_rate_generator, moments, rate_steady_state_with_tail_limit, JointDistribution, RateParams};
use pairlaser::semiclassical::{drift, steady_branch, steady_branch_at_epsilon, threshold};
use pairlaser::{ModelParams, Truncation};

fn random_rho(trunc: Truncation, re: &[f64], im: &[f64]) -> DensityMatrix {
    let d = trunc.dim();
    let a = DMatrix::from_fn(d, d, |i, j| Complex64::new(re[i * d + j], im[i * d + j]));
    let rho = &a * a.adjoint();
    let tr = rho.trace();
    let mut rho = rho / tr;
    // Remove rounding asymmetry before the Hermiticity check.
    rho = (&rho + rho.adjoint()) * Complex64::new(0.5, 0.0);
    DensityMatrix::new(trunc, rho).unwrap()
}

fn rate() -> impl Strategy<Value = f64> {
    0.05f64..3.0
}

fn incoherent() -> impl Strategy<Value = ModelParams> {
    (0.2f64..3.0, rate(), rate(), 0.0f64..2.0, rate(), 0.0f64..3.0, 0.0f64..0.5).prop_map(
        |(eta, ka, kb, kc, mi, mo, kcb)| {
            let mut p = ModelParams::incoherent(eta, ka, kb, mi, mo);
            p.kappa_c = kc;
            p.kappa_cb = kcb;
            p
        },
    )
}

fn coherent() -> impl Strategy<Value = ModelParams> {
    (0.2f64..3.0, rate(), rate(), rate(), 0.0f64..1.0, 0.0f64..2.0)
        .prop_map(|(eta, ka, kb, kc, kbc, mu)| ModelParams::coherent(eta, ka, kb, kc, kbc, mu))
}

const SMALL: Truncation = Truncation { n_a: 2, n_b: 2, n_c: 1 };

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn liouvillian_preserves_trace_and_hermiticity(
        p in prop_oneof![incoherent(), coherent()],
        re in prop::collection::vec(-1.0f64..1.0, 36 * 36),
        im in prop::collection::vec(-1.0f64..1.0, 36 * 36),
    ) {
        let l = build_liouvillian(&p, &SMALL, DEFAULT_DIM_CAP).unwrap();
        let rho = random_rho(SMALL, &re, &im);
        let out = l.apply(&rho);
        let scale = rho.matrix().norm();
        prop_assert!(out.trace().norm() <= 1e-12 * scale.max(1.0) * (1.0 + l.matrix().norm_one()));
        prop_assert!((&out - out.adjoint()).norm() <= 1e-12 * (1.0 + out.norm()));
    }

    #[test]
    fn master_steady_state_symmetry_for_equal_losses(
        eta in 0.3f64..2.0, k in rate(), mi in 0.5f64..3.0, mo in 0.0f64..3.0, kcb in 0.01f64..0.5,
    ) {
        let mut p = ModelParams::incoherent(eta, k, k, mi, mo);
        p.kappa_c = 0.1;
        let trunc = Truncation::new(3, 3, 2);
        let l = build_liouvillian(&p, &trunc, DEFAULT_DIM_CAP).unwrap();
        let ss = steady_state(&l).unwrap();
        prop_assert!(ss.residual <= 1e-9);
        let j = observables(&ss.rho, &p).joint;
        prop_assert!(j.asymmetry() <= 1e-8, "asymmetry {}", j.asymmetry());
        // Source-to-atom transfer adds atoms without photons, so it biases P toward m > n.
        p.kappa_cb = kcb;
        let l = build_liouvillian(&p, &trunc, DEFAULT_DIM_CAP).unwrap();
        let obs = observables(&steady_state(&l).unwrap().rho, &p);
        prop_assert!(obs.n_b > obs.n_a);
    }

    #[test]
    fn rate_generator_conserves_probability_and_difference_decays(
        eta in 0.1f64..20.0, k in rate(), mi in 0.5f64..30.0, mo in 0.0f64..30.0,
        w in prop::collection::vec(0.0f64..1.0, 49),
    ) {
        let rp = RateParams::new(eta, k, k, mi, mo).unwrap();
        let gen = build_rate_generator(&rp, 6, 6, DEFAULT_DIM_CAP).unwrap();
        let total: f64 = w.iter().sum();
        let rows: Vec<Vec<f64>> = w.chunks(7).map(|r| r.iter().map(|x| x / total).collect()).collect();
        let p = JointDistribution::from_rows(rows);
        let dp = gen.apply(&p);
        prop_assert!(dp.iter().sum::<f64>().abs() <= 1e-12 * (1.0 + mi + mo + eta + k) * 10.0);
        // d<n - m>/dt = -2 kappa <n - m>.
        let mut d_diff = 0.0;
        let mut diff = 0.0;
        for n in 0..=6 {
            for m in 0..=6 {
                let x = n as f64 - m as f64;
                d_diff += x * dp[gen.index(n, m)];
                diff += x * p.get(n, m);
            }
        }
        prop_assert!((d_diff + 2.0 * k * diff).abs() <= 1e-10 * (1.0 + mi + mo + eta + k) * 10.0);
    }

    #[test]
    fn rate_steady_state_symmetry_and_correlations(
        eta in 1.0f64..20.0, k in 0.2f64..2.0, mo in 0.0f64..10.0, extra in 1.0f64..15.0,
    ) {
        let rp = RateParams::new(eta, k, k, mo + extra, mo).unwrap();
        let gen = build_rate_generator(&rp, 30, 30, DEFAULT_DIM_CAP).unwrap();
        let ss = rate_steady_state_with_tail_limit(&gen, 1.0).unwrap();
        prop_assert!(ss.dist.asymmetry() <= 1e-9);
        let m = moments(&ss.dist);
        prop_assert!(m.var_diff <= (m.mean_n + m.mean_m) * (1.0 + 1e-6));
        if let (Some(g2), Some(gnm)) = (m.g2_n, m.g_nm) {
            prop_assert!(gnm >= g2 - 1e-9, "g_nm {} < g2 {}", gnm, g2);
        }
    }

    #[test]
    fn branch_is_a_fixed_point(p in coherent(), eps in 0.0f64..30.0) {
        prop_assume!(p.eta * p.eta > 1.05 * p.kappa_a * p.kappa_bc);
        let ss = steady_branch_at_epsilon(&p, eps).unwrap();
        let mu = eps * ss.mu_th;
        let scale = 1.0 + ss.point().iter().map(|z| z.norm_sqr()).sum::<f64>();
        for z in drift(&p, mu, &ss.point()) {
            prop_assert!(z.norm() <= 1e-12 * scale * (1.0 + p.eta + p.kappa_bc + p.kappa_c));
        }
    }

    #[test]
    fn branch_grows_monotonically_and_linearly(p in coherent(), e1 in 1.0f64..10.0, de in 0.01f64..5.0) {
        prop_assume!(p.eta * p.eta > 1.05 * p.kappa_a * p.kappa_bc);
        let th = threshold(&p).unwrap();
        let (a, b) = (steady_branch(&p, e1 * th).unwrap(), steady_branch(&p, (e1 + de) * th).unwrap());
        prop_assert!(b.alpha0 > a.alpha0 && b.beta0 > a.beta0);
        // alpha0^2 / (eps - 1) is constant.
        let unit = steady_branch(&p, 2.0 * th).unwrap().alpha0.powi(2);
        prop_assert!((b.alpha0.powi(2) - unit * (e1 + de - 1.0)).abs() <= 1e-12 * unit * (e1 + de));
        let edge = steady_branch(&p, th * (1.0 + 1e-18)).unwrap();
        prop_assert!(edge.alpha0 <= 1e-9);
    }

    #[test]
    fn fluctuation_structure(p in coherent(), eps in 1.05f64..20.0) {
        prop_assume!(p.eta * p.eta > 1.05 * p.kappa_a * p.kappa_bc);
        let ss = steady_branch_at_epsilon(&p, eps).unwrap();
        let fm = build_fluctuation_model(&p, &ss).unwrap();
        prop_assert_eq!(fm.a_block(), fm.m.fixed_view::<3, 3>(3, 3).into_owned());
        prop_assert_eq!(fm.b_block(), fm.m.fixed_view::<3, 3>(3, 0).into_owned());
        prop_assert_eq!(fm.d, fm.d.transpose());
    }

    #[test]
    fn figure_families_are_stable_and_real(eps in 1.05f64..50.0, family in 0usize..2, w in 0.0f64..50.0) {
        let p = if family == 0 {
            ModelParams::coherent(4.0, 1.0, 1.0, 2.0, 0.0, 0.0)
        } else {
            ModelParams::coherent(10.0, 0.2, 0.2, 1.0, 0.0, 0.0)
        };
        let fm = build_fluctuation_model(&p, &steady_branch_at_epsilon(&p, eps).unwrap()).unwrap();
        prop_assert!(fm.hurwitz && fm.max_re < 0.0);
        // Spectra refuse to return values with an imaginary part above 1e-10.
        prop_assert!(output_spectrum(&fm, ModeLabel::A, &[w]).is_ok());
        prop_assert!(output_spectrum(&fm, ModeLabel::B, &[w]).is_ok());
        prop_assert!(intensity_difference_spectrum(&fm, &[w]).is_ok());
        let st = number_statistics(&fm).unwrap();
        prop_assert!(st.g_ab >= st.g2[0] && st.g_ab >= st.g2[1]);
    }

    #[test]
    fn semiclassical_scans_are_deterministic(p in coherent(), stop in 1.5f64..10.0, n in 1usize..12) {
        prop_assume!(p.eta * p.eta > 1.05 * p.kappa_a * p.kappa_bc);
        let mut cfg = ScenarioConfig::new("det", Method::Semiclassical, p);
        cfg.scan = Some(ScanAxis::linear("epsilon", 0.0, stop, n));
        let a = run_scenario(&cfg).unwrap();
        let b = run_scenario(&cfg).unwrap();
        prop_assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
        prop_assert!(a.residual.iter().all(|r| r.is_some()));
    }

    #[test]
    fn configs_round_trip_through_toml(p in incoherent(), start in 0.5f64..5.0, n in 1usize..30) {
        let mut cfg = ScenarioConfig::new("rt", Method::MasterEq, p);
        cfg.scan = Some(ScanAxis::linear("mu_in", start, start + 1.0, n));
        let text = toml::to_string(&cfg).unwrap();
        let back = validate_config(&text).unwrap();
        prop_assert_eq!(back, cfg);
    }
}

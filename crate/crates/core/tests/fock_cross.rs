use pairlaser::fock::{build_liouvillian, evolve, observables, steady_state, DensityMatrix};
use pairlaser::params::DEFAULT_DIM_CAP;
use pairlaser::{ModelParams, Truncation};

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(1e-12)
}

#[test]
fn steady_state_matches_long_time_evolution() {
    let mut inc = ModelParams::incoherent(0.8, 0.5, 0.6, 1.2, 0.4);
    inc.kappa_c = 0.3;
    inc.kappa_cb = 0.05;
    let coh = ModelParams::coherent(0.7, 0.5, 0.6, 0.8, 0.2, 0.4);
    let trunc = Truncation::new(3, 3, 2);
    for p in [inc, coh] {
        let l = build_liouvillian(&p, &trunc, DEFAULT_DIM_CAP).unwrap();
        let ss = observables(&steady_state(&l).unwrap().rho, &p);
        let rho = evolve(&l, &DensityMatrix::fock(&trunc, 0, 0, 0), 120.0, 0.002).unwrap();
        assert!((rho.trace().re - 1.0).abs() <= 1e-10);
        let ev = observables(&rho, &p);
        let pairs = [
            (ss.n_a, ev.n_a),
            (ss.n_b, ev.n_b),
            (ss.n_c, ev.n_c),
            (ss.photon_rate, ev.photon_rate),
            (ss.atom_rate, ev.atom_rate),
            (ss.g2_a.unwrap(), ev.g2_a.unwrap()),
            (ss.g2_b.unwrap(), ev.g2_b.unwrap()),
            (ss.g2_c.unwrap(), ev.g2_c.unwrap()),
            (ss.g_ab.unwrap(), ev.g_ab.unwrap()),
        ];
        for (k, (a, b)) in pairs.into_iter().enumerate() {
            assert!(rel(a, b) <= 1e-6, "entry {k}: {a} vs {b}");
        }
        for m in 0..3 {
            assert!((ss.tail[m] - ev.tail[m]).abs() <= 1e-6 * ss.tail[m].max(1e-6));
        }
    }
}

use iontrap::continuum::ContinuumModel;
use iontrap::decoherence::{
    self, combined_decoherence, decoherence_report, dominance_crossover, fidelity_profile, scaling_sweep,
    total_vib_rate, vib_rate_continuum, ContinuumPath, RadiativeConvention, Regime, SweepOptions, SweepPath,
    TransitionSpec,
};
use iontrap::{solve_equilibrium, IonSpecies, PhysicalConstants, SolverOptions, TrapConfig};
use proptest::prelude::*;

fn ba(n: usize) -> (TrapConfig<f64>, TransitionSpec<f64>) {
    (TrapConfig::ba138(n), TransitionSpec::ba138())
}

/// The same physical system in units where m = ω_z = d₀ = 1 (so q² = 1).
fn rescaled(cfg: &TrapConfig<f64>, spec: &TransitionSpec<f64>) -> (TrapConfig<f64>, TransitionSpec<f64>) {
    let d0 = cfg.d0().unwrap();
    let m = cfg.species.mass;
    let wz = cfg.omega_z;
    let c = &cfg.constants;
    let constants = PhysicalConstants {
        hbar: c.hbar / (m * d0 * d0 * wz),
        c: c.c / (d0 * wz),
        k_b: c.k_b / (m * d0 * d0 * wz * wz),
        coulomb_q2_unit: 1.0,
        amu: 1.0,
    };
    let mut out = TrapConfig::new(cfg.n_ions, 1.0, cfg.omega_t / wz, IonSpecies::new("scaled", 1.0, 1).unwrap()).unwrap();
    out.constants = constants;
    let mut s = TransitionSpec::new(spec.multipole_a, spec.omega_0 / wz, spec.tau_s * wz).unwrap();
    s.coupling_constant = spec.coupling_constant;
    (out, s)
}

#[test]
fn rates_are_unit_invariant() {
    for n in [2usize, 10, 120] {
        let (cfg, spec) = ba(n);
        let (cfg_s, spec_s) = rescaled(&cfg, &spec);
        assert!((cfg_s.d0().unwrap() - 1.0).abs() < 1e-15);
        let a = solve_equilibrium(&cfg, &SolverOptions::default()).unwrap();
        let b = solve_equilibrium(&cfg_s, &SolverOptions::default()).unwrap();
        let si = 1.0 / total_vib_rate(&a, &spec, &cfg).unwrap() / spec.tau_s;
        let sc = 1.0 / total_vib_rate(&b, &spec_s, &cfg_s).unwrap() / spec_s.tau_s;
        assert!(((si - sc) / si).abs() < 1e-10, "N={n}: {si} vs {sc}");
        for path in [ContinuumPath::ClosedForm9, ContinuumPath::ClosedForm11, ContinuumPath::SumPipeline] {
            if n < 10 {
                continue;
            }
            let x = vib_rate_continuum(n, &spec, &cfg, ContinuumModel::DubinFluid, path).unwrap() * spec.tau_s;
            let y = vib_rate_continuum(n, &spec_s, &cfg_s, ContinuumModel::DubinFluid, path).unwrap() * spec_s.tau_s;
            assert!(((x - y) / x).abs() < 1e-10, "{path:?}");
        }
    }
}

#[test]
fn exact_over_continuum_stays_in_band() {
    let (cfg, spec) = ba(200);
    for n in [200usize, 400, 700, 1000] {
        let c = cfg.with_n_ions(n);
        let a = solve_equilibrium(&c, &SolverOptions::default()).unwrap();
        let ratio = total_vib_rate(&a, &spec, &c).unwrap()
            / vib_rate_continuum(n, &spec, &c, ContinuumModel::DubinFluid, ContinuumPath::SumPipeline).unwrap();
        assert!((0.8..=1.25).contains(&ratio), "N={n}: {ratio}");
    }
}

#[test]
fn rate_increases_with_n_in_both_regimes() {
    let (cfg, spec) = ba(50);
    let ns = [50usize, 60, 80, 110, 150, 220, 300];
    for regime in [Regime::FixedOmegaZ, Regime::FixedS0] {
        for path in [SweepPath::Exact, SweepPath::Continuum(ContinuumPath::ClosedForm9)] {
            let r = scaling_sweep(regime, &ns, &spec, &cfg, path, &SweepOptions::default()).unwrap();
            assert!(
                r.rows.windows(2).all(|w| w[1].tau_vib_inv > w[0].tau_vib_inv),
                "{regime:?} {path:?}"
            );
        }
    }
}

#[test]
fn vibrational_decay_eventually_dominates() {
    let (cfg, spec) = ba(1000);
    let ns: Vec<usize> = (0..=16).map(|k| (1000.0 * 10f64.powf(0.25 * f64::from(k))).round() as usize).collect();
    let r = scaling_sweep(
        Regime::FixedOmegaZ,
        &ns,
        &spec,
        &cfg,
        SweepPath::Continuum(ContinuumPath::ClosedForm9),
        &SweepOptions::default(),
    )
    .unwrap();
    let star = dominance_crossover(&r.rows).expect("crossover inside the sweep");
    assert!(star > 1000);
    assert!(r.rows[0].tau_vib_inv < r.rows[0].tau_rad_inv);
}

#[test]
fn report_fields_are_consistent() {
    let (cfg, spec) = ba(30);
    let a = solve_equilibrium(&cfg, &SolverOptions::default()).unwrap();
    let two = decoherence_report(&a, &spec, &cfg, RadiativeConvention::TwoOverN).unwrap();
    let one = decoherence_report(&a, &spec, &cfg, RadiativeConvention::OneOverN).unwrap();
    assert!((two.tau_rad - 2.0 * one.tau_rad).abs() < 1e-15);
    assert_eq!(two.per_ion_rates.len(), 30);
    assert!((two.tau_vib_inv() - decoherence::combine_in_quadrature(&two.per_ion_rates)).abs() <= 1e-15 * two.tau_vib_inv());
    assert!(two.t_dec <= two.tau_rad && two.t_dec <= two.tau_vib);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn t_dec_symmetric_and_bounded(a in 1e-6f64..1e6, b in 1e-6f64..1e6) {
        let x = combined_decoherence(a, b).unwrap();
        let y = combined_decoherence(b, a).unwrap();
        prop_assert_eq!(x, y);
        prop_assert!(x <= a && x <= b);
    }

    #[test]
    fn fidelity_gap_is_fourth_order(rates in proptest::collection::vec(1e-3f64..10.0, 1..20), frac in 0.0f64..0.2) {
        let max_rate = rates.iter().cloned().fold(0.0, f64::max);
        let t = frac / max_rate;
        let (exact, gauss) = fidelity_profile(t, &rates).unwrap();
        let quartic: f64 = rates.iter().map(|r| (t * r).powi(4)).sum();
        prop_assert!(gauss - exact >= -1e-15);
        prop_assert!(gauss - exact <= quartic / 5.0 + 1e-15);
    }
}

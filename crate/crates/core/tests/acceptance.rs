//! Acceptance checks. Run with `cargo test -p iontrap-core --test acceptance`;
//! prints one PASS/FAIL line per criterion and exits non-zero on any FAIL.

use std::time::Instant;

use iontrap::continuum::{self, ContinuumModel};
use iontrap::decoherence::{
    decoherence_report, fidelity_profile, scaling_sweep, total_vib_rate, vib_rate_continuum, ContinuumPath,
    RadiativeConvention, Regime, SweepOptions, SweepPath, TransitionSpec,
};
use iontrap::ion_array::solve_scaled;
use iontrap::spin::{
    dynamical_phase, evolve_exact_sampled, monte_carlo_dephasing, static_field_exact, McOptions, SpinState,
    TransverseDrive,
};
use iontrap::sums::{self, TnForm};
use iontrap::{solve_equilibrium, IonArray, IonSpecies, PhysicalConstants, SolverOptions, TrapConfig};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Group = (&'static str, fn() -> Vec<Check>);

struct Check {
    label: String,
    pass: bool,
    detail: String,
}

fn check(label: impl Into<String>, pass: bool, detail: String) -> Check {
    Check { label: label.into(), pass, detail }
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

fn ba_array(n: usize) -> (TrapConfig<f64>, IonArray<f64>) {
    let cfg = TrapConfig::ba138(n);
    let array = solve_equilibrium(&cfg, &SolverOptions::default()).expect("Ba chain converges");
    (cfg, array)
}

fn trap_scale() -> Vec<Check> {
    let d0 = TrapConfig::<f64>::ba138(1).d0().unwrap();
    vec![check("1", rel(d0, 14e-6) <= 0.05, format!("d0 = {:.4} um (target 14 um +/- 5%)", d0 * 1e6))]
}

fn min_spacing() -> Vec<Check> {
    let cfg = TrapConfig::<f64>::ba138(1000);
    let d0 = cfg.d0().unwrap();
    let dubin = continuum::min_spacing::<f64>(1000, ContinuumModel::DubinFluid).unwrap();
    let start = Instant::now();
    let array = solve_equilibrium(&cfg, &SolverOptions::default()).unwrap();
    let secs = start.elapsed().as_secs_f64();
    let exact = array.spacings().unwrap().s0_exact;
    vec![
        check(
            "2a",
            rel(dubin * d0, 0.5e-6) <= 0.10,
            format!("Dubin s0(N=1000) = {:.4} um (target 0.5 um +/- 10%)", dubin * d0 * 1e6),
        ),
        check(
            "2b",
            rel(exact, dubin) <= 0.05 && secs < 60.0,
            format!(
                "exact min gap {exact:.6} vs Dubin {dubin:.6} d0, rel {:.4} (<= 0.05), solve {secs:.1} s (< 60 s)",
                rel(exact, dubin)
            ),
        ),
    ]
}

fn small_n() -> Vec<Check> {
    let p2 = solve_scaled::<f64>(2, &SolverOptions::default()).unwrap().positions;
    let p3 = solve_scaled::<f64>(3, &SolverOptions::default()).unwrap().positions;
    let a2 = 0.25f64.cbrt();
    let a3 = 1.25f64.cbrt();
    let err = [(p2[0] + a2).abs(), (p2[1] - a2).abs(), (p3[0] + a3).abs(), p3[1].abs(), (p3[2] - a3).abs()]
        .into_iter()
        .fold(0.0, f64::max);
    vec![check("3", err <= 1e-10, format!("max position error {err:.2e} (<= 1e-10)"))]
}

fn modes() -> Vec<Check> {
    let freqs = |n: usize| {
        let s = solve_scaled::<f64>(n, &SolverOptions::default()).unwrap();
        IonArray::from_positions(s.positions, 1.0).unwrap().longitudinal_mode_frequencies().unwrap()
    };
    let com = [2usize, 5, 10, 50].iter().map(|&n| (freqs(n)[0] - 1.0).abs()).fold(0.0, f64::max);
    let f2 = freqs(2);
    let f3 = freqs(3);
    let want3 = [1.0, 3f64.sqrt(), (29.0f64 / 5.0).sqrt()];
    let spec_err = f2
        .iter()
        .zip([1.0, 3f64.sqrt()])
        .chain(f3.iter().zip(want3))
        .map(|(g, w)| rel(*g, w))
        .fold(0.0, f64::max);
    vec![
        check("4a", com <= 1e-8, format!("max |w_COM/w_z - 1| = {com:.2e} over N in {{2,5,10,50}} (<= 1e-8)")),
        check("4b", spec_err <= 1e-8, format!("N=2,3 spectra max rel error {spec_err:.2e} (<= 1e-8)")),
    ]
}

fn adiabatic_phase() -> Vec<Check> {
    let w0 = 1.0e4;
    let s0 = SpinState::equal_superposition();
    let mut out = Vec::new();
    for (label, r) in [("5a r=1e-2", 1e-2), ("5a r=1e-3", 1e-3)] {
        let eps = r * w0;
        let drive = TransverseDrive::constant(eps, 0.0);
        let t_pi = std::f64::consts::PI * w0 / (eps * eps);
        let mut worst: f64 = 0.0;
        for k in 0..=1000 {
            let t = t_pi * f64::from(k) / 1000.0;
            let phi = dynamical_phase(&drive, t, w0).unwrap();
            let s = static_field_exact(w0, (eps, 0.0), &s0, t);
            worst = worst.max((s0.overlap(&s).re - phi.cos()).abs());
        }
        out.push(check(label, worst <= 10.0 * r * r, format!("max |overlap - cos Phi| = {worst:.2e} (<= {:.0e})", 10.0 * r * r)));
    }
    let (eps, om) = (w0 / 100.0, w0 / 1000.0);
    let drive = TransverseDrive::linear(eps, om).unwrap();
    // Φ(t) is monotone; bisect for Φ = π.
    let (mut lo, mut hi) = (0.0, 1.0);
    while dynamical_phase(&drive, hi, w0).unwrap() < std::f64::consts::PI {
        hi *= 2.0;
    }
    for _ in 0..100 {
        let mid = 0.5 * (lo + hi);
        if dynamical_phase(&drive, mid, w0).unwrap() < std::f64::consts::PI {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let start = Instant::now();
    let times: Vec<f64> = (0..=400).map(|k| hi * f64::from(k) / 400.0).collect();
    let states = evolve_exact_sampled(w0, &drive, &s0, &times, 50).unwrap();
    let worst = times
        .iter()
        .zip(&states)
        .map(|(&t, s)| (s0.overlap(s).re - dynamical_phase(&drive, t, w0).unwrap().cos()).abs())
        .fold(0.0, f64::max);
    out.push(check(
        "5b",
        worst <= 1e-2,
        format!("sinusoid max |overlap - cos Phi| = {worst:.2e} (<= 1e-2), {:.1} s", start.elapsed().as_secs_f64()),
    ));
    out
}

fn sum_formulas() -> Vec<Check> {
    let s = solve_scaled::<f64>(500, &SolverOptions::default()).unwrap();
    let a = IonArray::from_positions(s.positions, 1.0).unwrap();
    let local = sums::local_spacings(&a).unwrap();
    let exact = sums::s_n_exact(&a, 250, 8).unwrap();
    let e30 = rel(sums::s_n_continuum(local[250], 8).unwrap(), exact);
    let e32 = (16..=60u32)
        .map(|n| rel(sums::beta_integral_asymptotic::<f64>(n), sums::beta_integral::<f64>(n).unwrap()))
        .fold(0.0, f64::max);
    let mut t0: f64 = 0.0;
    for model in [ContinuumModel::SimpleBalance, ContinuumModel::DubinFluid] {
        for n in [10usize, 137, 1000, 100_000] {
            let t = sums::t_n_continuum::<f64>(n, 0, model, TnForm::Integral).unwrap();
            t0 = t0.max(rel(t, n as f64));
        }
    }
    vec![
        check("6a", e30 <= 0.03, format!("central-ion S_8 relative error {e30:.2e} at N=500 (<= 3%)")),
        check("6b", e32 <= 0.005, format!("asymptotic Beta integral max rel error {e32:.2e} for n in 16..60 (<= 0.5%)")),
        check("6c", t0 <= 1e-10, format!("continuum T_0 vs N max rel error {t0:.2e} (<= 1e-10)")),
    ]
}

fn spec_with_a(a: u32) -> TransitionSpec<f64> {
    TransitionSpec { multipole_a: a, ..TransitionSpec::ba138() }
}

fn scaling_exponents() -> Vec<Check> {
    let base = TrapConfig::<f64>::ba138(200);
    let opts = SweepOptions::default();
    let cont_ns: Vec<usize> = (1..=10).map(|k| 200 * k).collect();
    let exact_ns: Vec<usize> = (1..=8).map(|k| 100 * k).collect();
    let cases = [(Regime::FixedOmegaZ, 2u32), (Regime::FixedOmegaZ, 1), (Regime::FixedS0, 2)];
    let mut out = Vec::new();
    for (path, ns, tol, tag) in [
        (SweepPath::Continuum(ContinuumPath::ClosedForm9), &cont_ns, 0.2, "continuum N=200..2000"),
        (SweepPath::Exact, &exact_ns, 0.5, "exact N=100..800"),
    ] {
        for (regime, a) in cases {
            let spec = spec_with_a(a);
            let want = regime.expected_exponent(a);
            let fit = scaling_sweep(regime, ns, &spec, &base, path, &opts).unwrap().fit;
            out.push(check(
                format!("7 {} a={a} {tag}", regime.name()),
                (fit.exponent - want).abs() <= tol,
                format!("fitted exponent {:.4} vs {want:.4} +/- {tol}", fit.exponent),
            ));
        }
    }
    out
}

fn headline() -> Vec<Check> {
    let (cfg, array) = ba_array(1000);
    let spec = TransitionSpec::ba138();
    let r = decoherence_report(&array, &spec, &cfg, RadiativeConvention::TwoOverN).unwrap();
    let vib = r.tau_vib / spec.tau_s;
    let ratio = r.tau_vib / r.tau_rad;
    vec![check(
        "8",
        vib >= 1e4 && ratio >= 1e6,
        format!("tau_vib = {vib:.3e} tau_s (>= 1e4), tau_vib/tau_rad = {ratio:.3e} (>= 1e6)"),
    )]
}

fn pipeline() -> Vec<Check> {
    let spec = TransitionSpec::ba138();
    let mut lo = f64::INFINITY;
    let mut hi: f64 = 0.0;
    for n in (200..=1000).step_by(100) {
        let (cfg, array) = ba_array(n);
        let r = total_vib_rate(&array, &spec, &cfg).unwrap()
            / vib_rate_continuum(n, &spec, &cfg, ContinuumModel::DubinFluid, ContinuumPath::SumPipeline).unwrap();
        lo = lo.min(r);
        hi = hi.max(r);
    }
    let mut cf: f64 = 0.0;
    for n in [10usize, 200, 1000, 10_000, 1_000_000] {
        let cfg = TrapConfig::<f64>::ba138(n);
        for model in [ContinuumModel::SimpleBalance, ContinuumModel::DubinFluid, ContinuumModel::HughesFit] {
            let a = vib_rate_continuum(n, &spec, &cfg, model, ContinuumPath::ClosedForm9).unwrap();
            let b = vib_rate_continuum(n, &spec, &cfg, model, ContinuumPath::ClosedForm11).unwrap();
            cf = cf.max(rel(a, b));
        }
    }
    vec![
        check(
            "9a",
            lo >= 0.8 && hi <= 1.25,
            format!("exact/pipeline ratio in [{lo:.4}, {hi:.4}] for N=200..1000 (within [0.8, 1.25])"),
        ),
        check("9b", cf <= 1e-13, format!("closed forms 9 vs 11 max rel difference {cf:.2e} (<= 1e-13)")),
    ]
}

fn monte_carlo() -> Vec<Check> {
    let mut cfg = TrapConfig::new(2, 1.0, 50.0, IonSpecies::new("unit", 1.0, 1).unwrap()).unwrap();
    cfg.constants = PhysicalConstants::unit();
    let array = solve_equilibrium(&cfg, &SolverOptions::default()).unwrap();
    let spec = TransitionSpec::new(2, 1.0e3, 1.0).unwrap();
    let start = Instant::now();
    let run = |threads: usize| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap()
            .install(|| monte_carlo_dephasing(&array, &cfg, &spec, 0, 200, Some(2024), &McOptions::default()).unwrap())
    };
    let one = run(1);
    let four = run(4);
    let secs = start.elapsed().as_secs_f64();
    let ratio = one.t_pi_empirical / one.tau_i_predicted;
    vec![
        check(
            "10a",
            (0.5..=2.0).contains(&ratio) && secs < 60.0,
            format!("t_pi/tau_i = {ratio:.4} with 200 trials (within a factor 2), {secs:.1} s"),
        ),
        check("10b", one == four, format!("1-thread and 4-thread runs bit-identical: {}", one == four)),
    ]
}

fn fidelity() -> Vec<Check> {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let rates: Vec<f64> = (0..10).map(|_| 10f64.powf(rng.random_range(-3.0..1.0))).collect();
        let max_rate = rates.iter().cloned().fold(0.0, f64::max);
        for k in 0..=100 {
            let t = 0.2 / max_rate * f64::from(k) / 100.0;
            let (exact, gauss) = fidelity_profile(t, &rates).unwrap();
            worst = worst.max((exact - gauss).abs());
        }
    }
    vec![check("11", worst <= 1e-3, format!("max |prod cos^2 - exp(-t^2/tau_vib^2)| = {worst:.2e} (<= 1e-3)"))]
}

fn main() {
    let groups: [Group; 11] = [
        ("trap scale", trap_scale),
        ("minimum spacing", min_spacing),
        ("small-N exactness", small_n),
        ("mode spectrum", modes),
        ("adiabatic phase", adiabatic_phase),
        ("sum formulas", sum_formulas),
        ("scaling exponents", scaling_exponents),
        ("headline substitute", headline),
        ("pipeline consistency", pipeline),
        ("Monte Carlo", monte_carlo),
        ("fidelity approximation", fidelity),
    ];
    let mut failed = 0;
    for (name, f) in groups {
        for c in f() {
            let tag = if c.pass { "PASS" } else { "FAIL" };
            println!("{tag} criterion {} ({name}): {}", c.label, c.detail);
            failed += usize::from(!c.pass);
        }
    }
    if failed > 0 {
        println!("{failed} acceptance check(s) failed");
        std::process::exit(1);
    }
    println!("all acceptance checks passed");
}

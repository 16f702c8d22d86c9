use iontrap::continuum::{self, ContinuumModel};
use iontrap::decoherence::{
    decoherence_report, dominance_crossover, scaling_sweep, vib_rate_continuum, ContinuumPath, Regime,
    SweepOptions, SweepPath,
};
use iontrap::spin::{
    adiabaticity_check, berry_phase_residual, dynamical_phase, evolve_exact_sampled, monte_carlo_dephasing,
    static_field_exact, McOptions, SpinState, TransverseDrive,
};
use iontrap::sums::{self, TnForm};
use iontrap::{solve_equilibrium, IonArray, SolverOptions};
use serde_json::{json, Value};

use crate::args::{ContinuumCmd, DecohereCmd, DriveKind, McCmd, SpinVerifyCmd, SumsCmd, SweepCmd};
use crate::config::RunConfig;
use crate::output::{number, Output, Table};
use crate::CliError;

fn solve(cfg: &RunConfig) -> Result<IonArray<f64>, CliError> {
    Ok(solve_equilibrium(&cfg.trap()?, &SolverOptions::default())?)
}

fn structure_summary(out: &mut Output, cfg: &RunConfig, array: &IonArray<f64>) -> Result<(), CliError> {
    out.note("n_ions", json!(array.n_ions()));
    out.note("d0_m", number(array.d0()));
    out.note("residual_gradient_norm", number(array.residual_gradient_norm()));
    if let Some(a) = cfg.trap()?.linear_regime_advisory() {
        eprintln!("advisory: {a}");
        out.note("advisory", json!(a));
    }
    Ok(())
}

pub fn positions(cfg: &RunConfig) -> Result<Output, CliError> {
    let array = solve(cfg)?;
    let mut t = Table::new(&["index[1]", "z[d0]", "z[m]"]);
    for (i, (s, m)) in array.positions_scaled().iter().zip(array.positions_m()).enumerate() {
        t.push(vec![i.into(), (*s).into(), m.into()]);
    }
    let mut out = Output { table: Some(t), ..Output::default() };
    structure_summary(&mut out, cfg, &array)?;
    Ok(out)
}

pub fn modes(cfg: &RunConfig) -> Result<Output, CliError> {
    let array = solve(cfg)?;
    let freqs = array.longitudinal_mode_frequencies()?;
    let wz = cfg.omega_z;
    let mut t = Table::new(&["index[1]", "omega[omega_z]", "omega[rad/s]"]);
    for (i, f) in freqs.iter().enumerate() {
        t.push(vec![i.into(), (*f).into(), (f * wz).into()]);
    }
    let mut out = Output { table: Some(t), ..Output::default() };
    structure_summary(&mut out, cfg, &array)?;
    out.note("com_relative_error", number((freqs[0] - 1.0).abs()));
    Ok(out)
}

pub fn continuum(cfg: &RunConfig, cmd: &ContinuumCmd) -> Result<Output, CliError> {
    let n = cfg.n_ions;
    let d0 = cfg.trap()?.d0()?;
    let mut out = Output::default();
    if let Some(k) = cmd.profile {
        let model = cfg.continuum_model()?;
        let l: f64 = continuum::half_length(n, model)?;
        let mut t = Table::new(&["z[d0]", "z[m]", "s[d0]", "s[m]", "n_below[ions]"]);
        for j in 0..k {
            // Midpoints keep the grid off the divergent ends.
            let z = l * (-1.0 + (2 * j + 1) as f64 / k as f64);
            let s = continuum::spacing_profile(z, n, model)?;
            let count = continuum::ion_count_profile(z, n, model)?;
            t.push(vec![z.into(), (z * d0).into(), s.into(), (s * d0).into(), count.into()]);
        }
        out.note("model", json!(model.name()));
        out.note("half_length_d0", number(l));
        out.table = Some(t);
        return Ok(out);
    }
    let exact = if cmd.exact {
        let s0 = solve(cfg)?.spacings()?.s0_exact;
        out.note("s0_exact_d0", number(s0));
        Some(s0)
    } else {
        None
    };
    let models: Vec<ContinuumModel> = match &cmd.input.model {
        Some(_) => vec![cfg.continuum_model()?],
        None => ContinuumModel::ALL.to_vec(),
    };
    let mut t = Table::new(&["model", "half_length[d0]", "s0[d0]", "s0[m]", "s0_vs_exact[1]"]);
    for m in models {
        let l = if m.has_profile() { Some(continuum::half_length::<f64>(n, m)?) } else { None };
        let s0: f64 = continuum::min_spacing(n, m)?;
        t.push(vec![
            m.name().into(),
            l.into(),
            s0.into(),
            (s0 * d0).into(),
            exact.map(|e| (s0 - e) / e).into(),
        ]);
    }
    out.note("n_ions", json!(n));
    out.note("d0_m", number(d0));
    if n >= 2 {
        out.note("dubin_s0_rounded_d0", number(continuum::dubin_min_spacing_rounded(n)?));
    }
    out.table = Some(t);
    Ok(out)
}

pub fn sums(cfg: &RunConfig, cmd: &SumsCmd) -> Result<Output, CliError> {
    let array = solve(cfg)?;
    let model = cfg.continuum_model()?;
    let n = array.n_ions();
    let ion = cmd.ion.unwrap_or(n / 2);
    let local = sums::local_spacings(&array)?;
    if ion >= n {
        return Err(iontrap::Error::Index { index: ion, n_ions: n }.into());
    }
    let mut t = Table::new(&[
        "n[1]",
        "S_exact[d0^-n]",
        "S_continuum[d0^-n]",
        "S_rel_error[1]",
        "T_exact[d0^-n]",
        "T_integral[d0^-n]",
        "T_asymptotic[d0^-n]",
        "T_rel_error[1]",
    ]);
    for &k in &cmd.orders {
        let s = sums::SumComparison::new(sums::s_n_exact(&array, ion, k)?, sums::s_n_continuum(local[ion], k)?);
        let t_exact = sums::t_n_exact(&array, k)?;
        let t_int = sums::t_n_continuum::<f64>(n, k, model, TnForm::Integral)?;
        let t_asym = sums::t_n_continuum::<f64>(n, k, model, TnForm::Asymptotic)?;
        t.push(vec![
            (k as usize).into(),
            s.exact.into(),
            s.continuum.into(),
            s.relative_error.into(),
            t_exact.into(),
            t_int.into(),
            t_asym.into(),
            sums::SumComparison::new(t_exact, t_int).relative_error.into(),
        ]);
    }
    let mut out = Output { table: Some(t), ..Output::default() };
    out.note("ion_index", json!(ion));
    out.note("model", json!(model.name()));
    out.note("n_ions", json!(n));
    Ok(out)
}

pub fn decohere(cfg: &RunConfig, cmd: &DecohereCmd) -> Result<Output, CliError> {
    let trap = cfg.trap()?;
    let spec = cfg.transition()?;
    let array = solve(cfg)?;
    let r = decoherence_report(&array, &spec, &trap, cfg.radiative_convention()?)?;
    let n = r.n_ions;
    let mut out = Output::default();
    let mut continuum_rates = serde_json::Map::new();
    if n >= 10 {
        for model in ContinuumModel::ALL {
            let mut m = serde_json::Map::new();
            for path in [ContinuumPath::ClosedForm9, ContinuumPath::ClosedForm11, ContinuumPath::SumPipeline] {
                let v = match vib_rate_continuum(n, &spec, &trap, model, path) {
                    Ok(x) => number(x),
                    Err(iontrap::Error::UnsupportedModel { .. }) => Value::Null,
                    Err(e) => return Err(e.into()),
                };
                m.insert(format!("{}_tau_vib_inv_per_s", path.name()), v);
            }
            continuum_rates.insert(model.name().into(), Value::Object(m));
        }
    }
    if cmd.per_ion {
        let mut t = Table::new(&["index[1]", "z[m]", "tau_i_inv[1/s]"]);
        for (i, (z, rate)) in array.positions_m().iter().zip(&r.per_ion_rates).enumerate() {
            t.push(vec![i.into(), (*z).into(), (*rate).into()]);
        }
        out.table = Some(t);
    } else {
        let mut t = Table::new(&[
            "n_ions[1]",
            "d0[m]",
            "s0[m]",
            "tau_vib_inv[1/s]",
            "tau_rad_inv[1/s]",
            "t_dec[s]",
            "tau_vib[tau_s]",
            "tau_rad[tau_s]",
            "thermal_factor[1]",
        ]);
        t.push(vec![
            n.into(),
            r.d0.into(),
            r.s0.into(),
            r.tau_vib_inv().into(),
            r.tau_rad_inv().into(),
            r.t_dec.into(),
            (r.tau_vib / spec.tau_s).into(),
            (r.tau_rad / spec.tau_s).into(),
            r.thermal_factor.into(),
        ]);
        out.table = Some(t);
    }
    out.note("d0_m", number(r.d0));
    out.note("s0_m", number(r.s0));
    out.note("tau_vib_s", number(r.tau_vib));
    out.note("tau_rad_s", number(r.tau_rad));
    out.note("t_dec_s", number(r.t_dec));
    out.note("tau_vib_over_tau_rad", number(r.tau_vib / r.tau_rad));
    out.note("continuum", Value::Object(continuum_rates));
    if let Some(a) = &r.advisory {
        eprintln!("advisory: {a}");
        out.note("advisory", json!(a));
    }
    Ok(out)
}

pub fn sweep(cfg: &RunConfig, cmd: &SweepCmd) -> Result<Output, CliError> {
    let regime: Regime = cmd.regime.parse().map_err(|e: iontrap::Error| CliError::Usage(e.to_string()))?;
    let path = match cmd.path.as_str() {
        "exact" => SweepPath::Exact,
        other => SweepPath::Continuum(other.parse().map_err(|e: iontrap::Error| CliError::Usage(e.to_string()))?),
    };
    let ns = match &cmd.n_list {
        Some(list) => list.clone(),
        None => log_grid(cmd.n_min, cmd.n_max, cmd.n_points)?,
    };
    let trap = cfg.trap()?;
    let spec = cfg.transition()?;
    let opts = SweepOptions {
        model: cfg.continuum_model()?,
        exact_cap: cmd.exact_cap,
        radiative: cfg.radiative_convention()?,
    };
    let result = scaling_sweep(regime, &ns, &spec, &trap, path, &opts)?;
    let mut t = Table::new(&["N[1]", "omega_z[rad/s]", "s0[m]", "tau_vib_inv[1/s]", "tau_rad_inv[1/s]", "t_dec[s]"]);
    for r in &result.rows {
        t.push(vec![
            r.n_ions.into(),
            r.omega_z.into(),
            r.s0.into(),
            r.tau_vib_inv.into(),
            r.tau_rad_inv.into(),
            r.t_dec.into(),
        ]);
    }
    let mut out = Output { table: Some(t), ..Output::default() };
    out.note("regime", json!(regime.name()));
    out.note(
        "path",
        json!(match path {
            SweepPath::Exact => "exact",
            SweepPath::Continuum(p) => p.name(),
        }),
    );
    out.note("fitted_exponent", number(result.fit.exponent));
    out.note("fit_intercept", number(result.fit.intercept));
    out.note("fit_rms_residual", number(result.fit.rms_residual));
    out.note("expected_exponent", number(regime.expected_exponent(spec.multipole_a)));
    out.note("dominance_crossover_n", json!(dominance_crossover(&result.rows)));
    Ok(out)
}

fn log_grid(lo: usize, hi: usize, points: usize) -> Result<Vec<usize>, CliError> {
    if lo == 0 || hi < lo || points == 0 {
        return Err(CliError::Usage("need 0 < n-min <= n-max and n-points >= 1".into()));
    }
    if points == 1 {
        return Ok(vec![lo]);
    }
    let (a, b) = ((lo as f64).ln(), (hi as f64).ln());
    let mut ns: Vec<usize> = (0..points)
        .map(|k| (a + (b - a) * k as f64 / (points - 1) as f64).exp().round() as usize)
        .collect();
    ns.dedup();
    Ok(ns)
}

pub fn spin_verify(cmd: &SpinVerifyCmd) -> Result<Output, CliError> {
    let w0 = cmd.omega_0;
    let eps = cmd.ratio * w0;
    let om = cmd.frequency_ratio * w0;
    if cmd.points < 2 {
        return Err(CliError::Usage("need at least 2 points".into()));
    }
    let drive = match cmd.drive {
        DriveKind::Static => TransverseDrive::constant(eps, 0.0),
        DriveKind::Sinusoid => TransverseDrive::linear(eps, om)?,
        DriveKind::Circular => TransverseDrive::circular(eps, om)?,
    };
    let diag = adiabaticity_check(&drive, w0)?;
    if !(cmd.phi_max > 0.0) || drive.is_zero() {
        return Err(iontrap::Error::Domain("need a non-zero drive and a positive phi-max".into()).into());
    }
    // Φ(t) is non-decreasing: bracket and bisect for Φ = phi_max.
    let phi = |t: f64| dynamical_phase(&drive, t, w0);
    let mut hi = 1.0 / w0;
    while phi(hi)? < cmd.phi_max {
        hi *= 2.0;
    }
    let mut lo = 0.0;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if phi(mid)? < cmd.phi_max {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let times: Vec<f64> = (0..cmd.points).map(|k| hi * k as f64 / (cmd.points - 1) as f64).collect();
    let s0 = SpinState::equal_superposition();
    let states = evolve_exact_sampled(w0, &drive, &s0, &times, cmd.steps_per_period)?;
    let mut t = Table::new(&["t[s]", "phi[rad]", "overlap_exact[1]", "overlap_oracle[1]", "cos_phi[1]", "abs_error[1]"]);
    let mut worst: f64 = 0.0;
    for (&time, s) in times.iter().zip(&states) {
        let p = phi(time)?;
        let ov = s0.overlap(s).re;
        let oracle = match cmd.drive {
            DriveKind::Static => Some(s0.overlap(&static_field_exact(w0, (eps, 0.0), &s0, time)).re),
            _ => None,
        };
        let err = (ov - p.cos()).abs();
        worst = worst.max(err);
        t.push(vec![time.into(), p.into(), ov.into(), oracle.into(), p.cos().into(), err.into()]);
    }
    let mut out = Output { table: Some(t), ..Output::default() };
    out.note("omega_0_rad_per_s", number(w0));
    out.note("field_ratio", number(diag.field_ratio));
    out.note("rate_ratio", number(diag.rate_ratio));
    out.note("breakdown_time_s", number(diag.breakdown_time));
    out.note("adiabaticity_flagged", json!(diag.flagged));
    out.note("max_abs_error", number(worst));
    if cmd.drive == DriveKind::Static {
        out.note("second_order_bound", number(10.0 * cmd.ratio * cmd.ratio));
    }
    if diag.flagged {
        eprintln!("advisory: drive is not adiabatic (ratios above 0.1)");
    }
    if cmd.drive == DriveKind::Circular {
        let b = berry_phase_residual(w0, eps, om, hi, cmd.steps_per_period)?;
        out.note("berry_measured_phase_rad", number(b.measured_phase));
        out.note("berry_dynamical_phase_rad", number(b.dynamical_phase));
        out.note("berry_residual_rad", number(b.residual));
    }
    Ok(out)
}

pub fn mc_dephase(cfg: &RunConfig, cmd: &McCmd) -> Result<Output, CliError> {
    let trap = cfg.trap()?;
    let spec = cfg.transition()?;
    let array = solve(cfg)?;
    let ion = cmd.ion.unwrap_or(array.n_ions() / 2);
    let opts = McOptions {
        time_points: cmd.points,
        t_max: cmd.t_max,
        zero_amplitudes: cmd.zero_amplitudes,
    };
    let r = monte_carlo_dephasing(&array, &trap, &spec, ion, cmd.trials as usize, Some(cmd.seed), &opts)?;
    let mut t = Table::new(&["t[s]", "mean_overlap[1]", "cos_phi_predicted[1]", "mean_phase[rad]"]);
    for k in 0..r.times.len() {
        t.push(vec![
            r.times[k].into(),
            r.mean_overlap[k].into(),
            r.predicted_cos_phi[k].into(),
            r.mean_phase[k].into(),
        ]);
    }
    let mut out = Output { table: Some(t), ..Output::default() };
    out.note("ion_index", json!(ion));
    out.note("trials", json!(r.trials));
    out.note("tau_i_predicted_s", number(r.tau_i_predicted));
    out.note("t_pi_empirical_s", number(r.t_pi_empirical));
    out.note("t_pi_over_tau_i", number(r.t_pi_empirical / r.tau_i_predicted));
    out.note("pre_revival_time_s", number(if r.max_phase_rate > 0.0 { r.pre_revival_time() } else { f64::INFINITY }));
    Ok(out)
}

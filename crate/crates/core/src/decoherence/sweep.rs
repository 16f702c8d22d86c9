//! N-scaling sweeps of the vibrational rate under two trap-operating regimes.

use rayon::prelude::*;

use super::{
    radiative_window_with, total_vib_rate, vib_rate_continuum, ContinuumPath, RadiativeConvention,
    TransitionSpec,
};
use crate::continuum::{self, dubin_kappa, ContinuumModel};
use crate::error::{ensure, Error, Result};
use crate::ion_array::{solve_equilibrium, SolverOptions, TrapConfig};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Regime {
    /// ω_z is retuned with N so the model's physical s₀ stays at its value
    /// for the base configuration.
    FixedS0,
    /// Trap voltages, hence ω_z and ω_t, stay fixed.
    FixedOmegaZ,
}

impl Regime {
    pub fn name(self) -> &'static str {
        match self {
            Regime::FixedS0 => "fixed-s0",
            Regime::FixedOmegaZ => "fixed-omega-z",
        }
    }

    /// Logarithmic factor multiplied into the rate before the slope fit.
    pub fn log_correction<T: Scalar>(self, n_ions: usize, multipole_a: u32) -> T {
        let n = T::from_count(n_ions);
        match self {
            Regime::FixedS0 => n.ln(),
            Regime::FixedOmegaZ => (dubin_kappa::<T>() * n)
                .ln()
                .powf(T::lit(f64::from(2 * multipole_a + 4) / 3.0)),
        }
    }

    /// Exponent of N quoted for the log-corrected rate.
    pub fn expected_exponent(self, multipole_a: u32) -> f64 {
        match self {
            Regime::FixedS0 => 2.5,
            Regime::FixedOmegaZ => f64::from(8 * multipole_a + 19) / 6.0,
        }
    }
}

impl std::str::FromStr for Regime {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace('_', "-").as_str() {
            "fixed-s0" => Ok(Regime::FixedS0),
            "fixed-omega-z" | "fixed-omegaz" => Ok(Regime::FixedOmegaZ),
            other => Err(Error::domain(format!("unknown regime '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SweepPath {
    /// Exact equilibrium and lattice sums at every N.
    Exact,
    Continuum(ContinuumPath),
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepOptions {
    pub model: ContinuumModel,
    /// Largest N the exact path will solve.
    pub exact_cap: usize,
    pub radiative: RadiativeConvention,
}

impl Default for SweepOptions {
    fn default() -> Self {
        Self {
            model: ContinuumModel::DubinFluid,
            exact_cap: 2000,
            radiative: RadiativeConvention::TwoOverN,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepRow<T> {
    pub n_ions: usize,
    /// rad/s
    pub omega_z: T,
    /// Minimum spacing, m (model value on continuum paths, exact otherwise).
    pub s0: T,
    pub tau_vib_inv: T,
    pub tau_rad_inv: T,
    pub t_dec: T,
}

/// Least-squares line `y = intercept + exponent·x`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerLawFit {
    pub exponent: f64,
    pub intercept: f64,
    pub rms_residual: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult<T> {
    pub regime: Regime,
    pub rows: Vec<SweepRow<T>>,
    /// Fit of ln(rate · log correction) against ln N.
    pub fit: PowerLawFit,
}

pub fn fit_power_law(xs: &[f64], ys: &[f64]) -> Result<PowerLawFit> {
    ensure(xs.len() == ys.len() && xs.len() >= 2, || {
        "a line fit needs at least two matching points".into()
    })?;
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    ensure(sxx > 0.0, || "line fit needs distinct abscissae".into())?;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss: f64 = xs
        .iter()
        .zip(ys)
        .map(|(x, y)| (y - intercept - slope * x).powi(2))
        .sum();
    Ok(PowerLawFit {
        exponent: slope,
        intercept,
        rms_residual: (ss / n).sqrt(),
    })
}

fn config_for<T: Scalar>(
    regime: Regime,
    n_ions: usize,
    base: &TrapConfig<T>,
    base_s0_m: T,
    model: ContinuumModel,
) -> Result<TrapConfig<T>> {
    let mut cfg = base.with_n_ions(n_ions);
    if regime == Regime::FixedS0 {
        let d0 = base_s0_m / continuum::min_spacing::<T>(n_ions, model)?;
        cfg.omega_z = (cfg.q2() / (cfg.species.mass * d0 * d0 * d0)).sqrt();
    }
    Ok(cfg)
}

pub fn scaling_sweep<T: Scalar>(
    regime: Regime,
    n_list: &[usize],
    spec: &TransitionSpec<T>,
    base_config: &TrapConfig<T>,
    path: SweepPath,
    opts: &SweepOptions,
) -> Result<SweepResult<T>> {
    ensure(!n_list.is_empty(), || "sweep needs at least one N".into())?;
    ensure(n_list.windows(2).all(|w| w[0] < w[1]), || "N list must be strictly ascending".into())?;
    ensure(n_list[0] >= 10, || format!("sweep N values must be >= 10, got {}", n_list[0]))?;
    if path == SweepPath::Exact {
        let top = *n_list.last().expect("non-empty");
        ensure(top <= opts.exact_cap, || {
            format!(
                "exact path refused for N = {top} above the cap of {}; use a continuum path or raise the cap",
                opts.exact_cap
            )
        })?;
    }
    spec.validate()?;
    base_config.validate()?;
    let base_s0_m = continuum::min_spacing::<T>(base_config.n_ions, opts.model)? * base_config.d0()?;

    let rows: Vec<SweepRow<T>> = n_list
        .par_iter()
        .map(|&n| {
            let cfg = config_for(regime, n, base_config, base_s0_m, opts.model)?;
            let d0 = cfg.d0()?;
            let (rate, s0) = match path {
                SweepPath::Exact => {
                    let array = solve_equilibrium(&cfg, &SolverOptions::default())?;
                    let s0 = array.spacings()?.s0_exact * d0;
                    (total_vib_rate(&array, spec, &cfg)?, s0)
                }
                SweepPath::Continuum(p) => {
                    let s0 = continuum::min_spacing::<T>(n, opts.model)? * d0;
                    (vib_rate_continuum(n, spec, &cfg, opts.model, p)?, s0)
                }
            };
            let tau_rad = radiative_window_with(n, spec.tau_s, opts.radiative)?;
            let tau_rad_inv = tau_rad.recip();
            Ok(SweepRow {
                n_ions: n,
                omega_z: cfg.omega_z,
                s0,
                tau_vib_inv: rate,
                tau_rad_inv,
                t_dec: (rate + tau_rad_inv).recip(),
            })
        })
        .collect::<Result<_>>()?;

    let xs: Vec<f64> = rows.iter().map(|r| (r.n_ions as f64).ln()).collect();
    let ys: Vec<f64> = rows
        .iter()
        .map(|r| {
            let corr: T = regime.log_correction(r.n_ions, spec.multipole_a);
            (r.tau_vib_inv * corr).to_f64_lossy().ln()
        })
        .collect();
    let fit = if rows.len() >= 2 {
        fit_power_law(&xs, &ys)?
    } else {
        PowerLawFit {
            exponent: f64::NAN,
            intercept: f64::NAN,
            rms_residual: f64::NAN,
        }
    };
    Ok(SweepResult { regime, rows, fit })
}

/// Smallest swept N beyond which vibrational dephasing outpaces radiative
/// decay at every later point.
pub fn dominance_crossover<T: Scalar>(rows: &[SweepRow<T>]) -> Option<usize> {
    let mut crossover = None;
    for r in rows.iter().rev() {
        if r.tau_vib_inv > r.tau_rad_inv {
            crossover = Some(r.n_ions);
        } else {
            break;
        }
    }
    crossover
}

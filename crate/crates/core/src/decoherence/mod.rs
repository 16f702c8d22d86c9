//! Vibrational dephasing rates, the radiative window and their combination.
//!
//! Per-ion rate at temperature zero:
//!
//! ```text
//! 1/τ_i = q² d_a² / (2π ħ m ω₀ ω_t) · Σ_{j≠i} |z_i - z_j|^{-(2a+4)}
//! ```
//!
//! with `d_a² = C ħ / (τ_s k₀^{2a+1})`. The whole array dephases at
//! `1/τ_vib = (Σ_i 1/τ_i²)^{1/2}` and spontaneous emission bounds the run
//! time by `τ_rad = 2τ_s/N`.

mod sweep;

pub use sweep::{
    dominance_crossover, fit_power_law, scaling_sweep, PowerLawFit, Regime, SweepOptions, SweepPath,
    SweepResult, SweepRow,
};

use rayon::prelude::*;

use crate::continuum::{self, ContinuumModel};
use crate::error::{ensure, Error, Result};
use crate::ion_array::{IonArray, TrapConfig};
use crate::scalar::{scaled_norm, Scalar};
use crate::sums::{self, TnForm};

/// Optical transition driven on each ion.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransitionSpec<T> {
    /// Multipole order: 1 for E1, 2 for E2.
    pub multipole_a: u32,
    /// Transition angular frequency, rad/s.
    pub omega_0: T,
    /// Spontaneous decay time of the upper level, s.
    pub tau_s: T,
    /// O(1) multipole constant in `d_a² = C ħ/(τ_s k₀^{2a+1})`.
    pub coupling_constant: T,
}

impl<T: Scalar> TransitionSpec<T> {
    pub fn new(multipole_a: u32, omega_0: T, tau_s: T) -> Result<Self> {
        let spec = Self {
            multipole_a,
            omega_0,
            tau_s,
            coupling_constant: T::one(),
        };
        spec.validate()?;
        Ok(spec)
    }

    /// Ba⁺ 6s ²S_{1/2} ↔ 5d ²D_{5/2}: E2, ω₀ = 2π·1.7e14 rad/s, τ_s = 35 s.
    pub fn ba138() -> Self {
        Self {
            multipole_a: 2,
            omega_0: T::lit(2.0) * T::PI() * T::lit(1.7e14),
            tau_s: T::lit(35.0),
            coupling_constant: T::one(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        ensure(matches!(self.multipole_a, 1 | 2), || {
            format!("multipole order must be 1 (E1) or 2 (E2), got {}", self.multipole_a)
        })?;
        ensure(self.omega_0 > T::zero() && self.omega_0.is_finite(), || {
            format!("omega_0 must be positive, got {}", self.omega_0)
        })?;
        ensure(self.tau_s > T::zero() && self.tau_s.is_finite(), || {
            format!("tau_s must be positive, got {}", self.tau_s)
        })?;
        ensure(self.coupling_constant > T::zero(), || {
            format!("coupling constant must be positive, got {}", self.coupling_constant)
        })
    }

    /// Optical wavenumber k₀ = ω₀/c.
    pub fn k0(&self, c: T) -> T {
        self.omega_0 / c
    }

    /// Exponent 2a+4 of the lattice sum in the per-ion rate.
    pub fn sum_order(&self) -> u32 {
        2 * self.multipole_a + 4
    }
}

/// How the radiative window scales with N.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum RadiativeConvention {
    /// `2τ_s/N`: on average N/2 ions are excited.
    #[default]
    TwoOverN,
    /// `τ_s/N`.
    OneOverN,
}

/// `d_a² = C ħ/(τ_s k₀^{2a+1})`, in J·m^{2a+1}.
pub fn coupling_d2<T: Scalar>(spec: &TransitionSpec<T>, config: &TrapConfig<T>) -> Result<T> {
    spec.validate()?;
    let c = &config.constants;
    let k0 = spec.k0(c.c);
    Ok(spec.coupling_constant * c.hbar / (spec.tau_s * k0.powi(2 * spec.multipole_a as i32 + 1)))
}

/// `coth(ħω_t/2k_BT)`, equal to one at T = 0.
pub fn thermal_factor<T: Scalar>(config: &TrapConfig<T>) -> Result<T> {
    ensure(config.temperature >= T::zero(), || {
        format!("temperature must be non-negative, got {}", config.temperature)
    })?;
    if config.temperature == T::zero() {
        return Ok(T::one());
    }
    let c = &config.constants;
    let x = c.hbar * config.omega_t / (T::lit(2.0) * c.k_b * config.temperature);
    Ok(x.tanh().recip())
}

/// `q² d_a² /(2π ħ m ω₀ ω_t d₀^{2a+4})` times the thermal factor, in s⁻¹.
///
/// Evaluated through `q²/(m ω_z² d₀³)` (one for a consistent d₀) so that
/// no intermediate leaves the `f64` range.
fn scaled_prefactor<T: Scalar>(d0: T, spec: &TransitionSpec<T>, config: &TrapConfig<T>) -> Result<T> {
    spec.validate()?;
    config.validate()?;
    let consts = &config.constants;
    let a = spec.multipole_a as i32;
    let m = config.species.mass;
    let wz = config.omega_z;
    let trap_identity = config.q2() / m / (wz * wz) / (d0 * d0 * d0);
    let k0d0 = spec.k0(consts.c) * d0;
    let value = trap_identity * spec.coupling_constant / (T::lit(2.0) * T::PI() * spec.tau_s)
        * (wz / spec.omega_0)
        * (wz / config.omega_t)
        * k0d0.powi(-(2 * a + 1));
    Ok(value * thermal_factor(config)?)
}

/// Dephasing rate 1/τ_i of ion `i`, s⁻¹.
pub fn per_ion_rate<T: Scalar>(
    i: usize,
    array: &IonArray<T>,
    spec: &TransitionSpec<T>,
    config: &TrapConfig<T>,
) -> Result<T> {
    ensure(array.n_ions() >= 2, || "per-ion rates need at least 2 ions".into())?;
    let pre = scaled_prefactor(array.d0(), spec, config)?;
    Ok(pre * sums::s_n_exact(array, i, spec.sum_order())?)
}

pub fn per_ion_rates<T: Scalar>(
    array: &IonArray<T>,
    spec: &TransitionSpec<T>,
    config: &TrapConfig<T>,
) -> Result<Vec<T>> {
    ensure(array.n_ions() >= 2, || "per-ion rates need at least 2 ions".into())?;
    let pre = scaled_prefactor(array.d0(), spec, config)?;
    let order = spec.sum_order();
    (0..array.n_ions())
        .into_par_iter()
        .map(|i| Ok(pre * sums::s_n_exact(array, i, order)?))
        .collect()
}

/// Quadrature combination `(Σ r_i²)^{1/2}`.
pub fn combine_in_quadrature<T: Scalar>(rates: &[T]) -> T {
    scaled_norm(rates)
}

/// Whole-array vibrational rate 1/τ_vib from the exact lattice sums, s⁻¹.
pub fn total_vib_rate<T: Scalar>(
    array: &IonArray<T>,
    spec: &TransitionSpec<T>,
    config: &TrapConfig<T>,
) -> Result<T> {
    Ok(combine_in_quadrature(&per_ion_rates(array, spec, config)?))
}

/// Continuum evaluation route for 1/τ_vib.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ContinuumPath {
    /// `N^{1/2} q² d_a² /(2π ħ m ω₀ ω_t s₀^{2a+4})`.
    ClosedForm9,
    /// `(C/2π)(N^{1/2}/τ_s)(d₀/s₀)³ (ω_z²/ω₀ω_t)(k₀s₀)^{-(2a+1)}`.
    ClosedForm11,
    /// Prefactor · 2ζ(2a+4) · (T_{4a+8})^{1/2} with the asymptotic continuum T.
    SumPipeline,
}

impl std::str::FromStr for ContinuumPath {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace('_', "-").as_str() {
            "closed-form9" | "closed-form-9" | "cf9" => Ok(ContinuumPath::ClosedForm9),
            "closed-form11" | "closed-form-11" | "cf11" => Ok(ContinuumPath::ClosedForm11),
            "sum-pipeline" | "pipeline" => Ok(ContinuumPath::SumPipeline),
            other => Err(Error::domain(format!("unknown continuum path '{other}'"))),
        }
    }
}

impl ContinuumPath {
    pub fn name(self) -> &'static str {
        match self {
            ContinuumPath::ClosedForm9 => "closed-form9",
            ContinuumPath::ClosedForm11 => "closed-form11",
            ContinuumPath::SumPipeline => "sum-pipeline",
        }
    }
}

/// Continuum estimate of 1/τ_vib for `n_ions` ions in the trap of `config`.
pub fn vib_rate_continuum<T: Scalar>(
    n_ions: usize,
    spec: &TransitionSpec<T>,
    config: &TrapConfig<T>,
    model: ContinuumModel,
    path: ContinuumPath,
) -> Result<T> {
    spec.validate()?;
    config.validate()?;
    let d0 = config.d0()?;
    let s0 = continuum::min_spacing::<T>(n_ions, model)? * d0;
    let sqrt_n = T::from_count(n_ions).sqrt();
    let a = spec.multipole_a as i32;
    let consts = &config.constants;
    let thermal = thermal_factor(config)?;
    match path {
        ContinuumPath::ClosedForm9 => {
            let d2 = coupling_d2(spec, config)?;
            Ok(sqrt_n * config.q2() * d2
                / (T::lit(2.0) * T::PI() * consts.hbar * config.species.mass * spec.omega_0 * config.omega_t
                    * s0.powi(2 * a + 4))
                * thermal)
        }
        ContinuumPath::ClosedForm11 => {
            let ratio = d0 / s0;
            let k0s0 = spec.k0(consts.c) * s0;
            Ok(spec.coupling_constant / (T::lit(2.0) * T::PI()) * sqrt_n / spec.tau_s
                * ratio * ratio * ratio
                * config.omega_z * config.omega_z / (spec.omega_0 * config.omega_t)
                * k0s0.powi(-(2 * a + 1))
                * thermal)
        }
        ContinuumPath::SumPipeline => {
            let order = spec.sum_order();
            let t = sums::t_n_continuum::<T>(n_ions, 2 * order, model, TnForm::Asymptotic)?;
            Ok(scaled_prefactor(d0, spec, config)? * T::lit(2.0) * sums::zeta::<T>(order)? * t.sqrt())
        }
    }
}

/// Radiative window `2τ_s/N`.
pub fn radiative_window<T: Scalar>(n_ions: usize, tau_s: T) -> Result<T> {
    radiative_window_with(n_ions, tau_s, RadiativeConvention::TwoOverN)
}

pub fn radiative_window_with<T: Scalar>(n_ions: usize, tau_s: T, convention: RadiativeConvention) -> Result<T> {
    ensure(n_ions >= 1, || "radiative window needs at least 1 ion".into())?;
    ensure(tau_s > T::zero(), || format!("tau_s must be positive, got {tau_s}"))?;
    let n = T::from_count(n_ions);
    Ok(match convention {
        RadiativeConvention::TwoOverN => T::lit(2.0) * tau_s / n,
        RadiativeConvention::OneOverN => tau_s / n,
    })
}

/// `t_dec = (1/τ_rad + 1/τ_vib)^{-1}`; either time may be infinite.
pub fn combined_decoherence<T: Scalar>(tau_vib: T, tau_rad: T) -> Result<T> {
    ensure(tau_vib > T::zero() && tau_rad > T::zero(), || {
        format!("decoherence times must be positive (tau_vib={tau_vib}, tau_rad={tau_rad})")
    })?;
    Ok((tau_vib.recip() + tau_rad.recip()).recip())
}

/// `(Π_i cos²(t/τ_i), exp(-t²/τ_vib²))` at time `t`.
pub fn fidelity_profile<T: Scalar>(t: T, per_ion_rates: &[T]) -> Result<(T, T)> {
    ensure(t >= T::zero(), || format!("time must be non-negative, got {t}"))?;
    let exact = per_ion_rates.iter().fold(T::one(), |p, &r| {
        let c = (t * r).cos();
        p * c * c
    });
    let total = combine_in_quadrature(per_ion_rates);
    let x = t * total;
    Ok((exact, (-(x * x)).exp()))
}

/// Full decoherence budget of one array.
#[derive(Debug, Clone, PartialEq)]
pub struct DecoherenceReport<T> {
    pub n_ions: usize,
    pub per_ion_rates: Vec<T>,
    pub tau_vib: T,
    pub tau_rad: T,
    pub t_dec: T,
    /// d₀, m.
    pub d0: T,
    /// Exact minimum gap, m.
    pub s0: T,
    pub thermal_factor: T,
    pub radiative_convention: RadiativeConvention,
    pub advisory: Option<String>,
}

impl<T: Scalar> DecoherenceReport<T> {
    pub fn tau_vib_inv(&self) -> T {
        self.tau_vib.recip()
    }

    pub fn tau_rad_inv(&self) -> T {
        self.tau_rad.recip()
    }
}

pub fn decoherence_report<T: Scalar>(
    array: &IonArray<T>,
    spec: &TransitionSpec<T>,
    config: &TrapConfig<T>,
    convention: RadiativeConvention,
) -> Result<DecoherenceReport<T>> {
    let per_ion_rates = per_ion_rates(array, spec, config)?;
    let total = combine_in_quadrature(&per_ion_rates);
    let tau_vib = total.recip();
    let n = array.n_ions();
    let tau_rad = radiative_window_with(n, spec.tau_s, convention)?;
    Ok(DecoherenceReport {
        n_ions: n,
        tau_vib,
        tau_rad,
        t_dec: combined_decoherence(tau_vib, tau_rad)?,
        d0: array.d0(),
        s0: array.spacings()?.s0_exact * array.d0(),
        thermal_factor: thermal_factor(config)?,
        radiative_convention: convention,
        advisory: config.linear_regime_advisory(),
        per_ion_rates,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constants::{IonSpecies, PhysicalConstants};
    use crate::ion_array::{solve_equilibrium, SolverOptions};
    use std::f64::consts::PI;

    fn scaled_config(n: usize) -> TrapConfig<f64> {
        let mut cfg = TrapConfig::new(n, 1.0, 1.0, IonSpecies::new("unit", 1.0, 1).unwrap()).unwrap();
        cfg.constants = PhysicalConstants::unit();
        cfg
    }

    fn scaled_spec(a: u32) -> TransitionSpec<f64> {
        TransitionSpec::new(a, 1.0, 1.0).unwrap()
    }

    #[test]
    fn coupling_examples() {
        let cfg = scaled_config(2);
        assert_eq!(coupling_d2(&scaled_spec(1), &cfg).unwrap(), 1.0);
        let mut spec = scaled_spec(2);
        let base = coupling_d2(&spec, &cfg).unwrap();
        spec.tau_s = 2.0;
        assert_eq!(coupling_d2(&spec, &cfg).unwrap(), base / 2.0);

        let ba = TrapConfig::<f64>::ba138(10);
        let spec = TransitionSpec::<f64>::ba138();
        let k0 = spec.k0(ba.constants.c);
        assert!((k0 / 3.56e6 - 1.0).abs() < 2e-3);
        let d2 = coupling_d2(&spec, &ba).unwrap();
        assert!((d2 / (ba.constants.hbar / (35.0 * k0.powi(5))) - 1.0).abs() < 1e-14);
    }

    #[test]
    fn two_ion_rate_in_unit_constants() {
        let cfg = scaled_config(2);
        let array = solve_equilibrium(&cfg, &SolverOptions::default()).unwrap();
        assert_eq!(array.d0(), 1.0);
        let g = array.spacings().unwrap().gaps[0];
        for a in [1, 2] {
            let spec = scaled_spec(a);
            let want = g.powi(-(2 * a as i32 + 4)) / (2.0 * PI);
            for i in 0..2 {
                let r = per_ion_rate(i, &array, &spec, &cfg).unwrap();
                assert!((r / want - 1.0).abs() < 1e-13);
            }
        }
    }

    #[test]
    fn rates_are_mirror_symmetric() {
        let cfg = TrapConfig::<f64>::ba138(31);
        let array = solve_equilibrium(&cfg, &SolverOptions::default()).unwrap();
        let rates = per_ion_rates(&array, &TransitionSpec::ba138(), &cfg).unwrap();
        for i in 0..rates.len() {
            let j = rates.len() - 1 - i;
            assert!((rates[i] / rates[j] - 1.0).abs() < 1e-8);
        }
        assert!(per_ion_rate(31, &array, &TransitionSpec::ba138(), &cfg).is_err());
    }

    #[test]
    fn quadrature_combination() {
        assert_eq!(combine_in_quadrature(&[0.0, 3.5, 0.0]), 3.5);
        let r = 0.37f64;
        let n = 49;
        let total = combine_in_quadrature(&vec![r; n]);
        assert!((total - 7.0 * r).abs() < 1e-14);
        let rates = [0.1, 2.0, 0.7, 1.3];
        assert!(combine_in_quadrature(&rates) <= rates.iter().sum::<f64>());
    }

    #[test]
    fn radiative_and_combined() {
        assert_eq!(radiative_window(1, 35.0).unwrap(), 70.0);
        assert!((radiative_window(1000, 35.0f64).unwrap() - 0.07).abs() < 1e-15);
        assert_eq!(radiative_window(500, 35.0).unwrap(), 2.0 * radiative_window(1000, 35.0).unwrap());
        assert_eq!(
            radiative_window_with(1000, 35.0, RadiativeConvention::OneOverN).unwrap(),
            0.035
        );
        assert!(radiative_window(0, 1.0f64).is_err());

        assert_eq!(combined_decoherence(2.0, 2.0).unwrap(), 1.0);
        assert_eq!(combined_decoherence(f64::INFINITY, 0.3).unwrap(), 0.3);
        assert!((combined_decoherence(1.0f64, 1.0 / 3.0).unwrap() - 0.25).abs() < 1e-15);
        assert!(combined_decoherence(0.0, 1.0).is_err());
        assert!(combined_decoherence(1.0, -1.0).is_err());
    }

    #[test]
    fn fidelity_examples() {
        assert_eq!(fidelity_profile(0.0, &[1.0, 2.0]).unwrap(), (1.0, 1.0));
        let (e, g) = fidelity_profile(0.01, &[1.0]).unwrap();
        assert!((e - 0.01f64.cos().powi(2)).abs() < 1e-15);
        assert!((e - g).abs() < 1e-8);
        assert!(fidelity_profile(-1.0, &[1.0]).is_err());

        // Ten deterministic pseudo-random rates in [0.5, 1.5].
        let rates: Vec<f64> = (0..10).map(|k| 0.5 + ((k * 7919) % 101) as f64 / 100.0).collect();
        let tau_min = rates.iter().map(|r| 1.0 / r).fold(f64::INFINITY, f64::min);
        for step in 0..=100 {
            let t = 0.2 * tau_min * step as f64 / 100.0;
            let (e, g) = fidelity_profile(t, &rates).unwrap();
            assert!((e - g).abs() <= 1e-3, "t={t}: {e} vs {g}");
            assert!((0.0..=1.0).contains(&e) && (0.0..=1.0).contains(&g));
        }
    }

    #[test]
    fn thermal_factor_limits() {
        let mut cfg = TrapConfig::<f64>::ba138(5);
        assert_eq!(thermal_factor(&cfg).unwrap(), 1.0);
        cfg.temperature = 1e-6;
        let x = cfg.constants.hbar * cfg.omega_t / (2.0 * cfg.constants.k_b * 1e-6);
        assert!((thermal_factor(&cfg).unwrap() - 1.0 / x.tanh()).abs() < 1e-12);
        cfg.temperature = 10.0;
        assert!(thermal_factor(&cfg).unwrap() > 1.0e3);
        cfg.temperature = -1.0;
        assert!(thermal_factor(&cfg).is_err());
    }

    #[test]
    fn closed_forms_agree_and_scale() {
        let spec = TransitionSpec::<f64>::ba138();
        for (n, wz) in [(200, 1.0e5), (1000, 3.0e5), (5000, 7.7e4)] {
            let mut cfg = TrapConfig::<f64>::ba138(n);
            cfg.omega_z = 2.0 * PI * wz;
            let a = vib_rate_continuum(n, &spec, &cfg, ContinuumModel::DubinFluid, ContinuumPath::ClosedForm9).unwrap();
            let b = vib_rate_continuum(n, &spec, &cfg, ContinuumModel::DubinFluid, ContinuumPath::ClosedForm11).unwrap();
            assert!((a / b - 1.0).abs() < 1e-12, "{a} vs {b}");
        }
        // The rate scales as s0^-(2a+4): compare two models at the same N.
        let cfg = TrapConfig::<f64>::ba138(1000);
        let r_d = vib_rate_continuum(1000, &spec, &cfg, ContinuumModel::DubinFluid, ContinuumPath::ClosedForm9).unwrap();
        let r_h = vib_rate_continuum(1000, &spec, &cfg, ContinuumModel::HughesFit, ContinuumPath::ClosedForm9).unwrap();
        let s_d: f64 = continuum::min_spacing(1000, ContinuumModel::DubinFluid).unwrap();
        let s_h: f64 = continuum::min_spacing(1000, ContinuumModel::HughesFit).unwrap();
        assert!((r_d / r_h - (s_h / s_d).powi(8)).abs() < 1e-9 * (s_h / s_d).powi(8));
        assert!(vib_rate_continuum(1000, &spec, &cfg, ContinuumModel::HughesFit, ContinuumPath::SumPipeline).is_err());
    }

    #[test]
    fn report_invariants() {
        let cfg = TrapConfig::<f64>::ba138(50);
        let array = solve_equilibrium(&cfg, &SolverOptions::default()).unwrap();
        let rep = decoherence_report(&array, &TransitionSpec::ba138(), &cfg, RadiativeConvention::default()).unwrap();
        let sq: f64 = rep.per_ion_rates.iter().map(|r| r * r).sum();
        assert!((rep.tau_vib.powi(-2) / sq - 1.0).abs() < 1e-12);
        assert!(rep.t_dec <= rep.tau_vib.min(rep.tau_rad));
        assert_eq!(rep.thermal_factor, 1.0);
    }
}

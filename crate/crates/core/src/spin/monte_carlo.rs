//! Monte Carlo of the dephasing of one ion driven by the zero-point motion
//! of the others.
//!
//! Each neighbour j oscillates transversely as `A_j cos(ω_t t + φ_j)` with
//! Gaussian `A_j` (variance `2ħ/(m ω_t)` times the thermal factor) and
//! uniform `φ_j`. The field it produces at ion i is
//! `d_a q A_j /(2ħ r_ij^{a+2})` along x, so the total is one sinusoid at
//! ω_t and the excess phase follows from [`dynamical_phase`].

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use super::{dynamical_phase, DriveComponent, TransverseDrive};
use crate::decoherence::{coupling_d2, per_ion_rate, thermal_factor, TransitionSpec};
use crate::error::{ensure, Error, Result};
use crate::ion_array::{IonArray, TrapConfig};
use crate::scalar::{compensated_sum, Scalar};
use crate::sums::distances_from;

#[derive(Debug, Clone, PartialEq)]
pub struct McOptions<T> {
    pub time_points: usize,
    /// End of the time grid; defaults to twice the predicted τ_i.
    pub t_max: Option<T>,
    /// Replace every amplitude by zero.
    pub zero_amplitudes: bool,
}

impl<T> Default for McOptions<T> {
    fn default() -> Self {
        Self {
            time_points: 201,
            t_max: None,
            zero_amplitudes: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct McResult<T> {
    pub ion_index: usize,
    pub trials: usize,
    pub seed: u64,
    pub times: Vec<T>,
    /// Trial average of cos Φ.
    pub mean_overlap: Vec<T>,
    /// Trial average of Φ.
    pub mean_phase: Vec<T>,
    /// `cos(π t / 2τ_i)`: the mean phase implied by the closed-form rate.
    pub predicted_cos_phi: Vec<T>,
    /// 1/τ_i from the lattice-sum formula, s⁻¹ inverted.
    pub tau_i_predicted: T,
    /// First time at which the mean relative precession 2Φ reaches π.
    pub t_pi_empirical: T,
    /// Largest dΦ/dt over all trials; cos Φ cannot revive before
    /// `π/(2 max_phase_rate)`.
    pub max_phase_rate: T,
    /// Largest field amplitude |f| drawn in any trial, rad/s.
    pub max_field_amplitude: T,
}

impl<T: Scalar> McResult<T> {
    pub fn pre_revival_time(&self) -> T {
        T::FRAC_PI_2() / self.max_phase_rate
    }
}

fn trial_drive<T: Scalar>(seed: u64, trial: usize, couplings: &[T], sigma: T, omega_t: T) -> TransverseDrive<T> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial as u64);
    let two_pi = 2.0 * std::f64::consts::PI;
    // Σ_j c_j A_j cos(ω_t t + φ_j) = P cos ω_t t - Q sin ω_t t.
    let (mut p, mut q) = (T::zero(), T::zero());
    for &c in couplings {
        let xi: f64 = rng.sample(StandardNormal);
        let phi = T::lit(rng.random::<f64>() * two_pi);
        let amp = c * sigma * T::lit(xi);
        let (s, k) = phi.sin_cos();
        p = p + amp * k;
        q = q + amp * s;
    }
    TransverseDrive {
        components: vec![DriveComponent {
            amplitude: [(p * p + q * q).sqrt(), T::zero()],
            frequency: omega_t,
            phase: q.atan2(p),
        }],
    }
}

fn mean_phase_at<T: Scalar>(drives: &[TransverseDrive<T>], t: T, omega_0: T) -> Result<T> {
    let phases = drives
        .iter()
        .map(|d| dynamical_phase(d, t, omega_0))
        .collect::<Result<Vec<T>>>()?;
    Ok(compensated_sum(phases) / T::from_count(drives.len()))
}

/// Drive, phase samples and overlap samples of one trial.
type Trial<T> = (TransverseDrive<T>, Vec<T>, Vec<T>);

/// Runs `trials` independent realisations for ion `ion_index`.
///
/// Trial k draws from ChaCha8 seeded with `seed` on stream k, so the output
/// does not depend on the thread count. A missing seed is an error.
pub fn monte_carlo_dephasing<T: Scalar>(
    array: &IonArray<T>,
    config: &TrapConfig<T>,
    spec: &TransitionSpec<T>,
    ion_index: usize,
    trials: usize,
    seed: Option<u64>,
    opts: &McOptions<T>,
) -> Result<McResult<T>> {
    let seed = seed.ok_or_else(|| Error::domain("Monte Carlo runs need an explicit seed"))?;
    let n = array.n_ions();
    ensure(n >= 2, || "Monte Carlo dephasing needs at least 2 ions".into())?;
    if ion_index >= n {
        return Err(Error::Index { index: ion_index, n_ions: n });
    }
    ensure(trials >= 1, || "need at least one trial".into())?;
    ensure(opts.time_points >= 2, || "need at least two time points".into())?;

    let tau_i = per_ion_rate(ion_index, array, spec, config)?.recip();
    let t_max = opts.t_max.unwrap_or(T::lit(2.0) * tau_i);
    ensure(t_max > T::zero() && t_max.is_finite(), || format!("t_max must be positive, got {t_max}"))?;

    let consts = &config.constants;
    let a = spec.multipole_a as i32;
    let d0 = array.d0();
    let field_per_metre = coupling_d2(spec, config)?.sqrt() * config.q2().sqrt()
        / (T::lit(2.0) * consts.hbar)
        / d0.powi(a + 2);
    let couplings: Vec<T> = distances_from(array, ion_index)
        .into_iter()
        .map(|r| field_per_metre * r.powi(-(a + 2)))
        .collect();
    let sigma = if opts.zero_amplitudes {
        T::zero()
    } else {
        (T::lit(2.0) * consts.hbar / (config.species.mass * config.omega_t) * thermal_factor(config)?).sqrt()
    };

    let omega_0 = spec.omega_0;
    let times: Vec<T> = (0..opts.time_points)
        .map(|k| t_max * T::from_count(k) / T::from_count(opts.time_points - 1))
        .collect();

    let per_trial: Vec<Trial<T>> = (0..trials)
        .into_par_iter()
        .map(|trial| {
            let drive = trial_drive(seed, trial, &couplings, sigma, config.omega_t);
            let phases = times
                .iter()
                .map(|&t| dynamical_phase(&drive, t, omega_0))
                .collect::<Result<Vec<T>>>()?;
            let cosines = phases.iter().map(|p| p.cos()).collect();
            Ok((drive, phases, cosines))
        })
        .collect::<Result<_>>()?;

    let inv = T::from_count(trials).recip();
    let column_mean = |pick: &dyn Fn(&Trial<T>) -> &Vec<T>| -> Vec<T> {
        (0..times.len())
            .map(|k| compensated_sum(per_trial.iter().map(|row| pick(row)[k])) * inv)
            .collect()
    };
    let mean_phase = column_mean(&|row| &row.1);
    let mean_overlap = column_mean(&|row| &row.2);
    let drives: Vec<TransverseDrive<T>> = per_trial.into_iter().map(|row| row.0).collect();

    let max_field_amplitude = drives
        .iter()
        .map(|d| d.components[0].amplitude[0])
        .fold(T::zero(), T::max);
    let max_phase_rate = max_field_amplitude * max_field_amplitude / omega_0;

    let predicted_cos_phi = times
        .iter()
        .map(|&t| (T::FRAC_PI_2() * t / tau_i).cos())
        .collect();

    let t_pi_empirical = if max_phase_rate == T::zero() {
        T::infinity()
    } else {
        first_half_pi_crossing(&drives, omega_0, tau_i)?
    };

    Ok(McResult {
        ion_index,
        trials,
        seed,
        times,
        mean_overlap,
        mean_phase,
        predicted_cos_phi,
        tau_i_predicted: tau_i,
        t_pi_empirical,
        max_phase_rate,
        max_field_amplitude,
    })
}

/// Mean Φ is non-decreasing, so bracket and bisect Φ̄(t) = π/2.
fn first_half_pi_crossing<T: Scalar>(drives: &[TransverseDrive<T>], omega_0: T, guess: T) -> Result<T> {
    let target = T::FRAC_PI_2();
    let mut lo = T::zero();
    let mut hi = guess;
    let mut expansions = 0;
    while mean_phase_at(drives, hi, omega_0)? < target {
        lo = hi;
        hi = hi * T::lit(2.0);
        expansions += 1;
        if expansions > 200 || !hi.is_finite() {
            return Err(Error::Convergence {
                iterations: expansions,
                residual: f64::NAN,
            });
        }
    }
    for _ in 0..200 {
        let mid = T::lit(0.5) * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if mean_phase_at(drives, mid, omega_0)? < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(hi)
}

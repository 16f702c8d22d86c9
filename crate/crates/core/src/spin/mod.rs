//! A two-level system under a strong static splitting ω₀ and a weak, slow
//! transverse field f(t) = (f_x, f_y, 0):
//!
//! ```text
//! H = ω₀ σ_z / 2 + f(t)·σ
//! ```
//!
//! Amplitudes are kept in the interaction picture,
//! `|ψ⟩ = u₊ e^{-iω₀t/2}|+⟩ + u₋ e^{iω₀t/2}|−⟩`, where
//! `i u̇_± = e^{±iω₀t} f_∓ u_∓` and `f_± = f_x ± i f_y`. In the adiabatic
//! limit the slow amplitudes pick up `e^{∓iΦ}` with `Φ(t) = ∫ |f|²/ω₀ dt`.

mod monte_carlo;

pub use monte_carlo::{monte_carlo_dephasing, McOptions, McResult};

use num_complex::Complex;

use crate::error::{ensure, Error, Result};
use crate::scalar::Scalar;

/// Interaction-picture amplitudes (u₊, u₋).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpinState<T> {
    pub amp_plus: Complex<T>,
    pub amp_minus: Complex<T>,
}

fn norm_tolerance<T: Scalar>() -> T {
    T::lit(1e-9).max(T::epsilon() * T::lit(100.0))
}

impl<T: Scalar> SpinState<T> {
    pub fn new(amp_plus: Complex<T>, amp_minus: Complex<T>) -> Result<Self> {
        let s = Self { amp_plus, amp_minus };
        let drift = (s.norm_sqr() - T::one()).abs();
        ensure(drift <= norm_tolerance::<T>(), || {
            format!("spin state must be normalised, |norm² - 1| = {drift:e}")
        })?;
        Ok(s)
    }

    /// `(|+⟩ + |−⟩)/√2`.
    pub fn equal_superposition() -> Self {
        let a = Complex::new(T::lit(0.5).sqrt(), T::zero());
        Self {
            amp_plus: a,
            amp_minus: a,
        }
    }

    pub fn norm_sqr(&self) -> T {
        self.amp_plus.norm_sqr() + self.amp_minus.norm_sqr()
    }

    /// `⟨self|other⟩`. The interaction-picture phases cancel, so this is also
    /// the overlap of the corresponding lab-frame states at equal times.
    pub fn overlap(&self, other: &Self) -> Complex<T> {
        self.amp_plus.conj() * other.amp_plus + self.amp_minus.conj() * other.amp_minus
    }

    /// Relative phase `arg(u₋ ū₊)`, which equals 2Φ in the adiabatic limit.
    pub fn relative_phase(&self) -> T {
        (self.amp_minus * self.amp_plus.conj()).arg()
    }
}

/// One sinusoidal term `a cos(Ωt + φ)` of the transverse field.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DriveComponent<T> {
    /// (x, y) amplitude, rad/s.
    pub amplitude: [T; 2],
    /// Ω ≥ 0, rad/s. Zero gives a static term `a cos φ`.
    pub frequency: T,
    pub phase: T,
}

/// The slow transverse field, as a sum of sinusoids in the x–y plane.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct TransverseDrive<T> {
    pub components: Vec<DriveComponent<T>>,
}

impl<T: Scalar> TransverseDrive<T> {
    pub fn new(components: Vec<DriveComponent<T>>) -> Result<Self> {
        ensure(
            components
                .iter()
                .all(|c| c.frequency >= T::zero() && c.frequency.is_finite()),
            || "drive frequencies must be finite and non-negative".into(),
        )?;
        Ok(Self { components })
    }

    pub fn zero() -> Self {
        Self { components: Vec::new() }
    }

    pub fn constant(fx: T, fy: T) -> Self {
        Self {
            components: vec![DriveComponent {
                amplitude: [fx, fy],
                frequency: T::zero(),
                phase: T::zero(),
            }],
        }
    }

    /// `f = (ε cos(Ωt), 0)`.
    pub fn linear(eps: T, frequency: T) -> Result<Self> {
        Self::new(vec![DriveComponent {
            amplitude: [eps, T::zero()],
            frequency,
            phase: T::zero(),
        }])
    }

    /// `f = ε (cos Ωt, sin Ωt)`.
    pub fn circular(eps: T, frequency: T) -> Result<Self> {
        Self::new(vec![
            DriveComponent {
                amplitude: [eps, T::zero()],
                frequency,
                phase: T::zero(),
            },
            DriveComponent {
                amplitude: [T::zero(), eps],
                frequency,
                phase: -T::FRAC_PI_2(),
            },
        ])
    }

    pub fn is_zero(&self) -> bool {
        self.components
            .iter()
            .all(|c| c.amplitude[0] == T::zero() && c.amplitude[1] == T::zero())
    }

    pub fn value(&self, t: T) -> (T, T) {
        self.components.iter().fold((T::zero(), T::zero()), |(x, y), c| {
            let k = (c.frequency * t + c.phase).cos();
            (x + c.amplitude[0] * k, y + c.amplitude[1] * k)
        })
    }

    pub fn derivative(&self, t: T) -> (T, T) {
        self.components.iter().fold((T::zero(), T::zero()), |(x, y), c| {
            let k = -c.frequency * (c.frequency * t + c.phase).sin();
            (x + c.amplitude[0] * k, y + c.amplitude[1] * k)
        })
    }

    /// (max |f|, max |ḟ|): exact when every component shares one frequency,
    /// a triangle-inequality bound otherwise.
    pub fn magnitude_bounds(&self) -> (T, T) {
        let mut freqs: Vec<T> = self.components.iter().map(|c| c.frequency).collect();
        freqs.sort_by(|a, b| a.partial_cmp(b).expect("finite frequency"));
        freqs.dedup();
        let mut max_f = T::zero();
        let mut max_df = T::zero();
        for w in freqs {
            // f_w(θ) = P cos θ - Q sin θ with θ = wt.
            let (mut p, mut q) = ([T::zero(); 2], [T::zero(); 2]);
            for c in self.components.iter().filter(|c| c.frequency == w) {
                let (s, k) = c.phase.sin_cos();
                for d in 0..2 {
                    p[d] = p[d] + c.amplitude[d] * k;
                    q[d] = q[d] + c.amplitude[d] * s;
                }
            }
            let pp = p[0] * p[0] + p[1] * p[1];
            let m = if w == T::zero() {
                pp.sqrt()
            } else {
                let qq = q[0] * q[0] + q[1] * q[1];
                let pq = p[0] * q[0] + p[1] * q[1];
                let half = T::lit(0.5);
                let disc = ((pp - qq) * (pp - qq) + T::lit(4.0) * pq * pq).sqrt();
                (half * (pp + qq) + half * disc).sqrt()
            };
            max_f = max_f + m;
            max_df = max_df + w * m;
        }
        (max_f, max_df)
    }
}

/// Closed-form `Φ(t) = ∫₀ᵗ |f|²/ω₀ dt'`, cross terms included.
pub fn dynamical_phase<T: Scalar>(drive: &TransverseDrive<T>, t: T, omega_0: T) -> Result<T> {
    ensure(t >= T::zero(), || format!("time must be non-negative, got {t}"))?;
    ensure(omega_0 > T::zero(), || format!("omega_0 must be positive, got {omega_0}"))?;
    let half = T::lit(0.5);
    // ∫₀ᵗ cos(w s + ψ) ds, written to stay accurate for small w.
    let cos_integral = |w: T, psi: T| -> T {
        if w == T::zero() {
            t * psi.cos()
        } else {
            let x = half * w * t;
            T::lit(2.0) * (psi + x).cos() * x.sin() / w
        }
    };
    let mut acc = T::zero();
    for a in &drive.components {
        for b in &drive.components {
            let dot = a.amplitude[0] * b.amplitude[0] + a.amplitude[1] * b.amplitude[1];
            if dot == T::zero() {
                continue;
            }
            acc = acc
                + half
                    * dot
                    * (cos_integral(a.frequency - b.frequency, a.phase - b.phase)
                        + cos_integral(a.frequency + b.frequency, a.phase + b.phase));
        }
    }
    Ok(acc / omega_0)
}

/// Composite-Simpson `Φ(t)` for an arbitrary transverse field.
pub fn dynamical_phase_quadrature<T: Scalar>(
    field: impl Fn(T) -> (T, T),
    t: T,
    omega_0: T,
    intervals: usize,
) -> Result<T> {
    ensure(t >= T::zero(), || format!("time must be non-negative, got {t}"))?;
    ensure(intervals >= 2 && intervals.is_multiple_of(2), || "Simpson needs an even interval count".into())?;
    let h = t / T::from_count(intervals);
    let sq = |s: T| {
        let (x, y) = field(s);
        x * x + y * y
    };
    let mut acc = sq(T::zero()) + sq(t);
    for k in 1..intervals {
        let w = if k % 2 == 1 { T::lit(4.0) } else { T::lit(2.0) };
        acc = acc + w * sq(h * T::from_count(k));
    }
    Ok(acc * h / T::lit(3.0) / omega_0)
}

/// Adiabatic prediction `⟨ψ₀(t)|ψ(t)⟩ = cos Φ` for the equal superposition.
pub fn ideal_overlap<T: Scalar>(phi: T) -> T {
    phi.cos()
}

/// Slow amplitudes `β_±(t) = e^{∓iΦ} β_±(0)`.
pub fn predicted_slow_amplitudes<T: Scalar>(phi: T, state0: &SpinState<T>) -> SpinState<T> {
    SpinState {
        amp_plus: state0.amp_plus * Complex::from_polar(T::one(), -phi),
        amp_minus: state0.amp_minus * Complex::from_polar(T::one(), phi),
    }
}

/// Exact excess precession rate `½(√(ω₀² + 4ε²) - ω₀)` for a static field of magnitude ε.
pub fn static_excess_precession<T: Scalar>(omega_0: T, eps: T) -> T {
    let four = T::lit(4.0);
    T::lit(2.0) * eps * eps / ((omega_0 * omega_0 + four * eps * eps).sqrt() + omega_0)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AdiabaticityDiagnostics<T> {
    /// max |f| / ω₀.
    pub field_ratio: T,
    /// max |ḟ| / (max |f| ω₀).
    pub rate_ratio: T,
    /// Secular breakdown time ω₀³ / max|ḟ|².
    pub breakdown_time: T,
    /// Either ratio exceeds 0.1.
    pub flagged: bool,
}

pub fn adiabaticity_check<T: Scalar>(drive: &TransverseDrive<T>, omega_0: T) -> Result<AdiabaticityDiagnostics<T>> {
    ensure(omega_0 > T::zero(), || format!("omega_0 must be positive, got {omega_0}"))?;
    let (max_f, max_df) = drive.magnitude_bounds();
    let field_ratio = max_f / omega_0;
    let rate_ratio = if max_f > T::zero() {
        max_df / (max_f * omega_0)
    } else {
        T::zero()
    };
    let breakdown_time = if max_df > T::zero() {
        omega_0 * omega_0 * omega_0 / (max_df * max_df)
    } else {
        T::infinity()
    };
    let limit = T::lit(0.1);
    Ok(AdiabaticityDiagnostics {
        field_ratio,
        rate_ratio,
        breakdown_time,
        flagged: field_ratio > limit || rate_ratio > limit,
    })
}

/// Exact evolution under a static transverse field, by diagonalising the
/// 2×2 lab-frame Hamiltonian (eigenvalues ±½√(ω₀² + 4|f|²)).
pub fn static_field_exact<T: Scalar>(omega_0: T, field: (T, T), state0: &SpinState<T>, t: T) -> SpinState<T> {
    let half = T::lit(0.5);
    let (fx, fy) = field;
    let f_minus = Complex::new(fx, -fy);
    let f_plus = Complex::new(fx, fy);
    let lam = (half * half * omega_0 * omega_0 + fx * fx + fy * fy).sqrt();
    let (s, c) = (lam * t).sin_cos();
    let i = Complex::new(T::zero(), T::one());
    let ratio = if lam > T::zero() { s / lam } else { t };
    let (p0, m0) = (state0.amp_plus, state0.amp_minus);
    // (cos λt - i sin λt H/λ) ψ₀ with H = [[ω₀/2, f₋], [f₊, -ω₀/2]].
    let h_p = p0 * (half * omega_0) + m0 * f_minus;
    let h_m = p0 * f_plus - m0 * (half * omega_0);
    let lab_p = p0 * c - i * h_p * ratio;
    let lab_m = m0 * c - i * h_m * ratio;
    let (sw, cw) = (half * omega_0 * t).sin_cos();
    SpinState {
        amp_plus: lab_p * Complex::new(cw, sw),
        amp_minus: lab_m * Complex::new(cw, -sw),
    }
}

/// Fourth-order Magnus (two-point Gauss–Legendre) evolution of the
/// interaction-picture equations with step `2π/(ω₀·steps_per_fast_period)`.
///
/// Each step is an exact SU(2) rotation, so the norm changes only by rounding.
pub fn evolve_exact<T: Scalar>(
    omega_0: T,
    drive: &TransverseDrive<T>,
    state0: &SpinState<T>,
    t_final: T,
    steps_per_fast_period: usize,
) -> Result<SpinState<T>> {
    Ok(evolve_exact_sampled(omega_0, drive, state0, &[t_final], steps_per_fast_period)?[0])
}

/// As [`evolve_exact`], returning the state at each of the ascending `times`.
pub fn evolve_exact_sampled<T: Scalar>(
    omega_0: T,
    drive: &TransverseDrive<T>,
    state0: &SpinState<T>,
    times: &[T],
    steps_per_fast_period: usize,
) -> Result<Vec<SpinState<T>>> {
    ensure(omega_0 > T::zero(), || format!("omega_0 must be positive, got {omega_0}"))?;
    ensure(steps_per_fast_period >= 20, || {
        format!("need at least 20 steps per fast period, got {steps_per_fast_period}")
    })?;
    ensure(times.iter().all(|&t| t >= T::zero() && t.is_finite()), || {
        "sample times must be finite and non-negative".into()
    })?;
    ensure(times.windows(2).all(|w| w[0] <= w[1]), || "sample times must be ascending".into())?;

    let h = T::lit(2.0) * T::PI() / (omega_0 * T::from_count(steps_per_fast_period));
    let start_norm = state0.norm_sqr();
    let mut state = *state0;
    let mut t = T::zero();
    let mut steps: u64 = 0;
    let mut out = Vec::with_capacity(times.len());
    for &target in times {
        loop {
            let remaining = target - t;
            if remaining <= T::zero() {
                break;
            }
            let dt = if remaining > h { h } else { remaining };
            state = magnus_step(omega_0, drive, &state, t, dt);
            steps += 1;
            // Closing steps land exactly on the sample time.
            t = if remaining > h { t + h } else { target };
        }
        out.push(state);
    }

    let drift = (state.norm_sqr() - start_norm).abs();
    let steps_f = T::lit(steps as f64);
    // 1e-9 per million steps; for f64 the worst-case rounding bound
    // 4·ε·steps always sits below it, for f32 it is the binding term.
    let per_million = T::one().max(steps_f / T::lit(1.0e6));
    let tolerance = (T::lit(1e-9) * per_million).max(T::lit(4.0) * T::epsilon() * steps_f);
    if drift > tolerance {
        return Err(Error::IntegrationAccuracy {
            drift: drift.to_f64_lossy(),
            tolerance: tolerance.to_f64_lossy(),
        });
    }
    Ok(out)
}

/// Coupling `g(t) = e^{iω₀t} f₋(t)`; the interaction Hamiltonian is
/// `[[0, g], [ḡ, 0]] = Re g σ_x - Im g σ_y`.
fn coupling<T: Scalar>(omega_0: T, drive: &TransverseDrive<T>, t: T) -> (T, T) {
    let (fx, fy) = drive.value(t);
    let (s, c) = (omega_0 * t).sin_cos();
    let g = Complex::new(c, s) * Complex::new(fx, -fy);
    (g.re, -g.im)
}

fn magnus_step<T: Scalar>(omega_0: T, drive: &TransverseDrive<T>, state: &SpinState<T>, t: T, h: T) -> SpinState<T> {
    let half = T::lit(0.5);
    let offset = T::lit(3.0).sqrt() / T::lit(6.0);
    let v1 = coupling(omega_0, drive, t + (half - offset) * h);
    let v2 = coupling(omega_0, drive, t + (half + offset) * h);
    // exp(-i w·σ) with w = (h/2)(v1 + v2) + (√3 h²/6)(v2 × v1).
    let wx = half * h * (v1.0 + v2.0);
    let wy = half * h * (v1.1 + v2.1);
    let wz = T::lit(3.0).sqrt() * h * h / T::lit(6.0) * (v2.0 * v1.1 - v2.1 * v1.0);
    let norm = (wx * wx + wy * wy + wz * wz).sqrt();
    if norm == T::zero() {
        return *state;
    }
    let (s, c) = norm.sin_cos();
    let k = s / norm;
    let i = Complex::new(T::zero(), T::one());
    let a = Complex::new(c, -k * wz);
    let b = -i * Complex::new(k * wx, -k * wy);
    let d = -i * Complex::new(k * wx, k * wy);
    let e = Complex::new(c, k * wz);
    SpinState {
        amp_plus: a * state.amp_plus + b * state.amp_minus,
        amp_minus: d * state.amp_plus + e * state.amp_minus,
    }
}

/// Phase of a rotating-field run that the dynamical phase does not explain.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BerryDiagnostic<T> {
    /// Half the unwrapped relative phase of the exact run.
    pub measured_phase: T,
    pub dynamical_phase: T,
    pub residual: T,
}

/// Runs a circularly rotating field `ε(cos Ωt, sin Ωt)` and reports the
/// exact excess phase minus Φ. No formula for the geometric part is assumed.
pub fn berry_phase_residual<T: Scalar>(
    omega_0: T,
    eps: T,
    frequency: T,
    t_final: T,
    steps_per_fast_period: usize,
) -> Result<BerryDiagnostic<T>> {
    let drive = TransverseDrive::circular(eps, frequency)?;
    let samples = 512usize;
    let times: Vec<T> = (1..=samples)
        .map(|k| t_final * T::from_count(k) / T::from_count(samples))
        .collect();
    let states = evolve_exact_sampled(
        omega_0,
        &drive,
        &SpinState::equal_superposition(),
        &times,
        steps_per_fast_period,
    )?;
    let mut unwrapped = T::zero();
    let mut last = T::zero();
    let two_pi = T::lit(2.0) * T::PI();
    for s in &states {
        let p = s.relative_phase();
        let mut d = p - last;
        while d > T::PI() {
            d = d - two_pi;
        }
        while d < -T::PI() {
            d = d + two_pi;
        }
        unwrapped = unwrapped + d;
        last = p;
    }
    let measured = unwrapped * T::lit(0.5);
    let dynamical = dynamical_phase(&drive, t_final, omega_0)?;
    Ok(BerryDiagnostic {
        measured_phase: measured,
        dynamical_phase: dynamical,
        residual: measured - dynamical,
    })
}

//! Large-N structure laws for the ion array.
//!
//! All lengths are in units of the trap scale d₀. Three models are offered:
//!
//! * [`ContinuumModel::SimpleBalance`]: nearest-neighbour force balance with
//!   the ζ(2) sum over more distant pairs. Gives `L = (π² N/2)^{1/3}` and a
//!   parabolic inverse spacing `1/s(z) = (1 - z²/L²)/s₀`.
//! * [`ContinuumModel::DubinFluid`]: uniformly charged ellipsoid with the
//!   discreteness correction, `L³ = 3N ln(κN)` with κ = 6e^{γ-13/5}.
//! * [`ContinuumModel::HughesFit`]: the numerical fit `s₀ = 2 N^{-0.56}`.
//!   It only defines the minimum spacing.

use std::fmt;
use std::str::FromStr;

use crate::error::{ensure, Error, Result};
use crate::scalar::Scalar;

/// Euler–Mascheroni constant.
pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// Dubin's κ = 6e^{γ-13/5} ≈ 0.794 (displayed as 0.8).
pub fn dubin_kappa<T: Scalar>() -> T {
    T::lit(6.0) * (T::lit(EULER_GAMMA) - T::lit(2.6)).exp()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ContinuumModel {
    SimpleBalance,
    DubinFluid,
    HughesFit,
}

impl ContinuumModel {
    pub const ALL: [ContinuumModel; 3] = [
        ContinuumModel::SimpleBalance,
        ContinuumModel::DubinFluid,
        ContinuumModel::HughesFit,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ContinuumModel::SimpleBalance => "simple-balance",
            ContinuumModel::DubinFluid => "dubin-fluid",
            ContinuumModel::HughesFit => "hughes-fit",
        }
    }

    /// Whether the model defines a half-length and spacing profile.
    pub fn has_profile(self) -> bool {
        !matches!(self, ContinuumModel::HughesFit)
    }
}

impl fmt::Display for ContinuumModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ContinuumModel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace('_', "-").as_str() {
            "simple-balance" | "simple" => Ok(ContinuumModel::SimpleBalance),
            "dubin-fluid" | "dubin" => Ok(ContinuumModel::DubinFluid),
            "hughes-fit" | "hughes" => Ok(ContinuumModel::HughesFit),
            other => Err(Error::domain(format!("unknown continuum model '{other}'"))),
        }
    }
}

fn check_n<T: Scalar>(n_ions: usize, model: ContinuumModel) -> Result<()> {
    ensure(n_ions >= 2, || format!("continuum laws need at least 2 ions, got {n_ions}"))?;
    if model == ContinuumModel::DubinFluid {
        let arg = dubin_kappa::<T>() * T::from_count(n_ions);
        ensure(arg > T::one(), || {
            format!("Dubin fluid needs ln(κN) > 0, got κN = {arg}")
        })?;
    }
    Ok(())
}

/// Half-length L/d₀ of the array.
pub fn half_length<T: Scalar>(n_ions: usize, model: ContinuumModel) -> Result<T> {
    check_n::<T>(n_ions, model)?;
    let n = T::from_count(n_ions);
    match model {
        ContinuumModel::SimpleBalance => Ok((T::PI() * T::PI() * n / T::lit(2.0)).cbrt()),
        ContinuumModel::DubinFluid => {
            Ok((T::lit(3.0) * n * (dubin_kappa::<T>() * n).ln()).cbrt())
        }
        ContinuumModel::HughesFit => Err(Error::UnsupportedModel {
            model: "hughes-fit",
            quantity: "a half-length",
        }),
    }
}

/// Minimum (central) spacing s₀/d₀.
pub fn min_spacing<T: Scalar>(n_ions: usize, model: ContinuumModel) -> Result<T> {
    check_n::<T>(n_ions, model)?;
    let n = T::from_count(n_ions);
    match model {
        ContinuumModel::SimpleBalance => {
            // 1/s(0) = 3L²/2π² once the edge term 1/s(L) is dropped.
            let l: T = half_length(n_ions, model)?;
            Ok(T::lit(2.0) * T::PI() * T::PI() / (T::lit(3.0) * l * l))
        }
        ContinuumModel::DubinFluid => {
            let l: T = half_length(n_ions, model)?;
            Ok(T::lit(4.0) * l / (T::lit(3.0) * n))
        }
        ContinuumModel::HughesFit => Ok(T::lit(2.0) * n.powf(T::lit(-0.56))),
    }
}

/// Dubin minimum spacing in its rounded display form `1.92 N^{-2/3} [ln 0.8N]^{1/3}`.
pub fn dubin_min_spacing_rounded<T: Scalar>(n_ions: usize) -> Result<T> {
    check_n::<T>(n_ions, ContinuumModel::DubinFluid)?;
    let n = T::from_count(n_ions);
    Ok(T::lit(1.92) * n.powf(T::lit(-2.0 / 3.0)) * (T::lit(0.8) * n).ln().cbrt())
}

fn profile_params<T: Scalar>(n_ions: usize, model: ContinuumModel) -> Result<(T, T)> {
    if !model.has_profile() {
        return Err(Error::UnsupportedModel {
            model: "hughes-fit",
            quantity: "a spacing profile",
        });
    }
    Ok((half_length(n_ions, model)?, min_spacing(n_ions, model)?))
}

/// Local spacing s(z) = s₀ (1 - z²/L²)^{-1}, for |z| < L.
pub fn spacing_profile<T: Scalar>(z: T, n_ions: usize, model: ContinuumModel) -> Result<T> {
    let (l, s0) = profile_params::<T>(n_ions, model)?;
    ensure(z.abs() < l, || {
        format!("spacing profile diverges at the array edge: |z| = {} >= L = {l}", z.abs())
    })?;
    let x = z / l;
    Ok(s0 / (T::one() - x * x))
}

/// Cumulative ion count n(z) = ∫_{-L}^{z} dz'/s(z'), for |z| ≤ L.
pub fn ion_count_profile<T: Scalar>(z: T, n_ions: usize, model: ContinuumModel) -> Result<T> {
    let (l, s0) = profile_params::<T>(n_ions, model)?;
    ensure(z.abs() <= l, || format!("|z| = {} lies outside [-L, L], L = {l}", z.abs()))?;
    let x = z / l;
    let three = T::lit(3.0);
    Ok(l / s0 * (x - x * x * x / three + T::lit(2.0) / three))
}

/// Positions obtained by inverting the cumulative count at k + 1/2.
///
/// Both profile models share the normalised count `N(2 + 3x - x³)/4`, whose
/// inverse on [-1, 1] is `x = 2 sin(asin(c/2)/3)` with `c = 4n/N - 2`.
pub fn seed_positions<T: Scalar>(n_ions: usize, model: ContinuumModel) -> Result<Vec<T>> {
    if n_ions == 1 {
        return Ok(vec![T::zero()]);
    }
    let l: T = half_length(n_ions, model)?;
    let n = T::from_count(n_ions);
    let two = T::lit(2.0);
    Ok((0..n_ions)
        .map(|k| {
            let count = T::from_count(k) + T::lit(0.5);
            let c = T::lit(4.0) * count / n - two;
            l * two * ((c / two).asin() / T::lit(3.0)).sin()
        })
        .collect())
}

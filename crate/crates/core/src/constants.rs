//! Physical constants, species data and the trap length scale.
//!
//! Charges enter every formula through the Gaussian-convention square
//! q² = Z² e²/4πε₀ (J·m), so that q²/r is an energy.

use crate::error::{ensure, Result};
use crate::scalar::Scalar;

/// CODATA 2018 values.
pub mod codata {
    /// Reduced Planck constant, J·s.
    pub const HBAR: f64 = 1.054_571_817e-34;
    /// Speed of light in vacuum, m/s (exact).
    pub const C: f64 = 299_792_458.0;
    /// Boltzmann constant, J/K (exact).
    pub const K_B: f64 = 1.380_649e-23;
    /// Elementary charge, C (exact).
    pub const E: f64 = 1.602_176_634e-19;
    /// Vacuum permittivity, F/m.
    pub const EPSILON_0: f64 = 8.854_187_812_8e-12;
    /// e²/4πε₀, J·m.
    pub const E2_GAUSSIAN: f64 = 2.307_077_552_341_735_5e-28;
    /// Unified atomic mass unit, kg.
    pub const AMU: f64 = 1.660_539_066_60e-27;
}

/// The constants every downstream formula reads.
///
/// [`PhysicalConstants::si`] is the normal choice. [`PhysicalConstants::unit`]
/// sets every constant to one, which is convenient for dimensionless checks.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysicalConstants<T> {
    pub hbar: T,
    pub c: T,
    pub k_b: T,
    /// Squared elementary charge in the Gaussian convention, J·m.
    pub coulomb_q2_unit: T,
    pub amu: T,
}

impl<T: Scalar> PhysicalConstants<T> {
    pub fn si() -> Self {
        Self {
            hbar: T::lit(codata::HBAR),
            c: T::lit(codata::C),
            k_b: T::lit(codata::K_B),
            coulomb_q2_unit: T::lit(codata::E2_GAUSSIAN),
            amu: T::lit(codata::AMU),
        }
    }

    pub fn unit() -> Self {
        Self {
            hbar: T::one(),
            c: T::one(),
            k_b: T::one(),
            coulomb_q2_unit: T::one(),
            amu: T::one(),
        }
    }

    /// `Z² · e²/4πε₀` for an ion of charge number `Z`.
    pub fn gaussian_q2(&self, charge_number: u32) -> T {
        let z = T::lit(f64::from(charge_number));
        z * z * self.coulomb_q2_unit
    }

    pub fn validate(&self) -> Result<()> {
        let all = [self.hbar, self.c, self.k_b, self.coulomb_q2_unit, self.amu];
        ensure(all.iter().all(|&x| x > T::zero() && x.is_finite()), || {
            "physical constants must be strictly positive".into()
        })
    }
}

impl<T: Scalar> Default for PhysicalConstants<T> {
    fn default() -> Self {
        Self::si()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct IonSpecies<T> {
    pub name: String,
    /// Mass in kg (or in the mass unit of the chosen constants).
    pub mass: T,
    pub charge_number: u32,
}

impl<T: Scalar> IonSpecies<T> {
    pub fn new(name: impl Into<String>, mass: T, charge_number: u32) -> Result<Self> {
        ensure(mass > T::zero() && mass.is_finite(), || {
            format!("ion mass must be positive, got {mass}")
        })?;
        Ok(Self {
            name: name.into(),
            mass,
            charge_number,
        })
    }

    /// ¹³⁸Ba⁺: 137.905 u, singly charged.
    pub fn ba138(consts: &PhysicalConstants<T>) -> Self {
        Self {
            name: "138Ba+".into(),
            mass: T::lit(137.905) * consts.amu,
            charge_number: 1,
        }
    }
}

/// Natural trap length `d₀ = (q²/m ω_z²)^{1/3}`.
pub fn trap_length_scale<T: Scalar>(q2: T, mass: T, omega_z: T) -> Result<T> {
    ensure(q2 > T::zero() && mass > T::zero() && omega_z > T::zero(), || {
        format!("trap_length_scale needs positive inputs (q2={q2}, mass={mass}, omega_z={omega_z})")
    })?;
    Ok((q2 / (mass * omega_z * omega_z)).cbrt())
}

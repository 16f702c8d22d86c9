//! Lattice sums over the ion array, exact and in continuum form.
//!
//! * `S_n(i) = Σ_{j≠i} |z_i - z_j|^{-n}`, approximated by `2ζ(n)/s(z_i)^n`.
//! * `T_n = Σ_i ŝ_i^{-n}` over local spacings, approximated by
//!   `∫ dz / s^{n+1}(z)` (the extra power is the measure `dn = dz/s`).

mod special;

pub use special::{gamma, ln_gamma, zeta};

use crate::continuum::{self, ContinuumModel};
use crate::error::{ensure, Error, Result};
use crate::ion_array::IonArray;
use crate::scalar::{compensated_sum, Scalar};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SumComparison<T> {
    pub exact: T,
    pub continuum: T,
    pub relative_error: T,
}

impl<T: Scalar> SumComparison<T> {
    pub fn new(exact: T, continuum: T) -> Self {
        let relative_error = if exact != T::zero() {
            (exact - continuum).abs() / exact.abs()
        } else {
            (exact - continuum).abs()
        };
        Self {
            exact,
            continuum,
            relative_error,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TnForm {
    /// Exact Beta-function value of the integral.
    Integral,
    /// `√(4π/(4n+7))` in place of the Beta function.
    Asymptotic,
}

/// Distances from ion `i` to every other ion, accumulated from the gaps.
pub(crate) fn distances_from<T: Scalar>(array: &IonArray<T>, i: usize) -> Vec<T> {
    let gaps = array.gaps();
    let n = array.n_ions();
    let mut out = Vec::with_capacity(n.saturating_sub(1));
    let mut d = T::zero();
    for j in (0..i).rev() {
        d = d + gaps[j];
        out.push(d);
    }
    let mut d = T::zero();
    for &g in &gaps[i..] {
        d = d + g;
        out.push(d);
    }
    out
}

/// Sum of magnitudes in descending order with compensation.
fn sum_descending<T: Scalar>(mut terms: Vec<T>) -> T {
    terms.sort_by(|a, b| b.abs().partial_cmp(&a.abs()).expect("finite terms"));
    compensated_sum(terms)
}

/// Literal `S_n(i)` in units of d₀^{-n}.
pub fn s_n_exact<T: Scalar>(array: &IonArray<T>, i: usize, n: u32) -> Result<T> {
    let n_ions = array.n_ions();
    ensure(n_ions >= 2, || "S_n needs at least 2 ions".into())?;
    ensure(n >= 2, || format!("S_n needs n >= 2, got {n}"))?;
    if i >= n_ions {
        return Err(Error::Index { index: i, n_ions });
    }
    let p = n as i32;
    Ok(sum_descending(
        distances_from(array, i).into_iter().map(|d| d.powi(-p)).collect(),
    ))
}

/// `2ζ(n)/sⁿ` for local spacing `s_local` (units of d₀).
pub fn s_n_continuum<T: Scalar>(s_local: T, n: u32) -> Result<T> {
    ensure(s_local > T::zero(), || format!("local spacing must be positive, got {s_local}"))?;
    Ok(T::lit(2.0) * zeta::<T>(n)? / s_local.powi(n as i32))
}

/// Local spacing of each ion: mean of its two gaps, or the single gap at an end.
pub fn local_spacings<T: Scalar>(array: &IonArray<T>) -> Result<Vec<T>> {
    let n = array.n_ions();
    ensure(n >= 2, || "local spacings need at least 2 ions".into())?;
    let g = array.gaps();
    let half = T::lit(0.5);
    Ok((0..n)
        .map(|i| match i {
            0 => g[0],
            _ if i == n - 1 => g[n - 2],
            _ => half * (g[i - 1] + g[i]),
        })
        .collect())
}

/// Literal `T_n = Σ_i ŝ_i^{-n}`.
pub fn t_n_exact<T: Scalar>(array: &IonArray<T>, n: u32) -> Result<T> {
    let p = n as i32;
    Ok(sum_descending(
        local_spacings(array)?.into_iter().map(|s| s.powi(-p)).collect(),
    ))
}

/// `I(n) = ∫_{-1}^{1} (1-x²)^{n+1} dx = √π Γ(n+2)/Γ(n+5/2)`.
pub fn beta_integral<T: Scalar>(n: u32) -> Result<T> {
    let k = T::lit(f64::from(n));
    let ln = ln_gamma(k + T::lit(2.0))? - ln_gamma(k + T::lit(2.5))?;
    Ok(T::PI().sqrt() * ln.exp())
}

/// Large-n form `√(4π/(4n+7))` of [`beta_integral`].
pub fn beta_integral_asymptotic<T: Scalar>(n: u32) -> T {
    (T::lit(4.0) * T::PI() / T::lit(4.0 * f64::from(n) + 7.0)).sqrt()
}

/// Continuum `T_n ≈ (L/s₀^{n+1}) I(n)` in units of d₀^{-n}.
pub fn t_n_continuum<T: Scalar>(n_ions: usize, n: u32, model: ContinuumModel, form: TnForm) -> Result<T> {
    if !model.has_profile() {
        return Err(Error::UnsupportedModel {
            model: "hughes-fit",
            quantity: "a continuum T_n",
        });
    }
    let l: T = continuum::half_length(n_ions, model)?;
    let s0: T = continuum::min_spacing(n_ions, model)?;
    let shape = match form {
        TnForm::Integral => beta_integral(n)?,
        TnForm::Asymptotic => beta_integral_asymptotic(n),
    };
    Ok(l / s0.powi(n as i32 + 1) * shape)
}

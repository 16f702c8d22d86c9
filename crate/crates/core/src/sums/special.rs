//! Riemann ζ at integer arguments and the Gamma function.

use crate::error::{ensure, Result};
use crate::scalar::{compensated_sum, Scalar};

const ZETA_CUTOFF: u32 = 32;
/// B_2, B_4, B_6, B_8 divided by (2j)!.
const BERNOULLI_OVER_FACTORIAL: [f64; 4] = [
    1.0 / 12.0,
    -1.0 / 720.0,
    1.0 / 30_240.0,
    -1.0 / 1_209_600.0,
];

/// ζ(n) for integer n ≥ 2.
///
/// Direct sum below the cutoff plus an Euler–Maclaurin tail; the first
/// omitted correction is below 1e-20 at n = 2.
pub fn zeta<T: Scalar>(n: u32) -> Result<T> {
    ensure(n >= 2, || format!("zeta is only provided for integer n >= 2, got {n}"))?;
    let ni = n as i32;
    let m = T::lit(f64::from(ZETA_CUTOFF));
    let nf = T::lit(f64::from(n));
    let head = compensated_sum((1..ZETA_CUTOFF).rev().map(|k| T::lit(f64::from(k)).powi(-ni)));
    let mut tail = m.powi(1 - ni) / (nf - T::one()) + m.powi(-ni) * T::lit(0.5);
    // Rising factorial (n)_{2j-1} times M^{-n-2j+1}.
    let mut rising = nf;
    let mut power = m.powi(-ni - 1);
    for (j, &b) in BERNOULLI_OVER_FACTORIAL.iter().enumerate() {
        tail = tail + T::lit(b) * rising * power;
        let k = T::lit(2.0 * j as f64 + 1.0);
        rising = rising * (nf + k) * (nf + k + T::one());
        power = power / (m * m);
    }
    Ok(head + tail)
}

const LANCZOS_G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_9,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_1,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_572e-6,
    1.505_632_735_149_311_6e-7,
];

/// ln Γ(x) for x > 0 (Lanczos, g = 7).
pub fn ln_gamma<T: Scalar>(x: T) -> Result<T> {
    ensure(x > T::zero(), || format!("ln_gamma needs x > 0, got {x}"))?;
    if x < T::lit(0.5) {
        // Reflection: Γ(x)Γ(1-x) = π / sin(πx).
        let s = (T::PI() * x).sin();
        return Ok(T::PI().ln() - s.ln() - ln_gamma(T::one() - x)?);
    }
    let x = x - T::one();
    let mut a = T::lit(LANCZOS[0]);
    for (i, &c) in LANCZOS.iter().enumerate().skip(1) {
        a = a + T::lit(c) / (x + T::from_count(i));
    }
    let t = x + T::lit(LANCZOS_G + 0.5);
    Ok(T::lit(0.5) * (T::lit(2.0) * T::PI()).ln() + (x + T::lit(0.5)) * t.ln() - t + a.ln())
}

pub fn gamma<T: Scalar>(x: T) -> Result<T> {
    Ok(ln_gamma(x)?.exp())
}

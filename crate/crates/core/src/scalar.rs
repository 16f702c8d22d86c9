//! Floating point abstraction shared by every numerical routine.

use std::fmt::{Debug, Display, LowerExp};
use std::iter::Sum;

use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};

/// Real scalar the library is generic over: `f32` or `f64`.
///
/// Structure, continuum laws, lattice sums and spin dynamics all work in
/// `f32`. SI decoherence quantities (matrix elements around 1e-69 J·m^5)
/// fall outside the `f32` exponent range, so use `f64` or scaled units there.
pub trait Scalar:
    Float
    + FloatConst
    + FromPrimitive
    + ToPrimitive
    + Debug
    + Display
    + LowerExp
    + Sum
    + Send
    + Sync
    + 'static
{
    /// Converts an `f64` literal into this type.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal representable")
    }

    #[inline]
    fn from_count(n: usize) -> Self {
        Self::from_usize(n).expect("count representable")
    }

    #[inline]
    fn to_f64_lossy(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}

/// Neumaier-compensated accumulator.
#[derive(Debug, Clone, Copy)]
pub(crate) struct CompensatedSum<T> {
    sum: T,
    carry: T,
}

impl<T: Scalar> CompensatedSum<T> {
    pub(crate) fn new() -> Self {
        Self {
            sum: T::zero(),
            carry: T::zero(),
        }
    }

    #[inline]
    pub(crate) fn add(&mut self, x: T) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.carry = self.carry + ((self.sum - t) + x);
        } else {
            self.carry = self.carry + ((x - t) + self.sum);
        }
        self.sum = t;
    }

    #[inline]
    pub(crate) fn value(&self) -> T {
        self.sum + self.carry
    }
}

pub(crate) fn compensated_sum<T: Scalar>(terms: impl IntoIterator<Item = T>) -> T {
    let mut acc = CompensatedSum::new();
    for x in terms {
        acc.add(x);
    }
    acc.value()
}

/// Euclidean norm with scaling, safe against under/overflow of the squares.
pub(crate) fn scaled_norm<T: Scalar>(xs: &[T]) -> T {
    let max = xs.iter().fold(T::zero(), |m, x| m.max(x.abs()));
    if max == T::zero() || !max.is_finite() {
        return max;
    }
    let s = compensated_sum(xs.iter().map(|&x| {
        let r = x / max;
        r * r
    }));
    max * s.sqrt()
}

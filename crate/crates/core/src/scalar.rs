//! Scalar abstraction shared by every numeric routine in the crate.

use std::fmt::{Debug, Display, LowerExp};
use std::iter::Sum;

use num_traits::{Float, FromPrimitive, NumAssign};

/// Real scalar type usable by the spaces, solver and engine.
///
/// Implemented for `f32`, `f64` and [`crate::ExtF64`]. Constants and tolerances
/// are specified as `f64` and converted with [`Scalar::of`].
pub trait Scalar:
    Float + FromPrimitive + NumAssign + Sum + Debug + Display + LowerExp + Send + Sync + 'static
{
    /// Converts an `f64` literal or parameter into this scalar type.
    fn of(x: f64) -> Self;

    /// Lossy conversion to `f64` (values below the `f64` range become zero).
    fn as_f64(self) -> f64;

    /// Machine epsilon of the significand.
    fn eps() -> Self {
        Self::epsilon()
    }
}

impl Scalar for f64 {
    #[inline]
    fn of(x: f64) -> Self {
        x
    }

    #[inline]
    fn as_f64(self) -> f64 {
        self
    }
}

impl Scalar for f32 {
    #[inline]
    fn of(x: f64) -> Self {
        x as f32
    }

    #[inline]
    fn as_f64(self) -> f64 {
        self as f64
    }
}

/// `sgn(x) * |x|^e` with the convention `0^e = 0` for every `e > 0`.
#[inline]
pub(crate) fn signed_pow<T: Scalar>(x: T, e: T) -> T {
    if x == T::zero() {
        T::zero()
    } else {
        x.signum() * x.abs().powf(e)
    }
}

/// Relative difference `|a - b| / max(|a|, |b|, floor)`.
pub fn rel_diff<T: Scalar>(a: T, b: T, floor: T) -> T {
    (a - b).abs() / a.abs().max(b.abs()).max(floor)
}

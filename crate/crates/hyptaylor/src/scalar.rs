//! Scalar abstraction: every numeric routine in this crate is generic
//! over a floating-point type implementing [`Real`].
//!
//! `f64` is the reference precision (all documented tolerances assume
//! it); `f32` is available as a compile-time alternative through the
//! same generic code.

use std::fmt::{Debug, Display};
use std::iter::Sum;

/// Floating-point scalar usable by the kernels, gyrovector operations,
/// gradient engine, and training loops.
pub trait Real:
    num_traits::Float
    + num_traits::FromPrimitive
    + num_traits::ToPrimitive
    + Debug
    + Display
    + Default
    + Sum
    + Send
    + Sync
    + 'static
{
    /// Lossy conversion from `f64`, used for literals and coefficients.
    fn from_f64_lossy(x: f64) -> Self {
        Self::from_f64(x).expect("f64 conversion")
    }

    /// Conversion to `f64` for reporting.
    fn to_f64_lossy(self) -> f64 {
        self.to_f64().expect("f64 conversion")
    }
}

impl Real for f32 {}
impl Real for f64 {}

/// Shorthand for `T::from_f64_lossy` in numeric code.
#[inline]
pub fn r<T: Real>(x: f64) -> T {
    T::from_f64_lossy(x)
}

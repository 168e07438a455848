//! Scalar abstraction for the floating-point side of the crate.
//!
//! All projective geometry and map algebra is generic over [`Scalar`], so the
//! same code runs in `f32` or `f64`. Exact certification lives in
//! [`crate::exact`] and is not scalar-generic.

use std::fmt;

use num_traits::float::FloatConst;
use num_traits::{Float, FromPrimitive};

/// Floating-point scalar: `f32` or `f64`.
pub trait Scalar:
    Float + FloatConst + FromPrimitive + fmt::Debug + fmt::Display + Send + Sync + 'static
{
}

impl Scalar for f32 {}
impl Scalar for f64 {}

/// Shorthand for lifting an `f64` constant into the working scalar type.
#[inline]
pub(crate) fn s<T: Scalar>(x: f64) -> T {
    T::from_f64(x).expect("constant representable in scalar type")
}

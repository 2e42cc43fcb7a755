//! Scalar abstractions shared by the numeric modules.

use std::fmt::{Debug, Display};
use std::iter::Sum;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_traits::{Float, FloatConst, FromPrimitive, One, Zero};

/// Floating point scalar the geometry is evaluated in: `f32` or `f64`.
pub trait Real: Float + FloatConst + FromPrimitive + Default + Debug + Display + Sum + Send + Sync + 'static {}

impl Real for f32 {}
impl Real for f64 {}

/// The field operations needed to evaluate rational expressions.
///
/// Implemented by every [`Real`] and by the second-order jet type, which is
/// what lets the metric formulas be differentiated by evaluation.
pub trait Field:
    Clone
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
}

impl<T> Field for T where
    T: Clone + Zero + One + Add<Output = T> + Sub<Output = T> + Mul<Output = T> + Div<Output = T> + Neg<Output = T>
{
}

/// Converts an `f64` literal into `T`.
#[inline]
pub fn lit<T: Real>(x: f64) -> T {
    T::from_f64(x).expect("literal representable in target scalar")
}

/// Converts a count into `T`.
#[inline]
pub fn count<T: Real>(k: usize) -> T {
    T::from_usize(k).expect("count representable in target scalar")
}

/// Largest absolute entry of a slice.
pub fn max_abs<T: Real>(xs: &[T]) -> T {
    xs.iter().fold(T::zero(), |m, x| m.max(x.abs()))
}

/// Largest absolute entrywise difference of two equally sized slices.
pub fn max_abs_diff<T: Real>(a: &[T], b: &[T]) -> T {
    assert_eq!(a.len(), b.len(), "length mismatch");
    a.iter().zip(b).fold(T::zero(), |m, (x, y)| m.max((*x - *y).abs()))
}

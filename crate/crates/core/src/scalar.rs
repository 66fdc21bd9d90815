//! Floating-point scalar abstraction for the geometry primitives.

use std::fmt::{Debug, Display};
use std::iter::Sum;

/// Real scalar accepted by the dilation group and modulus types: `f32` or `f64`.
pub trait Float:
    num_traits::Float + num_traits::FromPrimitive + num_traits::FloatConst + Sum + Debug + Display + Send + Sync + 'static
{
    /// Lossy conversion used at the boundary with `f64`-only code.
    fn to_f64_lossy(self) -> f64 {
        num_traits::ToPrimitive::to_f64(&self).unwrap_or(f64::NAN)
    }

    /// Conversion from `f64`, rounding to the nearest representable value.
    fn of(x: f64) -> Self {
        <Self as num_traits::FromPrimitive>::from_f64(x).unwrap_or_else(Self::nan)
    }
}

impl Float for f32 {}
impl Float for f64 {}

//! Scalar abstraction shared by every numerical routine in the crate.

use std::fmt::{Debug, Display, LowerExp};
use std::iter::Sum;

use num_traits::{Float, FloatConst, FromPrimitive, NumAssign, ToPrimitive};

/// Real floating point scalar: `f32` or `f64`.
pub trait Real:
    Float
    + FloatConst
    + FromPrimitive
    + ToPrimitive
    + NumAssign
    + Sum
    + Default
    + Debug
    + Display
    + LowerExp
    + Send
    + Sync
    + 'static
{
    /// Relative residual accepted from the linear solvers.
    fn solve_tolerance() -> Self;

    /// Converts an `f64` literal. Values outside the range saturate to infinity.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).unwrap_or_else(Self::infinity)
    }

    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    #[inline]
    fn from_usize_lossy(n: usize) -> Self {
        Self::from_usize(n).unwrap_or_else(Self::infinity)
    }
}

impl Real for f32 {
    fn solve_tolerance() -> Self {
        1e-4
    }
}

impl Real for f64 {
    fn solve_tolerance() -> Self {
        1e-10
    }
}

/// Stable bit pattern of a scalar for hashing.
pub(crate) fn scalar_bits<T: Real>(x: T) -> u64 {
    x.as_f64().to_bits()
}

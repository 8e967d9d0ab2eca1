//! Floating point scalar abstraction shared by every module.

use std::fmt::{Debug, Display};
use std::iter::Sum;
use std::num::ParseFloatError;
use std::str::FromStr;

use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};

/// Real scalar type the library is generic over: `f32` or `f64`.
pub trait Scalar:
    Float
    + FloatConst
    + FromPrimitive
    + ToPrimitive
    + Sum
    + Debug
    + Display
    + FromStr<Err = ParseFloatError>
    + Default
    + Send
    + Sync
    + 'static
{
    /// Tolerance on `‖M·Mᵀ − I‖_F` accepted for an orthogonal matrix.
    const ORTHOGONALITY_TOLERANCE: f64;

    /// Converts an `f64` constant. Values are always representable (possibly rounded).
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal representable in scalar")
    }

    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().expect("scalar convertible to f64")
    }
}

impl Scalar for f32 {
    const ORTHOGONALITY_TOLERANCE: f64 = 1e-4;
}

impl Scalar for f64 {
    const ORTHOGONALITY_TOLERANCE: f64 = 1e-9;
}

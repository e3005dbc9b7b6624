use std::fmt::{Debug, Display};

use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};

/// Floating point scalar the whole library is generic over: `f32` or `f64`.
pub trait Scalar:
    Float + FloatConst + FromPrimitive + ToPrimitive + Debug + Display + Default + Send + Sync + 'static
{
    /// Converts an `f64` literal into this scalar type.
    #[inline]
    fn lit(value: f64) -> Self {
        Self::from_f64(value).expect("f64 literal representable in scalar type")
    }

    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().expect("scalar representable as f64")
    }

    /// Absolute tolerance for geometric predicates at unit scale.
    #[inline]
    fn geom_eps() -> Self {
        Self::epsilon() * Self::lit(64.0)
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}

/// Wraps an angle into `[-π, π)`.
pub fn wrap_angle<T: Scalar>(angle: T) -> T {
    let two_pi = T::TAU();
    let wrapped = angle - two_pi * ((angle + T::PI()) / two_pi).floor();
    // floor rounding can land exactly on +π
    if wrapped >= T::PI() {
        wrapped - two_pi
    } else if wrapped < -T::PI() {
        wrapped + two_pi
    } else {
        wrapped
    }
}

//! Scalar abstraction shared by every numerical routine in the crate.

use std::fmt::{Debug, Display, LowerExp};
use std::iter::Sum;

use num_traits::{Float, FloatConst, NumAssign};
use rustfft::FftNum;

/// Real floating-point scalar usable by the grid, approximation and map code.
///
/// Implemented for `f32` and `f64`. Tolerances quoted in the tests assume `f64`.
pub trait Real:
    Float
    + FloatConst
    + FftNum
    + NumAssign
    + Sum
    + Default
    + Debug
    + Display
    + LowerExp
    + serde::Serialize
    + Send
    + Sync
    + 'static
{
    /// Converts an `f64` literal into this scalar type.
    #[inline]
    fn lit(x: f64) -> Self {
        <Self as num_traits::NumCast>::from(x).expect("f64 literal representable")
    }

    /// Converts a count or index into this scalar type.
    #[inline]
    fn of_usize(n: usize) -> Self {
        <Self as num_traits::NumCast>::from(n).expect("usize representable")
    }

    /// Converts a signed frequency into this scalar type.
    #[inline]
    fn of_i64(n: i64) -> Self {
        <Self as num_traits::NumCast>::from(n).expect("i64 representable")
    }

    #[inline]
    fn to_f64_lossy(self) -> f64 {
        num_traits::ToPrimitive::to_f64(&self).unwrap_or(f64::NAN)
    }
}

impl Real for f32 {}
impl Real for f64 {}

/// Reduces an angle to the representative in `[-pi, pi)`.
pub fn wrap_angle<T: Real>(x: T) -> T {
    let two_pi = T::TAU();
    let shifted = (x + T::PI()) % two_pi;
    let shifted = if shifted < T::zero() { shifted + two_pi } else { shifted };
    // `%` can return exactly `two_pi` after the correction for tiny negative inputs.
    let shifted = if shifted >= two_pi { shifted - two_pi } else { shifted };
    shifted - T::PI()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn wrap_angle_lands_in_half_open_interval() {
        let pi = std::f64::consts::PI;
        for &x in &[-7.0 * pi, -pi, -1e-300, 0.0, 3.0, pi, 5.5 * pi, 1e6] {
            let w = wrap_angle(x);
            assert!((-pi..pi).contains(&w), "{x} -> {w}");
            let k = ((x - w) / (2.0 * pi)).round();
            assert!((x - w - 2.0 * pi * k).abs() < 1e-9 * x.abs().max(1.0));
        }
        assert_eq!(wrap_angle(pi), -pi);
    }

    #[test]
    fn literal_conversion_round_trips() {
        assert_eq!(f32::lit(0.5), 0.5f32);
        assert_eq!(f64::of_i64(-3), -3.0);
        assert_eq!(f64::of_usize(7).to_f64_lossy(), 7.0);
    }
}

//! Scalar abstraction and small numerical kernels shared by every module.

pub mod fit;
pub mod interp;
pub mod ode;
pub mod quad;
pub mod roots;
pub mod tridiag;

use num_traits::{Float, FloatConst, FromPrimitive, NumAssign, ToPrimitive};
use std::fmt::{Debug, Display};
use std::iter::Sum;

/// Floating-point scalar the whole laboratory is generic over.
///
/// Implemented for `f32` and `f64`. Tolerance defaults depend on the
/// precision, everything else is shared.
pub trait Real:
    Float
    + FloatConst
    + FromPrimitive
    + ToPrimitive
    + NumAssign
    + Sum
    + Debug
    + Display
    + Default
    + Send
    + Sync
    + 'static
{
    /// Short type name used in reports.
    const NAME: &'static str;

    /// Default relative tolerance for the adaptive integrator.
    fn default_rtol() -> Self;

    /// Convert an `f64` literal.
    #[inline]
    fn c(x: f64) -> Self {
        Self::from_f64(x).expect("literal representable in scalar type")
    }

    /// Convert an integer count.
    #[inline]
    fn from_usize_lossy(n: usize) -> Self {
        Self::from_usize(n).expect("count representable in scalar type")
    }

    /// Widen to `f64` for reporting.
    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Real for f64 {
    const NAME: &'static str = "f64";
    fn default_rtol() -> Self {
        1e-10
    }
}

impl Real for f32 {
    const NAME: &'static str = "f32";
    fn default_rtol() -> Self {
        1e-5
    }
}

/// Shorthand for [`Real::c`].
#[inline]
pub fn lit<T: Real>(x: f64) -> T {
    T::c(x)
}

/// Signed power `|u|^(m-1) u`.
#[inline]
pub fn signed_pow<T: Real>(u: T, m: T) -> T {
    if u == T::zero() {
        T::zero()
    } else {
        u.signum() * u.abs().powf(m)
    }
}

/// Surface measure of the unit (d-1)-sphere, `2 pi^(d/2) / Gamma(d/2)`.
///
/// Computed by the exact recursion over half-integers, so no gamma
/// approximation enters the volume constants.
pub fn sphere_area<T: Real>(d: usize) -> T {
    assert!(d >= 1, "dimension must be positive");
    // Gamma(d/2) via Gamma(1/2) = sqrt(pi), Gamma(1) = 1, Gamma(x+1) = x Gamma(x).
    let half = lit::<T>(0.5);
    let (mut g, mut x) = if d % 2 == 0 {
        (T::one(), T::one())
    } else {
        (T::PI().sqrt(), half)
    };
    let target = T::from_usize_lossy(d) * half;
    while x < target - lit(0.25) {
        g *= x;
        x += T::one();
    }
    lit::<T>(2.0) * T::PI().powf(target) / g
}

/// Volume of the unit Euclidean d-ball, `sphere_area(d) / d`.
pub fn unit_ball_volume<T: Real>(d: usize) -> T {
    sphere_area::<T>(d) / T::from_usize_lossy(d)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sphere_areas_match_low_dimensions() {
        let pi = std::f64::consts::PI;
        assert!((sphere_area::<f64>(2) - 2.0 * pi).abs() < 1e-14);
        assert!((sphere_area::<f64>(3) - 4.0 * pi).abs() < 1e-14);
        assert!((sphere_area::<f64>(4) - 2.0 * pi * pi).abs() < 1e-13);
        assert!((sphere_area::<f64>(5) - 8.0 * pi * pi / 3.0).abs() < 1e-13);
    }

    #[test]
    fn ball_volume_three_dimensions() {
        let v: f64 = unit_ball_volume(3);
        assert!((v - 4.0 * std::f64::consts::PI / 3.0).abs() < 1e-14);
    }

    #[test]
    fn signed_power_keeps_sign() {
        assert_eq!(signed_pow(-8.0f64, 1.0 / 3.0).signum(), -1.0);
        assert!((signed_pow(-8.0f64, 1.0 / 3.0) + 2.0).abs() < 1e-14);
        assert_eq!(signed_pow(0.0f64, 0.5), 0.0);
    }

    #[test]
    fn f32_constants_are_consistent() {
        let a: f32 = sphere_area(3);
        assert!((a - 4.0 * std::f32::consts::PI).abs() < 1e-5);
        assert!(f32::default_rtol() > f64::default_rtol() as f32);
    }
}

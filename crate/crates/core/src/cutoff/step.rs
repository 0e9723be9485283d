//! Quintic C^2 transition with exactly known derivative bounds.

use crate::error::{LabError, Result};
use crate::numeric::{lit, Real};
use serde::Serialize;

/// `sup |S'|` of the unit falling quintic `S(t) = 1 - 10t^3 + 15t^4 - 6t^5`, attained at `t = 1/2`.
pub const UNIT_SUP_D1: f64 = 15.0 / 8.0;
/// `sup |S''|` of the unit quintic: `10 sqrt(3) / 3`, attained at `t = (3 -+ sqrt 3)/6`.
pub const UNIT_SUP_D2: f64 = 5.773_502_691_896_257_6;

/// Falling (`1` left of `a`, `0` right of `b`) or rising polynomial transition.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SmoothStep<T> {
    pub a: T,
    pub b: T,
    pub falling: bool,
}

/// Values of the unit falling quintic and its first two derivatives at `t`.
fn unit<T: Real>(t: T) -> (T, T, T) {
    if t <= T::zero() {
        return (T::one(), T::zero(), T::zero());
    }
    if t >= T::one() {
        return (T::zero(), T::zero(), T::zero());
    }
    let s = T::one() - t;
    let v = T::one() - t * t * t * (lit::<T>(10.0) - lit::<T>(15.0) * t + lit::<T>(6.0) * t * t);
    let d1 = -lit::<T>(30.0) * t * t * s * s;
    let d2 = -lit::<T>(60.0) * t * s * (T::one() - lit::<T>(2.0) * t);
    (v, d1, d2)
}

impl<T: Real> SmoothStep<T> {
    /// Falling step on `[a, b]`.
    pub fn falling(a: T, b: T) -> Result<Self> {
        Self::new(a, b, true)
    }

    /// Rising step on `[a, b]`.
    pub fn rising(a: T, b: T) -> Result<Self> {
        Self::new(a, b, false)
    }

    pub fn new(a: T, b: T, falling: bool) -> Result<Self> {
        if !(b > a) || !a.is_finite() || !b.is_finite() {
            return Err(LabError::InvalidParameter {
                name: "transition interval",
                value: (b - a).as_f64(),
                range: "b > a",
            });
        }
        Ok(Self { a, b, falling })
    }

    pub fn width(&self) -> T {
        self.b - self.a
    }

    /// `(S, S', S'')` at `x`.
    pub fn eval(&self, x: T) -> (T, T, T) {
        let w = self.width();
        let (v, d1, d2) = unit((x - self.a) / w);
        if self.falling {
            (v, d1 / w, d2 / (w * w))
        } else {
            (T::one() - v, -d1 / w, -d2 / (w * w))
        }
    }

    pub fn value(&self, x: T) -> T {
        self.eval(x).0
    }

    /// Exact `sup |S'| = 15 / (8 w)`.
    pub fn sup_d1(&self) -> T {
        lit::<T>(UNIT_SUP_D1) / self.width()
    }

    /// Exact `sup |S''| = 10 sqrt(3) / (3 w^2)`.
    pub fn sup_d2(&self) -> T {
        let w = self.width();
        lit::<T>(UNIT_SUP_D2) / (w * w)
    }

    /// Upper bound on `|S'| + |S''|`: the sum of the two exact suprema.
    pub fn derivative_bound(&self) -> T {
        self.sup_d1() + self.sup_d2()
    }

    /// Whether `|S'| + |S''| <= target` is certified by [`Self::derivative_bound`].
    pub fn meets(&self, target: T) -> bool {
        self.derivative_bound() <= target
    }
}

/// `sup |S'| / sqrt(S)` of the unit falling quintic (finite because `S` vanishes to third order).
///
/// Computed by dense sampling followed by golden-section refinement.
pub fn unit_sqrt_ratio_bound() -> f64 {
    let ratio = |t: f64| {
        let (v, d1, _) = unit(t);
        if v <= 0.0 {
            0.0
        } else {
            d1.abs() / v.sqrt()
        }
    };
    let n = 20_000;
    let (mut best_t, mut best) = (0.5, 0.0);
    for i in 1..n {
        let t = i as f64 / n as f64;
        let v = ratio(t);
        if v > best {
            best = v;
            best_t = t;
        }
    }
    let (mut lo, mut hi) = (best_t - 1.0 / n as f64, best_t + 1.0 / n as f64);
    let g = (5f64.sqrt() - 1.0) / 2.0;
    for _ in 0..100 {
        let (x1, x2) = (hi - g * (hi - lo), lo + g * (hi - lo));
        if ratio(x1) > ratio(x2) {
            hi = x2;
        } else {
            lo = x1;
        }
    }
    ratio(0.5 * (lo + hi)).max(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn endpoint_conditions() {
        let s = SmoothStep::falling(0.0f64, 1.0).unwrap();
        assert_eq!(s.eval(0.0), (1.0, 0.0, 0.0));
        assert_eq!(s.eval(1.0), (0.0, 0.0, 0.0));
        let (_, d1a, d2a) = s.eval(1e-9);
        let (_, d1b, d2b) = s.eval(1.0 - 1e-9);
        assert!(d1a.abs() < 1e-12 && d1b.abs() < 1e-12);
        assert!(d2a.abs() < 1e-6 && d2b.abs() < 1e-6);
    }

    #[test]
    fn sup_values_exact() {
        let s = SmoothStep::falling(0.0f64, 1.0).unwrap();
        assert_eq!(s.sup_d1(), 15.0 / 8.0);
        assert!((s.eval(0.5).1.abs() - 15.0 / 8.0).abs() < 1e-15);
        let t = (3.0 - 3f64.sqrt()) / 6.0;
        assert!((s.eval(t).2.abs() - 10.0 * 3f64.sqrt() / 3.0).abs() < 1e-13);
        let wide = SmoothStep::falling(0.0f64, 2.0).unwrap();
        assert_eq!(wide.sup_d1(), s.sup_d1() / 2.0);
        assert_eq!(wide.sup_d2(), s.sup_d2() / 4.0);
    }

    #[test]
    fn rising_mirrors_falling() {
        let f = SmoothStep::falling(1.0f64, 3.0).unwrap();
        let r = SmoothStep::rising(1.0f64, 3.0).unwrap();
        for x in [0.0, 1.3, 2.0, 2.9, 4.0] {
            assert!((f.value(x) + r.value(x) - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn degenerate_interval_rejected() {
        assert!(SmoothStep::falling(1.0f64, 1.0).is_err());
        assert!(SmoothStep::falling(2.0f64, 1.0).is_err());
    }

    #[test]
    fn sqrt_ratio_bound_is_finite_and_dominates_samples() {
        let k = unit_sqrt_ratio_bound();
        assert!(k > 15.0 / 8.0 && k < 4.0, "{k}");
        for i in 1..1000 {
            let (v, d1, _) = unit(i as f64 / 1000.0);
            assert!(d1.abs() / v.sqrt() <= k * (1.0 + 1e-12));
        }
    }

    #[test]
    fn works_in_f32() {
        let s = SmoothStep::falling(0.0f32, 1.0).unwrap();
        assert!((s.value(0.5) - 0.5).abs() < 1e-6);
    }

    proptest! {
        #[test]
        fn bounded_by_certified_sups(a in -5.0f64..5.0, w in 0.01f64..10.0, t in -0.5f64..1.5) {
            let s = SmoothStep::falling(a, a + w).unwrap();
            let (v, d1, d2) = s.eval(a + t * w);
            prop_assert!((0.0..=1.0).contains(&v));
            prop_assert!(d1.abs() <= s.sup_d1() * (1.0 + 1e-12));
            prop_assert!(d2.abs() <= s.sup_d2() * (1.0 + 1e-12));
            prop_assert!(d1 <= 0.0);
        }
    }
}

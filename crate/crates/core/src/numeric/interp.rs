//! Shape-preserving interpolation.

use super::{lit, Real};
use crate::error::{LabError, Result};

/// Monotone piecewise-cubic Hermite interpolant (Fritsch-Carlson slopes).
///
/// Preserves monotonicity and nonnegativity of the data, so interpolating
/// two ordered tables keeps them ordered on each interval where the data
/// are ordered at both ends.
#[derive(Debug, Clone, PartialEq)]
pub struct MonotoneCubic<T> {
    xs: Vec<T>,
    ys: Vec<T>,
    slopes: Vec<T>,
}

impl<T: Real> MonotoneCubic<T> {
    pub fn new(xs: Vec<T>, ys: Vec<T>) -> Result<Self> {
        let n = xs.len();
        if n < 2 || ys.len() != n {
            return Err(LabError::InvalidGrid(
                "monotone cubic needs at least two samples of matching length".into(),
            ));
        }
        if xs.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(LabError::InvalidGrid("interpolation abscissae must increase strictly".into()));
        }
        let delta: Vec<T> = (0..n - 1)
            .map(|i| (ys[i + 1] - ys[i]) / (xs[i + 1] - xs[i]))
            .collect();
        let mut m = vec![T::zero(); n];
        m[0] = delta[0];
        m[n - 1] = delta[n - 2];
        for i in 1..n - 1 {
            if delta[i - 1] * delta[i] > T::zero() {
                // Weighted harmonic mean (Fritsch-Butland form).
                let h0 = xs[i] - xs[i - 1];
                let h1 = xs[i + 1] - xs[i];
                let w1 = lit::<T>(2.0) * h1 + h0;
                let w2 = h1 + lit::<T>(2.0) * h0;
                m[i] = (w1 + w2) / (w1 / delta[i - 1] + w2 / delta[i]);
            }
        }
        // Clamp to the monotonicity region.
        for i in 0..n - 1 {
            if delta[i] == T::zero() {
                m[i] = T::zero();
                m[i + 1] = T::zero();
            } else {
                let a = m[i] / delta[i];
                let b = m[i + 1] / delta[i];
                if a < T::zero() {
                    m[i] = T::zero();
                }
                if b < T::zero() {
                    m[i + 1] = T::zero();
                }
                let s = a * a + b * b;
                if s > lit(9.0) {
                    let tau = lit::<T>(3.0) / s.sqrt();
                    m[i] = tau * a * delta[i];
                    m[i + 1] = tau * b * delta[i];
                }
            }
        }
        Ok(Self { xs, ys, slopes: m })
    }

    pub fn x_min(&self) -> T {
        self.xs[0]
    }

    pub fn x_max(&self) -> T {
        *self.xs.last().expect("nonempty")
    }

    pub fn samples(&self) -> (&[T], &[T]) {
        (&self.xs, &self.ys)
    }

    /// Evaluate; `None` outside the tabulated range.
    pub fn eval(&self, x: T) -> Option<T> {
        if x < self.xs[0] || x > self.x_max() {
            return None;
        }
        let i = match self.xs.partition_point(|&v| v <= x) {
            0 => 0,
            k => (k - 1).min(self.xs.len() - 2),
        };
        let h = self.xs[i + 1] - self.xs[i];
        let t = (x - self.xs[i]) / h;
        let t2 = t * t;
        let t3 = t2 * t;
        let two = lit::<T>(2.0);
        let three = lit::<T>(3.0);
        let h00 = two * t3 - three * t2 + T::one();
        let h10 = t3 - two * t2 + t;
        let h01 = -two * t3 + three * t2;
        let h11 = t3 - t2;
        Some(h00 * self.ys[i] + h10 * h * self.slopes[i] + h01 * self.ys[i + 1] + h11 * h * self.slopes[i + 1])
    }
}

/// Cubic Hermite interpolation on one interval from endpoint values and slopes.
#[inline]
pub fn hermite<T: Real>(x0: T, x1: T, y0: T, y1: T, d0: T, d1: T, x: T) -> T {
    let h = x1 - x0;
    let t = (x - x0) / h;
    let t2 = t * t;
    let t3 = t2 * t;
    let two = lit::<T>(2.0);
    let three = lit::<T>(3.0);
    (two * t3 - three * t2 + T::one()) * y0
        + (t3 - two * t2 + t) * h * d0
        + (-two * t3 + three * t2) * y1
        + (t3 - t2) * h * d1
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn reproduces_nodes_and_linear_data() {
        let xs = vec![0.0, 1.0, 2.5, 4.0];
        let ys: Vec<f64> = xs.iter().map(|x| 2.0 * x + 1.0).collect();
        let mc = MonotoneCubic::new(xs.clone(), ys.clone()).unwrap();
        for (x, y) in xs.iter().zip(&ys) {
            assert!((mc.eval(*x).unwrap() - y).abs() < 1e-14);
        }
        assert!((mc.eval(1.7).unwrap() - 4.4).abs() < 1e-12);
        assert!(mc.eval(-0.1).is_none());
        assert!(mc.eval(4.1).is_none());
    }

    #[test]
    fn hermite_is_exact_for_cubics() {
        let f = |x: f64| x * x * x - 2.0 * x;
        let df = |x: f64| 3.0 * x * x - 2.0;
        let v = hermite(1.0, 2.0, f(1.0), f(2.0), df(1.0), df(2.0), 1.3);
        assert!((v - f(1.3)).abs() < 1e-13);
    }

    proptest! {
        #[test]
        fn preserves_nonnegativity(vals in prop::collection::vec(0.0f64..5.0, 3..12), x in 0.0f64..1.0) {
            let n = vals.len();
            let xs: Vec<f64> = (0..n).map(|i| i as f64).collect();
            let mc = MonotoneCubic::new(xs, vals).unwrap();
            let v = mc.eval(x * (n as f64 - 1.0)).unwrap();
            prop_assert!(v >= -1e-12);
        }

        #[test]
        fn preserves_monotone_data(incs in prop::collection::vec(0.0f64..3.0, 3..10), x in 0.0f64..1.0, y in 0.0f64..1.0) {
            let mut acc = 0.0;
            let ys: Vec<f64> = std::iter::once(0.0).chain(incs.iter().map(|d| { acc += d; acc })).collect();
            let n = ys.len();
            let xs: Vec<f64> = (0..n).map(|i| i as f64).collect();
            let mc = MonotoneCubic::new(xs, ys).unwrap();
            let (a, b) = if x < y { (x, y) } else { (y, x) };
            let top = n as f64 - 1.0;
            prop_assert!(mc.eval(a * top).unwrap() <= mc.eval(b * top).unwrap() + 1e-12);
        }
    }
}

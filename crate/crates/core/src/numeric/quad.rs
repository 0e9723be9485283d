//! Quadrature rules.

use super::{lit, Real};

/// Corrected trapezoid rule on one interval, exact for cubics:
/// `h/2 (f0 + f1) + h^2/12 (d0 - d1)`.
#[inline]
pub fn hermite_panel<T: Real>(h: T, f0: T, f1: T, d0: T, d1: T) -> T {
    h * lit::<T>(0.5) * (f0 + f1) + h * h / lit(12.0) * (d0 - d1)
}

/// Cumulative integral of sampled values with derivatives; result starts at zero.
pub fn cumulative_hermite<T: Real>(xs: &[T], f: &[T], df: &[T]) -> Vec<T> {
    let mut out = Vec::with_capacity(xs.len());
    let mut acc = T::zero();
    if xs.is_empty() {
        return out;
    }
    out.push(acc);
    for i in 1..xs.len() {
        acc += hermite_panel(xs[i] - xs[i - 1], f[i - 1], f[i], df[i - 1], df[i]);
        out.push(acc);
    }
    out
}

/// Composite trapezoid rule on arbitrary nodes.
pub fn trapezoid<T: Real>(xs: &[T], f: &[T]) -> T {
    xs.windows(2)
        .zip(f.windows(2))
        .map(|(x, y)| (x[1] - x[0]) * (y[0] + y[1]) * lit(0.5))
        .sum()
}

/// Gauss-Legendre nodes and weights on [-1, 1], computed by Newton iteration.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1);
    let mut xs = vec![0.0; n];
    let mut ws = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            let p = if n == 1 { x } else { p1 };
            let pm = if n == 1 { 1.0 } else { p0 };
            dp = n as f64 * (x * p - pm) / (x * x - 1.0);
            let dx = p / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        xs[i] = -x;
        xs[n - 1 - i] = x;
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        ws[i] = w;
        ws[n - 1 - i] = w;
    }
    (xs, ws)
}

/// Composite Gauss-Legendre rule with `panels` equal panels of `order` points.
pub fn composite_gauss<T: Real, F: FnMut(T) -> T>(mut f: F, a: T, b: T, panels: usize, order: usize) -> T {
    let (xs, ws) = gauss_legendre(order);
    let width = (b - a) / T::from_usize_lossy(panels);
    let half = width * lit(0.5);
    let mut total = T::zero();
    for p in 0..panels {
        let mid = a + width * (T::from_usize_lossy(p) + lit(0.5));
        for (x, w) in xs.iter().zip(&ws) {
            total += lit::<T>(*w) * half * f(mid + half * lit(*x));
        }
    }
    total
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hermite_exact_for_cubic() {
        let xs: Vec<f64> = (0..5).map(|i| i as f64 * 0.37).collect();
        let f: Vec<f64> = xs.iter().map(|x| x * x * x).collect();
        let df: Vec<f64> = xs.iter().map(|x| 3.0 * x * x).collect();
        let c = cumulative_hermite(&xs, &f, &df);
        let top = xs[4];
        assert!((c[4] - top.powi(4) / 4.0).abs() < 1e-14);
    }

    #[test]
    fn gauss_legendre_integrates_polynomials() {
        let (xs, ws) = gauss_legendre(6);
        let s: f64 = xs.iter().zip(&ws).map(|(x, w)| w * x.powi(10)).sum();
        assert!((s - 2.0 / 11.0).abs() < 1e-14);
        let total: f64 = ws.iter().sum();
        assert!((total - 2.0).abs() < 1e-14);
    }

    #[test]
    fn composite_gauss_sine() {
        let v: f64 = composite_gauss(|x: f64| x.sin(), 0.0, std::f64::consts::PI, 8, 8);
        assert!((v - 2.0).abs() < 1e-14);
    }

    #[test]
    fn trapezoid_linear_exact() {
        let xs = [0.0f64, 0.3, 1.0];
        let f = [1.0, 1.6, 3.0];
        assert!((trapezoid(&xs, &f) - 2.0).abs() < 1e-15);
    }
}

//! Bracketed root finding.

use super::{lit, Real};

/// Bisection for a sign change of `f` on `[a, b]`; `None` when not bracketed.
pub fn bisect<T: Real, F: FnMut(T) -> T>(mut f: F, mut a: T, mut b: T, tol: T) -> Option<T> {
    let mut fa = f(a);
    let fb = f(b);
    if fa == T::zero() {
        return Some(a);
    }
    if fb == T::zero() {
        return Some(b);
    }
    if fa.signum() == fb.signum() {
        return None;
    }
    for _ in 0..400 {
        let mid = (a + b) * lit(0.5);
        if (b - a).abs() <= tol || mid == a || mid == b {
            return Some(mid);
        }
        let fm = f(mid);
        if fm == T::zero() {
            return Some(mid);
        }
        if fm.signum() == fa.signum() {
            a = mid;
            fa = fm;
        } else {
            b = mid;
        }
    }
    Some((a + b) * lit(0.5))
}

//! Tridiagonal elimination.

use super::Real;
use crate::error::{LabError, Result};

/// Solve `lower[i] x[i-1] + diag[i] x[i] + upper[i] x[i+1] = rhs[i]`.
///
/// `lower[0]` and `upper[n-1]` are ignored. No pivoting: intended for
/// diagonally dominant systems (M-matrices from monotone discretizations).
pub fn solve_tridiagonal<T: Real>(lower: &[T], diag: &[T], upper: &[T], rhs: &[T]) -> Result<Vec<T>> {
    let n = diag.len();
    if lower.len() != n || upper.len() != n || rhs.len() != n {
        return Err(LabError::InvalidGrid("tridiagonal bands of unequal length".into()));
    }
    if n == 0 {
        return Ok(Vec::new());
    }
    let mut c = vec![T::zero(); n];
    let mut d = vec![T::zero(); n];
    let mut beta = diag[0];
    if beta == T::zero() {
        return Err(LabError::Singular("zero pivot in tridiagonal solve"));
    }
    c[0] = upper[0] / beta;
    d[0] = rhs[0] / beta;
    for i in 1..n {
        beta = diag[i] - lower[i] * c[i - 1];
        if beta == T::zero() || !beta.is_finite() {
            return Err(LabError::Singular("zero pivot in tridiagonal solve"));
        }
        c[i] = if i + 1 < n { upper[i] / beta } else { T::zero() };
        d[i] = (rhs[i] - lower[i] * d[i - 1]) / beta;
    }
    let mut x = d;
    for i in (0..n - 1).rev() {
        let next = x[i + 1];
        x[i] -= c[i] * next;
    }
    Ok(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn solves_poisson_stencil() {
        // -x'' = 2 on (0,1), x(0)=x(1)=0 -> x = s(1-s), exact for the 3-point stencil.
        let n = 9;
        let h = 1.0 / (n as f64 + 1.0);
        let lower = vec![-1.0; n];
        let upper = vec![-1.0; n];
        let diag = vec![2.0; n];
        let rhs = vec![2.0 * h * h; n];
        let x = solve_tridiagonal(&lower, &diag, &upper, &rhs).unwrap();
        for (i, xi) in x.iter().enumerate() {
            let s = (i as f64 + 1.0) * h;
            assert!((xi - s * (1.0 - s)).abs() < 1e-14);
        }
    }

    #[test]
    fn rejects_mismatched_bands() {
        assert!(solve_tridiagonal(&[0.0], &[1.0, 1.0], &[0.0, 0.0], &[1.0, 1.0]).is_err());
    }
}

//! Dormand-Prince 5(4) embedded Runge-Kutta integrator for small fixed-size systems.

use super::{lit, Real};
use crate::error::{LabError, Result};

/// How the integrator chooses its steps.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum StepControl<T> {
    /// Error-controlled steps with per-component tolerance `atol + rtol |y|`.
    Adaptive { rtol: T, atol: T, max_steps: usize },
    /// Uniform steps of (at most) the given length; used for order studies.
    Fixed { h: T },
}

impl<T: Real> StepControl<T> {
    /// Adaptive control at the scalar type's default tolerance.
    pub fn default_adaptive() -> Self {
        let rtol = T::default_rtol();
        StepControl::Adaptive {
            rtol,
            atol: rtol * lit(1e-3),
            max_steps: 2_000_000,
        }
    }

    pub fn adaptive(rtol: T) -> Self {
        StepControl::Adaptive {
            rtol,
            atol: rtol * lit(1e-3),
            max_steps: 2_000_000,
        }
    }
}

const C: [f64; 7] = [0.0, 0.2, 0.3, 0.8, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [0.2, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [
        19372.0 / 6561.0,
        -25360.0 / 2187.0,
        64448.0 / 6561.0,
        -212.0 / 729.0,
        0.0,
        0.0,
    ],
    [
        9017.0 / 3168.0,
        -355.0 / 33.0,
        46732.0 / 5247.0,
        49.0 / 176.0,
        -5103.0 / 18656.0,
        0.0,
    ],
    [
        35.0 / 384.0,
        0.0,
        500.0 / 1113.0,
        125.0 / 192.0,
        -2187.0 / 6784.0,
        11.0 / 84.0,
    ],
];
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

/// One Dormand-Prince step. Returns the fifth-order solution and the embedded error estimate.
fn dp_step<T: Real, const N: usize, F>(f: &mut F, x: T, y: &[T; N], h: T) -> ([T; N], [T; N])
where
    F: FnMut(T, &[T; N]) -> [T; N],
{
    let mut k = [[T::zero(); N]; 7];
    k[0] = f(x, y);
    for s in 1..7 {
        let mut ys = *y;
        for (j, kj) in k.iter().enumerate().take(s) {
            let a = A[s][j];
            if a != 0.0 {
                let a: T = lit(a);
                for i in 0..N {
                    ys[i] += h * a * kj[i];
                }
            }
        }
        k[s] = f(x + h * lit(C[s]), &ys);
    }
    // Row 6 of A holds the fifth-order weights; stage 7 is evaluated at the new point.
    let mut y5 = *y;
    let mut err = [T::zero(); N];
    for (j, kj) in k.iter().enumerate() {
        let b = if j < 6 { A[6][j] } else { 0.0 };
        let e: T = lit(E[j]);
        for i in 0..N {
            if b != 0.0 {
                y5[i] += h * lit::<T>(b) * kj[i];
            }
            err[i] += h * e * kj[i];
        }
    }
    (y5, err)
}

/// Integrate `y' = f(x, y)` from `x0` to `x1` (either direction).
///
/// `h_hint` carries a step-size suggestion in and out so that consecutive
/// segment integrations reuse the adapted step.
pub fn integrate<T: Real, const N: usize, F>(
    f: &mut F,
    x0: T,
    y0: [T; N],
    x1: T,
    control: &StepControl<T>,
    h_hint: &mut T,
) -> Result<[T; N]>
where
    F: FnMut(T, &[T; N]) -> [T; N],
{
    let span = x1 - x0;
    if span == T::zero() {
        return Ok(y0);
    }
    let dir = span.signum();
    match *control {
        StepControl::Fixed { h } => {
            let n = (span.abs() / h).ceil().to_usize().unwrap_or(1).max(1);
            let step = span / T::from_usize_lossy(n);
            let mut y = y0;
            let mut x = x0;
            for i in 0..n {
                let (y5, _) = dp_step(f, x, &y, step);
                y = y5;
                x = if i + 1 == n {
                    x1
                } else {
                    x0 + step * T::from_usize_lossy(i + 1)
                };
            }
            Ok(y)
        }
        StepControl::Adaptive {
            rtol,
            atol,
            max_steps,
        } => {
            let mut h = if *h_hint > T::zero() {
                h_hint.min(span.abs())
            } else {
                span.abs() * lit(0.01)
            };
            let mut x = x0;
            let mut y = y0;
            let tiny = T::epsilon() * lit(16.0);
            let mut steps = 0usize;
            loop {
                let remaining = (x1 - x) * dir;
                if remaining <= tiny * (T::one() + x1.abs()) {
                    break;
                }
                let last = h >= remaining;
                let hs = if last { remaining } else { h };
                let (y5, err) = dp_step(f, x, &y, hs * dir);
                let mut norm = T::zero();
                for i in 0..N {
                    let sc = atol + rtol * y[i].abs().max(y5[i].abs());
                    norm = norm.max(err[i].abs() / sc);
                }
                steps += 1;
                if steps > max_steps {
                    return Err(LabError::TooManySteps {
                        r: x.as_f64(),
                        steps,
                    });
                }
                if !norm.is_finite() {
                    h = hs * lit(0.25);
                } else if norm <= T::one() {
                    x = if last { x1 } else { x + hs * dir };
                    y = y5;
                    let grow = if norm == T::zero() {
                        lit(5.0)
                    } else {
                        (lit::<T>(0.9) * norm.powf(lit(-0.2))).min(lit(5.0))
                    };
                    // A truncated final step says little about the natural step size.
                    if !last || hs >= h {
                        h = hs * grow;
                    }
                    if last {
                        break;
                    }
                } else {
                    let shrink = (lit::<T>(0.9) * norm.powf(lit(-0.25))).max(lit(0.1));
                    h = hs * shrink;
                }
                if h < tiny * (T::one() + x.abs()) {
                    return Err(LabError::StepUnderflow {
                        r: x.as_f64(),
                        step: h.as_f64(),
                    });
                }
            }
            *h_hint = h;
            Ok(y)
        }
    }
}

/// Integrate through an ordered list of output nodes, returning the state at each.
///
/// The first node is the initial point; nodes may be increasing or decreasing.
pub fn integrate_nodes<T: Real, const N: usize, F>(
    f: &mut F,
    nodes: &[T],
    y0: [T; N],
    control: &StepControl<T>,
) -> Result<Vec<[T; N]>>
where
    F: FnMut(T, &[T; N]) -> [T; N],
{
    let mut out = Vec::with_capacity(nodes.len());
    if nodes.is_empty() {
        return Ok(out);
    }
    out.push(y0);
    let mut y = y0;
    let mut hint = T::zero();
    for w in nodes.windows(2) {
        y = integrate(f, w[0], y, w[1], control, &mut hint)?;
        out.push(y);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exponential_growth_adaptive() {
        let mut f = |_x: f64, y: &[f64; 1]| [y[0]];
        let mut hint = 0.0;
        let y = integrate(&mut f, 0.0, [1.0], 5.0, &StepControl::adaptive(1e-12), &mut hint).unwrap();
        assert!((y[0] / 5f64.exp() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn backward_integration_matches_forward() {
        let mut f = |_x: f64, y: &[f64; 2]| [y[1], -y[0]];
        let mut hint = 0.0;
        let ctl = StepControl::adaptive(1e-12);
        let y1 = integrate(&mut f, 0.0, [0.0, 1.0], 3.0, &ctl, &mut hint).unwrap();
        let mut hint = 0.0;
        let y0 = integrate(&mut f, 3.0, y1, 0.0, &ctl, &mut hint).unwrap();
        assert!(y0[0].abs() < 1e-9);
        assert!((y0[1] - 1.0).abs() < 1e-9);
        assert!((y1[0] - 3f64.sin()).abs() < 1e-10);
    }

    #[test]
    fn fixed_steps_show_fifth_order() {
        let mut f = |_x: f64, y: &[f64; 2]| [y[1], -y[0]];
        let err = |h: f64, f: &mut dyn FnMut(f64, &[f64; 2]) -> [f64; 2]| {
            let mut hint = 0.0;
            let mut g = |x: f64, y: &[f64; 2]| f(x, y);
            let y = integrate(&mut g, 0.0, [0.0, 1.0], 2.0, &StepControl::Fixed { h }, &mut hint).unwrap();
            (y[0] - 2f64.sin()).abs()
        };
        let e1 = err(0.2, &mut f);
        let e2 = err(0.1, &mut f);
        let order = (e1 / e2).log2();
        assert!(order > 4.5, "observed order {order}");
    }

    #[test]
    fn node_integration_returns_each_node() {
        let mut f = |_x: f64, _y: &[f64; 1]| [1.0];
        let nodes = [0.0, 0.5, 1.25, 2.0];
        let ys = integrate_nodes(&mut f, &nodes, [0.0], &StepControl::default_adaptive()).unwrap();
        for (x, y) in nodes.iter().zip(&ys) {
            assert!((y[0] - x).abs() < 1e-12);
        }
    }

    #[test]
    fn works_in_single_precision() {
        let mut f = |_x: f32, y: &[f32; 1]| [-y[0]];
        let mut hint = 0.0;
        let y = integrate(&mut f, 0.0f32, [1.0], 1.0, &StepControl::default_adaptive(), &mut hint).unwrap();
        assert!((y[0] - (-1.0f32).exp()).abs() < 1e-5);
    }
}

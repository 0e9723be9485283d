//! Radial Poisson problems `ω'' + p(r) ω' = f₁(r) f₂(ω)` on an annulus.

use serde::Serialize;

use crate::error::{check_range, LabError, Result};
use crate::geometry::ModelManifold;
use crate::numeric::tridiag::solve_tridiagonal;

/// Radial factor `f₁(r)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum RadialFactor {
    /// `scale * r^exponent`.
    Power { scale: f64, exponent: f64 },
    Constant(f64),
}

impl RadialFactor {
    pub fn value(&self, r: f64) -> f64 {
        match *self {
            RadialFactor::Power { scale, exponent } => scale * r.powf(exponent),
            RadialFactor::Constant(c) => c,
        }
    }

    pub fn derivative(&self, r: f64) -> f64 {
        match *self {
            RadialFactor::Power { scale, exponent } => scale * exponent * r.powf(exponent - 1.0),
            RadialFactor::Constant(_) => 0.0,
        }
    }
}

/// Affine state factor `f₂(ω) = slope ω + offset`; both linear source cases are of this form.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StateFactor {
    pub slope: f64,
    pub offset: f64,
}

impl StateFactor {
    pub fn linear(slope: f64) -> Self {
        Self { slope, offset: 0.0 }
    }

    pub fn constant(offset: f64) -> Self {
        Self { slope: 0.0, offset }
    }

    pub fn value(&self, w: f64) -> f64 {
        self.slope * w + self.offset
    }

    pub fn derivative(&self, _w: f64) -> f64 {
        self.slope
    }
}

/// Equation, annulus and band parameters of one estimate instance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PoissonProblem {
    pub f1: RadialFactor,
    pub f2: StateFactor,
    /// Lipschitz constant of the argument of `f₁` (one for the distance function).
    pub lipschitz: f64,
    /// Radius inside which the solution is not required.
    pub r0: f64,
    pub r1: f64,
    pub gamma: f64,
    /// Band parameter with `(1 - t) R₁ > R₀`.
    pub t: f64,
    /// Outer radius of the solve.
    pub r_outer: f64,
    /// Dirichlet values at `r0` and `r_outer`.
    pub boundary: (f64, f64),
}

impl PoissonProblem {
    pub fn validate(&self) -> Result<()> {
        check_range("R0", self.r0, f64::MIN_POSITIVE, f64::MAX, "(0, inf)")?;
        check_range("gamma", self.gamma, 1.0 + 1e-12, f64::MAX, "(1, inf)")?;
        check_range("t", self.t, f64::MIN_POSITIVE, 1.0, "(0, 1)")?;
        if !((1.0 - self.t) * self.r1 > self.r0) {
            return Err(LabError::InvalidParameter {
                name: "t",
                value: self.t,
                range: "(1 - t) R1 > R0",
            });
        }
        if !(self.r_outer >= (self.gamma + self.t) * self.r1) {
            return Err(LabError::InvalidParameter {
                name: "r_outer",
                value: self.r_outer,
                range: "[(gamma + t) R1, inf)",
            });
        }
        Ok(())
    }

    /// Closed band `[(1 - t) R₁, (gamma + t) R₁]` where the constants are maximized.
    pub fn band(&self) -> (f64, f64) {
        ((1.0 - self.t) * self.r1, (self.gamma + self.t) * self.r1)
    }

    /// Open annulus `(R₁, gamma R₁)` where the estimate is asserted.
    pub fn target(&self) -> (f64, f64) {
        (self.r1, self.gamma * self.r1)
    }

    /// `Δω = ω / r^alpha` outside `B_{R₁/2}`, with band `t = 1/4`, `gamma = 2` and outer radius `8 R₁`.
    pub fn linear_decay(alpha: f64, r1: f64) -> Self {
        Self {
            f1: RadialFactor::Power {
                scale: 1.0,
                exponent: -alpha,
            },
            f2: StateFactor::linear(1.0),
            lipschitz: 1.0,
            r0: r1 / 2.0,
            r1,
            gamma: 2.0,
            t: 0.25,
            r_outer: 8.0 * r1,
            boundary: (1.0, 0.0),
        }
    }
}

/// Nodal solution of a radial Dirichlet problem.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RadialSolution {
    pub nodes: Vec<f64>,
    pub omega: Vec<f64>,
    /// Centered (one-sided at the ends) second-order difference of `omega`.
    pub omega_prime: Vec<f64>,
}

impl RadialSolution {
    /// `(ω'/ω)²` at each node.
    pub fn log_gradient_sq(&self) -> Vec<f64> {
        self.omega.iter().zip(&self.omega_prime).map(|(w, d)| (d / w).powi(2)).collect()
    }
}

/// Second-order finite differences on `n` uniform intervals with a caller-supplied drift `p(r)`.
pub fn solve_radial_dirichlet<P: Fn(f64) -> f64>(problem: &PoissonProblem, drift: P, n: usize) -> Result<RadialSolution> {
    if n < 4 {
        return Err(LabError::InvalidGrid("need at least 4 intervals".into()));
    }
    let (a, b) = (problem.r0, problem.r_outer);
    let h = (b - a) / n as f64;
    let nodes: Vec<f64> = (0..=n).map(|i| a + h * i as f64).collect();
    let m = n - 1;
    let (mut lower, mut diag, mut upper, mut rhs) = (vec![0.0; m], vec![0.0; m], vec![0.0; m], vec![0.0; m]);
    let (s, s0) = (problem.f2.slope, problem.f2.offset);
    for k in 0..m {
        let r = nodes[k + 1];
        let p = drift(r);
        let f1 = problem.f1.value(r);
        lower[k] = 1.0 / (h * h) - p / (2.0 * h);
        upper[k] = 1.0 / (h * h) + p / (2.0 * h);
        diag[k] = -2.0 / (h * h) - f1 * s;
        rhs[k] = f1 * s0;
    }
    rhs[0] -= lower[0] * problem.boundary.0;
    rhs[m - 1] -= upper[m - 1] * problem.boundary.1;
    let interior = solve_tridiagonal(&lower, &diag, &upper, &rhs)?;
    let mut omega = Vec::with_capacity(n + 1);
    omega.push(problem.boundary.0);
    omega.extend(interior);
    omega.push(problem.boundary.1);
    let mut omega_prime = vec![0.0; n + 1];
    omega_prime[0] = (-3.0 * omega[0] + 4.0 * omega[1] - omega[2]) / (2.0 * h);
    omega_prime[n] = (3.0 * omega[n] - 4.0 * omega[n - 1] + omega[n - 2]) / (2.0 * h);
    for i in 1..n {
        omega_prime[i] = (omega[i + 1] - omega[i - 1]) / (2.0 * h);
    }
    Ok(RadialSolution {
        nodes,
        omega,
        omega_prime,
    })
}

/// Default resolution: spacing at most `0.01` and at least 2000 intervals.
pub fn default_intervals(problem: &PoissonProblem) -> usize {
    (((problem.r_outer - problem.r0) / 0.01).ceil() as usize).max(2000)
}

/// Solves on a model manifold; the drift is `(d-1) h'/h`.
pub fn solve_radial_poisson(problem: &PoissonProblem, manifold: &ModelManifold<f64>, n: usize) -> Result<RadialSolution> {
    problem.validate()?;
    if manifold.r_max() < problem.r_outer {
        return Err(LabError::InsufficientDomain {
            needed: problem.r_outer,
            available: manifold.r_max(),
        });
    }
    let p = manifold.d() as f64 - 1.0;
    let warping = manifold.warping();
    solve_radial_dirichlet(problem, |r| p * warping.log_derivative_interp(r), n)
}

/// Positivity of `ω` on the closed band.
pub fn check_positive_on_band(problem: &PoissonProblem, sol: &RadialSolution) -> Result<f64> {
    let (lo, hi) = problem.band();
    let mut min = f64::INFINITY;
    for (r, w) in sol.nodes.iter().zip(&sol.omega) {
        if *r >= lo && *r <= hi {
            if !(*w > 0.0) {
                return Err(LabError::NonPositive {
                    what: "omega on band",
                    r: *r,
                    value: *w,
                });
            }
            min = min.min(*w);
        }
    }
    Ok(min)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{CurvatureProfile, RadialGrid};

    fn harmonic(r_in: f64, gamma: f64) -> PoissonProblem {
        PoissonProblem {
            f1: RadialFactor::Constant(0.0),
            f2: StateFactor::linear(1.0),
            lipschitz: 1.0,
            r0: r_in,
            r1: 1.5 * r_in,
            gamma: 1.2,
            t: 0.1,
            r_outer: gamma * r_in,
            boundary: (1.0, 0.0),
        }
    }

    #[test]
    fn harmonic_in_three_space() {
        let p = harmonic(1.0, 3.0);
        let m = ModelManifold::from_profile(&CurvatureProfile::flat(), &RadialGrid::uniform(4.0, 400).unwrap(), 3).unwrap();
        let sol = solve_radial_poisson(&p, &m, 4000).unwrap();
        let exact = |r: f64| (1.0 / r - 1.0 / 3.0) / (1.0 - 1.0 / 3.0);
        let err = sol.nodes.iter().zip(&sol.omega).map(|(r, w)| (w - exact(*r)).abs()).fold(0.0, f64::max);
        assert!(err < 1e-6, "{err}");
    }

    #[test]
    fn constant_source_matches_power_barrier() {
        // Drift a/r exactly: the annulus subsolution is then an exact solution.
        use crate::cutoff::AnnulusBarriers;
        let (a, big_r, gamma) = (3.2, 2.0, 1.5);
        let bar = AnnulusBarriers::new(a, big_r, gamma);
        let p = PoissonProblem {
            f1: RadialFactor::Constant(1.0),
            f2: StateFactor::constant(bar.source),
            lipschitz: 1.0,
            r0: big_r,
            r1: 1.1 * big_r,
            gamma: 1.1,
            t: 0.05,
            r_outer: gamma * big_r,
            boundary: (1.0, 0.0),
        };
        let errors: Vec<f64> = [200, 400, 800]
            .iter()
            .map(|&n| {
                let sol = solve_radial_dirichlet(&p, |r| a / r, n).unwrap();
                sol.nodes.iter().zip(&sol.omega).map(|(r, w)| (w - bar.u(*r)).abs()).fold(0.0, f64::max)
            })
            .collect();
        assert!(errors[2] < 1e-6, "{errors:?}");
        let order = (errors[1] / errors[2]).log2();
        assert!((order - 2.0).abs() < 0.3, "{errors:?}");
    }

    #[test]
    fn self_convergence_is_second_order() {
        let p = PoissonProblem::linear_decay(1.0, 2.0);
        let drift = |r: f64| 2.0 / r;
        let fine = solve_radial_dirichlet(&p, drift, 12_800).unwrap();
        let err = |n: usize| {
            let s = solve_radial_dirichlet(&p, drift, n).unwrap();
            let stride = 12_800 / n;
            s.omega.iter().enumerate().map(|(i, w)| (w - fine.omega[i * stride]).abs()).fold(0.0, f64::max)
        };
        let (e1, e2) = (err(400), err(800));
        let ratio = e1 / e2;
        assert!((ratio / 4.0 - 1.0).abs() < 0.2, "{e1} {e2}");
    }

    #[test]
    fn validation() {
        let mut p = PoissonProblem::linear_decay(0.0, 4.0);
        assert!(p.validate().is_ok());
        p.t = 0.6;
        assert!(p.validate().is_err());
        let mut q = PoissonProblem::linear_decay(0.0, 4.0);
        q.r_outer = 5.0;
        assert!(q.validate().is_err());
    }

    #[test]
    fn positivity_check_reports_band_minimum() {
        let p = PoissonProblem::linear_decay(0.0, 2.0);
        let sol = solve_radial_dirichlet(&p, |r| 2.0 / r, 2000).unwrap();
        let min = check_positive_on_band(&p, &sol).unwrap();
        assert!(min > 0.0 && min < 1.0);
    }
}

//! Cut-off on an annulus `[R, gamma R]` for curvature decaying like `kappa^2 / r^2`.
//!
//! `ω` solves `Δω = 1/(gamma^(a+1) R^2)` with `ω(R) = 1`, `ω(gamma R) = 0`. It is squeezed
//! between the explicit power-law subsolution `u` and `1 - v((r - R)/(2(gamma - 1)))`,
//! which pins two level sets of `ω` at radii proportional to `R` for every `gamma > 1`.

use serde::Serialize;

use super::general::{compose, CutoffFamily, CutoffProfile};
use crate::error::{check_range, LabError, Result};
use crate::geometry::{solve_warping, CurvatureProfile, RadialGrid};
use crate::numeric::ode::{integrate_nodes, StepControl};
use crate::numeric::roots::bisect;

/// Power `a = (d-1)(1 + sqrt(1 + 4 kappa^2))/2` bounding `(d-1) h'/h <= a/r`.
pub fn annulus_exponent(kappa: f64, d: usize) -> f64 {
    (d as f64 - 1.0) * (1.0 + (1.0 + 4.0 * kappa * kappa).sqrt()) / 2.0
}

/// Closed-form barriers on `[R, gamma R]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AnnulusBarriers {
    pub a: f64,
    pub radius: f64,
    pub gamma: f64,
    /// Coefficient of `r^(1-a)` in `u`.
    pub c2: f64,
    /// Coefficient of `s^2` in `v`.
    pub v_coef: f64,
    /// Right-hand side of `Δω`.
    pub source: f64,
}

impl AnnulusBarriers {
    pub fn new(a: f64, radius: f64, gamma: f64) -> Self {
        let ga = gamma.powf(a + 1.0);
        let c2 = (1.0 + (gamma * gamma - 1.0) / (2.0 * (a + 1.0) * ga)) / ((1.0 - gamma.powf(1.0 - a)) * radius.powf(1.0 - a));
        Self {
            a,
            radius,
            gamma,
            c2,
            v_coef: 1.0 / (2.0 * (a + 1.0) * ga * radius * radius),
            source: 1.0 / (ga * radius * radius),
        }
    }

    /// Subsolution `u` with `u(R) = 1`, `u(gamma R) = 0`.
    pub fn u(&self, r: f64) -> f64 {
        let (a, big_r) = (self.a, self.radius);
        let ga = self.gamma.powf(a + 1.0);
        self.c2 * (r.powf(1.0 - a) - big_r.powf(1.0 - a)) + 1.0 + (r * r - big_r * big_r) / (2.0 * ga * big_r * big_r * (a + 1.0))
    }

    pub fn u_prime(&self, r: f64) -> f64 {
        let a = self.a;
        let ga = self.gamma.powf(a + 1.0);
        self.c2 * (1.0 - a) * r.powf(-a) + r / (ga * self.radius * self.radius * (a + 1.0))
    }

    pub fn v(&self, s: f64) -> f64 {
        self.v_coef * s * s
    }

    /// Upper barrier `1 - v((r - R)/(2(gamma - 1)))`.
    pub fn upper(&self, r: f64) -> f64 {
        1.0 - self.v((r - self.radius) / (2.0 * (self.gamma - 1.0)))
    }

    /// Gap between the two levels for a band parameter `theta`, from the `R`-dependent barriers.
    pub fn gap(&self, theta: f64) -> f64 {
        let g = self.gamma;
        self.u((1.0 + theta) * self.radius) - 1.0 + self.v((g - 1.0 - theta) * self.radius / (2.0 * (g - 1.0)))
    }

    /// The same gap from the `R`-free closed form.
    pub fn gap_closed_form(&self, theta: f64) -> f64 {
        let (a, g) = (self.a, self.gamma);
        let ga = g.powf(a + 1.0);
        (1.0 + (g * g - 1.0) / (2.0 * ga * (a + 1.0))) / (1.0 - g.powf(1.0 - a)) * ((theta + 1.0).powf(1.0 - a) - 1.0)
            + ((theta + 1.0).powi(2) - 1.0) / (2.0 * ga * (a + 1.0))
            + (g - 1.0 - theta).powi(2) / (8.0 * ga * (g - 1.0).powi(2) * (a + 1.0))
    }

    /// Alternative starting value stated in prose, `(gamma-1)^2/(2 gamma^(a+1) (2gamma-1)^2 (a+1))`.
    pub fn gap_at_zero_stated(&self) -> f64 {
        let (a, g) = (self.a, self.gamma);
        (g - 1.0).powi(2) / (2.0 * g.powf(a + 1.0) * (2.0 * g - 1.0).powi(2) * (a + 1.0))
    }

    /// Band parameter `theta` in `(0, (gamma-1)/2)` where the gap has dropped to half its value at zero.
    pub fn theta(&self) -> Result<f64> {
        let h0 = self.gap(0.0);
        let end = (self.gamma - 1.0) / 2.0;
        let h_end = self.gap(end);
        if !(h0 > 0.0) || !(h_end < 0.5 * h0) {
            return Err(LabError::RootNotBracketed { h_start: h0, h_end });
        }
        bisect(|t| self.gap(t) - 0.5 * h0, 0.0, end, 1e-15 * end.max(1e-300))
            .ok_or(LabError::RootNotBracketed { h_start: h0, h_end })
    }
}

/// Solution of the annulus problem and the barrier diagnostics.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AnnulusSolution {
    pub kappa: f64,
    pub d: usize,
    pub barriers: AnnulusBarriers,
    pub theta: f64,
    /// Gap at `theta` (the distance between the two step levels).
    pub gap_theta: f64,
    /// Gap at zero from the closed form and from the prose value.
    pub gap_zero: f64,
    pub gap_zero_stated: f64,
    /// `(level where phi leaves 0, level where phi reaches 1)` in terms of `ω`.
    pub levels: (f64, f64),
    pub nodes: Vec<f64>,
    pub omega: Vec<f64>,
    pub omega_prime: Vec<f64>,
    /// `min (ω - u)` over the nodes.
    pub lower_slack: f64,
    /// `min (upper - ω)` over the nodes.
    pub upper_slack: f64,
    /// All values inside `[0, 1]`.
    pub maximum_principle: bool,
    /// `u' < 0` at every node.
    pub u_decreasing: bool,
}

impl AnnulusSolution {
    pub fn sandwich_holds(&self, slack: f64) -> bool {
        self.lower_slack >= -slack && self.upper_slack >= -slack
    }
}

const ANNULUS_INTERVALS: usize = 2000;

/// Solves `Δω = source` on the annulus by superposition of two initial-value solutions.
fn solve_omega(kappa: f64, d: usize, bar: &AnnulusBarriers, nodes: &[f64]) -> Result<(Vec<f64>, Vec<f64>)> {
    let outer = bar.gamma * bar.radius;
    let profile = CurvatureProfile::standard(kappa, 2.0)?;
    let grid = RadialGrid::graded(outer, 1e-3, 1.05, (outer / 200.0).max(0.01))?;
    let warping = solve_warping(&profile, &grid)?;
    let p = |r: f64| (d as f64 - 1.0) * warping.log_derivative_interp(r);
    // Particular: ω_p(R) = 1, ω_p'(R) = 0; homogeneous: ω_h(R) = 0, ω_h'(R) = 1.
    let mut rhs = |r: f64, s: &[f64; 4]| {
        let pr = p(r);
        [s[1], bar.source - pr * s[1], s[3], -pr * s[3]]
    };
    let states = integrate_nodes(&mut rhs, nodes, [1.0, 0.0, 0.0, 1.0], &StepControl::adaptive(1e-12))?;
    let last = states.last().expect("nonempty");
    if last[2] == 0.0 {
        return Err(LabError::Singular("annulus homogeneous solution vanishes"));
    }
    let shift = -last[0] / last[2];
    let omega = states.iter().map(|s| s[0] + shift * s[2]).collect();
    let omega_prime = states.iter().map(|s| s[1] + shift * s[3]).collect();
    Ok((omega, omega_prime))
}

/// Annulus cut-off: one on `B_R`, zero outside `B_{gamma R}`, with `|∇phi| <~ 1/R` and `|Δphi| <~ 1/R^2`.
pub fn build_cutoff_alpha2(kappa: f64, d: usize, radius: f64, gamma: f64) -> Result<(AnnulusSolution, CutoffProfile)> {
    check_range("kappa", kappa, 0.0, f64::MAX, "[0, inf)")?;
    check_range("d", d as f64, 2.0, 64.0, "{2, ..., 64}")?;
    check_range("R", radius, f64::MIN_POSITIVE, 1e6, "(0, 1e6]")?;
    check_range("gamma", gamma, 1.0 + 1e-9, 1e3, "(1, 1e3]")?;
    let a = annulus_exponent(kappa, d);
    let bar = AnnulusBarriers::new(a, radius, gamma);
    let theta = bar.theta()?;
    let outer = gamma * radius;
    let nodes: Vec<f64> = (0..=ANNULUS_INTERVALS)
        .map(|i| radius + (outer - radius) * i as f64 / ANNULUS_INTERVALS as f64)
        .collect();
    let (omega, omega_prime) = solve_omega(kappa, d, &bar, &nodes)?;

    let mut lower_slack = f64::INFINITY;
    let mut upper_slack = f64::INFINITY;
    let mut maximum_principle = true;
    let mut u_decreasing = true;
    for (i, &r) in nodes.iter().enumerate() {
        lower_slack = lower_slack.min(omega[i] - bar.u(r));
        upper_slack = upper_slack.min(bar.upper(r) - omega[i]);
        maximum_principle &= (-1e-12..=1.0 + 1e-12).contains(&omega[i]);
        u_decreasing &= bar.u_prime(r) < 0.0;
    }
    let level_one = bar.u((1.0 + theta) * radius);
    let level_zero = 1.0 - bar.v((gamma - 1.0 - theta) * radius / (2.0 * (gamma - 1.0)));

    // phi = S((level_one - ω)/(level_one - level_zero)); compose() works with increasing levels,
    // so feed it the reflected function 1 - ω.
    let mut full_nodes = vec![0.0, 0.5 * radius];
    full_nodes.extend_from_slice(&nodes);
    full_nodes.push(1.05 * outer);
    let lookup = |r: f64| -> Result<(f64, f64, f64)> {
        if r < radius {
            return Ok((0.0, 0.0, 0.0));
        }
        if r > outer {
            return Ok((1.0, 0.0, 0.0));
        }
        let i = nodes.partition_point(|x| *x < r).min(nodes.len() - 1);
        Ok((1.0 - omega[i], -omega_prime[i], -bar.source))
    };
    let (phi, grad, laplacian) = compose(&full_nodes, (1.0 - level_one, 1.0 - level_zero), lookup)?;
    let sup = |xs: &[f64]| xs.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    let profile = CutoffProfile {
        family: CutoffFamily::Annulus,
        alpha: 2.0,
        d,
        plateau_radius: radius,
        support_radius: outer,
        gamma,
        levels: (level_zero, level_one),
        gamma_threshold: Some(1.0),
        sup_grad: sup(&grad),
        sup_laplacian: sup(&laplacian),
        nodes: full_nodes,
        phi,
        grad,
        laplacian,
    };
    let solution = AnnulusSolution {
        kappa,
        d,
        barriers: bar,
        theta,
        gap_theta: bar.gap(theta),
        gap_zero: bar.gap_closed_form(0.0),
        gap_zero_stated: bar.gap_at_zero_stated(),
        levels: (level_zero, level_one),
        nodes,
        omega,
        omega_prime,
        lower_slack,
        upper_slack,
        maximum_principle,
        u_decreasing,
    };
    Ok((solution, profile))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::fit::spread;

    #[test]
    fn barrier_boundary_values() {
        let a = annulus_exponent(1.0, 3);
        for r in [1.0, 10.0, 100.0] {
            let b = AnnulusBarriers::new(a, r, 1.5);
            assert!((b.u(r) - 1.0).abs() < 1e-12);
            assert!(b.u(1.5 * r).abs() < 1e-12);
            for i in 0..=100 {
                assert!(b.u_prime(r * (1.0 + 0.5 * i as f64 / 100.0)) < 0.0);
            }
        }
    }

    #[test]
    fn gap_is_radius_free() {
        let a = annulus_exponent(1.0, 3);
        let b1 = AnnulusBarriers::new(a, 1.0, 2.0);
        let b100 = AnnulusBarriers::new(a, 100.0, 2.0);
        let (t1, t100) = (b1.theta().unwrap(), b100.theta().unwrap());
        assert!((t1 - t100).abs() < 1e-10, "{t1} {t100}");
        assert!(t1 > 0.0 && t1 < 0.5);
        for th in [0.0, 0.1, 0.3] {
            assert!((b100.gap(th) - b1.gap_closed_form(th)).abs() < 1e-12);
        }
    }

    #[test]
    fn sandwich_and_levels() {
        for gamma in [1.05, 1.1, 1.5, 3.0] {
            let (sol, prof) = build_cutoff_alpha2(1.0, 3, 4.0, gamma).unwrap();
            assert!(sol.sandwich_holds(1e-9), "gamma {gamma}: {} {}", sol.lower_slack, sol.upper_slack);
            assert!(sol.maximum_principle && sol.u_decreasing);
            assert!(sol.levels.1 > sol.levels.0);
            assert!(prof.certify(1e-12).passed(), "{:?}", prof.certify(1e-12));
        }
    }

    #[test]
    fn laplacian_scales_like_inverse_square() {
        let consts: Vec<f64> = [1.0, 2.0, 4.0, 8.0, 16.0, 32.0]
            .iter()
            .map(|&r| build_cutoff_alpha2(1.0, 3, r, 1.5).unwrap().1.laplacian_constant())
            .collect();
        assert!(spread(&consts) < 4.0, "{consts:?}");
    }

    #[test]
    fn rejects_gamma_at_one() {
        assert!(build_cutoff_alpha2(1.0, 3, 1.0, 1.0).is_err());
        assert!(build_cutoff_alpha2(1.0, 3, -1.0, 2.0).is_err());
    }
}

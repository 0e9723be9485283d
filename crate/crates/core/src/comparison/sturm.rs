//! Sturm comparison of two solutions of `y'' = G y` with ordered coefficients.

use crate::error::{LabError, Result};
use crate::geometry::{check_profiles_ordered, solve_warping, CurvatureProfile, RadialGrid};
use crate::numeric::{lit, Real};
use serde::Serialize;

/// Two sampled functions on a shared grid together with their coefficient samples.
///
/// `phi` solves (or is a subsolution of) `y'' = g_phi y`; `psi` solves (or is a
/// supersolution of) `y'' = g_psi y`; both vanish at the first node.
#[derive(Debug, Clone, PartialEq)]
pub struct SturmPair<T> {
    nodes: Vec<T>,
    phi: Vec<T>,
    dphi: Vec<T>,
    psi: Vec<T>,
    dpsi: Vec<T>,
    g_phi: Vec<T>,
    g_psi: Vec<T>,
}

/// Which conclusion failed first.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum SturmViolationKind {
    Value,
    LogDerivative,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SturmViolation {
    pub r: f64,
    pub kind: SturmViolationKind,
    pub excess: f64,
}

/// Outcome of [`sturm_compare`]; violations are data, not errors.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SturmReport {
    pub nodes_checked: usize,
    pub coefficients_ordered: bool,
    pub values_ordered: bool,
    pub log_derivatives_ordered: bool,
    /// Largest `(phi - psi) / max(1, |psi|)` over positive nodes.
    pub max_value_excess: f64,
    /// Largest `(phi'/phi - psi'/psi) / max(1, |psi'/psi|)` over positive nodes.
    pub max_log_derivative_excess: f64,
    pub first_violation: Option<SturmViolation>,
}

impl SturmReport {
    pub fn ordered(&self) -> bool {
        self.values_ordered && self.log_derivatives_ordered
    }
}

impl<T: Real> SturmPair<T> {
    /// Validates shapes, the common zero at the first node and the slope ordering.
    pub fn from_samples(
        nodes: Vec<T>,
        (phi, dphi): (Vec<T>, Vec<T>),
        (psi, dpsi): (Vec<T>, Vec<T>),
        (g_phi, g_psi): (Vec<T>, Vec<T>),
    ) -> Result<Self> {
        let n = nodes.len();
        if n < 2 || [phi.len(), dphi.len(), psi.len(), dpsi.len(), g_phi.len(), g_psi.len()].iter().any(|&l| l != n) {
            return Err(LabError::InvalidGrid("sample vectors must share the grid length".into()));
        }
        let zero_tol = T::default_rtol();
        if phi[0].abs() > zero_tol || psi[0].abs() > zero_tol {
            return Err(LabError::InvalidParameter {
                name: "initial value",
                value: phi[0].abs().max(psi[0].abs()).as_f64(),
                range: "0",
            });
        }
        if dphi[0] > dpsi[0] * (T::one() + zero_tol) {
            return Err(LabError::NotOrdered {
                r: nodes[0].as_f64(),
                low: dpsi[0].as_f64(),
                high: dphi[0].as_f64(),
            });
        }
        Ok(Self {
            nodes,
            phi,
            dphi,
            psi,
            dpsi,
            g_phi,
            g_psi,
        })
    }

    /// Solves `y'' = G y`, `y(0) = 0`, `y'(0) = 1` for both profiles on `grid`.
    pub fn from_profiles(low: &CurvatureProfile<T>, high: &CurvatureProfile<T>, grid: &RadialGrid<T>) -> Result<Self> {
        let a = solve_warping(low, grid)?;
        let b = solve_warping(high, grid)?;
        let nodes = grid.nodes().to_vec();
        let g_low = nodes.iter().map(|&r| low.value(r)).collect();
        let g_high = nodes.iter().map(|&r| high.value(r)).collect();
        Self::from_samples(
            nodes,
            (a.h_samples(), a.h_prime_samples()),
            (b.h_samples(), b.h_prime_samples()),
            (g_low, g_high),
        )
    }

    pub fn nodes(&self) -> &[T] {
        &self.nodes
    }

    /// Whether `g_phi <= g_psi` at every node within `tol` relative.
    pub fn coefficients_ordered(&self, tol: T) -> bool {
        self.g_phi
            .iter()
            .zip(&self.g_psi)
            .all(|(a, b)| *a <= *b + tol * (T::one() + b.abs()))
    }
}

/// Checks `phi <= psi` and `phi'/phi <= psi'/psi` at every positive node.
///
/// Tolerances are relative to `max(1, |reference|)` so that exponentially
/// large solutions are compared at the integrator's accuracy.
pub fn sturm_compare<T: Real>(pair: &SturmPair<T>, tol: T) -> SturmReport {
    let tol = tol.as_f64();
    let mut report = SturmReport {
        nodes_checked: 0,
        coefficients_ordered: pair.coefficients_ordered(lit::<T>(tol)),
        values_ordered: true,
        log_derivatives_ordered: true,
        max_value_excess: f64::NEG_INFINITY,
        max_log_derivative_excess: f64::NEG_INFINITY,
        first_violation: None,
    };
    for i in 1..pair.nodes.len() {
        let (phi, psi) = (pair.phi[i].as_f64(), pair.psi[i].as_f64());
        let (dphi, dpsi) = (pair.dphi[i].as_f64(), pair.dpsi[i].as_f64());
        report.nodes_checked += 1;
        let value_excess = (phi - psi) / psi.abs().max(1.0);
        let (lp, lq) = (dphi / phi, dpsi / psi);
        let log_excess = (lp - lq) / lq.abs().max(1.0);
        report.max_value_excess = report.max_value_excess.max(value_excess);
        report.max_log_derivative_excess = report.max_log_derivative_excess.max(log_excess);
        let r = pair.nodes[i].as_f64();
        if !(value_excess <= tol) {
            report.values_ordered = false;
            report.first_violation.get_or_insert(SturmViolation {
                r,
                kind: SturmViolationKind::Value,
                excess: value_excess,
            });
        }
        if !(log_excess <= tol) {
            report.log_derivatives_ordered = false;
            report.first_violation.get_or_insert(SturmViolation {
                r,
                kind: SturmViolationKind::LogDerivative,
                excess: log_excess,
            });
        }
    }
    report
}

/// Convenience: coefficient check on the profiles followed by [`sturm_compare`].
pub fn compare_profiles<T: Real>(
    low: &CurvatureProfile<T>,
    high: &CurvatureProfile<T>,
    grid: &RadialGrid<T>,
    tol: T,
) -> Result<SturmReport> {
    let mut report = sturm_compare(&SturmPair::from_profiles(low, high, grid)?, tol);
    report.coefficients_ordered &= check_profiles_ordered(low, high, grid).is_ok();
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn flat_versus_hyperbolic() {
        let grid = RadialGrid::uniform(8.0f64, 200).unwrap();
        let low = CurvatureProfile::flat();
        let high = CurvatureProfile::constant(1.0).unwrap();
        let rep = compare_profiles(&low, &high, &grid, 1e-8).unwrap();
        assert!(rep.ordered() && rep.coefficients_ordered);
        assert_eq!(rep.nodes_checked, 200);
        assert!(rep.max_value_excess < 0.0);
    }

    #[test]
    fn identical_profiles_give_equality() {
        let grid = RadialGrid::uniform(5.0f64, 64).unwrap();
        let p = CurvatureProfile::standard(1.0, 1.0).unwrap();
        let rep = compare_profiles(&p, &p, &grid, 1e-8).unwrap();
        assert!(rep.ordered());
        assert!(rep.max_value_excess.abs() < 1e-14);
        assert!(rep.max_log_derivative_excess.abs() < 1e-14);
    }

    #[test]
    fn centered_standard_below_power_tail() {
        let r0 = 6.0;
        let grid = RadialGrid::uniform(0.9 * r0, 180).unwrap();
        let low = CurvatureProfile::centered(1.0, 2.0, r0).unwrap();
        let high = CurvatureProfile::power_tail(1.0, 2.0, r0).unwrap();
        let rep = compare_profiles(&low, &high, &grid, 1e-8).unwrap();
        assert!(rep.coefficients_ordered && rep.ordered());
    }

    #[test]
    fn reversed_pair_reports_violation() {
        let grid = RadialGrid::uniform(3.0f64, 30).unwrap();
        let low = CurvatureProfile::constant(1.0).unwrap();
        let high = CurvatureProfile::flat();
        let rep = compare_profiles(&low, &high, &grid, 1e-8).unwrap();
        assert!(!rep.ordered());
        assert!(!rep.coefficients_ordered);
        let v = rep.first_violation.unwrap();
        assert!(v.r > 0.0);
    }

    #[test]
    fn sample_validation() {
        let nodes = vec![0.0, 1.0];
        let ok = (vec![0.0, 1.0], vec![1.0, 1.0]);
        assert!(SturmPair::from_samples(nodes.clone(), ok.clone(), ok.clone(), (vec![0.0; 2], vec![0.0; 2])).is_ok());
        let bad_start = (vec![0.5, 1.0], vec![1.0, 1.0]);
        assert!(SturmPair::from_samples(nodes.clone(), bad_start, ok.clone(), (vec![0.0; 2], vec![0.0; 2])).is_err());
        let steep = (vec![0.0, 2.0], vec![2.0, 2.0]);
        assert!(SturmPair::from_samples(nodes, steep, ok, (vec![0.0; 2], vec![0.0; 2])).is_err());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]
        #[test]
        fn adding_a_bump_preserves_ordering(kappa in 0.0f64..1.5, alpha in -1.0f64..2.0, amp in 0.0f64..2.0, center in 0.5f64..5.0) {
            let grid = RadialGrid::uniform(6.0f64, 96).unwrap();
            let base = CurvatureProfile::standard(kappa, alpha).unwrap();
            let xs: Vec<f64> = (0..=60).map(|i| i as f64 * 0.1).collect();
            let bump: Vec<f64> = xs.iter().map(|x| amp * (-(x - center).powi(2)).exp()).collect();
            let high = CurvatureProfile::sum(base.clone(), CurvatureProfile::tabulated(xs, bump).unwrap());
            let rep = compare_profiles(&base, &high, &grid, 1e-8).unwrap();
            prop_assert!(rep.coefficients_ordered);
            prop_assert!(rep.ordered(), "{:?}", rep.first_violation);
        }
    }
}

//! Volume lower-bound chain for balls centred away from the pole.
//!
//! Seen from a point at distance `r_x` from the pole, the standard profile becomes
//! `G(s) = kappa^2 / (1 + (r_x - s)^2)^(alpha/2)`. Its warping solution `h` is
//! dominated by the solution `psi` of a majorant problem, whose integral
//! `int psi^(d-1)` is then bounded by an explicit growth law.

use super::psi::{closed_form_psi, indicial_root, ClosedFormPsi, PsiCase};
use super::sturm::{sturm_compare, SturmPair};
use crate::error::{check_range, Result};
use crate::geometry::{solve_warping, CurvatureProfile, ModelManifold, RadialGrid};
use crate::numeric::fit::fit_line;
use crate::numeric::quad::composite_gauss;
use serde::Serialize;
use std::sync::Arc;

/// Nodes per unit length for the minorant grid (at least 256 nodes in total).
const NODES_PER_UNIT: f64 = 64.0;
/// Gauss panels and order for the closed-form integrals.
const PANELS: usize = 96;
const ORDER: usize = 10;

/// Which majorant dominates the off-pole profile.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Majorant {
    /// `kappa^2 (r_x - s)^(-alpha)`, closed-form `psi` (`alpha >= 0`).
    PowerTail,
    /// `kappa^2 (1 + r_x - s)^(-alpha)`, numeric `psi` (`alpha < 0`).
    ShiftedTail,
    /// `kappa = 0`: `psi(s) = s`.
    Flat,
}

/// One radius of the chain.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ChainPoint {
    pub r_x: f64,
    pub majorant: Majorant,
    /// Upper end of the integral: `r_x`, or `r_x - 1` when `alpha = 2` (the majorant blows up at `r_x`).
    pub upper: f64,
    /// `int_0^upper psi^(d-1) ds`.
    pub integral: f64,
    /// `h <= psi` and `h'/h <= psi'/psi` at every positive node below `r_x`.
    pub minorant_below: bool,
    /// Largest relative excess of `h` over `psi`.
    pub max_excess: f64,
    /// Growth bound at `r_x` after fitting (filled by [`chain_sweep`]).
    pub bound: Option<f64>,
    pub bound_ok: Option<bool>,
    pub fitted_exponent: Option<f64>,
}

/// Fitted growth law of the chain integral.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum ChainFit {
    /// `integral <= c3 r^(1 + (d-1) alpha/4) exp(c4 r^(1 - alpha/2))`.
    Exponential {
        c3: f64,
        c4: f64,
        /// `c4` refitted without the largest radius.
        c4_leave_last_out: f64,
        stable: bool,
        /// Least-squares `p` in `log I - (1 + (d-1) alpha/4) log r = a + c r^p`.
        fitted_exponent: Option<f64>,
        predicted_exponent: f64,
    },
    /// `integral <= c3 r^bound_exponent`.
    Polynomial {
        c3: f64,
        fitted_exponent: f64,
        bound_exponent: f64,
        within_bound: bool,
    },
    /// `integral = r^d / d` exactly.
    Flat,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ChainReport {
    pub kappa: f64,
    pub alpha: f64,
    pub d: usize,
    pub points: Vec<ChainPoint>,
    pub fit: ChainFit,
    /// Every point has `h <= psi` and lies below the fitted bound.
    pub holds: bool,
}

/// Runs the chain at a single radius `r_x >= 1`.
pub fn volume_lowerbound_chain(kappa: f64, alpha: f64, d: usize, r_x: f64) -> Result<ChainPoint> {
    check_range("kappa", kappa, 0.0, f64::MAX, "[0, inf)")?;
    check_range("alpha", alpha, -2.0, 2.0, "[-2, 2]")?;
    check_range("d", d as f64, 2.0, f64::MAX, "[2, inf)")?;
    check_range("r_x", r_x, 1.0, f64::MAX, "[1, inf)")?;
    let power = alpha == 2.0;
    let upper = if power && kappa > 0.0 { r_x - 1.0 } else { r_x };
    let n = ((r_x * NODES_PER_UNIT).ceil() as usize).max(256);
    let grid = RadialGrid::uniform(r_x, n)?;
    let minorant = CurvatureProfile::centered(kappa, alpha, r_x)?;
    let h = solve_warping(&minorant, &grid)?;
    let exponent = (d - 1) as i32;

    let (majorant, psi_samples, integral) = if kappa == 0.0 {
        let nodes = grid.nodes();
        let psi = (nodes.to_vec(), vec![1.0; nodes.len()]);
        (Majorant::Flat, psi, r_x.powi(d as i32) / d as f64)
    } else if alpha >= 0.0 {
        let psi = closed_form_psi(kappa, alpha, r_x)?;
        let samples = sample_closed_form(&psi, grid.nodes())?;
        (Majorant::PowerTail, samples, closed_form_integral(&psi, exponent, upper)?)
    } else {
        let profile = CurvatureProfile::shifted_tail(kappa, alpha, r_x)?;
        let w = Arc::new(solve_warping(&profile, &grid)?);
        let m = ModelManifold::new(d, w.clone())?;
        let integral = m.volume_ball(r_x)? / m.sphere_area();
        (Majorant::ShiftedTail, (w.h_samples(), w.h_prime_samples()), integral)
    };

    // Compare on nodes strictly below r_x, where every majorant is regular.
    let keep = grid.nodes().iter().take_while(|&&s| s < r_x).count().min(psi_samples.0.len());
    let nodes: Vec<f64> = grid.nodes()[..keep].to_vec();
    let g_low: Vec<f64> = nodes.iter().map(|&s| minorant.value(s)).collect();
    let g_high = g_low.clone();
    let pair = SturmPair::from_samples(
        nodes,
        (h.h_samples()[..keep].to_vec(), h.h_prime_samples()[..keep].to_vec()),
        (psi_samples.0[..keep].to_vec(), psi_samples.1[..keep].to_vec()),
        (g_low, g_high),
    )?;
    let rep = sturm_compare(&pair, 1e-8);
    Ok(ChainPoint {
        r_x,
        majorant,
        upper,
        integral,
        minorant_below: rep.ordered(),
        max_excess: rep.max_value_excess,
        bound: None,
        bound_ok: None,
        fitted_exponent: None,
    })
}

fn sample_closed_form(psi: &ClosedFormPsi<f64>, nodes: &[f64]) -> Result<(Vec<f64>, Vec<f64>)> {
    let mut v = Vec::with_capacity(nodes.len());
    let mut dv = Vec::with_capacity(nodes.len());
    for &s in nodes {
        if s >= psi.r {
            break;
        }
        let (a, b) = psi.eval(s)?;
        v.push(a);
        dv.push(b);
    }
    Ok((v, dv))
}

/// `int_0^upper psi^k ds` for the closed forms.
fn closed_form_integral(psi: &ClosedFormPsi<f64>, k: i32, upper: f64) -> Result<f64> {
    let mut failure = None;
    let value = if psi.case == PsiCase::Power {
        composite_gauss(
            |s| match psi.value(s) {
                Ok(v) => v.powi(k),
                Err(e) => {
                    failure.get_or_insert(e);
                    0.0
                }
            },
            0.0,
            upper,
            PANELS,
            ORDER,
        )
    } else {
        // s = r - u^2 removes the square-root behaviour at the right end.
        let r = psi.r;
        composite_gauss(
            |u: f64| match psi.value(r - u * u) {
                Ok(v) => 2.0 * u * v.powi(k),
                Err(e) => {
                    failure.get_or_insert(e);
                    0.0
                }
            },
            0.0,
            r.sqrt(),
            PANELS,
            ORDER,
        )
    };
    match failure {
        Some(e) => Err(e),
        None => Ok(value),
    }
}

/// Least-squares exponent `p` of the model `y = a + c r^p`, with `(a, c)` linear for fixed `p`.
///
/// Scans `p` on `[0.02, 4]` and refines the best bracket by golden-section search.
pub fn growth_exponent(radii: &[f64], ys: &[f64]) -> Option<f64> {
    if radii.len() < 3 || radii.len() != ys.len() {
        return None;
    }
    let ssr = |p: f64| -> f64 {
        let ts: Vec<f64> = radii.iter().map(|r| r.powf(p)).collect();
        match fit_line(&ts, ys) {
            Some(f) => ts.iter().zip(ys).map(|(t, y)| (y - f.intercept - f.slope * t).powi(2)).sum(),
            None => f64::INFINITY,
        }
    };
    let (lo, hi, steps) = (0.02, 4.0, 400);
    let h = (hi - lo) / steps as f64;
    let best = (0..=steps)
        .map(|i| lo + h * i as f64)
        .min_by(|a, b| ssr(*a).total_cmp(&ssr(*b)))?;
    let (mut a, mut b) = ((best - h).max(lo), (best + h).min(hi));
    let g = (5f64.sqrt() - 1.0) / 2.0;
    for _ in 0..80 {
        let (x1, x2) = (b - g * (b - a), a + g * (b - a));
        if ssr(x1) < ssr(x2) {
            b = x2;
        } else {
            a = x1;
        }
    }
    Some(0.5 * (a + b))
}

/// Runs the chain over `radii`, fits the growth constants and evaluates the bound.
pub fn chain_sweep(kappa: f64, alpha: f64, d: usize, radii: &[f64]) -> Result<ChainReport> {
    let mut points = radii
        .iter()
        .map(|&r| volume_lowerbound_chain(kappa, alpha, d, r))
        .collect::<Result<Vec<_>>>()?;
    let rs: Vec<f64> = points.iter().map(|p| p.r_x).collect();
    let logs: Vec<f64> = points.iter().map(|p| p.integral.ln()).collect();
    let fit = if kappa == 0.0 {
        for p in &mut points {
            let exact = p.r_x.powi(d as i32) / d as f64;
            p.bound = Some(exact);
            p.bound_ok = Some((p.integral - exact).abs() <= 1e-10 * exact);
            p.fitted_exponent = Some(d as f64);
        }
        ChainFit::Flat
    } else if alpha == 2.0 {
        let q = indicial_root(kappa);
        let bound_exponent = 1.0 + (d - 1) as f64 * (1.0 + q) / 2.0;
        let lr: Vec<f64> = rs.iter().map(|r| r.ln()).collect();
        let line = fit_line(&lr, &logs).ok_or_else(|| crate::LabError::Quadrature("chain fit".into()))?;
        let log_c3 = logs
            .iter()
            .zip(&lr)
            .map(|(y, x)| y - bound_exponent * x)
            .fold(f64::NEG_INFINITY, f64::max);
        for p in &mut points {
            let b = (log_c3 + bound_exponent * p.r_x.ln()).exp();
            p.bound = Some(b);
            p.bound_ok = Some(p.integral <= b * (1.0 + 1e-12));
            p.fitted_exponent = Some(line.slope);
        }
        ChainFit::Polynomial {
            c3: log_c3.exp(),
            fitted_exponent: line.slope,
            bound_exponent,
            within_bound: line.slope <= bound_exponent * 1.05,
        }
    } else {
        let pre = 1.0 + (d - 1) as f64 * alpha / 4.0;
        let growth = 1.0 - alpha / 2.0;
        let ts: Vec<f64> = rs.iter().map(|r| r.powf(growth)).collect();
        let ys: Vec<f64> = logs.iter().zip(&rs).map(|(l, r)| l - pre * r.ln()).collect();
        let full = fit_line(&ts, &ys).ok_or_else(|| crate::LabError::Quadrature("chain fit".into()))?;
        let llo = if ts.len() >= 3 {
            fit_line(&ts[..ts.len() - 1], &ys[..ys.len() - 1]).map(|f| f.slope)
        } else {
            None
        }
        .unwrap_or(full.slope);
        let lift = ys
            .iter()
            .zip(&ts)
            .map(|(y, t)| y - full.intercept - full.slope * t)
            .fold(f64::NEG_INFINITY, f64::max);
        let log_c3 = full.intercept + lift;
        let p_fit = growth_exponent(&rs, &ys);
        for p in &mut points {
            let b = (log_c3 + pre * p.r_x.ln() + full.slope * p.r_x.powf(growth)).exp();
            p.bound = Some(b);
            p.bound_ok = Some(p.integral <= b * (1.0 + 1e-12));
            p.fitted_exponent = p_fit;
        }
        ChainFit::Exponential {
            c3: log_c3.exp(),
            c4: full.slope,
            c4_leave_last_out: llo,
            stable: (llo - full.slope).abs() <= 0.1 * full.slope.abs(),
            fitted_exponent: p_fit,
            predicted_exponent: growth,
        }
    };
    let holds = points.iter().all(|p| p.minorant_below && p.bound_ok == Some(true));
    Ok(ChainReport {
        kappa,
        alpha,
        d,
        points,
        fit,
        holds,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flat_chain_is_exact() {
        let rep = chain_sweep(0.0, 1.0, 3, &[2.0, 4.0]).unwrap();
        assert!(rep.holds);
        assert!((rep.points[1].integral - 64.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn growth_exponent_recovers_model() {
        let rs = [2.0, 4.0, 8.0, 16.0, 32.0];
        let vals: Vec<f64> = rs.iter().map(|r: &f64| 0.3 + 2.5 * r.powf(0.7)).collect();
        let p = growth_exponent(&rs, &vals).unwrap();
        assert!((p - 0.7).abs() < 1e-6, "{p}");
        assert!(growth_exponent(&rs[..2], &vals[..2]).is_none());
    }

    #[test]
    fn bessel_chain_orders_and_integrates() {
        let p = volume_lowerbound_chain(1.0, 1.0, 3, 4.0).unwrap();
        assert!(p.minorant_below, "excess {}", p.max_excess);
        assert!(p.integral > 4f64.powi(3) / 3.0);
    }

    #[test]
    fn negative_alpha_uses_shifted_majorant() {
        let p = volume_lowerbound_chain(1.0, -1.0, 3, 3.0).unwrap();
        assert_eq!(p.majorant, Majorant::ShiftedTail);
        assert!(p.minorant_below);
    }

    #[test]
    fn rejects_small_radius() {
        assert!(volume_lowerbound_chain(1.0, 1.0, 3, 0.5).is_err());
    }
}

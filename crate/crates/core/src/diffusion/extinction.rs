//! Extinction times of fast diffusion, their lower bound from weak
//! conservation, and the critical exponent.

use std::sync::Arc;

use rayon::prelude::*;
use serde::Serialize;

use super::mesh::FvMesh;
use super::scheme::{run_diffusion, DiffusionProblem, RunOptions};
use super::weak::{cutoff_power_constant, PsiConstant};
use crate::cutoff::CutoffProfile;
use crate::error::{check_range, LabError, Result};

/// A run counts as extinct once its mass drops below this fraction of the initial mass.
pub const EXTINCTION_FRACTION: f64 = 1e-8;

/// `m_c = 1 - 2 / D` with `D = 1 + ((1 + sqrt(1 + 4 kappa^2))/2)(d - 1)`.
///
/// Above it the volume growth of the power-law model is too slow for mass to
/// escape in finite time. Evaluated as `(D - 2) / D`, which is exactly
/// `(d-2)/d` in floating point when `kappa = 0`.
pub fn critical_exponent(d: usize, kappa: f64) -> f64 {
    let growth = 0.5 * (1.0 + (1.0 + 4.0 * kappa * kappa).sqrt());
    let dim = 1.0 + growth * (d as f64 - 1.0);
    (dim - 2.0) / dim
}

/// `T >= (integral_(B_R) u0)^(1-m) / M_(R,gamma)` for one radius.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LowerBoundTerm {
    pub radius: f64,
    pub ball_mass: f64,
    pub annulus_constant: f64,
    pub bound: f64,
}

/// Best lower bound on the extinction time over the supplied cut-offs.
pub fn extinction_lower_bound(mesh: &FvMesh, u0: &[f64], psis: &[PsiConstant]) -> Result<Vec<LowerBoundTerm>> {
    psis.iter()
        .map(|psi| {
            let ball_mass = mesh.ball_integral(u0, psi.radius)?;
            Ok(LowerBoundTerm {
                radius: psi.radius,
                ball_mass,
                annulus_constant: psi.annulus_constant,
                bound: ball_mass.powf(1.0 - psi.m) / psi.annulus_constant,
            })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExtinctionReport {
    pub m: f64,
    pub m_c: f64,
    pub horizon: f64,
    pub dt: f64,
    /// First step time with mass below the extinction fraction; `None` when censored.
    pub extinction_time: Option<f64>,
    /// Horizon reached without extinction: no conclusion about extinction.
    pub censored: bool,
    pub remaining_fraction: f64,
    pub lower_bound: f64,
    pub lower_bound_radius: f64,
    pub terms: Vec<LowerBoundTerm>,
    /// Measured time >= lower bound - dt; `None` when censored.
    pub bound_respected: Option<bool>,
}

/// Run each exponent from `u0` to `horizon` on `mesh` (absorbing outer boundary)
/// and compare with the lower bound built from `cutoffs`. Exponents run in parallel.
pub fn extinction_study(
    mesh: &Arc<FvMesh>,
    exponents: &[f64],
    u0: &[f64],
    horizon: f64,
    dt: f64,
    cutoffs: &[CutoffProfile],
) -> Result<Vec<ExtinctionReport>> {
    for &m in exponents {
        check_range("m", m, 1e-3, 1.0 - 1e-9, "(0, 1) for extinction")?;
    }
    if cutoffs.is_empty() {
        return Err(LabError::InvalidGrid("no cut-offs for the lower bound".into()));
    }
    let m_c = critical_exponent(mesh.d(), mesh.kappa());
    exponents
        .par_iter()
        .map(|&m| {
            let p = DiffusionProblem::new(m, Arc::clone(mesh), u0.to_vec(), horizon)?;
            let run = run_diffusion(&p, &RunOptions::new(dt).stop_below(EXTINCTION_FRACTION))?;
            let psis: Vec<PsiConstant> = cutoffs
                .iter()
                .map(|c| cutoff_power_constant(c, mesh, m))
                .collect::<Result<_>>()?;
            let terms = extinction_lower_bound(mesh, u0, &psis)?;
            let best = terms
                .iter()
                .max_by(|a, b| a.bound.total_cmp(&b.bound))
                .expect("at least one cut-off");
            let extinction_time = run.stopped_at;
            Ok(ExtinctionReport {
                m,
                m_c,
                horizon,
                dt,
                extinction_time,
                censored: extinction_time.is_none(),
                remaining_fraction: run.final_state.mass / run.initial_mass,
                lower_bound: best.bound,
                lower_bound_radius: best.radius,
                bound_respected: extinction_time.map(|t| t >= best.bound - dt),
                terms,
            })
        })
        .collect()
}

//! Weak conservation of mass for fast diffusion: the cut-off constant `C(psi)`,
//! the annulus constant `M_(R,gamma)`, and the ball-mass inequality.

use serde::Serialize;

use super::mesh::FvMesh;
use super::scheme::{DiffusionProblem, DiffusionRun, DiffusionState};
use crate::cutoff::{build_cutoff_alpha2, build_cutoff_general, CutoffFamily, CutoffProfile, ExhaustionProfile};
use crate::error::{LabError, Result};
use crate::numeric::quad::trapezoid;

/// How many times `b` may be raised when the integrand is not integrable.
const MAX_B_RAISES: u32 = 8;

/// Cut-off of `B_R` inside `B_(gamma R)` on the mesh's model: the annulus
/// construction when `alpha = 2`, otherwise the exhaustion-based one.
pub fn weak_cutoff(mesh: &FvMesh, exh: Option<&ExhaustionProfile>, radius: f64, gamma: f64) -> Result<CutoffProfile> {
    if mesh.alpha() == 2.0 {
        return Ok(build_cutoff_alpha2(mesh.kappa(), mesh.d(), radius, gamma)?.1);
    }
    let exh = exh.ok_or(LabError::Singular("an exhaustion profile is required for alpha < 2"))?;
    if exh.alpha != mesh.alpha() || exh.kappa != mesh.kappa() || exh.d != mesh.d() {
        return Err(LabError::InvalidParameter {
            name: "exhaustion profile",
            value: exh.alpha,
            range: "same alpha, kappa and d as the mesh",
        });
    }
    build_cutoff_general(exh, radius, gamma, CutoffFamily::Auto)
}

/// `C(psi) = [2 integral |Laplacian psi|^(1/(1-m)) psi^(-m/(1-m)) dV]^(1-m)` for `psi = phi^b`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PsiConstant {
    pub m: f64,
    pub radius: f64,
    pub gamma: f64,
    /// Power applied to the cut-off; `b > 2/(1-m)`.
    pub b: u32,
    /// Exponent of `phi` left in the integrand after factoring, `(b(1-m) - 2)/(1-m) > 0`.
    pub phi_exponent: f64,
    pub integral: f64,
    pub c_psi: f64,
    /// `(1-m) C(psi)`: the rate in the ball-mass inequality.
    pub annulus_constant: f64,
    /// `annulus_constant * R^(1+alpha/2) / Vol(annulus)^(1-m)`.
    pub implied_constant: f64,
}

fn integrand(phi: f64, grad: f64, lap: f64, b: f64, m: f64) -> f64 {
    // phi^(p(b-2-bm)) |b phi Laplacian(phi) + b(b-1) |grad phi|^2|^p with p = 1/(1-m)
    let p = 1.0 / (1.0 - m);
    let core = (b * phi * lap + b * (b - 1.0) * grad * grad).abs();
    if phi <= 0.0 || core == 0.0 {
        return 0.0;
    }
    phi.powf(p * (b * (1.0 - m) - 2.0)) * core.powf(p)
}

/// Metric-weighted trapezoid quadrature of the `C(psi)` integrand on the cut-off's samples.
pub fn cutoff_power_constant(cutoff: &CutoffProfile, mesh: &FvMesh, m: f64) -> Result<PsiConstant> {
    if !(m > 0.0 && m < 1.0) {
        return Err(LabError::InvalidParameter {
            name: "m",
            value: m,
            range: "(0, 1) for weak conservation",
        });
    }
    if cutoff.support_radius > mesh.r_max() {
        return Err(LabError::InsufficientDomain {
            needed: cutoff.support_radius,
            available: mesh.r_max(),
        });
    }
    let count = cutoff.nodes.iter().take_while(|r| **r <= cutoff.support_radius).count();
    let nodes = &cutoff.nodes[..count];
    let mut density = Vec::with_capacity(count);
    for &r in nodes {
        density.push(if r == 0.0 { 0.0 } else { mesh.manifold().area_density(r)? });
    }
    let mut b = (2.0 / (1.0 - m)).ceil() as u32 + 1;
    for _ in 0..=MAX_B_RAISES {
        let bf = b as f64;
        let values: Vec<f64> = (0..count)
            .map(|i| density[i] * integrand(cutoff.phi[i], cutoff.grad[i], cutoff.laplacian[i], bf, m))
            .collect();
        let integral = trapezoid(nodes, &values);
        if integral.is_finite() && integral > 0.0 {
            let c_psi = (2.0 * integral).powf(1.0 - m);
            let annulus_constant = (1.0 - m) * c_psi;
            let vol = mesh.manifold().volume_annulus(cutoff.plateau_radius, cutoff.support_radius)?;
            let scale = cutoff.plateau_radius.powf(1.0 + 0.5 * mesh.alpha());
            return Ok(PsiConstant {
                m,
                radius: cutoff.plateau_radius,
                gamma: cutoff.gamma,
                b,
                phi_exponent: (bf * (1.0 - m) - 2.0) / (1.0 - m),
                integral,
                c_psi,
                annulus_constant,
                implied_constant: annulus_constant * scale / vol.powf(1.0 - m),
            });
        }
        b += 1;
    }
    Err(LabError::Quadrature(format!(
        "C(psi) integrand not integrable up to b = {b} (m = {m})"
    )))
}

/// Both sides of the ball-mass inequality between two times.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MassInequalityReport {
    pub m: f64,
    pub radius: f64,
    pub gamma: f64,
    pub t1: f64,
    pub t2: f64,
    pub b: u32,
    pub c_psi: f64,
    pub annulus_constant: f64,
    /// True when `u >= v` at both times; otherwise absolute differences are used.
    pub ordered: bool,
    pub lhs: f64,
    pub rhs: f64,
    pub margin: f64,
    /// Mass form: `integral_(B_R) (u-v)(t2) <= 2^(1/(1-m)) {integral_(B_gammaR) (u-v)(t1) + (M |t2-t1|)^(1/(1-m))}`.
    pub mass_form_lhs: f64,
    pub mass_form_rhs: f64,
    pub holds: bool,
}

fn difference(u: &DiffusionState, v: Option<&DiffusionState>, ordered: bool) -> Vec<f64> {
    match v {
        None => u.u.iter().map(|x| x.max(0.0)).collect(),
        Some(v) => u
            .u
            .iter()
            .zip(&v.u)
            .map(|(a, b)| if ordered { (a - b).max(0.0) } else { (a - b).abs() })
            .collect(),
    }
}

fn snapshot<'a>(run: &'a DiffusionRun, t: f64) -> Result<&'a DiffusionState> {
    run.snapshot(t)
        .ok_or_else(|| LabError::InvalidGrid(format!("run has no snapshot at t = {t}")))
}

/// Evaluate the inequality for runs `u` and `v` (`None` meaning `v = 0`).
pub fn weak_conservation_inequality(
    p: &DiffusionProblem,
    u_run: &DiffusionRun,
    v_run: Option<&DiffusionRun>,
    psi: &PsiConstant,
    t1: f64,
    t2: f64,
) -> Result<MassInequalityReport> {
    let m = p.m;
    if (psi.m - m).abs() > 0.0 {
        return Err(LabError::InvalidParameter {
            name: "m",
            value: psi.m,
            range: "same exponent as the problem",
        });
    }
    let (u1, u2) = (snapshot(u_run, t1)?, snapshot(u_run, t2)?);
    let (v1, v2) = match v_run {
        Some(r) => (Some(snapshot(r, t1)?), Some(snapshot(r, t2)?)),
        None => (None, None),
    };
    let slack = p.newton.negativity_tol * p.u_scale();
    let is_ordered = |a: &DiffusionState, b: Option<&DiffusionState>| {
        b.map_or(true, |b| a.u.iter().zip(&b.u).all(|(x, y)| *x >= *y - slack))
    };
    let ordered = is_ordered(u1, v1) && is_ordered(u2, v2);
    let g1 = difference(u1, v1, ordered);
    let g2 = difference(u2, v2, ordered);
    let (radius, outer) = (psi.radius, psi.gamma * psi.radius);
    let inner_mass = p.mesh.ball_integral(&g2, radius)?;
    let outer_mass = p.mesh.ball_integral(&g1, outer)?;
    let q = 1.0 - m;
    let elapsed = (t2 - t1).abs();
    let lhs = inner_mass.powf(q);
    let rhs = outer_mass.powf(q) + psi.annulus_constant * elapsed;
    let mass_form_rhs = 2f64.powf(1.0 / q) * (outer_mass + (psi.annulus_constant * elapsed).powf(1.0 / q));
    Ok(MassInequalityReport {
        m,
        radius,
        gamma: psi.gamma,
        t1,
        t2,
        b: psi.b,
        c_psi: psi.c_psi,
        annulus_constant: psi.annulus_constant,
        ordered,
        lhs,
        rhs,
        margin: rhs - lhs,
        mass_form_lhs: inner_mass,
        mass_form_rhs,
        holds: rhs >= lhs && mass_form_rhs >= inner_mass,
    })
}

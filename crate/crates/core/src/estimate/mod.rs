//! Logarithmic-gradient bounds for positive solutions of radial Poisson problems.

pub mod bounds;
pub mod poisson;

use serde::Serialize;

pub use bounds::{
    bounds_at_lambda, bump_constant, compute_bounds, lambda_grid, verify_gradient_estimate, EstimateBounds,
    EstimateVerification, OmegaTwoTerms,
};
pub use poisson::{
    check_positive_on_band, default_intervals, solve_radial_dirichlet, solve_radial_poisson, PoissonProblem, RadialFactor,
    RadialSolution, StateFactor,
};

use crate::error::Result;
use crate::geometry::{CurvatureProfile, ModelManifold, RadialGrid};

/// One solved and verified instance of `Δω = ω / r^alpha` on the standard model.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LinearDecayInstance {
    pub alpha: f64,
    pub kappa: f64,
    pub d: usize,
    pub problem: PoissonProblem,
    pub bounds: EstimateBounds,
    pub verification: EstimateVerification,
    /// `sup (ω'/ω)² R₁^alpha` over the target annulus.
    pub scaled_sup: f64,
}

/// Solves `Δω = ω / r^alpha` on `[R₁/2, 8R₁]` with `ω = 1, 0` at the ends, assembles the bound
/// over `lambdas` and verifies it on `(R₁, 2R₁)`.
pub fn linear_decay_instance(alpha: f64, kappa: f64, d: usize, r1: f64, lambdas: &[f64]) -> Result<LinearDecayInstance> {
    let problem = PoissonProblem::linear_decay(alpha, r1);
    problem.validate()?;
    let profile = CurvatureProfile::standard(kappa, alpha)?;
    let grid = RadialGrid::graded(problem.r_outer, 1e-3, 1.05, 0.25)?;
    let manifold = ModelManifold::from_profile(&profile, &grid, d)?;
    let sol = solve_radial_poisson(&problem, &manifold, default_intervals(&problem))?;
    let bounds = compute_bounds(&problem, &sol, d, &profile, lambdas)?;
    let verification = verify_gradient_estimate(&problem, &sol, &bounds);
    Ok(LinearDecayInstance {
        alpha,
        kappa,
        d,
        problem,
        bounds,
        scaled_sup: verification.sup_lhs * r1.powf(alpha),
        verification,
    })
}

//! Porous-medium and fast-diffusion runs on model manifolds, with the mass,
//! contraction, weak-conservation and extinction checks built on them.

pub mod checks;
pub mod convergence;
pub mod extinction;
pub mod mesh;
pub mod scheme;
pub mod weak;

pub use checks::{
    check_l1_contraction, check_mass_conservation, contraction_from_runs, contraction_sweep, random_bump_data, random_pair,
    ContractionReport, MassLedger, CONTRACTION_TOL, MASS_DRIFT_TOL,
};
pub use convergence::{space_refinement, time_refinement, Refinement, RefinementStudy, ORDER_ALLOWANCE};
pub use extinction::{
    critical_exponent, extinction_lower_bound, extinction_study, ExtinctionReport, LowerBoundTerm, EXTINCTION_FRACTION,
};
pub use mesh::FvMesh;
pub use scheme::{
    bump, run_diffusion, step_diffusion, AnnulusPowerIntegral, DiffusionProblem, DiffusionRun, DiffusionState,
    GridManifest, NewtonOptions, OuterBoundary, RunManifest, RunOptions, SeriesRow, BOUNDARY_GAP_CELLS,
};
pub use weak::{cutoff_power_constant, weak_conservation_inequality, weak_cutoff, MassInequalityReport, PsiConstant};

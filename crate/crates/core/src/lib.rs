//! Numerical laboratory for Laplacian cut-off functions on rotationally
//! symmetric model manifolds.

pub mod error;
pub mod estimate;
pub mod comparison;
pub mod cutoff;
pub mod diffusion;
pub mod geometry;
pub mod numeric;
pub mod verify;

pub use error::{LabError, Result};
pub use numeric::Real;

/// Double-precision model with a shared warping.
pub type Manifold64 = geometry::ModelManifold<f64>;
/// Single-precision model with a shared warping.
pub type Manifold32 = geometry::ModelManifold<f32>;
pub type Profile64 = geometry::CurvatureProfile<f64>;
pub type Profile32 = geometry::CurvatureProfile<f32>;
pub type Grid64 = geometry::RadialGrid<f64>;
pub type Grid32 = geometry::RadialGrid<f32>;
pub type Warping64 = geometry::WarpingSolution<f64>;
pub type Warping32 = geometry::WarpingSolution<f32>;
pub type Psi64 = comparison::ClosedFormPsi<f64>;
pub type Psi32 = comparison::ClosedFormPsi<f32>;

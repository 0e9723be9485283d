//! Model manifolds: curvature profiles, the warping ODE, volumes and comparison quantities.

pub mod grid;
pub mod manifold;
pub mod profile;

pub use grid::{RadialGrid, Spacing};
pub use manifold::{
    bishop_gromov_ratio_check, check_profiles_ordered, solve_warping, solve_warping_with, BishopGromovReport,
    ModelManifold, VolumeTable, WarpState, WarpingSolution,
};
pub use profile::CurvatureProfile;

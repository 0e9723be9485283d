//! Exhaustion functions and the cut-off families built on them.

pub mod alpha2;
pub mod exhaustion;
pub mod general;
pub mod step;

pub use alpha2::{annulus_exponent, build_cutoff_alpha2, AnnulusBarriers, AnnulusSolution};
pub use exhaustion::{growth_gauge, solve_exhaustion, ExhaustionFit, ExhaustionOptions, ExhaustionProfile, ExhaustionSummary};
pub use general::{build_cutoff_general, build_sequence, gamma_threshold, CutoffCheck, CutoffFamily, CutoffProfile, SequenceReport};
pub use step::{unit_sqrt_ratio_bound, SmoothStep};

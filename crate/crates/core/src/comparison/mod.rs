//! Comparison functions for the radial distance: Bessel closed forms, Sturm comparison and volume chains.

pub mod bessel;
pub mod psi;

pub use bessel::{bessel_iv_kv, bessel_scaled, BesselValues, ScaledBessel};
pub use psi::{closed_form_psi, indicial_root, ClosedFormPsi, PsiCase};
pub mod chain;
pub mod sturm;

pub use chain::{chain_sweep, volume_lowerbound_chain, ChainFit, ChainPoint, ChainReport, Majorant};
pub use sturm::{compare_profiles, sturm_compare, SturmPair, SturmReport, SturmViolation, SturmViolationKind};

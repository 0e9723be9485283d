//! Mass ledger, L1 contraction and comparison checks on solver runs.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::mesh::FvMesh;
use super::scheme::{bump, run_diffusion, DiffusionProblem, DiffusionRun, RunOptions};
use crate::error::{LabError, Result};

/// Relative mass drift allowed for zero-flux porous-medium runs.
pub const MASS_DRIFT_TOL: f64 = 1e-8;

/// Contraction slack as a fraction of `initial distance + mass scale`.
pub const CONTRACTION_TOL: f64 = 1e-8;

/// `||u(t) - v(t)||_1` along a pair of runs from different initial data.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ContractionReport {
    pub m: f64,
    pub times: Vec<f64>,
    pub distances: Vec<f64>,
    pub masses_u: Vec<f64>,
    pub masses_v: Vec<f64>,
    pub tolerance: f64,
    /// Largest increase of the distance between consecutive times.
    pub max_increase: f64,
    pub nonincreasing: bool,
    pub initially_ordered: bool,
    /// For ordered data: largest amount by which `v` exceeded `u` at any snapshot.
    pub max_order_violation: f64,
    pub ordering_preserved: bool,
    pub admissible: bool,
}

fn ordered(u: &[f64], v: &[f64]) -> f64 {
    u.iter().zip(v).map(|(a, b)| b - a).fold(0.0, f64::max)
}

/// Run `p` from its own data and from `v0`, and track the L1 distance.
pub fn check_l1_contraction(p: &DiffusionProblem, v0: Vec<f64>, dt: f64, times: &[f64]) -> Result<ContractionReport> {
    let q = p.with_initial(v0)?;
    let mut all = vec![0.0];
    all.extend_from_slice(times);
    let opts = RunOptions::new(dt).at(&all);
    let (ru, rv) = rayon::join(|| run_diffusion(p, &opts), || run_diffusion(&q, &opts));
    let (ru, rv) = (ru?, rv?);
    contraction_from_runs(p, &ru, &rv)
}

/// Contraction report for two finished runs on the same mesh whose first
/// snapshots hold the initial data.
pub fn contraction_from_runs(p: &DiffusionProblem, ru: &DiffusionRun, rv: &DiffusionRun) -> Result<ContractionReport> {
    if ru.snapshots.len() != rv.snapshots.len() {
        return Err(LabError::InvalidGrid("runs have different snapshot times".into()));
    }
    let mesh = &p.mesh;
    let distances: Vec<f64> = ru
        .snapshots
        .iter()
        .zip(&rv.snapshots)
        .map(|(a, b)| mesh.l1_distance(&a.u, &b.u))
        .collect();
    let initial = distances.first().copied().unwrap_or(0.0);
    let tolerance = CONTRACTION_TOL * (initial + ru.initial_mass.max(rv.initial_mass));
    let max_increase = distances.windows(2).map(|w| w[1] - w[0]).fold(f64::NEG_INFINITY, f64::max);
    let initially_ordered = match (ru.snapshots.first(), rv.snapshots.first()) {
        (Some(a), Some(b)) => ordered(&a.u, &b.u) == 0.0,
        _ => false,
    };
    let slack = p.newton.negativity_tol * p.u_scale().max(1.0);
    let max_order_violation = if initially_ordered {
        ru.snapshots
            .iter()
            .zip(&rv.snapshots)
            .map(|(a, b)| ordered(&a.u, &b.u))
            .fold(0.0, f64::max)
    } else {
        0.0
    };
    Ok(ContractionReport {
        m: p.m,
        times: ru.snapshots.iter().map(|s| s.t).collect(),
        masses_u: ru.snapshots.iter().map(|s| s.mass).collect(),
        masses_v: rv.snapshots.iter().map(|s| s.mass).collect(),
        distances,
        tolerance,
        max_increase: if max_increase.is_finite() { max_increase } else { 0.0 },
        nonincreasing: !(max_increase > tolerance),
        initially_ordered,
        max_order_violation,
        ordering_preserved: max_order_violation <= slack,
        admissible: ru.admissible && rv.admissible,
    })
}

/// Mass over time for a porous-medium run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MassLedger {
    pub m: f64,
    pub times: Vec<f64>,
    pub masses: Vec<f64>,
    pub max_relative_drift: f64,
    pub tolerance: f64,
    /// False when the support came near the boundary; the drift is then not a finding.
    pub valid: bool,
    pub holds: bool,
}

pub fn check_mass_conservation(p: &DiffusionProblem, dt: f64, times: &[f64]) -> Result<MassLedger> {
    if !(p.m > 1.0) {
        return Err(LabError::InvalidParameter {
            name: "m",
            value: p.m,
            range: "(1, 10] for mass conservation",
        });
    }
    let run = run_diffusion(p, &RunOptions::new(dt).at(times))?;
    let m0 = run.initial_mass;
    let max_relative_drift = run.series.iter().map(|s| (s.mass - m0).abs() / m0).fold(0.0, f64::max);
    Ok(MassLedger {
        m: p.m,
        times: run.snapshots.iter().map(|s| s.t).collect(),
        masses: run.snapshots.iter().map(|s| s.mass).collect(),
        max_relative_drift,
        tolerance: MASS_DRIFT_TOL,
        valid: run.admissible,
        holds: run.admissible && max_relative_drift <= MASS_DRIFT_TOL,
    })
}

/// Sum of one or two random bumps supported in `[0, radius_cap]`.
pub fn random_bump_data(mesh: &FvMesh, rng: &mut ChaCha8Rng, radius_cap: f64) -> Vec<f64> {
    let count = rng.gen_range(1..=2);
    let mut u = vec![0.0; mesh.cells()];
    for _ in 0..count {
        let width = rng.gen_range(0.25 * radius_cap..0.5 * radius_cap);
        let center = rng.gen_range(0.0..radius_cap - width);
        let amplitude = rng.gen_range(0.2..2.0);
        let f = bump(amplitude, center, width);
        for (x, r) in u.iter_mut().zip(mesh.centers()) {
            *x += f(*r);
        }
    }
    u
}

/// Two independent random data sets from `seed`.
pub fn random_pair(mesh: &FvMesh, seed: u64, radius_cap: f64) -> (Vec<f64>, Vec<f64>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let a = random_bump_data(mesh, &mut rng, radius_cap);
    let b = random_bump_data(mesh, &mut rng, radius_cap);
    (a, b)
}

/// L1 contraction over random pairs, one per seed, run in parallel.
pub fn contraction_sweep(
    template: &DiffusionProblem,
    seeds: &[u64],
    radius_cap: f64,
    dt: f64,
    times: &[f64],
) -> Result<Vec<ContractionReport>> {
    seeds
        .par_iter()
        .map(|&seed| {
            let (a, b) = random_pair(&template.mesh, seed, radius_cap);
            let p = template.with_initial(a)?;
            check_l1_contraction(&p, b, dt, times)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::sync::Arc;

    fn flat(m: f64, cells: usize, r_max: f64, u0: impl Fn(f64) -> f64) -> DiffusionProblem {
        let mesh = Arc::new(FvMesh::flat(3, r_max, cells).unwrap());
        let u = mesh.sample(u0);
        DiffusionProblem::new(m, mesh, u, 1.0).unwrap()
    }

    #[test]
    fn identical_data_stay_identical() {
        let p = flat(2.0, 80, 6.0, bump(1.0, 0.0, 1.0));
        let rep = check_l1_contraction(&p, p.u0.clone(), 0.05, &[0.5, 1.0]).unwrap();
        assert!(rep.distances.iter().all(|d| *d == 0.0));
        assert!(rep.nonincreasing);
    }

    #[test]
    fn ordered_porous_pair_keeps_order_and_distance() {
        let p = flat(2.0, 120, 6.0, bump(1.0, 0.0, 1.2));
        let lower = p.mesh.sample(bump(0.5, 0.0, 1.0));
        let rep = check_l1_contraction(&p, lower, 0.02, &[0.25, 0.5, 1.0]).unwrap();
        assert!(rep.initially_ordered);
        assert!(rep.ordering_preserved, "violation {}", rep.max_order_violation);
        assert!(rep.admissible);
        // ordered and both conserve mass: distance = mass difference
        for ((d, mu), mv) in rep.distances.iter().zip(&rep.masses_u).zip(&rep.masses_v) {
            assert!((d - (mu - mv)).abs() < 1e-9 * mu, "{d} vs {}", mu - mv);
        }
        let spread = rep.distances.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
            - rep.distances.iter().cloned().fold(f64::INFINITY, f64::min);
        assert!(spread < 1e-9 * rep.masses_u[0]);
    }

    #[test]
    fn random_pairs_contract() {
        for m in [2.0, 0.6] {
            let p = flat(m, 100, 10.0, bump(1.0, 0.0, 1.0));
            let reps = contraction_sweep(&p, &(0..10).collect::<Vec<_>>(), 3.0, 0.05, &[0.2, 0.5, 1.0]).unwrap();
            for rep in &reps {
                assert!(rep.nonincreasing, "m = {m}, increase {}", rep.max_increase);
            }
            assert!(reps.iter().any(|r| r.distances.last() < r.distances.first()));
        }
    }

    #[test]
    fn mass_is_conserved_and_scales_linearly() {
        let p = flat(2.0, 120, 6.0, bump(1.0, 0.5, 1.0));
        let ledger = check_mass_conservation(&p, 0.02, &[0.5, 1.0]).unwrap();
        assert!(ledger.valid && ledger.holds, "drift {}", ledger.max_relative_drift);
        let doubled = p.with_initial(p.u0.iter().map(|x| 2.0 * x).collect()).unwrap();
        let ledger2 = check_mass_conservation(&doubled, 0.02, &[0.5, 1.0]).unwrap();
        for (a, b) in ledger.masses.iter().zip(&ledger2.masses) {
            assert!((b - 2.0 * a).abs() < 1e-9 * b);
        }
    }

    #[test]
    fn curved_model_conserves_mass() {
        let mesh = Arc::new(FvMesh::standard(1.0, 2.0, 3, 6.0, 120).unwrap());
        let u = mesh.sample(bump(1.0, 0.0, 1.0));
        let p = DiffusionProblem::new(1.5, mesh, u, 1.0).unwrap();
        let ledger = check_mass_conservation(&p, 0.02, &[1.0]).unwrap();
        assert!(ledger.valid && ledger.holds, "drift {}", ledger.max_relative_drift);
    }

    #[test]
    fn mass_check_requires_porous_exponent() {
        let p = flat(0.5, 40, 6.0, bump(1.0, 0.0, 1.0));
        assert!(check_mass_conservation(&p, 0.1, &[1.0]).is_err());
    }

    #[test]
    fn random_pairs_are_reproducible() {
        let mesh = FvMesh::flat(3, 5.0, 50).unwrap();
        assert_eq!(random_pair(&mesh, 7, 2.0), random_pair(&mesh, 7, 2.0));
        assert_ne!(random_pair(&mesh, 7, 2.0), random_pair(&mesh, 8, 2.0));
        let (a, _) = random_pair(&mesh, 3, 2.0);
        for (x, r) in a.iter().zip(mesh.centers()) {
            if *r > 2.0 {
                assert_eq!(*x, 0.0);
            }
        }
    }
}

//! Three-level refinement ladders for the diffusion scheme.

use serde::Serialize;

use super::scheme::{run_diffusion, DiffusionProblem, DiffusionState, RunOptions};
use crate::error::Result;
use crate::numeric::fit::observed_order;

/// Fraction by which a three-level observed order may fall short of the
/// nominal one: implicit Euler approaches order 1 from below as `dt` shrinks.
pub const ORDER_ALLOWANCE: f64 = 0.05;

/// What was halved between levels.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Refinement {
    Time,
    Space,
    Both,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RefinementStudy {
    pub refinement: Refinement,
    /// `(cells, dt)` per level, coarsest first.
    pub levels: Vec<(usize, f64)>,
    /// Metric L1 change between levels 0-1 and 1-2, measured on the coarsest mesh.
    pub changes: [f64; 2],
    /// `changes[0] / changes[1]`.
    pub ratio: f64,
    pub order: f64,
}

fn final_state(p: &DiffusionProblem, dt: f64) -> Result<DiffusionState> {
    Ok(run_diffusion(p, &RunOptions::new(dt))?.final_state)
}

/// Halve `dt` twice on a fixed mesh.
pub fn time_refinement(p: &DiffusionProblem, dt: f64) -> Result<RefinementStudy> {
    let levels: Vec<f64> = (0..3).map(|k| dt / 2f64.powi(k)).collect();
    let states: Vec<DiffusionState> = levels.iter().map(|&h| final_state(p, h)).collect::<Result<_>>()?;
    let mesh = &p.mesh;
    let changes = [
        mesh.l1_distance(&states[0].u, &states[1].u),
        mesh.l1_distance(&states[1].u, &states[2].u),
    ];
    Ok(study(Refinement::Time, levels.iter().map(|&h| (mesh.cells(), h)).collect(), changes))
}

/// Double the cell count twice (and halve `dt` too when `refinement` is `Both`).
///
/// `build(cells)` must return the same problem on a uniform mesh of `cells`
/// cells; finer solutions are restricted to the coarsest mesh by volume averaging.
pub fn space_refinement<F>(build: F, cells: usize, dt: f64, refinement: Refinement) -> Result<RefinementStudy>
where
    F: Fn(usize) -> Result<DiffusionProblem>,
{
    let mut levels = Vec::new();
    let mut fields = Vec::new();
    let mut coarse = None;
    for k in 0..3 {
        let n = cells << k;
        let h = if refinement == Refinement::Both { dt / 2f64.powi(k) } else { dt };
        let p = build(n)?;
        let mut u = final_state(&p, h)?.u;
        let mut mesh = p.mesh.clone();
        for _ in 0..k {
            let restricted = mesh.restrict_pairs(&u)?;
            let next = build(mesh.cells() / 2)?;
            u = restricted;
            mesh = next.mesh;
        }
        if k == 0 {
            coarse = Some(p.mesh.clone());
        }
        levels.push((n, h));
        fields.push(u);
    }
    let mesh = coarse.expect("three levels");
    let changes = [mesh.l1_distance(&fields[0], &fields[1]), mesh.l1_distance(&fields[1], &fields[2])];
    Ok(study(refinement, levels, changes))
}

fn study(refinement: Refinement, levels: Vec<(usize, f64)>, changes: [f64; 2]) -> RefinementStudy {
    RefinementStudy {
        refinement,
        levels,
        changes,
        ratio: changes[0] / changes[1],
        order: observed_order(changes[0], changes[1], 2.0),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diffusion::mesh::FvMesh;
    use std::sync::Arc;

    fn smooth_problem(cells: usize) -> Result<DiffusionProblem> {
        let mesh = Arc::new(FvMesh::flat(3, 4.0, cells)?);
        let u0 = mesh.sample(|r| 1.0 + 0.5 * (-r * r).exp());
        DiffusionProblem::new(2.0, mesh, u0, 0.2)
    }

    #[test]
    fn implicit_euler_is_first_order_in_time() {
        let study = time_refinement(&smooth_problem(100).unwrap(), 0.01).unwrap();
        assert!(study.order > 1.0 - ORDER_ALLOWANCE && study.order < 1.3, "{study:?}");
    }

    #[test]
    fn finite_volumes_are_second_order_in_space() {
        let study = space_refinement(smooth_problem, 20, 0.01, Refinement::Space).unwrap();
        assert!(study.order > 1.8, "{study:?}");
    }

    #[test]
    fn halving_both_at_least_halves_the_change() {
        let study = space_refinement(smooth_problem, 20, 0.04, Refinement::Both).unwrap();
        assert!(study.ratio >= 2.0 * (1.0 - ORDER_ALLOWANCE), "{study:?}");
    }
}

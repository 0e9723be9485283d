//! Randomized invariants across modules.

use std::sync::Arc;

use cutofflab::cutoff::build_cutoff_alpha2;
use cutofflab::diffusion::{bump, check_l1_contraction, critical_exponent, run_diffusion, DiffusionProblem, FvMesh, RunOptions};
use cutofflab::geometry::{solve_warping, CurvatureProfile, RadialGrid};
use cutofflab::{Grid32, Profile32};
use proptest::prelude::*;

fn flat_problem(m: f64, amplitude: f64, width: f64) -> DiffusionProblem {
    let mesh = Arc::new(FvMesh::flat(3, 6.0, 48).unwrap());
    let u0 = mesh.sample(bump(amplitude, 0.0, width));
    DiffusionProblem::new(m, mesh, u0, 0.5).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 12, .. ProptestConfig::default() })]

    #[test]
    fn porous_medium_conserves_mass(m in 1.2f64..3.0, amplitude in 0.2f64..3.0, width in 0.5f64..2.0) {
        let p = flat_problem(m, amplitude, width);
        let run = run_diffusion(&p, &RunOptions::new(0.05)).unwrap();
        prop_assume!(run.admissible);
        let drift = (run.final_state.mass - run.initial_mass).abs() / run.initial_mass;
        prop_assert!(drift < 1e-10, "drift {drift}");
        prop_assert!(run.final_state.u.iter().all(|x| *x >= -1e-12 * amplitude));
    }

    #[test]
    fn scaled_data_never_separate(m in prop::sample::select(vec![0.4, 0.7, 1.5, 2.5]), factor in 0.1f64..0.9) {
        let p = flat_problem(m, 1.0, 1.5);
        let lower: Vec<f64> = p.u0.iter().map(|x| factor * x).collect();
        let rep = check_l1_contraction(&p, lower, 0.05, &[0.1, 0.25, 0.5]).unwrap();
        prop_assert!(rep.nonincreasing, "increase {}", rep.max_increase);
        prop_assert!(rep.initially_ordered && rep.ordering_preserved, "violation {}", rep.max_order_violation);
    }

    #[test]
    fn annulus_cutoff_is_certified(kappa in 0.0f64..2.0, radius in 0.5f64..50.0, gamma in 1.05f64..3.0) {
        let (sol, cut) = build_cutoff_alpha2(kappa, 3, radius, gamma).unwrap();
        prop_assert!(cut.certify(1e-9).passed());
        prop_assert!(sol.sandwich_holds(1e-9));
        prop_assert!(cut.phi.windows(2).all(|w| w[1] <= w[0] + 1e-12));
    }

    #[test]
    fn critical_exponent_is_monotone(d in 3usize..10, kappa in 0.0f64..5.0) {
        let m_c = critical_exponent(d, kappa);
        prop_assert!(m_c >= (d as f64 - 2.0) / d as f64 && m_c < 1.0);
        prop_assert!(critical_exponent(d, kappa + 0.1) > m_c);
    }

    #[test]
    fn single_and_double_precision_agree(kappa in 0.0f64..1.5, alpha in -1.0f64..2.0) {
        let grid = RadialGrid::uniform(3.0, 60).unwrap();
        let w64 = solve_warping(&CurvatureProfile::standard(kappa, alpha).unwrap(), &grid).unwrap();
        let grid32 = Grid32::uniform(3.0, 60).unwrap();
        let w32 = solve_warping(&Profile32::standard(kappa as f32, alpha as f32).unwrap(), &grid32).unwrap();
        for i in 1..grid.len() {
            let (a, b) = (w64.h(i), w32.h(i) as f64);
            prop_assert!((a - b).abs() <= 1e-4 * a, "node {i}: {a} vs {b}");
        }
    }
}

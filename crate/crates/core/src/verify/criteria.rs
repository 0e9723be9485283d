//! The nine acceptance criteria.

use std::sync::Arc;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::{Check, CriterionResult, SuiteConfig};
use crate::comparison::{closed_form_psi, compare_profiles};
use crate::cutoff::{build_cutoff_alpha2, build_cutoff_general, solve_exhaustion, CutoffFamily, CutoffProfile, ExhaustionOptions};
use crate::diffusion::{
    bump, check_l1_contraction, check_mass_conservation, contraction_sweep, critical_exponent, cutoff_power_constant,
    extinction_study, random_bump_data, run_diffusion, space_refinement, time_refinement, weak_conservation_inequality,
    weak_cutoff, DiffusionProblem, FvMesh, Refinement, RunOptions,
};
use crate::error::Result;
use crate::estimate::{lambda_grid, linear_decay_instance};
use crate::geometry::{bishop_gromov_ratio_check, solve_warping, solve_warping_with, CurvatureProfile, ModelManifold, RadialGrid};
use crate::numeric::fit::{observed_order, spread};
use crate::numeric::ode::StepControl;

fn max_of(values: impl IntoIterator<Item = f64>) -> f64 {
    values.into_iter().fold(f64::NEG_INFINITY, f64::max)
}

/// Largest `|a/b - 1|` over pairs with `b != 0`.
fn max_relative_error(pairs: impl IntoIterator<Item = (f64, f64)>) -> f64 {
    max_of(pairs.into_iter().filter(|(_, b)| *b != 0.0).map(|(a, b)| (a / b - 1.0).abs()))
}

/// 1. Flat and constant-curvature warpings against their exact forms.
pub fn warping_exactness(cfg: &SuiteConfig) -> CriterionResult {
    let started = Instant::now();
    let mut out = CriterionResult::new(
        1,
        "warping exactness",
        "warping ODE h'' = G h with h(0) = 0, h'(0) = 1; ball volume from the integral of h^(d-1)",
        Some(1.0),
    );
    let tol = cfg.tol;
    let pi = std::f64::consts::PI;
    for (d, exact) in [(2usize, pi), (3, 4.0 * pi / 3.0), (4, pi * pi / 2.0)] {
        out.attempt(&format!("flat model d = {d}"), |checks| {
            let grid = RadialGrid::uniform(2.0, 200)?;
            let m = ModelManifold::from_profile(&CurvatureProfile::flat(), &grid, d)?;
            let w = m.warping();
            let h_err = max_relative_error(grid.nodes().iter().enumerate().skip(1).map(|(i, r)| (w.h(i), *r)));
            checks.push(Check::at_most(format!("flat d = {d}: max |h(r)/r - 1|"), h_err, tol.warping));
            let v_err = (m.volume_ball(1.0)? / exact - 1.0).abs();
            checks.push(Check::at_most(format!("flat d = {d}: |V(1)/unit ball volume - 1|"), v_err, tol.warping));
            Ok(())
        });
    }
    out.attempt("unit curvature", |checks| {
        let grid = RadialGrid::uniform(10.0, 400)?;
        let w = solve_warping(&CurvatureProfile::constant(1.0)?, &grid)?;
        let mut pairs: Vec<(f64, f64)> =
            grid.nodes().iter().enumerate().skip(1).map(|(i, &r): (usize, &f64)| (w.h(i), r.sinh())).collect();
        for r in [0.013, 0.77, 3.25, 6.6, 9.99] {
            pairs.push((w.state_at(r)?.h(), f64::sinh(r)));
        }
        checks.push(Check::at_most("G = 1: max |h/sinh - 1| on [0, 10]", max_relative_error(pairs), tol.sinh));
        Ok(())
    });
    out.finish(started)
}

fn bump_table(amplitude: f64, center: f64, width: f64, top: f64) -> Result<CurvatureProfile<f64>> {
    let xs: Vec<f64> = (0..=120).map(|i| top * i as f64 / 120.0).collect();
    let f = bump(amplitude, center, width);
    let values = xs.iter().map(|&x| f(x)).collect();
    CurvatureProfile::tabulated(xs, values)
}

/// 2. Sturm ordering and volume-ratio monotonicity on random ordered pairs.
pub fn sturm_bishop_gromov(cfg: &SuiteConfig) -> CriterionResult {
    let started = Instant::now();
    let mut out = CriterionResult::new(
        2,
        "Sturm and Bishop-Gromov suite",
        "Sturm comparison (value and log-derivative ordering) and volume-ratio monotonicity",
        Some(30.0),
    );
    let tol = cfg.tol.sturm;
    let top = 6.0;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let pairs: Vec<_> = (0..20)
        .map(|i| {
            let d = [2usize, 3, 5][i % 3];
            let alpha = rng.gen_range(-1.0..2.0);
            let k_low = rng.gen_range(0.0..1.5);
            let k_high = k_low + rng.gen_range(0.0..1.0);
            let amp = rng.gen_range(0.0..2.0);
            let center = rng.gen_range(0.5..5.0);
            let width = rng.gen_range(0.3..1.5);
            (i, d, alpha, k_low, k_high, amp, center, width)
        })
        .collect();
    let results: Vec<Result<_>> = pairs
        .par_iter()
        .map(|&(i, d, alpha, k_low, k_high, amp, center, width)| {
            let low = CurvatureProfile::standard(k_low, alpha)?;
            let high = CurvatureProfile::sum(CurvatureProfile::standard(k_high, alpha)?, bump_table(amp, center, width, top)?);
            let grid = RadialGrid::uniform(top, 120)?;
            let sturm = compare_profiles(&low, &high, &grid, tol)?;
            let radii: Vec<f64> = (1..=24).map(|k| 0.25 * k as f64).collect();
            let bg = bishop_gromov_ratio_check(&low, &high, d, &radii, &grid, tol)?;
            Ok((i, sturm, bg))
        })
        .collect();
    let mut ok = Vec::new();
    for r in results {
        match r {
            Ok(v) => ok.push(v),
            Err(e) => out.push(Check::errored("random ordered pair", &e)),
        }
    }
    let failing = |f: &dyn Fn(&(usize, crate::comparison::SturmReport, crate::geometry::BishopGromovReport)) -> bool| {
        ok.iter().filter(|p| !f(p)).map(|p| p.0.to_string()).collect::<Vec<_>>()
    };
    let coef = failing(&|p| p.1.coefficients_ordered);
    out.push(Check::holds("curvature profiles ordered", coef.is_empty()).with_note(list_note(&coef)));
    let vals = failing(&|p| p.1.values_ordered);
    out.push(
        Check::at_most("h ordering: max relative excess", max_of(ok.iter().map(|p| p.1.max_value_excess)), tol)
            .with_note(list_note(&vals)),
    );
    let logs = failing(&|p| p.1.log_derivatives_ordered);
    out.push(
        Check::at_most(
            "log-derivative ordering: max relative excess",
            max_of(ok.iter().map(|p| p.1.max_log_derivative_excess)),
            tol,
        )
        .with_note(list_note(&logs)),
    );
    let bg = failing(&|p| p.2.nonincreasing);
    out.push(
        Check::at_most(
            "volume ratio: max relative increase",
            max_of(ok.iter().map(|p| p.2.max_relative_increase)),
            tol,
        )
        .with_note(list_note(&bg)),
    );
    out.push(Check::at_least("pairs evaluated", ok.len() as f64, 20.0));
    out.finish(started)
}

fn list_note(failing: &[String]) -> String {
    if failing.is_empty() {
        String::new()
    } else {
        format!("failing pairs: {}", failing.join(", "))
    }
}

/// Direct integration of `psi'' = kappa^2 (r - s)^(-alpha) psi` on `[0, top]`.
fn numeric_psi(kappa: f64, alpha: f64, r: f64, top: f64) -> Result<(Vec<f64>, Vec<f64>)> {
    let grid = RadialGrid::uniform(top, 400)?;
    let w = solve_warping(&CurvatureProfile::power_tail(kappa, alpha, r)?, &grid)?;
    Ok((grid.nodes().to_vec(), w.h_samples()))
}

fn closed_form_error(kappa: f64, alpha: f64, r: f64) -> Result<f64> {
    let psi = closed_form_psi(kappa, alpha, r)?;
    let (nodes, h) = numeric_psi(kappa, alpha, r, 0.9 * r)?;
    let mut pairs = Vec::with_capacity(nodes.len());
    for (s, hv) in nodes.iter().zip(&h).skip(1) {
        pairs.push((psi.value(*s)?, *hv));
    }
    Ok(max_relative_error(pairs))
}

/// 3. Closed forms of the tail comparison ODE.
pub fn tail_closed_forms(cfg: &SuiteConfig) -> CriterionResult {
    let started = Instant::now();
    let mut out = CriterionResult::new(
        3,
        "tail comparison closed forms",
        "closed-form solutions of psi'' = kappa^2 (r - s)^(-alpha) psi: power, Bessel and hyperbolic barrier; endpoint growth bound",
        None,
    );
    let tol = cfg.tol;
    let r = 4.0;
    for kappa in [0.5, 1.0, 2.0] {
        out.attempt(&format!("power form kappa = {kappa}"), |checks| {
            let err = closed_form_error(kappa, 2.0, r)?;
            checks.push(Check::at_most(format!("alpha = 2, kappa = {kappa}: max relative error on [0, 0.9r]"), err, tol.power));
            Ok(())
        });
    }
    for alpha in [0.5, 1.0, 1.5] {
        for kappa in [0.5, 1.0, 2.0] {
            out.attempt(&format!("Bessel form alpha = {alpha}, kappa = {kappa}"), |checks| {
                let err = closed_form_error(kappa, alpha, r)?;
                checks.push(Check::at_most(
                    format!("alpha = {alpha}, kappa = {kappa}: max relative error on [0, 0.9r]"),
                    err,
                    tol.bessel,
                ));
                Ok(())
            });
        }
    }
    for rr in [2.0, 4.0, 10.0] {
        out.attempt(&format!("hyperbolic barrier r = {rr}"), |checks| {
            let kappa = 1.0;
            let barrier = closed_form_psi(kappa, -1.0, rr)?;
            let (nodes, h) = numeric_psi(kappa, -1.0, rr, 0.95 * rr)?;
            let mut worst = 0.0f64;
            let mut violating = 0usize;
            let mut last_violation = None;
            for (s, hv) in nodes.iter().zip(&h).skip(1) {
                let deficit = (hv - barrier.value(*s)?) / hv.abs().max(1e-300);
                if deficit > tol.power {
                    violating += 1;
                    worst = worst.max(deficit);
                    last_violation = Some(*s);
                }
            }
            let note = match last_violation {
                Some(s) => format!(
                    "barrier below the solution at {violating} of {} nodes, up to s = {s:.3}; largest relative deficit {worst:.3e}",
                    nodes.len() - 1
                ),
                None => String::new(),
            };
            checks.push(
                Check::at_most(format!("alpha = -1, kappa = 1, r = {rr}: nodes where barrier < solution"), violating as f64, 0.0)
                    .with_note(note),
            );
            Ok(())
        });
    }
    for rr in [2.0, 10.0, 100.0] {
        for kappa in [0.5, 1.0, 2.0] {
            out.attempt(&format!("endpoint bound r = {rr}, kappa = {kappa}"), |checks| {
                let psi = closed_form_psi(kappa, 2.0, rr)?;
                let value = psi.value(rr - 1.0)?;
                let bound = psi.power_endpoint_bound();
                checks.push(Check::at_most(
                    format!("alpha = 2, r = {rr}, kappa = {kappa}: psi(r-1) / bound"),
                    value / bound,
                    1.0,
                ));
                Ok(())
            });
        }
    }
    out.finish(started)
}

/// Cut-offs with plateau radius `n` for `n = 1..=16`.
fn cutoff_sweep(alpha: f64, kappa: f64, d: usize, gamma: f64) -> Result<Vec<CutoffProfile>> {
    if alpha == 2.0 {
        return (1..=16).map(|n| Ok(build_cutoff_alpha2(kappa, d, n as f64, gamma)?.1)).collect();
    }
    let exh = solve_exhaustion(alpha, kappa, d, &ExhaustionOptions::for_alpha(alpha))?;
    (1..=16)
        .into_par_iter()
        .map(|n| build_cutoff_general(&exh, n as f64, gamma, CutoffFamily::Auto))
        .collect()
}

/// 4. Cut-off properties and the decay of their derivatives.
pub fn cutoff_certification(cfg: &SuiteConfig) -> CriterionResult {
    let started = Instant::now();
    let mut out = CriterionResult::new(
        4,
        "cut-off certification",
        "Laplacian cut-off properties: values in [0, 1], plateau, support, |grad| <~ 1/R and |Laplacian| <~ 1/R^(1 + alpha/2)",
        None,
    );
    let tol = cfg.tol;
    let cases: &[(f64, f64, usize, f64)] = if cfg.flat() {
        &[(2.0, 0.0, 3, 1.5)]
    } else {
        &[(0.0, 1.0, 3, 3.0), (1.0, 1.0, 3, 3.0), (2.0, 1.0, 3, 1.5)]
    };
    for &(alpha, kappa, d, gamma) in cases {
        let tag = format!("(alpha, kappa, d, gamma) = ({alpha}, {kappa}, {d}, {gamma})");
        out.attempt(&tag, |checks| {
            let seq = cutoff_sweep(alpha, kappa, d, gamma)?;
            let failed: Vec<String> = seq
                .iter()
                .filter(|c| !c.certify(tol.cutoff).passed())
                .map(|c| format!("{}", c.plateau_radius))
                .collect();
            checks.push(
                Check::at_least(format!("{tag}: certified cut-offs of 16"), (16 - failed.len()) as f64, 16.0)
                    .with_note(list_note(&failed)),
            );
            let grad: Vec<f64> = seq.iter().map(|c| c.grad_constant()).collect();
            let lap: Vec<f64> = seq.iter().map(|c| c.laplacian_constant()).collect();
            checks.push(Check::at_most(format!("{tag}: spread of sup|grad| * n"), spread(&grad), tol.spread));
            checks.push(Check::at_most(format!("{tag}: spread of sup|Laplacian| * n^(1+alpha/2)"), spread(&lap), tol.spread));
            let (first, last) = (&seq[0], &seq[seq.len() - 1]);
            checks.push(Check::at_least(
                format!("{tag}: sup|grad| first / last"),
                first.sup_grad / last.sup_grad,
                tol.decay,
            ));
            checks.push(Check::at_least(
                format!("{tag}: sup|Laplacian| first / last"),
                first.sup_laplacian / last.sup_laplacian,
                tol.decay,
            ));
            Ok(())
        });
    }
    out.finish(started)
}

/// 5. The annulus construction for quadratic decay at `gamma` close to one.
pub fn sharp_annulus(cfg: &SuiteConfig) -> CriterionResult {
    let started = Instant::now();
    let mut out = CriterionResult::new(
        5,
        "annulus cut-off at sharp gamma",
        "annulus barrier sandwich u <= omega <= 1 - v and the R-independent band parameter",
        None,
    );
    let tol = cfg.tol;
    for gamma in [1.1, 1.05] {
        out.attempt(&format!("gamma = {gamma}"), |checks| {
            let (small, cut) = build_cutoff_alpha2(1.0, 3, 1.0, gamma)?;
            let (large, _) = build_cutoff_alpha2(1.0, 3, 100.0, gamma)?;
            checks.push(Check::holds(format!("gamma = {gamma}: cut-off certified"), cut.certify(tol.cutoff).passed()));
            for (r, sol) in [(1.0, &small), (100.0, &large)] {
                checks.push(Check::at_least(
                    format!("gamma = {gamma}, R = {r}: sandwich slack"),
                    sol.lower_slack.min(sol.upper_slack),
                    -tol.sandwich,
                ));
            }
            checks.push(Check::at_most(
                format!("gamma = {gamma}: |theta(R=1) - theta(R=100)|"),
                (small.theta - large.theta).abs(),
                tol.theta,
            ));
            Ok(())
        });
    }
    out.finish(started)
}

/// 6. The logarithmic gradient bound for `Δω = ω / r^alpha`.
pub fn linear_decay_gradient(cfg: &SuiteConfig) -> CriterionResult {
    let started = Instant::now();
    let mut out = CriterionResult::new(
        6,
        "logarithmic gradient estimate",
        "Li-Yau type bound on |grad omega|^2 / omega^2 for positive solutions with linear decaying source",
        Some(60.0),
    );
    let tol = cfg.tol;
    let radii = [2.0, 4.0, 8.0, 16.0];
    for alpha in [0.0, 1.0, 2.0] {
        let lambdas = lambda_grid();
        let instances: Vec<Result<_>> = radii
            .par_iter()
            .map(|&r1| linear_decay_instance(alpha, 1.0, 3, r1, &lambdas))
            .collect();
        let mut scaled = Vec::new();
        for (r1, inst) in radii.iter().zip(instances) {
            match inst {
                Ok(inst) => {
                    let v = &inst.verification;
                    checks_push_violations(&mut out, alpha, *r1, v.violations, v.nodes_checked);
                    scaled.push(inst.scaled_sup);
                }
                Err(e) => out.push(Check::errored(format!("alpha = {alpha}, R1 = {r1}"), &e)),
            }
        }
        if scaled.len() == radii.len() {
            out.push(Check::at_most(format!("alpha = {alpha}: spread of sup (omega'/omega)^2 R1^alpha"), spread(&scaled), tol.spread));
        }
    }
    out.finish(started)
}

fn checks_push_violations(out: &mut CriterionResult, alpha: f64, r1: f64, violations: usize, nodes: usize) {
    out.push(
        Check::at_most(format!("alpha = {alpha}, R1 = {r1}: nodes violating the bound"), violations as f64, 0.0)
            .with_note(format!("{nodes} nodes checked")),
    );
    if nodes == 0 {
        out.push(Check::holds(format!("alpha = {alpha}, R1 = {r1}: nodes checked"), false));
    }
}

/// 7. Porous medium: mass, contraction and identical data.
pub fn porous_medium_suite(cfg: &SuiteConfig) -> CriterionResult {
    let started = Instant::now();
    let mut out = CriterionResult::new(
        7,
        "porous medium suite",
        "mass conservation and L1 contraction for the porous medium equation",
        None,
    );
    let tol = cfg.tol;
    let models: &[(&str, f64, f64)] = if cfg.flat() {
        &[("flat", 0.0, 0.0)]
    } else {
        &[("flat", 0.0, 0.0), ("kappa = 1, alpha = 2", 1.0, 2.0)]
    };
    let (r_max, cells, dt, times) = (8.0, 160, 0.02, [0.25, 0.5, 1.0]);
    for &(model, kappa, alpha) in models {
        for m in [1.5, 2.0] {
            let tag = format!("m = {m}, {model}");
            out.attempt(&tag, |checks| {
                let mesh = Arc::new(if kappa == 0.0 {
                    FvMesh::flat(3, r_max, cells)?
                } else {
                    FvMesh::standard(kappa, alpha, 3, r_max, cells)?
                });
                let u0 = mesh.sample(bump(1.0, 0.0, 1.5));
                let p = DiffusionProblem::new(m, mesh, u0, 1.0)?;
                let ledger = check_mass_conservation(&p, dt, &times)?;
                checks.push(Check::holds(format!("{tag}: support stays interior"), ledger.valid));
                checks.push(Check::at_most(format!("{tag}: relative mass drift"), ledger.max_relative_drift, tol.mass));
                let seeds: Vec<u64> = (0..10).map(|k| cfg.seed.wrapping_mul(1000).wrapping_add(k)).collect();
                let reps = contraction_sweep(&p, &seeds, 2.5, dt, &times)?;
                let growing = reps.iter().filter(|r| !r.nonincreasing).count();
                let worst = max_of(reps.iter().map(|r| r.max_increase / r.tolerance.max(f64::MIN_POSITIVE)));
                checks.push(
                    Check::at_most(format!("{tag}: random pairs with growing L1 distance"), growing as f64, 0.0)
                        .with_note(format!("largest increase / tolerance {worst:.3e}")),
                );
                let inadmissible = reps.iter().filter(|r| !r.admissible).count();
                checks.push(Check::at_most(format!("{tag}: random pairs reaching the boundary"), inadmissible as f64, 0.0));
                let same = check_l1_contraction(&p, p.u0.clone(), dt, &times)?;
                let scale = same.masses_u[0];
                checks.push(Check::at_most(
                    format!("{tag}: identical data, max ||u - v||_1 / mass"),
                    max_of(same.distances.iter().copied()) / scale,
                    tol.identical,
                ));
                Ok(())
            });
        }
    }
    out.finish(started)
}

/// 8. Fast diffusion: weak conservation, critical exponent and extinction.
pub fn extinction_and_weak_conservation(cfg: &SuiteConfig) -> CriterionResult {
    let started = Instant::now();
    let mut out = CriterionResult::new(
        8,
        "fast diffusion suite",
        "weak conservation of mass on balls, the critical exponent (d-2)/d and the extinction time lower bound",
        Some(300.0),
    );
    let m_c = critical_exponent(3, 0.0);
    out.push(Check::holds("critical exponent at d = 3, kappa = 0 equals 1/3", m_c == 1.0 / 3.0).with_note(format!("{m_c:?}")));
    out.attempt("fast diffusion experiments", |checks| {
        let mesh = Arc::new(FvMesh::flat(3, 80.0, 800)?);
        let exh = solve_exhaustion(0.0, 0.0, 3, &ExhaustionOptions::for_alpha(0.0))?;
        let gamma = 2.0;
        let weak: Vec<CutoffProfile> = [4.0, 8.0, 16.0]
            .iter()
            .map(|&r| weak_cutoff(&mesh, Some(&exh), r, gamma))
            .collect::<Result<_>>()?;
        for m in [0.2, 0.5] {
            weak_inequality_checks(checks, &mesh, &weak, m, cfg.seed)?;
        }
        let lower: Vec<CutoffProfile> = [2.0, 4.0]
            .iter()
            .map(|&r| weak_cutoff(&mesh, Some(&exh), r, gamma))
            .collect::<Result<_>>()?;
        let horizon = 0.3;
        let u0 = mesh.sample(bump(1.0, 0.0, 1.0));
        let reps = extinction_study(&mesh, &[0.1, 0.2, 0.8], &u0, horizon, 0.002, &lower)?;
        for rep in &reps {
            let tag = format!("m = {}", rep.m);
            match rep.extinction_time {
                Some(t) => checks.push(
                    Check::at_least(format!("{tag}: extinction time - lower bound + dt"), t - rep.lower_bound + rep.dt, 0.0)
                        .with_note(format!("T = {t:.4}, bound = {:.4e} from R = {}", rep.lower_bound, rep.lower_bound_radius)),
                ),
                None => checks.push(Check::holds(format!("{tag}: no extinction before horizon {horizon}"), true).with_note(
                    format!("remaining mass fraction {:.4}", rep.remaining_fraction),
                )),
            }
        }
        let find = |m: f64| reps.iter().find(|r| r.m == m).expect("requested exponent");
        checks.push(Check::holds("m = 0.2 goes extinct before the horizon", !find(0.2).censored));
        checks.push(Check::at_least("m = 0.8 remaining mass fraction at the horizon", find(0.8).remaining_fraction, 0.5));
        Ok(())
    });
    out.finish(started)
}

fn weak_inequality_checks(
    checks: &mut Vec<Check>,
    mesh: &Arc<FvMesh>,
    cutoffs: &[CutoffProfile],
    m: f64,
    seed: u64,
) -> Result<()> {
    let times = if m < 1.0 / 3.0 { [0.0, 0.05, 0.2] } else { [0.0, 0.25, 1.0] };
    let psis: Vec<_> = cutoffs.iter().map(|c| cutoff_power_constant(c, mesh, m)).collect::<Result<_>>()?;
    let spans = [(times[0], times[1]), (times[1], times[2]), (times[0], times[2]), (times[2], times[0])];
    let runs: Vec<Result<_>> = (0..3u64)
        .into_par_iter()
        .map(|k| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(77 + k));
            let lower = random_bump_data(mesh, &mut rng, 12.0);
            let extra = random_bump_data(mesh, &mut rng, 12.0);
            let upper: Vec<f64> = lower.iter().zip(&extra).map(|(a, b)| a + b).collect();
            let p = DiffusionProblem::new(m, Arc::clone(mesh), upper, times[2])?;
            let q = p.with_initial(lower)?;
            let opts = RunOptions::new(0.005).at(&times);
            let (ru, rv) = (run_diffusion(&p, &opts)?, run_diffusion(&q, &opts)?);
            Ok((p, ru, rv))
        })
        .collect();
    let mut worst = f64::INFINITY;
    let mut worst_label = String::new();
    let mut count = 0usize;
    let mut unordered = 0usize;
    for run in runs {
        let (p, ru, rv) = run?;
        for psi in &psis {
            for &(t1, t2) in &spans {
                for v in [Some(&rv), None] {
                    let rep = weak_conservation_inequality(&p, &ru, v, psi, t1, t2)?;
                    count += 1;
                    if !rep.ordered {
                        unordered += 1;
                    }
                    let scaled = rep.margin / rep.rhs.abs().max(f64::MIN_POSITIVE);
                    if scaled < worst {
                        worst = scaled;
                        worst_label = format!(
                            "R = {}, t1 = {t1}, t2 = {t2}, {}",
                            psi.radius,
                            if v.is_some() { "pair" } else { "single" }
                        );
                    }
                }
            }
        }
    }
    checks.push(
        Check::at_least(format!("m = {m}: smallest weak conservation margin / rhs"), worst, 0.0)
            .with_note(format!("{count} evaluations over R = 4, 8, 16; worst at {worst_label}")),
    );
    checks.push(Check::at_most(format!("m = {m}: pairs that lost their ordering"), unordered as f64, 0.0));
    Ok(())
}

/// Fixed steps `top/32`, `top/64`, `top/128`; the value at `top` is compared across levels.
fn ode_order(profile: &CurvatureProfile<f64>, top: f64) -> Result<f64> {
    let grid = RadialGrid::uniform(top, 16)?;
    let step = top / 32.0;
    let ends: Vec<f64> = (0..3)
        .map(|k| {
            let h = step / 2f64.powi(k);
            let w = solve_warping_with(profile, &grid, StepControl::Fixed { h })?;
            Ok(w.h(grid.len() - 1))
        })
        .collect::<Result<_>>()?;
    Ok(observed_order((ends[0] - ends[1]).abs(), (ends[1] - ends[2]).abs(), 2.0))
}

fn smooth_problem(m: f64, kappa: f64, alpha: f64, cells: usize) -> Result<DiffusionProblem> {
    let mesh = Arc::new(if kappa == 0.0 {
        FvMesh::flat(3, 4.0, cells)?
    } else {
        FvMesh::standard(kappa, alpha, 3, 4.0, cells)?
    });
    let u0 = mesh.sample(|r| 1.0 + 0.5 * (-r * r).exp());
    DiffusionProblem::new(m, mesh, u0, 0.2)
}

/// 9. Observed orders from three-level refinement ladders.
pub fn self_convergence(cfg: &SuiteConfig) -> CriterionResult {
    let started = Instant::now();
    let mut out = CriterionResult::new(
        9,
        "self-convergence",
        "observed orders of the warping integrator and the implicit finite-volume diffusion scheme",
        None,
    );
    let allow = 1.0 - cfg.tol.order_allowance;
    let ode_cases: Vec<(String, Result<CurvatureProfile<f64>>, f64)> = vec![
        ("warping ODE, G = 1 on [0, 5]".into(), CurvatureProfile::constant(1.0), 5.0),
        ("tail ODE, kappa = 1, alpha = 1, r = 4 on [0, 2]".into(), CurvatureProfile::power_tail(1.0, 1.0, 4.0), 2.0),
        ("warping ODE, standard kappa = 1, alpha = 2 on [0, 8]".into(), CurvatureProfile::standard(1.0, 2.0), 8.0),
    ];
    for (label, profile, top) in ode_cases {
        out.attempt(&label, |checks| {
            let order = ode_order(&profile?, top)?;
            checks.push(Check::at_least(format!("{label}: observed order"), order, 4.0));
            Ok(())
        });
    }
    let time_cases: &[(f64, f64, f64)] = if cfg.flat() {
        &[(2.0, 0.0, 0.0), (0.5, 0.0, 0.0)]
    } else {
        &[(2.0, 0.0, 0.0), (0.5, 0.0, 0.0), (1.5, 1.0, 2.0)]
    };
    for &(m, kappa, alpha) in time_cases {
        let label = format!("diffusion m = {m}, kappa = {kappa}, alpha = {alpha}: time order");
        out.attempt(&label, |checks| {
            let study = time_refinement(&smooth_problem(m, kappa, alpha, 100)?, 0.01)?;
            checks.push(Check::at_least(label.clone(), study.order, allow).with_note(format!("change ratio {:.4}", study.ratio)));
            Ok(())
        });
    }
    for m in [2.0, 0.5] {
        let label = format!("diffusion m = {m}, flat: space order");
        out.attempt(&label, |checks| {
            let study = space_refinement(|n| smooth_problem(m, 0.0, 0.0, n), 20, 0.01, Refinement::Space)?;
            checks.push(
                Check::at_least(label.clone(), study.order, 2.0 * allow).with_note(format!("change ratio {:.4}", study.ratio)),
            );
            Ok(())
        });
    }
    out.finish(started)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn warping_criterion_passes_quickly() {
        let r = warping_exactness(&SuiteConfig::default());
        assert!(r.passed, "{}", r.summary_line());
        assert_eq!(r.checks.len(), 7);
    }

    #[test]
    fn relative_error_skips_zero_references() {
        assert_eq!(max_relative_error([(1.0, 0.0), (1.1, 1.0)]), 1.1f64 / 1.0 - 1.0);
        assert_eq!(max_of(std::iter::empty()), f64::NEG_INFINITY);
    }

    #[test]
    fn bump_table_is_nonnegative() {
        let p = bump_table(1.0, 2.0, 1.0, 6.0).unwrap();
        for i in 0..600 {
            assert!(p.value(i as f64 * 0.01) >= 0.0);
        }
    }
}

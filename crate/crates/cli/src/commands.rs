//! Subcommand bodies. Each returns `Ok(None)` on success or `Ok(Some(detail))`
//! when a verification inside the run failed.

use std::sync::Arc;

use cutofflab::cutoff::{
    build_cutoff_alpha2, build_cutoff_general, solve_exhaustion, CutoffFamily, CutoffProfile, ExhaustionOptions,
};
use cutofflab::diffusion::{
    bump, critical_exponent, run_diffusion, DiffusionProblem, FvMesh, OuterBoundary, RunOptions, EXTINCTION_FRACTION,
};
use cutofflab::estimate::{lambda_grid, linear_decay_instance, EstimateVerification};
use cutofflab::geometry::{CurvatureProfile, ModelManifold, RadialGrid};
use cutofflab::numeric::fit::spread;
use cutofflab::verify::{render_markdown, run_suite, SuiteReport};
use serde::Serialize;

use crate::config::RunConfig;
use crate::error::CliError;
use crate::output::{OutputDir, Timing};

pub type Outcome = Result<Option<String>, CliError>;

#[derive(Serialize)]
struct VolumeRow {
    #[serde(rename = "R")]
    radius: f64,
    #[serde(rename = "V_G")]
    volume: f64,
    ratio: f64,
}

#[derive(Serialize)]
struct GeometryRow {
    #[serde(rename = "R")]
    radius: f64,
    #[serde(rename = "V_G")]
    volume: f64,
    ratio: f64,
    h: f64,
    h_prime: f64,
}

/// Ball volumes `V_G(R)` and their ratio to Euclidean balls.
pub fn geometry(cfg: &RunConfig, out: &mut OutputDir) -> Outcome {
    let profile = CurvatureProfile::standard(cfg.kappa, cfg.alpha)?;
    let top = cfg.radii.iter().cloned().fold(0.0, f64::max);
    let grid = RadialGrid::uniform(top, cfg.grid_n)?;
    let manifold = ModelManifold::from_profile(&profile, &grid, cfg.d)?;
    let table = manifold.volume_table(&cfg.radii)?;
    let ratios = table.euclidean_ratios();
    let mut rows = Vec::new();
    for ((&r, &v), &ratio) in table.radii.iter().zip(&table.volumes).zip(&ratios) {
        let state = manifold.warping().state_at(r)?;
        rows.push(GeometryRow {
            radius: r,
            volume: v,
            ratio,
            h: state.h(),
            h_prime: state.h_prime(),
        });
    }
    let csv: Vec<VolumeRow> = rows
        .iter()
        .map(|r| VolumeRow {
            radius: r.radius,
            volume: r.volume,
            ratio: r.ratio,
        })
        .collect();
    out.csv("volumes.csv", &csv)?;
    out.report("geometry.json", &rows)?;
    Ok(None)
}

#[derive(Serialize)]
struct CutoffEntry {
    #[serde(rename = "R")]
    radius: f64,
    support_radius: f64,
    sup_grad: f64,
    sup_laplacian: f64,
    grad_constant: f64,
    laplacian_constant: f64,
    certified: bool,
    plateau_defect: f64,
    support_excess: f64,
    csv: String,
}

#[derive(Serialize)]
struct CutoffSweep {
    family: &'static str,
    entries: Vec<CutoffEntry>,
    grad_constant_spread: f64,
    laplacian_constant_spread: f64,
}

fn file_tag(r: f64) -> String {
    format!("{r}").replace('.', "p")
}

/// Cut-offs for every plateau radius, one CSV each plus a summary.
pub fn cutoff(cfg: &RunConfig, out: &mut OutputDir) -> Outcome {
    let (family, profiles): (&'static str, Vec<CutoffProfile>) = if cfg.alpha == 2.0 {
        let ps = cfg
            .radii
            .iter()
            .map(|&r| Ok(build_cutoff_alpha2(cfg.kappa, cfg.d, r, cfg.gamma)?.1))
            .collect::<Result<_, CliError>>()?;
        ("annulus", ps)
    } else {
        let exh = solve_exhaustion(cfg.alpha, cfg.kappa, cfg.d, &ExhaustionOptions::for_alpha(cfg.alpha))?;
        let ps = cfg
            .radii
            .iter()
            .map(|&r| Ok(build_cutoff_general(&exh, r, cfg.gamma, CutoffFamily::Auto)?))
            .collect::<Result<_, CliError>>()?;
        ("exhaustion", ps)
    };
    let mut entries = Vec::new();
    for c in &profiles {
        let name = format!("cutoff_R{}.csv", file_tag(c.plateau_radius));
        let rows: Vec<Vec<f64>> = (0..c.nodes.len())
            .map(|i| vec![c.nodes[i], c.phi[i], c.grad[i], c.laplacian[i]])
            .collect();
        let header = ["r", "phi", "grad", "laplacian"].map(String::from);
        out.csv_table(&name, &header, &rows)?;
        let check = c.certify(cfg.tolerances.cutoff);
        entries.push(CutoffEntry {
            radius: c.plateau_radius,
            support_radius: c.support_radius,
            sup_grad: c.sup_grad,
            sup_laplacian: c.sup_laplacian,
            grad_constant: c.grad_constant(),
            laplacian_constant: c.laplacian_constant(),
            certified: check.passed(),
            plateau_defect: check.plateau_defect,
            support_excess: check.support_excess,
            csv: name,
        });
    }
    let grads: Vec<f64> = entries.iter().map(|e| e.grad_constant).collect();
    let laps: Vec<f64> = entries.iter().map(|e| e.laplacian_constant).collect();
    let failed = entries.iter().find(|e| !e.certified).map(|e| {
        format!(
            "cut-off at R = {} not certified: plateau defect {:.3e}, support excess {:.3e}",
            e.radius, e.plateau_defect, e.support_excess
        )
    });
    out.report(
        "cutoff.json",
        &CutoffSweep {
            family,
            entries,
            grad_constant_spread: spread(&grads),
            laplacian_constant_spread: spread(&laps),
        },
    )?;
    Ok(failed)
}

#[derive(Serialize)]
struct LyauEntry {
    verification: EstimateVerification,
    scaled_sup: f64,
    holds: bool,
}

#[derive(Serialize)]
struct LyauRow {
    #[serde(rename = "R1")]
    r1: f64,
    bound: f64,
    sup_lhs: f64,
    margin_min: f64,
    violations: usize,
    scaled_sup: f64,
}

#[derive(Serialize)]
struct LyauSweep {
    entries: Vec<LyauEntry>,
    scaled_sup_spread: f64,
}

/// Gradient bound for `Δω = ω / r^alpha` at each inner radius.
pub fn lyau(cfg: &RunConfig, out: &mut OutputDir) -> Outcome {
    let lambdas = lambda_grid();
    let mut entries = Vec::new();
    for &r1 in &cfg.radii {
        let inst = linear_decay_instance(cfg.alpha, cfg.kappa, cfg.d, r1, &lambdas)?;
        entries.push(LyauEntry {
            holds: inst.verification.holds(),
            scaled_sup: inst.scaled_sup,
            verification: inst.verification,
        });
    }
    let rows: Vec<LyauRow> = entries
        .iter()
        .map(|e| LyauRow {
            r1: e.verification.r1,
            bound: e.verification.bound,
            sup_lhs: e.verification.sup_lhs,
            margin_min: e.verification.margin_min,
            violations: e.verification.violations,
            scaled_sup: e.scaled_sup,
        })
        .collect();
    out.csv("lyau.csv", &rows)?;
    let failed = entries
        .iter()
        .find(|e| !e.holds)
        .map(|e| format!("bound violated at {} nodes for R1 = {}", e.verification.violations, e.verification.r1));
    let scaled: Vec<f64> = entries.iter().map(|e| e.scaled_sup).collect();
    out.report(
        "lyau.json",
        &LyauSweep {
            scaled_sup_spread: spread(&scaled),
            entries,
        },
    )?;
    Ok(failed)
}

#[derive(Serialize)]
struct DiffusionSummary {
    manifest: cutofflab::diffusion::RunManifest,
    critical_exponent: f64,
    initial_mass: f64,
    final_time: f64,
    final_mass: f64,
    outflow: f64,
    /// `|mass + outflow - initial| / initial`.
    mass_balance_error: f64,
    admissible: bool,
    min_boundary_gap: usize,
    extinction_time: Option<f64>,
}

/// One run from a centred bump; time series, snapshot profiles and a summary.
pub fn diffusion(cfg: &RunConfig, out: &mut OutputDir) -> Outcome {
    let mesh = Arc::new(if cfg.kappa == 0.0 {
        FvMesh::flat(cfg.d, cfg.r_max, cfg.grid_n)?
    } else {
        FvMesh::standard(cfg.kappa, cfg.alpha, cfg.d, cfg.r_max, cfg.grid_n)?
    });
    let u0 = mesh.sample(bump(cfg.amplitude, 0.0, cfg.width));
    let p = DiffusionProblem::new(cfg.m, Arc::clone(&mesh), u0, cfg.horizon)?;
    let times: Vec<f64> = [0.0, 0.25, 0.5, 1.0].iter().map(|f| f * cfg.horizon).collect();
    let mut opts = RunOptions::new(cfg.dt).at(&times);
    if cfg.m < 1.0 {
        opts = opts.stop_below(EXTINCTION_FRACTION);
    }
    let run = run_diffusion(&p, &opts)?;
    out.csv("series.csv", &run.series)?;
    let mut header = vec!["r".to_string()];
    header.extend(run.snapshots.iter().map(|s| format!("u_t{}", s.t)));
    let rows: Vec<Vec<f64>> = mesh
        .centers()
        .iter()
        .enumerate()
        .map(|(i, &r)| std::iter::once(r).chain(run.snapshots.iter().map(|s| s.u[i])).collect())
        .collect();
    out.csv_table("profiles.csv", &header, &rows)?;
    let fin = &run.final_state;
    let summary = DiffusionSummary {
        manifest: run.manifest.clone(),
        critical_exponent: critical_exponent(cfg.d, cfg.kappa),
        initial_mass: run.initial_mass,
        final_time: fin.t,
        final_mass: fin.mass,
        outflow: fin.outflow,
        mass_balance_error: (fin.mass + fin.outflow - run.initial_mass).abs() / run.initial_mass,
        admissible: run.admissible,
        min_boundary_gap: run.min_boundary_gap,
        extinction_time: run.stopped_at,
    };
    let failed = (p.boundary == OuterBoundary::ZeroFlux && summary.mass_balance_error > cfg.tolerances.mass)
        .then(|| format!("mass balance error {:.3e} above {:.1e}", summary.mass_balance_error, cfg.tolerances.mass));
    out.report("diffusion.json", &summary)?;
    Ok(failed)
}

/// Acceptance suite; JSON and Markdown reports, timings in `run_meta.json`.
pub fn verify_all(cfg: &RunConfig, out: &mut OutputDir) -> Outcome {
    let suite = cfg.suite();
    let results = run_suite(&suite);
    for c in &results {
        eprintln!("{}", c.summary_line());
        out.timings.push(Timing {
            label: format!("criterion {}", c.id),
            seconds: c.runtime.as_secs_f64(),
            budget_s: c.budget.map(|b| b.as_secs_f64()),
        });
    }
    let report = SuiteReport::new(out.hash().to_string(), suite, results);
    out.raw_json("report.json", &report)?;
    out.text("report.md", &render_markdown(&report))?;
    Ok(report.first_failure().map(|(c, k)| {
        format!(
            "criterion {} ({}): {} (value {:.6e}, limit {:.6e}){}",
            c.id,
            c.name,
            k.label,
            k.value,
            k.limit,
            if k.note.is_empty() { String::new() } else { format!(": {}", k.note) }
        )
    }))
}

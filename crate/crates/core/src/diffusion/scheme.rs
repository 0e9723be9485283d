//! Implicit finite-volume time stepping for `u_t = Laplacian(|u|^(m-1) u)`.

use std::sync::Arc;

use serde::Serialize;

use super::mesh::FvMesh;
use crate::error::{check_range, LabError, Result};
use crate::numeric::signed_pow;
use crate::numeric::tridiag::solve_tridiagonal;

/// Condition at the outer mesh radius.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum OuterBoundary {
    /// No flux: mass is conserved and the run is only meaningful while the
    /// support stays away from the boundary.
    ZeroFlux,
    /// `u = 0` just outside the mesh: mass leaving the mesh is recorded as outflow.
    Absorbing,
}

/// Newton and step-control settings.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NewtonOptions {
    /// Converged when the L1 residual is below this fraction of the mass scale.
    pub residual_tol: f64,
    pub max_iterations: usize,
    /// How many times a failing step may be halved.
    pub max_halvings: usize,
    /// Cells below `-negativity_tol * sup u0` are a scheme violation.
    pub negativity_tol: f64,
}

impl Default for NewtonOptions {
    fn default() -> Self {
        Self {
            residual_tol: 1e-10,
            max_iterations: 60,
            max_halvings: 20,
            negativity_tol: 1e-12,
        }
    }
}

/// Exponent, mesh, initial density and horizon of one radial run.
#[derive(Debug, Clone)]
pub struct DiffusionProblem {
    pub m: f64,
    pub mesh: Arc<FvMesh>,
    pub u0: Vec<f64>,
    pub horizon: f64,
    pub boundary: OuterBoundary,
    pub newton: NewtonOptions,
    mass_scale: f64,
    u_scale: f64,
}

impl DiffusionProblem {
    /// Zero flux for `m >= 1`, absorbing for fast diffusion (a bounded zero-flux
    /// domain would conserve mass and never extinguish).
    pub fn new(m: f64, mesh: Arc<FvMesh>, u0: Vec<f64>, horizon: f64) -> Result<Self> {
        check_range("m", m, 1e-3, 10.0, "[1e-3, 10]")?;
        check_range("horizon", horizon, 0.0, 1e12, "[0, 1e12]")?;
        if u0.len() != mesh.cells() {
            return Err(LabError::InvalidGrid(format!(
                "initial data has {} values for {} cells",
                u0.len(),
                mesh.cells()
            )));
        }
        if let Some(i) = u0.iter().position(|x| !(x.is_finite() && *x >= 0.0)) {
            return Err(LabError::NonPositive {
                what: "initial density",
                r: mesh.centers()[i],
                value: u0[i],
            });
        }
        let mass_scale = mesh.integral(&u0);
        if !(mass_scale > 0.0) {
            return Err(LabError::NonPositive {
                what: "initial mass",
                r: 0.0,
                value: mass_scale,
            });
        }
        let u_scale = u0.iter().cloned().fold(0.0, f64::max);
        let boundary = if m >= 1.0 {
            OuterBoundary::ZeroFlux
        } else {
            OuterBoundary::Absorbing
        };
        Ok(Self {
            m,
            mesh,
            u0,
            horizon,
            boundary,
            newton: NewtonOptions::default(),
            mass_scale,
            u_scale,
        })
    }

    pub fn with_boundary(mut self, boundary: OuterBoundary) -> Self {
        self.boundary = boundary;
        self
    }

    /// Same mesh and exponent with different initial data.
    pub fn with_initial(&self, u0: Vec<f64>) -> Result<Self> {
        Ok(Self::new(self.m, Arc::clone(&self.mesh), u0, self.horizon)?.with_boundary(self.boundary))
    }

    pub fn initial_state(&self) -> DiffusionState {
        DiffusionState {
            t: 0.0,
            mass: self.mass_scale,
            outflow: 0.0,
            u: self.u0.clone(),
        }
    }

    /// Initial mass; Newton residuals are measured against it.
    pub fn mass_scale(&self) -> f64 {
        self.mass_scale
    }

    /// `sup u0`; the support floor and negativity check are relative to it.
    pub fn u_scale(&self) -> f64 {
        self.u_scale
    }

    /// Density below which a cell counts as outside the support.
    pub fn support_floor(&self) -> f64 {
        1e-12 * self.u_scale
    }

    pub fn manifest(&self, dt: f64) -> RunManifest {
        RunManifest {
            m: self.m,
            d: self.mesh.d(),
            kappa: self.mesh.kappa(),
            alpha: self.mesh.alpha(),
            grid: GridManifest {
                cells: self.mesh.cells(),
                r_max: self.mesh.r_max(),
            },
            dt,
            horizon: self.horizon,
            boundary: self.boundary,
        }
    }

    /// Transmissibilities `A_face / (center distance)`; the pole face carries
    /// zero area and the outer face is zero unless absorbing.
    fn transmissibility(&self) -> Vec<f64> {
        let mesh = &self.mesh;
        let (f, c, a) = (mesh.faces(), mesh.centers(), mesh.face_areas());
        let n = mesh.cells();
        let mut t = vec![0.0; n + 1];
        for i in 1..n {
            t[i] = a[i] / (c[i] - c[i - 1]);
        }
        if self.boundary == OuterBoundary::Absorbing {
            t[n] = a[n] / (f[n] - c[n - 1]);
        }
        t
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GridManifest {
    pub cells: usize,
    pub r_max: f64,
}

/// Parameters identifying a run, written next to its time series.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunManifest {
    pub m: f64,
    pub d: usize,
    pub kappa: f64,
    pub alpha: f64,
    pub grid: GridManifest,
    pub dt: f64,
    pub horizon: f64,
    pub boundary: OuterBoundary,
}

/// Snapshot of a run: cell averages, mass on the mesh, and mass lost through
/// an absorbing boundary so far.
#[derive(Debug, Clone, PartialEq)]
pub struct DiffusionState {
    pub t: f64,
    pub u: Vec<f64>,
    pub mass: f64,
    pub outflow: f64,
}

/// Newton unknown: `w = u^m` for fast diffusion, `u` otherwise. Either way the
/// nonlinearity is a power with exponent >= 1, so its derivative is finite at 0.
struct Unknowns {
    m: f64,
    fast: bool,
}

impl Unknowns {
    fn new(m: f64) -> Self {
        Self { m, fast: m < 1.0 }
    }
    fn from_u(&self, u: f64) -> f64 {
        if self.fast {
            signed_pow(u, self.m)
        } else {
            u
        }
    }
    fn u(&self, x: f64) -> f64 {
        if self.fast {
            signed_pow(x, 1.0 / self.m)
        } else {
            x
        }
    }
    fn w(&self, x: f64) -> f64 {
        if self.fast {
            x
        } else {
            signed_pow(x, self.m)
        }
    }
    fn du(&self, x: f64) -> f64 {
        if self.fast {
            x.abs().powf(1.0 / self.m - 1.0) / self.m
        } else {
            1.0
        }
    }
    fn dw(&self, x: f64) -> f64 {
        if self.fast || self.m == 1.0 {
            1.0
        } else {
            self.m * x.abs().powf(self.m - 1.0)
        }
    }
}

fn sq_norm(f: &[f64]) -> f64 {
    f.iter().map(|v| v * v).sum()
}

struct Implicit<'a> {
    p: &'a DiffusionProblem,
    trans: Vec<f64>,
    vars: Unknowns,
}

impl<'a> Implicit<'a> {
    fn new(p: &'a DiffusionProblem) -> Self {
        Self {
            p,
            trans: p.transmissibility(),
            vars: Unknowns::new(p.m),
        }
    }

    /// `V (u - u_old) - tau * (net inflow)` per cell, and its L1 norm.
    fn residual(&self, x: &[f64], old: &[f64], tau: f64) -> (Vec<f64>, f64) {
        let n = x.len();
        let vol = self.p.mesh.volumes();
        let t = &self.trans;
        let w: Vec<f64> = x.iter().map(|&v| self.vars.w(v)).collect();
        let mut f = Vec::with_capacity(n);
        let mut norm = 0.0;
        for i in 0..n {
            let right = if i + 1 < n { t[i + 1] * (w[i + 1] - w[i]) } else { -t[n] * w[i] };
            let left = if i > 0 { t[i] * (w[i] - w[i - 1]) } else { 0.0 };
            let fi = vol[i] * (self.vars.u(x[i]) - old[i]) - tau * (right - left);
            norm += fi.abs();
            f.push(fi);
        }
        (f, norm)
    }

    fn newton_step(&self, x: &[f64], f: &[f64], tau: f64) -> Result<Vec<f64>> {
        let n = x.len();
        let vol = self.p.mesh.volumes();
        let t = &self.trans;
        let dw: Vec<f64> = x.iter().map(|&v| self.vars.dw(v)).collect();
        let mut lower = vec![0.0; n];
        let mut diag = vec![0.0; n];
        let mut upper = vec![0.0; n];
        for i in 0..n {
            diag[i] = vol[i] * self.vars.du(x[i]) + tau * (t[i] + t[i + 1]) * dw[i];
            if i > 0 {
                lower[i] = -tau * t[i] * dw[i - 1];
            }
            if i + 1 < n {
                upper[i] = -tau * t[i + 1] * dw[i + 1];
            }
        }
        let rhs: Vec<f64> = f.iter().map(|v| -v).collect();
        solve_tridiagonal(&lower, &diag, &upper, &rhs)
    }

    /// One implicit Euler step of size `tau` by damped Newton.
    fn solve(&self, old: &[f64], tau: f64, t_now: f64) -> Result<Vec<f64>> {
        let opts = &self.p.newton;
        let target = opts.residual_tol * self.p.mass_scale;
        let polish_floor = 1e-15 * self.p.mass_scale;
        let mut x: Vec<f64> = old.iter().map(|&u| self.vars.from_u(u)).collect();
        let (mut f, mut norm) = self.residual(&x, old, tau);
        let mut polishing = 0;
        for _ in 0..opts.max_iterations {
            if norm <= target {
                if polishing >= 3 || norm <= polish_floor {
                    break;
                }
                polishing += 1;
            }
            let delta = match self.newton_step(&x, &f, tau) {
                Ok(d) => d,
                Err(_) => break,
            };
            // Armijo search on the squared L2 merit: the Newton direction always
            // descends it, while L1 can stall at cells with zero residual.
            let merit = sq_norm(&f);
            let mut lambda = 1.0;
            let mut accepted = None;
            for _ in 0..40 {
                let trial: Vec<f64> = x.iter().zip(&delta).map(|(a, b)| a + lambda * b).collect();
                let (ft, nt) = self.residual(&trial, old, tau);
                if nt.is_finite() && sq_norm(&ft) <= (1.0 - 1e-4 * lambda) * merit {
                    accepted = Some((trial, ft, nt));
                    break;
                }
                lambda *= 0.5;
            }
            match accepted {
                Some((xt, ft, nt)) => {
                    let stalled = polishing > 0 && nt > 0.25 * norm;
                    x = xt;
                    f = ft;
                    norm = nt;
                    if stalled {
                        break;
                    }
                }
                None => break,
            }
        }
        if norm <= target {
            Ok(x.iter().map(|&v| self.vars.u(v)).collect())
        } else {
            Err(LabError::NewtonFailure {
                t: t_now,
                residual: norm / self.p.mass_scale,
                dt: tau,
            })
        }
    }

    fn outflow_rate(&self, u: &[f64]) -> f64 {
        let n = u.len();
        self.trans[n] * signed_pow(u[n - 1], self.p.m)
    }

    fn advance(&self, state: &DiffusionState, tau: f64, halvings: usize) -> Result<DiffusionState> {
        match self.solve(&state.u, tau, state.t) {
            Ok(u) => {
                let floor = -self.p.newton.negativity_tol * self.p.u_scale;
                if let Some(i) = u.iter().position(|x| *x < floor) {
                    return Err(LabError::SchemeViolation(format!(
                        "density {:.3e} at r = {:.4} after step to t = {}",
                        u[i],
                        self.p.mesh.centers()[i],
                        state.t + tau
                    )));
                }
                let outflow = state.outflow + tau * self.outflow_rate(&u);
                Ok(DiffusionState {
                    t: state.t + tau,
                    mass: self.p.mesh.integral(&u),
                    outflow,
                    u,
                })
            }
            Err(err @ LabError::NewtonFailure { .. }) => {
                if halvings >= self.p.newton.max_halvings {
                    return Err(err);
                }
                let mid = self.advance(state, 0.5 * tau, halvings + 1)?;
                self.advance(&mid, 0.5 * tau, halvings + 1)
            }
            Err(other) => Err(other),
        }
    }
}

/// Advance `state` by `dt` with one implicit Euler step, halving the step on
/// Newton failure.
pub fn step_diffusion(state: &DiffusionState, p: &DiffusionProblem, dt: f64) -> Result<DiffusionState> {
    check_range("dt", dt, f64::MIN_POSITIVE, f64::MAX, "(0, inf)")?;
    if state.u.len() != p.mesh.cells() {
        return Err(LabError::InvalidGrid("state does not match the problem mesh".into()));
    }
    Implicit::new(p).advance(state, dt, 0)
}

/// One row of the run time series.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SeriesRow {
    pub t: f64,
    pub mass: f64,
    pub sup_u: f64,
    pub support_radius: f64,
}

/// Time integral of `integral_(inner <= r <= outer) |u|^m dV`, the quantity
/// that must stay finite for a solution to count as strong.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AnnulusPowerIntegral {
    pub inner: f64,
    pub outer: f64,
    pub integral: f64,
    /// `integral / inner^(1 + alpha/2)`.
    pub scaled: f64,
}

/// What to record during a run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunOptions {
    pub dt: f64,
    /// Snapshot times in `[0, horizon]`; the run lands on each exactly.
    pub output_times: Vec<f64>,
    /// Stop once mass drops below this fraction of the initial mass.
    pub stop_below: Option<f64>,
    pub annuli: Vec<(f64, f64)>,
}

impl RunOptions {
    pub fn new(dt: f64) -> Self {
        Self {
            dt,
            output_times: Vec::new(),
            stop_below: None,
            annuli: Vec::new(),
        }
    }
    pub fn at(mut self, times: &[f64]) -> Self {
        self.output_times = times.to_vec();
        self
    }
    pub fn stop_below(mut self, fraction: f64) -> Self {
        self.stop_below = Some(fraction);
        self
    }
    pub fn monitor(mut self, inner: f64, outer: f64) -> Self {
        self.annuli.push((inner, outer));
        self
    }
}

/// Result of integrating a problem to its horizon (or to extinction).
#[derive(Debug, Clone)]
pub struct DiffusionRun {
    pub manifest: RunManifest,
    pub initial_mass: f64,
    pub snapshots: Vec<DiffusionState>,
    pub series: Vec<SeriesRow>,
    pub final_state: DiffusionState,
    /// Smallest number of cells between the support and the outer boundary.
    pub min_boundary_gap: usize,
    /// Zero-flux runs whose support came within 10 cells of the boundary are not
    /// admissible stand-ins for the whole manifold.
    pub admissible: bool,
    /// First step time at which mass fell below the stop fraction.
    pub stopped_at: Option<f64>,
    pub annuli: Vec<AnnulusPowerIntegral>,
}

impl DiffusionRun {
    /// Snapshot at time `t` (exact match up to 1e-12 relative).
    pub fn snapshot(&self, t: f64) -> Option<&DiffusionState> {
        self.snapshots.iter().find(|s| (s.t - t).abs() <= 1e-12 * t.abs().max(1.0))
    }
}

/// Cells between the support and the outer boundary required for admissibility.
pub const BOUNDARY_GAP_CELLS: usize = 10;

fn series_row(p: &DiffusionProblem, s: &DiffusionState) -> SeriesRow {
    SeriesRow {
        t: s.t,
        mass: s.mass,
        sup_u: s.u.iter().cloned().fold(0.0, f64::max),
        support_radius: p.mesh.support_radius(&s.u, p.support_floor()),
    }
}

/// Integrate `p` to its horizon with steps of at most `opts.dt`.
pub fn run_diffusion(p: &DiffusionProblem, opts: &RunOptions) -> Result<DiffusionRun> {
    check_range("dt", opts.dt, f64::MIN_POSITIVE, f64::MAX, "(0, inf)")?;
    let mut targets: Vec<f64> = opts.output_times.clone();
    for &t in &targets {
        check_range("output time", t, 0.0, p.horizon, "[0, horizon]")?;
    }
    targets.sort_by(|a, b| a.total_cmp(b));
    targets.dedup();
    let stepper = Implicit::new(p);
    let n = p.mesh.cells();
    let floor = p.support_floor();
    let gap_of = |u: &[f64]| p.mesh.support_cell(u, floor).map_or(n, |i| n - 1 - i);
    let power_integral = |u: &[f64], inner: f64, outer: f64| -> Result<f64> {
        let um: Vec<f64> = u.iter().map(|x| x.abs().powf(p.m)).collect();
        p.mesh.annulus_integral(&um, inner, outer)
    };

    let mut state = p.initial_state();
    let mut snapshots = Vec::new();
    let mut series = vec![series_row(p, &state)];
    let mut min_gap = gap_of(&state.u);
    let mut annuli: Vec<AnnulusPowerIntegral> = opts
        .annuli
        .iter()
        .map(|&(inner, outer)| AnnulusPowerIntegral {
            inner,
            outer,
            integral: 0.0,
            scaled: 0.0,
        })
        .collect();
    let mut next = 0;
    while next < targets.len() && targets[next] <= 0.0 {
        snapshots.push(state.clone());
        next += 1;
    }
    let mut stopped_at = None;
    let eps = 1e-12 * p.horizon.max(1.0);
    while state.t < p.horizon - eps {
        let goal = if next < targets.len() { targets[next] } else { p.horizon };
        let mut tau = opts.dt.min(goal - state.t);
        if goal - state.t - tau < eps {
            tau = goal - state.t;
        }
        let mut new_state = stepper.advance(&state, tau, 0)?;
        if (new_state.t - goal).abs() < eps {
            new_state.t = goal;
        }
        for a in annuli.iter_mut() {
            a.integral += tau * power_integral(&new_state.u, a.inner, a.outer)?;
        }
        state = new_state;
        min_gap = min_gap.min(gap_of(&state.u));
        series.push(series_row(p, &state));
        while next < targets.len() && targets[next] <= state.t + eps {
            snapshots.push(state.clone());
            next += 1;
        }
        if let Some(fraction) = opts.stop_below {
            if state.mass < fraction * p.mass_scale {
                stopped_at = Some(state.t);
                break;
            }
        }
    }
    for a in annuli.iter_mut() {
        a.scaled = a.integral / a.inner.powf(1.0 + 0.5 * p.mesh.alpha());
    }
    let admissible = p.boundary == OuterBoundary::Absorbing || min_gap >= BOUNDARY_GAP_CELLS;
    Ok(DiffusionRun {
        manifest: p.manifest(opts.dt),
        initial_mass: p.mass_scale,
        snapshots,
        series,
        final_state: state,
        min_boundary_gap: min_gap,
        admissible,
        stopped_at,
        annuli,
    })
}

/// Smooth compactly supported bump `amplitude * (1 - ((r - center)/width)^2)^3`.
pub fn bump(amplitude: f64, center: f64, width: f64) -> impl Fn(f64) -> f64 {
    move |r: f64| {
        let z = (r - center) / width;
        if z.abs() < 1.0 {
            amplitude * (1.0 - z * z).powi(3)
        } else {
            0.0
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn flat_problem(m: f64, cells: usize, r_max: f64, u0: impl Fn(f64) -> f64) -> DiffusionProblem {
        let mesh = Arc::new(FvMesh::flat(3, r_max, cells).unwrap());
        let u = mesh.sample(u0);
        DiffusionProblem::new(m, mesh, u, 1.0).unwrap()
    }

    #[test]
    fn constant_state_is_a_fixed_point() {
        let p = flat_problem(2.0, 50, 5.0, |_| 0.7);
        let s = step_diffusion(&p.initial_state(), &p, 0.1).unwrap();
        for (a, b) in s.u.iter().zip(&p.u0) {
            assert!((a - b).abs() < 1e-13);
        }
        assert!((s.t - 0.1).abs() < 1e-15);
    }

    #[test]
    fn heat_step_conserves_mass() {
        let p = flat_problem(1.0, 80, 8.0, |r| (-r * r).exp());
        let mut s = p.initial_state();
        for _ in 0..20 {
            let next = step_diffusion(&s, &p, 0.01).unwrap();
            assert!((next.mass - s.mass).abs() <= 1e-10 * p.mass_scale());
            s = next;
        }
        assert!(s.u[0] < p.u0[0]);
    }

    #[test]
    fn porous_medium_front_moves_at_finite_speed() {
        let p = flat_problem(2.0, 200, 6.0, bump(1.0, 0.0, 1.0));
        let run = run_diffusion(&p, &RunOptions::new(0.01).at(&[0.25, 0.5])).unwrap();
        let r0 = run.series[0].support_radius;
        let r1 = run.series[25].support_radius;
        let r2 = run.series.last().unwrap().support_radius;
        assert!(r0 < r1 && r1 < r2, "{r0} {r1} {r2}");
        assert!(r2 < 3.0, "front {r2}");
        assert!(run.admissible);
        let beyond = p.mesh.support_cell(&run.final_state.u, 1e-12).unwrap();
        assert!(run.final_state.u[beyond + 1..].iter().all(|x| *x == 0.0 || x.abs() < 1e-12));
    }

    #[test]
    fn fast_diffusion_loses_mass_only_through_the_boundary() {
        let p = flat_problem(0.5, 100, 10.0, bump(1.0, 0.0, 1.0));
        assert_eq!(p.boundary, OuterBoundary::Absorbing);
        let run = run_diffusion(&p, &RunOptions::new(0.02)).unwrap();
        let s = &run.final_state;
        assert!(s.outflow > 0.0);
        assert!((s.mass + s.outflow - p.mass_scale()).abs() < 1e-8 * p.mass_scale());
        assert!(s.u.iter().all(|x| *x > 0.0));
    }

    #[test]
    fn snapshots_land_on_requested_times() {
        let p = flat_problem(2.0, 60, 6.0, bump(1.0, 0.0, 1.0));
        let run = run_diffusion(&p, &RunOptions::new(0.03).at(&[0.0, 0.1, 0.55])).unwrap();
        assert_eq!(run.snapshots.len(), 3);
        assert!(run.snapshot(0.1).is_some() && run.snapshot(0.55).is_some());
        assert_eq!(run.final_state.t, 1.0);
    }

    #[test]
    fn boundary_contact_marks_run_inadmissible() {
        let p = flat_problem(2.0, 60, 2.0, bump(1.0, 0.0, 1.5));
        let run = run_diffusion(&p, &RunOptions::new(0.05)).unwrap();
        assert!(!run.admissible);
    }

    #[test]
    fn rejects_bad_input() {
        let mesh = Arc::new(FvMesh::flat(3, 4.0, 20).unwrap());
        assert!(DiffusionProblem::new(2.0, mesh.clone(), vec![1.0; 19], 1.0).is_err());
        assert!(DiffusionProblem::new(0.0, mesh.clone(), vec![1.0; 20], 1.0).is_err());
        let mut neg = vec![1.0; 20];
        neg[3] = -1.0;
        assert!(DiffusionProblem::new(2.0, mesh.clone(), neg, 1.0).is_err());
        assert!(DiffusionProblem::new(2.0, mesh, vec![0.0; 20], 1.0).is_err());
    }
}

//! Exhaustion function built from the decaying solution of `Δω = q ω` outside the half-unit ball.
//!
//! `q(r) = A₁² C² r^(-alpha)` with `A₁ = (1 - alpha/2)/sqrt 2`. The far boundary condition
//! `ω(R_n) = 0` is imposed at a domain end that doubles until the solution near the
//! origin stops changing. The solve runs in Riccati form `y = ω'/ω`, which is stable
//! when integrated inward; `-log ω` is accumulated alongside.

use std::sync::Arc;

use serde::Serialize;

use super::step::SmoothStep;
use crate::error::{check_range, LabError, Result};
use crate::geometry::{solve_warping, CurvatureProfile, RadialGrid, WarpingSolution};
use crate::numeric::fit::{fit_line, log_log_slope};
use crate::numeric::ode::{integrate, integrate_nodes, StepControl};

/// Inner radius where `ω = 1` is imposed.
pub const INNER: f64 = 0.5;
/// Outer radius of the glue region; the profile equals `-log ω` beyond it.
pub const GLUE_END: f64 = 1.0;

/// Numerical controls for [`solve_exhaustion`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ExhaustionOptions {
    /// Largest radius where the profile is reported.
    pub r_eval: f64,
    /// Fixed Poisson constant; `None` runs the doubling ladder `C = 1, 2, 4, ...`.
    pub c: Option<f64>,
    pub c_max: f64,
    /// Required sup change of `ω` on `[1/2, r_eval]` between successive domain ends.
    pub stabilization_tol: f64,
    pub max_doublings: usize,
    pub rtol: f64,
}

impl ExhaustionOptions {
    /// Defaults with `r_eval` chosen so that `r_eval^(1 - alpha/2)` stays near 800.
    pub fn for_alpha(alpha: f64) -> Self {
        let r_eval = if alpha >= 0.0 {
            800.0
        } else {
            800f64.powf(1.0 / (1.0 - alpha / 2.0)).max(8.0)
        };
        Self {
            r_eval,
            c: None,
            c_max: 64.0,
            stabilization_tol: 1e-8,
            max_doublings: 8,
            rtol: 1e-12,
        }
    }

    pub fn with_c(mut self, c: f64) -> Self {
        self.c = Some(c);
        self
    }

    pub fn with_r_eval(mut self, r_eval: f64) -> Self {
        self.r_eval = r_eval;
        self
    }
}

/// Constants fitted to the sampled profile.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ExhaustionFit {
    /// Largest `D₁` with `D₁ g(r) <= profile` where `g = r^(1-alpha/2)` (or `max(1 + log r, 0)`).
    pub d1: f64,
    /// Smallest `D₂` with `profile <= D₂ max(1, g)`.
    pub d2: f64,
    /// `max |profile'| r^(alpha/2)` over `r > 1`.
    pub d3: f64,
    /// `max |Δ profile| r^alpha` over `r > 1`.
    pub d4: f64,
    /// Log-log slope of the profile over `[r_eval/4, r_eval]` (slope against `log r` when `alpha = 2`).
    pub growth_exponent: f64,
    pub expected_exponent: f64,
    /// Slope of `-log ω` against `g(r)` on `[2, r_eval]`.
    pub decay_rate: f64,
    /// Minus the intercept of that line.
    pub log_prefactor: f64,
    /// Whether the profile is nondecreasing beyond `r = 1`.
    pub monotone_outside_unit_ball: bool,
}

impl ExhaustionFit {
    /// The smallest admissible `gamma^(1-alpha/2)` for the rescaled cut-off: `D₂/D₁`.
    pub fn level_ratio(&self) -> f64 {
        self.d2 / self.d1
    }
}

/// Sampled exhaustion function and the data needed to evaluate it off the nodes.
#[derive(Debug, Clone)]
pub struct ExhaustionProfile {
    pub alpha: f64,
    pub kappa: f64,
    pub d: usize,
    /// Poisson constant actually used.
    pub c: f64,
    /// Effective `A₁` (`1/sqrt 2` is used for `alpha = 2`).
    pub a1: f64,
    /// Final far boundary radius.
    pub r_domain: f64,
    pub doublings: usize,
    /// Sup change of `ω` on the reported range at the last doubling.
    pub stabilization_change: f64,
    pub nodes: Vec<f64>,
    pub value: Vec<f64>,
    pub slope: Vec<f64>,
    pub laplacian: Vec<f64>,
    pub fit: ExhaustionFit,
    /// Nodes `>= 1/2` with `y = ω'/ω` and `L = -log ω` there.
    anchors: Vec<(f64, f64, f64)>,
    warping: Arc<WarpingSolution<f64>>,
    rtol: f64,
}

/// Serializable summary.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExhaustionSummary {
    pub alpha: f64,
    pub kappa: f64,
    pub d: usize,
    pub c: f64,
    pub a1: f64,
    pub r_domain: f64,
    pub doublings: usize,
    pub stabilization_change: f64,
    pub r_eval: f64,
    pub fit: ExhaustionFit,
}

struct Coefficients {
    alpha: f64,
    d: usize,
    q_scale: f64,
    warping: Arc<WarpingSolution<f64>>,
}

impl Coefficients {
    fn p(&self, r: f64) -> f64 {
        (self.d as f64 - 1.0) * self.warping.log_derivative_interp(r)
    }

    fn q(&self, r: f64) -> f64 {
        self.q_scale * r.powf(-self.alpha)
    }

    fn riccati(&self, r: f64, y: &[f64; 2]) -> [f64; 2] {
        [self.q(r) - y[0] * y[0] - self.p(r) * y[0], y[0]]
    }
}

/// Output radii: a coarse stretch inside the glue, fine spacing to 4, then geometric growth.
fn output_nodes(r_eval: f64) -> Vec<f64> {
    let mut nodes: Vec<f64> = (0..10).map(|i| i as f64 * 0.05).collect();
    let mut r = INNER;
    let mut step: f64 = 0.01;
    while r < r_eval {
        nodes.push(r);
        if r >= 4.0 {
            step = (step * 1.01).min(0.5);
        }
        r += step;
    }
    nodes.push(r_eval);
    nodes
}

fn warping_for(kappa: f64, alpha: f64, r_max: f64) -> Result<Arc<WarpingSolution<f64>>> {
    let profile = CurvatureProfile::standard(kappa, alpha)?;
    let grid = RadialGrid::graded(r_max, 1e-3, 1.05, 0.5)?;
    Ok(Arc::new(solve_warping(&profile, &grid)?))
}

/// Inward sweep from the far end; returns `(y, L)` at the descending output radii.
fn sweep(coef: &Coefficients, r_far: f64, outer_desc: &[f64], control: &StepControl<f64>) -> Result<Vec<(f64, f64)>> {
    // Leave the zero of ω with a short linear shot, then switch to the Riccati form.
    let rate = (coef.p(r_far).powi(2) + 4.0 * coef.q(r_far)).sqrt();
    let shot = (4.0 / rate).min(1.0);
    let mut lin = |r: f64, s: &[f64; 2]| [s[1], coef.q(r) * s[0] - coef.p(r) * s[1]];
    let mut hint = 0.0;
    let start = r_far - shot;
    let s = integrate(&mut lin, r_far, [0.0, -1.0], start, control, &mut hint)?;
    let y_start = s[1] / s[0];
    let mut ric = |r: f64, y: &[f64; 2]| coef.riccati(r, y);
    let y_top = integrate(&mut ric, start, [y_start, 0.0], outer_desc[0], control, &mut hint)?;
    let states = integrate_nodes(&mut ric, outer_desc, [y_top[0], 0.0], control)?;
    // J(r) = -∫_r^top y, so L(r) = -∫_{1/2}^r y = J(1/2) - J(r).
    let j_inner = states.last().map(|s| s[1]).unwrap_or(0.0);
    let out: Vec<(f64, f64)> = states.iter().map(|s| (s[0], j_inner - s[1])).collect();
    if let Some((i, bad)) = out.iter().enumerate().find(|(_, (y, l))| !y.is_finite() || !l.is_finite()) {
        return Err(LabError::NonPositive {
            what: "omega",
            r: outer_desc[i],
            value: (-bad.1).exp(),
        });
    }
    Ok(out)
}

struct RawSolve {
    outer: Vec<(f64, f64, f64)>,
    r_domain: f64,
    doublings: usize,
    change: f64,
    warping: Arc<WarpingSolution<f64>>,
}

fn solve_fixed_c(alpha: f64, kappa: f64, d: usize, c: f64, a1: f64, opts: &ExhaustionOptions, outer: &[f64]) -> Result<RawSolve> {
    let control = StepControl::adaptive(opts.rtol);
    let outer_desc: Vec<f64> = outer.iter().rev().cloned().collect();
    let mut r_far = 4.0 * opts.r_eval;
    let mut previous: Option<Vec<(f64, f64)>> = None;
    let mut change = f64::INFINITY;
    for doublings in 0..=opts.max_doublings {
        let warping = warping_for(kappa, alpha, r_far)?;
        let coef = Coefficients {
            alpha,
            d,
            q_scale: a1 * a1 * c * c,
            warping: warping.clone(),
        };
        let current = sweep(&coef, r_far, &outer_desc, &control)?;
        if let Some(prev) = &previous {
            change = prev
                .iter()
                .zip(&current)
                .map(|(a, b)| ((-a.1).exp() - (-b.1).exp()).abs())
                .fold(0.0, f64::max);
            if change < opts.stabilization_tol {
                let outer_samples = outer_desc.iter().zip(&current).rev().map(|(&r, &(y, l))| (r, y, l)).collect();
                return Ok(RawSolve {
                    outer: outer_samples,
                    r_domain: r_far,
                    doublings,
                    change,
                    warping,
                });
            }
        }
        previous = Some(current);
        r_far *= 2.0;
    }
    Err(LabError::NotStabilized {
        change,
        doublings: opts.max_doublings,
    })
}

/// Quantities that decide the Poisson constant: slope and intercept of `L` against `g(r)`.
fn decay_proxies(alpha: f64, outer: &[(f64, f64, f64)], r_eval: f64) -> (f64, f64) {
    let (xs, ys): (Vec<f64>, Vec<f64>) = outer
        .iter()
        .filter(|(r, _, _)| *r >= 2.0 && *r <= r_eval)
        .map(|&(r, _, l)| (growth_gauge(alpha, r), l))
        .unzip();
    fit_line(&xs, &ys).map_or((f64::NAN, f64::NAN), |f| (f.slope, -f.intercept))
}

/// `r^(1-alpha/2)`, or `1 + log r` for `alpha = 2`.
pub fn growth_gauge(alpha: f64, r: f64) -> f64 {
    if alpha >= 2.0 {
        1.0 + r.ln()
    } else {
        r.powf(1.0 - alpha / 2.0)
    }
}

fn glue() -> SmoothStep<f64> {
    SmoothStep::falling(INNER, GLUE_END).expect("fixed glue interval")
}

/// Solve for the exhaustion function of the standard profile `kappa^2/(1+r^2)^(alpha/2)` in dimension `d`.
///
/// `alpha = 2` is accepted as an extension (logarithmic growth, `A₁ = 1/sqrt 2`).
pub fn solve_exhaustion(alpha: f64, kappa: f64, d: usize, opts: &ExhaustionOptions) -> Result<ExhaustionProfile> {
    check_range("alpha", alpha, -2.0, 2.0, "[-2, 2]")?;
    check_range("kappa", kappa, 0.0, f64::MAX, "[0, inf)")?;
    check_range("d", d as f64, 2.0, 64.0, "{2, ..., 64}")?;
    check_range("r_eval", opts.r_eval, 4.0, 1e5, "[4, 1e5]")?;
    let a1 = if alpha >= 2.0 {
        std::f64::consts::FRAC_1_SQRT_2
    } else {
        (1.0 - alpha / 2.0) / std::f64::consts::SQRT_2
    };
    let nodes = output_nodes(opts.r_eval);
    let first_outer = nodes.iter().position(|&r| r >= INNER).unwrap_or(0);
    let outer = &nodes[first_outer..];

    let ladder: Vec<f64> = match opts.c {
        Some(c) => vec![c],
        None => std::iter::successors(Some(1.0), |c| Some(c * 2.0))
            .take_while(|c| *c <= opts.c_max)
            .collect(),
    };
    let mut chosen = None;
    for &c in &ladder {
        let raw = solve_fixed_c(alpha, kappa, d, c, a1, opts, outer)?;
        let (rate, log_pref) = decay_proxies(alpha, &raw.outer, opts.r_eval);
        let admissible = rate > 0.0 && rate - log_pref > 0.0;
        let last = opts.c.is_some() || c * 2.0 > opts.c_max;
        if admissible || last {
            chosen = Some((c, raw));
            break;
        }
    }
    let (c, raw) = chosen.expect("ladder is nonempty");
    let q_scale = a1 * a1 * c * c;
    let eta = glue();
    let mut value = Vec::with_capacity(nodes.len());
    let mut slope = Vec::with_capacity(nodes.len());
    let mut laplacian = Vec::with_capacity(nodes.len());
    let p_of = |r: f64| (d as f64 - 1.0) * raw.warping.log_derivative_interp(r);
    for &r in &nodes[..first_outer] {
        let _ = r;
        value.push(1.0);
        slope.push(0.0);
        laplacian.push(0.0);
    }
    for &(r, y, l) in &raw.outer {
        let q = q_scale * r.powf(-alpha);
        let jet = glued_jet(&eta, r, y, l, q, p_of(r));
        value.push(jet.0);
        slope.push(jet.1);
        laplacian.push(jet.2);
    }
    let (rate, log_pref) = decay_proxies(alpha, &raw.outer, opts.r_eval);
    let fit = fit_constants(alpha, &nodes, &value, &slope, &laplacian, opts.r_eval, rate, log_pref);
    Ok(ExhaustionProfile {
        alpha,
        kappa,
        d,
        c,
        a1,
        r_domain: raw.r_domain,
        doublings: raw.doublings,
        stabilization_change: raw.change,
        nodes,
        value,
        slope,
        laplacian,
        fit,
        anchors: raw.outer,
        warping: raw.warping,
        rtol: opts.rtol,
    })
}

/// `(profile, profile', Δ profile)` from `y`, `L` and the glue step.
fn glued_jet(eta: &SmoothStep<f64>, r: f64, y: f64, l: f64, q: f64, p: f64) -> (f64, f64, f64) {
    let (e, e1, e2) = eta.eval(r);
    let (l1, l2) = (-y, -(q - y * y - p * y));
    let v = (1.0 - e) * l + e;
    let d1 = e1 * (1.0 - l) + (1.0 - e) * l1;
    let d2 = e2 * (1.0 - l) - 2.0 * e1 * l1 + (1.0 - e) * l2;
    (v, d1, d2 + p * d1)
}

#[allow(clippy::too_many_arguments)]
fn fit_constants(
    alpha: f64,
    nodes: &[f64],
    value: &[f64],
    slope: &[f64],
    lap: &[f64],
    r_eval: f64,
    decay_rate: f64,
    log_prefactor: f64,
) -> ExhaustionFit {
    let mut d1 = f64::INFINITY;
    let mut d2: f64 = 0.0;
    let (mut d3, mut d4): (f64, f64) = (0.0, 0.0);
    let mut monotone = true;
    for i in 0..nodes.len() {
        let r = nodes[i];
        let g = growth_gauge(alpha, r);
        if r > 0.0 && g > 0.0 {
            d1 = d1.min(value[i] / g);
        }
        d2 = d2.max(value[i] / g.max(1.0));
        if r > GLUE_END {
            let weight = if alpha >= 2.0 { r } else { r.powf(alpha / 2.0) };
            d3 = d3.max(slope[i].abs() * weight);
            d4 = d4.max(lap[i].abs() * r.powf(alpha));
        }
        if r >= GLUE_END && i > 0 && nodes[i - 1] >= GLUE_END && value[i] < value[i - 1] {
            monotone = false;
        }
    }
    let (xs, ys): (Vec<f64>, Vec<f64>) = nodes
        .iter()
        .zip(value)
        .filter(|(r, _)| **r >= r_eval / 4.0)
        .map(|(r, v)| (*r, *v))
        .unzip();
    let (growth_exponent, expected_exponent) = if alpha >= 2.0 {
        let lx: Vec<f64> = xs.iter().map(|r| r.ln()).collect();
        (fit_line(&lx, &ys).map_or(f64::NAN, |f| f.slope), f64::NAN)
    } else {
        (log_log_slope(&xs, &ys).unwrap_or(f64::NAN), 1.0 - alpha / 2.0)
    };
    ExhaustionFit {
        d1,
        d2,
        d3,
        d4,
        growth_exponent,
        expected_exponent,
        decay_rate,
        log_prefactor,
        monotone_outside_unit_ball: monotone,
    }
}

impl ExhaustionProfile {
    pub fn r_eval(&self) -> f64 {
        *self.nodes.last().expect("nonempty")
    }

    pub fn summary(&self) -> ExhaustionSummary {
        ExhaustionSummary {
            alpha: self.alpha,
            kappa: self.kappa,
            d: self.d,
            c: self.c,
            a1: self.a1,
            r_domain: self.r_domain,
            doublings: self.doublings,
            stabilization_change: self.stabilization_change,
            r_eval: self.r_eval(),
            fit: self.fit,
        }
    }

    fn q(&self, r: f64) -> f64 {
        self.a1 * self.a1 * self.c * self.c * r.powf(-self.alpha)
    }

    /// `(d-1) h'/h` of the underlying model.
    pub fn mean_curvature(&self, r: f64) -> f64 {
        (self.d as f64 - 1.0) * self.warping.log_derivative_interp(r)
    }

    /// `(ω'/ω, -log ω)` at any `r` in `[1/2, r_eval]`, integrated inward from the nearest node above.
    pub fn omega_log_state(&self, r: f64) -> Result<(f64, f64)> {
        let top = self.r_eval();
        if !(INNER..=top).contains(&r) {
            return Err(LabError::OutOfRange { r, r_max: top });
        }
        let k = self.anchors.partition_point(|a| a.0 < r).min(self.anchors.len() - 1);
        self.state_from_anchor(k, r)
    }

    fn state_from_anchor(&self, k: usize, r: f64) -> Result<(f64, f64)> {
        let (ra, ya, la) = self.anchors[k];
        if ra == r {
            return Ok((ya, la));
        }
        let coef = Coefficients {
            alpha: self.alpha,
            d: self.d,
            q_scale: self.a1 * self.a1 * self.c * self.c,
            warping: self.warping.clone(),
        };
        let mut ric = |s: f64, y: &[f64; 2]| coef.riccati(s, y);
        let mut hint = 0.0;
        let s = integrate(&mut ric, ra, [ya, 0.0], r, &StepControl::adaptive(self.rtol), &mut hint)?;
        // s[1] = -∫_r^ra y, and L(r) = L(ra) + ∫_r^ra y.
        Ok((s[0], la - s[1]))
    }

    /// `(profile, profile', Δ profile)` at any `r` in `[0, r_eval]`.
    pub fn jet(&self, r: f64) -> Result<(f64, f64, f64)> {
        if r < 0.0 {
            return Err(LabError::OutOfRange { r, r_max: self.r_eval() });
        }
        if r <= INNER {
            return Ok((1.0, 0.0, 0.0));
        }
        let (y, l) = self.omega_log_state(r)?;
        Ok(glued_jet(&glue(), r, y, l, self.q(r), self.mean_curvature(r)))
    }

    /// Largest profile value on `[0, radius]`.
    pub fn max_on(&self, radius: f64) -> Result<f64> {
        let mut best = self.jet(radius)?.0;
        for (r, v) in self.nodes.iter().zip(&self.value) {
            if *r <= radius {
                best = best.max(*v);
            }
        }
        Ok(best)
    }

    /// Smallest `r >= 1` with `profile(r) >= level`, by bisection (the profile is nondecreasing there).
    pub fn radius_of_level(&self, level: f64) -> Result<f64> {
        let top = self.r_eval();
        let f = |r: f64| self.jet(r).map(|j| j.0 - level).unwrap_or(f64::NAN);
        if f(top) < 0.0 {
            return Err(LabError::InsufficientDomain {
                needed: level,
                available: self.jet(top)?.0,
            });
        }
        if f(GLUE_END) >= 0.0 {
            return Ok(GLUE_END);
        }
        crate::numeric::roots::bisect(f, GLUE_END, top, 1e-12 * top).ok_or(LabError::Singular("level bisection"))
    }

    /// Max over `radii` (each `> 1`) of `|Δ profile - ((ω'/ω)² - q)|`, with the Laplacian taken by
    /// fourth-order differences of independently integrated values.
    pub fn laplacian_identity_residual(&self, radii: &[f64]) -> Result<f64> {
        let mut worst: f64 = 0.0;
        for &r in radii {
            let delta = 0.02 * r.max(1.0).sqrt();
            if r - 2.0 * delta <= GLUE_END || r + 2.0 * delta > self.r_eval() {
                return Err(LabError::OutOfRange { r, r_max: self.r_eval() });
            }
            let k = self
                .anchors
                .partition_point(|a| a.0 < r + 2.0 * delta)
                .min(self.anchors.len() - 1);
            let mut l = [0.0; 5];
            for (j, slot) in l.iter_mut().enumerate() {
                *slot = self.state_from_anchor(k, r + (j as f64 - 2.0) * delta)?.1;
            }
            let d1 = (l[0] - 8.0 * l[1] + 8.0 * l[3] - l[4]) / (12.0 * delta);
            let d2 = (-l[0] + 16.0 * l[1] - 30.0 * l[2] + 16.0 * l[3] - l[4]) / (12.0 * delta * delta);
            let lap_fd = d2 + self.mean_curvature(r) * d1;
            let (y, _) = self.state_from_anchor(k, r)?;
            worst = worst.max((lap_fd - (y * y - self.q(r))).abs());
        }
        Ok(worst)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn quick(alpha: f64, kappa: f64, c: Option<f64>) -> ExhaustionProfile {
        let mut opts = ExhaustionOptions::for_alpha(alpha);
        opts.c = c;
        solve_exhaustion(alpha, kappa, 3, &opts).unwrap()
    }

    #[test]
    fn flat_euclidean_grows_linearly() {
        let e = quick(0.0, 0.0, None);
        assert!((e.fit.growth_exponent - 1.0).abs() < 0.05, "{:?}", e.fit);
        assert!(e.fit.monotone_outside_unit_ball);
        assert!(e.stabilization_change < 1e-8);
    }

    #[test]
    fn decaying_curvature_grows_like_square_root() {
        let e = quick(1.0, 1.0, None);
        assert!((e.fit.growth_exponent - 0.5).abs() < 0.05, "{:?}", e.fit);
        // |Δ profile| r^alpha bounded on [2, r_eval/4].
        let scaled: Vec<f64> = e
            .nodes
            .iter()
            .zip(&e.laplacian)
            .filter(|(r, _)| **r >= 2.0 && **r <= e.r_eval() / 4.0)
            .map(|(r, l)| l.abs() * r)
            .collect();
        let max = scaled.iter().cloned().fold(0.0, f64::max);
        assert!(max <= e.fit.d4 && max.is_finite());
        let tail = &scaled[scaled.len() / 2..];
        assert!(tail.iter().cloned().fold(0.0, f64::max) <= 2.0 * tail[0]);
    }

    #[test]
    fn sandwich_and_positivity() {
        let e = quick(1.0, 1.0, None);
        let f = e.fit;
        assert!(f.d1 > 0.0 && f.d2 >= f.d1);
        for (r, v) in e.nodes.iter().zip(&e.value) {
            let g = growth_gauge(1.0, *r);
            assert!(*v >= f.d1 * g * (1.0 - 1e-12) && *v <= f.d2 * g.max(1.0) * (1.0 + 1e-12));
        }
    }

    #[test]
    fn larger_constant_gives_larger_log() {
        let a = quick(0.5, 1.0, Some(1.0));
        let b = quick(0.5, 1.0, Some(2.0));
        for (i, r) in a.nodes.iter().enumerate() {
            if *r > GLUE_END {
                assert!(b.value[i] >= a.value[i], "r = {r}");
            }
        }
    }

    #[test]
    fn laplacian_identity_outside_unit_ball() {
        let e = quick(1.0, 1.0, None);
        let radii = [1.5, 2.0, 5.0, 17.0, 60.0, 150.0];
        let res = e.laplacian_identity_residual(&radii).unwrap();
        assert!(res < 1e-6, "{res}");
        for &r in &radii {
            let (_, _, lap) = e.jet(r).unwrap();
            let (y, _) = e.omega_log_state(r).unwrap();
            assert!((lap - (y * y - e.q(r))).abs() < 1e-12);
        }
    }

    #[test]
    fn jet_matches_node_samples() {
        let e = quick(0.0, 1.0, None);
        for i in (0..e.nodes.len()).step_by(97) {
            let (v, s, l) = e.jet(e.nodes[i]).unwrap();
            assert!((v - e.value[i]).abs() < 1e-12 * (1.0 + v.abs()));
            assert!((s - e.slope[i]).abs() < 1e-9 && (l - e.laplacian[i]).abs() < 1e-9);
        }
        let mid = 0.5 * (e.nodes[200] + e.nodes[201]);
        let v = e.jet(mid).unwrap().0;
        assert!(v > e.value[200] && v < e.value[201]);
    }

    #[test]
    fn negative_alpha_and_log_case() {
        let e = quick(-1.0, 1.0, None);
        assert!((e.fit.growth_exponent - 1.5).abs() < 0.1, "{:?}", e.fit);
        let e2 = quick(2.0, 1.0, Some(1.0));
        assert!(e2.fit.monotone_outside_unit_ball);
        assert!(e2.fit.d1 > 0.0);
    }

    #[test]
    fn parameter_validation() {
        let opts = ExhaustionOptions::for_alpha(0.0);
        assert!(solve_exhaustion(2.5, 1.0, 3, &opts).is_err());
        assert!(solve_exhaustion(0.0, -1.0, 3, &opts).is_err());
        assert!(solve_exhaustion(0.0, 1.0, 1, &opts).is_err());
    }
}

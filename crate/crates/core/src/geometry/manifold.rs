use std::sync::Arc;

use serde::Serialize;

use super::grid::RadialGrid;
use super::profile::CurvatureProfile;
use crate::error::{LabError, Result};
use crate::numeric::ode::{integrate, StepControl};
use crate::numeric::{lit, sphere_area, Real};

/// Rescale the integrated pair once its size passes this bound.
const RESCALE_AT: f64 = 1e100;

/// Warping function `h` solving `h'' = G h`, `h(0) = 0`, `h'(0) = 1` on a radial grid.
///
/// Samples are stored as mantissas with a per-node natural-log scale so that
/// exponentially growing solutions (constant or slowly decaying `G` on long
/// domains) never overflow: `h = h_mant * exp(log_scale)`.
#[derive(Debug, Clone)]
pub struct WarpingSolution<T> {
    profile: CurvatureProfile<T>,
    grid: RadialGrid<T>,
    h_mant: Vec<T>,
    dh_mant: Vec<T>,
    log_scale: Vec<T>,
    control: StepControl<T>,
}

/// A warping state at one radius, in scaled form.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WarpState<T> {
    pub h_mant: T,
    pub dh_mant: T,
    pub log_scale: T,
}

impl<T: Real> WarpState<T> {
    pub fn h(&self) -> T {
        self.h_mant * self.log_scale.exp()
    }
    pub fn h_prime(&self) -> T {
        self.dh_mant * self.log_scale.exp()
    }
    pub fn log_h(&self) -> T {
        self.h_mant.ln() + self.log_scale
    }
    /// `h'/h`.
    pub fn log_derivative(&self) -> T {
        self.dh_mant / self.h_mant
    }
}

/// Length of the series launch from the pole.
fn launch_length<T: Real>(g0: T, first_node: T) -> T {
    let s = lit::<T>(1e-4) / (T::one() + g0.sqrt());
    s.min(first_node * lit(0.5))
}

/// Series start `h = s + G0 s^3/6 + G1 s^4/12 + G0^2 s^5/120` with `G1` a slope estimate of `G` at 0.
fn series_launch<T: Real>(profile: &CurvatureProfile<T>, s: T) -> [T; 2] {
    let g0 = profile.value(T::zero());
    let g1 = (profile.value(s) - g0) / s;
    let s2 = s * s;
    let s3 = s2 * s;
    let h = s + g0 * s3 / lit(6.0) + g1 * s3 * s / lit(12.0) + g0 * g0 * s3 * s2 / lit(120.0);
    let dh = T::one() + g0 * s2 * lit(0.5) + g1 * s3 / lit(3.0) + g0 * g0 * s2 * s2 / lit(24.0);
    [h, dh]
}

/// Solve the warping ODE at the default tolerance.
pub fn solve_warping<T: Real>(profile: &CurvatureProfile<T>, grid: &RadialGrid<T>) -> Result<WarpingSolution<T>> {
    solve_warping_with(profile, grid, StepControl::default_adaptive())
}

/// Solve the warping ODE with explicit step control.
pub fn solve_warping_with<T: Real>(
    profile: &CurvatureProfile<T>,
    grid: &RadialGrid<T>,
    control: StepControl<T>,
) -> Result<WarpingSolution<T>> {
    let r_max = grid.r_max();
    if !profile.covers(r_max) {
        return Err(LabError::ProfileDomain {
            r: r_max.as_f64(),
            end: profile.domain_end().map_or(f64::INFINITY, |e| e.0.as_f64()),
        });
    }
    let nodes = grid.nodes();
    let n = nodes.len();
    let mut h_mant = Vec::with_capacity(n);
    let mut dh_mant = Vec::with_capacity(n);
    let mut log_scale = Vec::with_capacity(n);
    h_mant.push(T::zero());
    dh_mant.push(T::one());
    log_scale.push(T::zero());

    let g0 = profile.value(T::zero());
    let s0 = launch_length(g0, nodes[1]);
    let mut y = series_launch(profile, s0);
    let mut x = s0;
    let mut scale = T::zero();
    let mut hint = T::zero();
    let mut rhs = |s: T, y: &[T; 2]| [y[1], profile.value(s) * y[0]];
    for &next in &nodes[1..] {
        y = integrate(&mut rhs, x, y, next, &control, &mut hint)?;
        x = next;
        let size = y[0].abs().max(y[1].abs());
        if size > lit(RESCALE_AT) {
            scale += size.ln();
            y = [y[0] / size, y[1] / size];
        }
        if !(y[0] > T::zero()) {
            return Err(LabError::NonPositive {
                what: "warping function",
                r: next.as_f64(),
                value: y[0].as_f64(),
            });
        }
        h_mant.push(y[0]);
        dh_mant.push(y[1]);
        log_scale.push(scale);
    }
    Ok(WarpingSolution {
        profile: profile.clone(),
        grid: grid.clone(),
        h_mant,
        dh_mant,
        log_scale,
        control,
    })
}

impl<T: Real> WarpingSolution<T> {
    pub fn profile(&self) -> &CurvatureProfile<T> {
        &self.profile
    }

    pub fn grid(&self) -> &RadialGrid<T> {
        &self.grid
    }

    pub fn nodes(&self) -> &[T] {
        self.grid.nodes()
    }

    pub fn len(&self) -> usize {
        self.h_mant.len()
    }

    pub fn is_empty(&self) -> bool {
        self.h_mant.is_empty()
    }

    pub fn state(&self, i: usize) -> WarpState<T> {
        WarpState {
            h_mant: self.h_mant[i],
            dh_mant: self.dh_mant[i],
            log_scale: self.log_scale[i],
        }
    }

    /// `h` at node `i` (may be infinite when the true value overflows).
    pub fn h(&self, i: usize) -> T {
        self.state(i).h()
    }

    pub fn h_prime(&self, i: usize) -> T {
        self.state(i).h_prime()
    }

    /// `h'/h` at node `i > 0`.
    pub fn log_derivative(&self, i: usize) -> T {
        self.state(i).log_derivative()
    }

    pub fn h_samples(&self) -> Vec<T> {
        (0..self.len()).map(|i| self.h(i)).collect()
    }

    pub fn h_prime_samples(&self) -> Vec<T> {
        (0..self.len()).map(|i| self.h_prime(i)).collect()
    }

    /// Exact (integrated) state at an arbitrary radius in `[0, r_max]`.
    pub fn state_at(&self, r: T) -> Result<WarpState<T>> {
        let r_max = self.grid.r_max();
        if !(r >= T::zero()) || r > r_max {
            return Err(LabError::OutOfRange {
                r: r.as_f64(),
                r_max: r_max.as_f64(),
            });
        }
        if r == T::zero() {
            return Ok(self.state(0));
        }
        let i = self.grid.interval_of(r);
        let nodes = self.grid.nodes();
        if r == nodes[i] {
            return Ok(self.state(i));
        }
        if r == nodes[i + 1] {
            return Ok(self.state(i + 1));
        }
        let (x0, y0) = if i == 0 {
            let s0 = launch_length(self.profile.value(T::zero()), nodes[1]);
            if r <= s0 {
                let y = series_launch(&self.profile, r);
                return Ok(WarpState {
                    h_mant: y[0],
                    dh_mant: y[1],
                    log_scale: T::zero(),
                });
            }
            (s0, series_launch(&self.profile, s0))
        } else {
            (nodes[i], [self.h_mant[i], self.dh_mant[i]])
        };
        let mut hint = T::zero();
        let mut rhs = |s: T, y: &[T; 2]| [y[1], self.profile.value(s) * y[0]];
        let y = integrate(&mut rhs, x0, y0, r, &self.control, &mut hint)?;
        Ok(WarpState {
            h_mant: y[0],
            dh_mant: y[1],
            log_scale: self.log_scale[i],
        })
    }

    /// `h'/h` at a radius via cubic Hermite interpolation of the node values
    /// (slopes from the Riccati form `(h'/h)' = G - (h'/h)^2`).
    ///
    /// Cheap and fourth-order accurate; used for PDE coefficients evaluated
    /// at many off-node points.
    pub fn log_derivative_interp(&self, r: T) -> T {
        let nodes = self.grid.nodes();
        let i = self.grid.interval_of(r);
        if i == 0 {
            return self.state_at(r).map(|s| s.log_derivative()).unwrap_or_else(|_| T::nan());
        }
        let (x0, x1) = (nodes[i], nodes[i + 1]);
        let z0 = self.log_derivative(i);
        let z1 = self.log_derivative(i + 1);
        let d0 = self.profile.value(x0) - z0 * z0;
        let d1 = self.profile.value(x1) - z1 * z1;
        crate::numeric::interp::hermite(x0, x1, z0, z1, d0, d1, r)
    }
}

/// `(f, f', f'')` for `f = h^(d-1)`, using `h'' = G h`.
fn density_jet<T: Real>(s: &WarpState<T>, g: T, d: usize) -> [T; 3] {
    let p = T::from_usize_lossy(d - 1);
    let (h, dh) = (s.h(), s.h_prime());
    let f = h.powf(p);
    let f1 = p * h.powf(p - T::one()) * dh;
    let curv = if d >= 3 {
        p * (p - T::one()) * h.powf(p - lit(2.0)) * dh * dh
    } else {
        T::zero()
    };
    [f, f1, curv + p * h.powf(p - T::one()) * g * h]
}

/// Two-point Hermite rule with first and second derivatives, exact for quintics.
fn quintic_panel<T: Real>(w: T, a: [T; 3], b: [T; 3]) -> T {
    w * lit::<T>(0.5) * (a[0] + b[0]) + w * w / lit(10.0) * (a[1] - b[1]) + w * w * w / lit(120.0) * (a[2] + b[2])
}

/// Dimension plus a shared warping solution.
#[derive(Debug, Clone)]
pub struct ModelManifold<T> {
    d: usize,
    warping: Arc<WarpingSolution<T>>,
    area: T,
    cumulative: Vec<T>,
}

impl<T: Real> ModelManifold<T> {
    pub fn new(d: usize, warping: Arc<WarpingSolution<T>>) -> Result<Self> {
        if d < 2 {
            return Err(LabError::InvalidParameter {
                name: "d",
                value: d as f64,
                range: "integers >= 2",
            });
        }
        let area = sphere_area::<T>(d);
        let nodes = warping.nodes();
        let mut cumulative = Vec::with_capacity(nodes.len());
        let mut acc = T::zero();
        cumulative.push(acc);
        let jet = |i: usize| density_jet(&warping.state(i), warping.profile().value(nodes[i]), d);
        let mut prev = jet(0);
        for i in 1..nodes.len() {
            let cur = jet(i);
            acc += quintic_panel(nodes[i] - nodes[i - 1], prev, cur);
            cumulative.push(acc);
            prev = cur;
        }
        Ok(Self {
            d,
            warping,
            area,
            cumulative,
        })
    }

    /// Solve the warping ODE and attach a dimension.
    pub fn from_profile(profile: &CurvatureProfile<T>, grid: &RadialGrid<T>, d: usize) -> Result<Self> {
        Self::new(d, Arc::new(solve_warping(profile, grid)?))
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn warping(&self) -> &WarpingSolution<T> {
        &self.warping
    }

    pub fn shared_warping(&self) -> Arc<WarpingSolution<T>> {
        Arc::clone(&self.warping)
    }

    pub fn grid(&self) -> &RadialGrid<T> {
        self.warping.grid()
    }

    pub fn nodes(&self) -> &[T] {
        self.warping.nodes()
    }

    pub fn r_max(&self) -> T {
        self.grid().r_max()
    }

    /// `C(d)`: area of the unit (d-1)-sphere.
    pub fn sphere_area(&self) -> T {
        self.area
    }

    /// `C(d) h(r)^(d-1)`: the radial volume density.
    pub fn area_density(&self, r: T) -> Result<T> {
        let s = self.warping.state_at(r)?;
        Ok(self.area * s.h().powi(self.d as i32 - 1))
    }

    /// `V_G(R) = C(d) * integral_0^R h^(d-1)`.
    pub fn volume_ball(&self, radius: T) -> Result<T> {
        let r_max = self.r_max();
        if !(radius >= T::zero()) || radius > r_max {
            return Err(LabError::OutOfRange {
                r: radius.as_f64(),
                r_max: r_max.as_f64(),
            });
        }
        let nodes = self.nodes();
        let i = self.grid().interval_of(radius);
        let mut v = self.cumulative[i];
        if radius > nodes[i] {
            let profile = self.warping.profile();
            let a = density_jet(&self.warping.state(i), profile.value(nodes[i]), self.d);
            let b = density_jet(&self.warping.state_at(radius)?, profile.value(radius), self.d);
            v += quintic_panel(radius - nodes[i], a, b);
        }
        let v = v * self.area;
        if v.is_finite() {
            Ok(v)
        } else {
            Err(LabError::Overflow(radius.as_f64()))
        }
    }

    /// Volume of the closed annulus `R <= r <= R2`.
    pub fn volume_annulus(&self, inner: T, outer: T) -> Result<T> {
        Ok(self.volume_ball(outer)? - self.volume_ball(inner)?)
    }

    /// Volumes at every grid node.
    pub fn node_volumes(&self) -> Vec<T> {
        self.cumulative.iter().map(|c| *c * self.area).collect()
    }

    /// Upper bound `(d-1) h'(r)/h(r)` for the Laplacian of the distance from the pole.
    pub fn laplacian_comparison(&self, r: T) -> Result<T> {
        if r == T::zero() {
            return Err(LabError::Singular("Laplacian of distance at the pole"));
        }
        let s = self.warping.state_at(r)?;
        Ok(T::from_usize_lossy(self.d - 1) * s.log_derivative())
    }

    pub fn volume_table(&self, radii: &[T]) -> Result<VolumeTable> {
        let mut volumes = Vec::with_capacity(radii.len());
        for &r in radii {
            volumes.push(self.volume_ball(r)?.as_f64());
        }
        Ok(VolumeTable {
            d: self.d,
            sphere_area: self.area.as_f64(),
            radii: radii.iter().map(|r| r.as_f64()).collect(),
            volumes,
        })
    }
}

/// Ball volumes at selected radii, with the sphere constant used.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VolumeTable {
    pub d: usize,
    pub sphere_area: f64,
    pub radii: Vec<f64>,
    pub volumes: Vec<f64>,
}

impl VolumeTable {
    /// `V_G(R)` divided by the Euclidean ball volume `C(d) R^d / d`.
    pub fn euclidean_ratios(&self) -> Vec<f64> {
        let dd = self.d as f64;
        self.radii
            .iter()
            .zip(&self.volumes)
            .map(|(r, v)| v / (self.sphere_area * r.powf(dd) / dd))
            .collect()
    }

    /// Rows `(R, V_G, ratio)` for CSV output.
    pub fn rows(&self) -> Vec<(f64, f64, f64)> {
        self.radii
            .iter()
            .zip(&self.volumes)
            .zip(self.euclidean_ratios())
            .map(|((r, v), q)| (*r, *v, q))
            .collect()
    }
}

/// Monotonicity report for `V_low(R)/V_high(R)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BishopGromovReport {
    pub d: usize,
    pub radii: Vec<f64>,
    pub ratios: Vec<f64>,
    pub nonincreasing: bool,
    /// Largest relative increase between consecutive radii (<= 0 when monotone).
    pub max_relative_increase: f64,
    pub first_violation: Option<usize>,
}

/// Check that the low profile is pointwise below the high profile on the grid
/// (nodes and interval midpoints).
pub fn check_profiles_ordered<T: Real>(
    low: &CurvatureProfile<T>,
    high: &CurvatureProfile<T>,
    grid: &RadialGrid<T>,
) -> Result<()> {
    let nodes = grid.nodes();
    let mut points: Vec<T> = nodes.to_vec();
    points.extend(nodes.windows(2).map(|w| (w[0] + w[1]) * lit(0.5)));
    for r in points {
        let (a, b) = (low.eval(r)?, high.eval(r)?);
        if a > b + lit::<T>(1e-13) * (T::one() + b.abs()) {
            return Err(LabError::NotOrdered {
                r: r.as_f64(),
                low: a.as_f64(),
                high: b.as_f64(),
            });
        }
    }
    Ok(())
}

/// Volume-ratio monotonicity for ordered profiles, with relative tolerance per step.
pub fn bishop_gromov_ratio_check<T: Real>(
    low: &CurvatureProfile<T>,
    high: &CurvatureProfile<T>,
    d: usize,
    radii: &[T],
    grid: &RadialGrid<T>,
    tol: f64,
) -> Result<BishopGromovReport> {
    check_profiles_ordered(low, high, grid)?;
    let m_low = ModelManifold::from_profile(low, grid, d)?;
    let m_high = ModelManifold::from_profile(high, grid, d)?;
    let mut ratios = Vec::with_capacity(radii.len());
    for &r in radii {
        ratios.push((m_low.volume_ball(r)? / m_high.volume_ball(r)?).as_f64());
    }
    let mut max_inc = f64::NEG_INFINITY;
    let mut first_violation = None;
    for (i, w) in ratios.windows(2).enumerate() {
        let inc = (w[1] - w[0]) / w[0];
        max_inc = max_inc.max(inc);
        if inc > tol && first_violation.is_none() {
            first_violation = Some(i + 1);
        }
    }
    Ok(BishopGromovReport {
        d,
        radii: radii.iter().map(|r| r.as_f64()).collect(),
        ratios,
        nonincreasing: first_violation.is_none(),
        max_relative_increase: if max_inc.is_finite() { max_inc } else { 0.0 },
        first_violation,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    fn grid(r_max: f64, n: usize) -> RadialGrid<f64> {
        RadialGrid::uniform(r_max, n).unwrap()
    }

    #[test]
    fn flat_warping_is_identity() {
        let w = solve_warping(&CurvatureProfile::flat(), &grid(10.0, 64)).unwrap();
        for (i, r) in w.nodes().iter().enumerate().skip(1) {
            assert!((w.h(i) / r - 1.0).abs() < 1e-10);
            assert!((w.h_prime(i) - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn constant_curvature_gives_sinh() {
        let w = solve_warping(&CurvatureProfile::constant(1.0).unwrap(), &grid(10.0, 100)).unwrap();
        for r in [1.0, 5.0, 10.0] {
            let i = w.grid().find_node(r).unwrap();
            assert!((w.h(i) / r.sinh() - 1.0).abs() < 1e-9, "r = {r}");
            assert!((w.h_prime(i) / r.cosh() - 1.0).abs() < 1e-9);
        }
        let s = w.state_at(2.345).unwrap();
        assert!((s.h() / 2.345f64.sinh() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn long_domains_do_not_overflow() {
        let w = solve_warping(&CurvatureProfile::constant(1.0).unwrap(), &grid(2000.0, 400)).unwrap();
        let last = w.len() - 1;
        assert!((w.log_derivative(last) - 1.0).abs() < 1e-9);
        let log_h = w.state(last).log_h();
        assert!((log_h - (2000.0 - 2f64.ln())).abs() < 1e-6);
    }

    #[test]
    fn euclidean_ball_volumes() {
        let m = ModelManifold::from_profile(&CurvatureProfile::flat(), &grid(2.0, 32), 3).unwrap();
        assert!((m.volume_ball(1.0).unwrap() - 4.0 * PI / 3.0).abs() < 1e-12);
        let ratio = m.volume_ball(2.0).unwrap() / m.volume_ball(1.0).unwrap();
        assert!((ratio - 8.0).abs() < 1e-12);
        let off = m.volume_ball(0.77).unwrap();
        assert!((off - 4.0 * PI / 3.0 * 0.77f64.powi(3)).abs() < 1e-12);
    }

    #[test]
    fn hyperbolic_disc_area() {
        let m = ModelManifold::from_profile(&CurvatureProfile::constant(1.0).unwrap(), &grid(1.0, 32), 2).unwrap();
        let exact = 2.0 * PI * (1f64.cosh() - 1.0);
        assert!((m.volume_ball(1.0).unwrap() / exact - 1.0).abs() < 1e-9);
    }

    #[test]
    fn laplacian_comparison_closed_forms() {
        let flat = ModelManifold::from_profile(&CurvatureProfile::flat(), &grid(4.0, 32), 3).unwrap();
        assert!((flat.laplacian_comparison(2.0).unwrap() - 1.0).abs() < 1e-10);
        assert!(flat.laplacian_comparison(0.0).is_err());
        let hyp = ModelManifold::from_profile(&CurvatureProfile::constant(1.0).unwrap(), &grid(4.0, 32), 2).unwrap();
        assert!((hyp.laplacian_comparison(1.0).unwrap() - 1.0 / 1f64.tanh()).abs() < 1e-9);
    }

    #[test]
    fn volume_beyond_grid_is_an_error() {
        let m = ModelManifold::from_profile(&CurvatureProfile::flat(), &grid(1.0, 16), 3).unwrap();
        assert!(m.volume_ball(1.5).is_err());
    }

    #[test]
    fn profile_domain_shorter_than_grid() {
        let p = CurvatureProfile::power_tail(1.0, 1.0, 5.0).unwrap();
        assert!(solve_warping(&p, &grid(5.0, 20)).is_err());
        assert!(solve_warping(&p, &grid(4.5, 20)).is_ok());
    }

    #[test]
    fn volume_table_ratio_tends_to_one_near_pole() {
        let m = ModelManifold::from_profile(&CurvatureProfile::standard(1.0, 0.0).unwrap(), &grid(1.0, 64), 3).unwrap();
        let t = m.volume_table(&[1e-3, 1e-2, 0.5]).unwrap();
        let q = t.euclidean_ratios();
        assert!((q[0] - 1.0).abs() < 1e-6);
        assert!(q[2] > q[1] && q[1] > q[0] * (1.0 - 1e-12));
    }

    #[test]
    fn bishop_gromov_flat_vs_hyperbolic() {
        let g = grid(8.0, 160);
        let rep = bishop_gromov_ratio_check(
            &CurvatureProfile::flat(),
            &CurvatureProfile::constant(1.0).unwrap(),
            3,
            &[1.0, 2.0, 4.0, 8.0],
            &g,
            1e-9,
        )
        .unwrap();
        assert!(rep.nonincreasing);
        assert!(rep.ratios.windows(2).all(|w| w[1] < w[0]));
        // Closed forms: 4 pi r^3/3 against pi (sinh 2r - 2r).
        for (r, q) in rep.radii.iter().zip(&rep.ratios) {
            let exact = (4.0 * PI * r.powi(3) / 3.0) / (PI * ((2.0 * r).sinh() - 2.0 * r));
            assert!((q / exact - 1.0).abs() < 1e-8, "r = {r}");
        }
    }

    #[test]
    fn bishop_gromov_identity_and_order_error() {
        let g = grid(4.0, 64);
        let p = CurvatureProfile::standard(1.0, 2.0).unwrap();
        let rep = bishop_gromov_ratio_check(&p, &p, 3, &[1.0, 2.0, 4.0], &g, 1e-9).unwrap();
        assert!(rep.ratios.iter().all(|q| (q - 1.0).abs() < 1e-14));
        let one = CurvatureProfile::constant(1.0).unwrap();
        assert!(matches!(
            bishop_gromov_ratio_check(&one, &p, 3, &[1.0], &g, 1e-9),
            Err(LabError::NotOrdered { .. })
        ));
        let rep = bishop_gromov_ratio_check(&p, &one, 3, &[0.5, 1.0, 2.0, 4.0], &g, 1e-9).unwrap();
        assert!(rep.nonincreasing);
    }

    #[test]
    fn single_precision_warping() {
        let g = RadialGrid::<f32>::uniform(3.0, 32).unwrap();
        let w = solve_warping(&CurvatureProfile::constant(1.0f32).unwrap(), &g).unwrap();
        let last = w.len() - 1;
        assert!((w.h(last) / 3f32.sinh() - 1.0).abs() < 1e-4);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]
        #[test]
        fn nonnegative_curvature_gives_convex_warping(kappa in 0.0f64..2.0, alpha in -2.0f64..2.0) {
            let p = CurvatureProfile::standard(kappa, alpha).unwrap();
            let w = solve_warping(&p, &grid(4.0, 40)).unwrap();
            for (i, r) in w.nodes().iter().enumerate().skip(1) {
                prop_assert!(w.h(i) >= r * (1.0 - 1e-12));
                prop_assert!(w.h_prime(i) >= 1.0 - 1e-12);
            }
            prop_assert!(w.h_prime_samples().windows(2).all(|p| p[1] >= p[0] - 1e-12));
        }

        #[test]
        fn volumes_strictly_increase(kappa in 0.0f64..2.0, alpha in -2.0f64..2.0, d in 2usize..6) {
            let p = CurvatureProfile::standard(kappa, alpha).unwrap();
            let m = ModelManifold::from_profile(&p, &grid(3.0, 30), d).unwrap();
            prop_assert!(m.node_volumes().windows(2).all(|v| v[1] > v[0]));
        }
    }
}

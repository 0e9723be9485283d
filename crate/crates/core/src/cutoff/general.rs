//! Cut-off functions obtained by composing a quintic step with the exhaustion function.

use serde::Serialize;

use super::exhaustion::{ExhaustionProfile, GLUE_END};
use super::step::SmoothStep;
use crate::error::{check_range, LabError, Result};
use crate::numeric::fit::spread;

/// How the transition levels of the step are placed on the exhaustion function.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum CutoffFamily {
    /// Levels `D₂ R^e` and `D₁ (gamma R)^e`; needs `gamma^e > D₂/D₁`.
    Rescaled,
    /// Levels `max_{r<=R} profile` and `profile(gamma R)`; valid for every `gamma > 1`.
    LevelNormalized,
    /// Rescaled when admissible, otherwise level-normalized.
    Auto,
    /// Annulus construction for quadratic curvature decay.
    Annulus,
    /// Member of an exhaustion sequence with doubling levels.
    Sequence,
}

/// Radial samples of a cut-off function together with its sup norms.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CutoffProfile {
    pub family: CutoffFamily,
    pub alpha: f64,
    pub d: usize,
    /// Radius of the ball where the function must equal one.
    pub plateau_radius: f64,
    /// Radius beyond which the function must vanish.
    pub support_radius: f64,
    /// `support_radius / plateau_radius`.
    pub gamma: f64,
    /// Values of the underlying radial function where the step starts and ends.
    pub levels: (f64, f64),
    /// `D₂/D₁` translated to a radius ratio, when an exhaustion function is involved.
    pub gamma_threshold: Option<f64>,
    pub nodes: Vec<f64>,
    pub phi: Vec<f64>,
    pub grad: Vec<f64>,
    pub laplacian: Vec<f64>,
    pub sup_grad: f64,
    pub sup_laplacian: f64,
}

/// Numerical checklist of the cut-off definition for one profile.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CutoffCheck {
    pub in_unit_interval: bool,
    pub plateau: bool,
    pub support: bool,
    pub finite: bool,
    /// Largest `1 - phi` on the plateau.
    pub plateau_defect: f64,
    /// Largest `phi` beyond the support radius.
    pub support_excess: f64,
}

impl CutoffCheck {
    pub fn passed(&self) -> bool {
        self.in_unit_interval && self.plateau && self.support && self.finite
    }
}

impl CutoffProfile {
    /// `sup |phi'| * R`.
    pub fn grad_constant(&self) -> f64 {
        self.sup_grad * self.plateau_radius
    }

    /// `sup |Δphi| * R^(1 + alpha/2)`.
    pub fn laplacian_constant(&self) -> f64 {
        self.sup_laplacian * self.plateau_radius.powf(1.0 + self.alpha / 2.0)
    }

    /// Checks `0 <= phi <= 1`, `phi = 1` on `[0, plateau]`, `phi = 0` on `[support, ...)` at sampled nodes.
    pub fn certify(&self, tol: f64) -> CutoffCheck {
        let mut check = CutoffCheck {
            in_unit_interval: true,
            plateau: true,
            support: true,
            finite: true,
            plateau_defect: 0.0,
            support_excess: 0.0,
        };
        for i in 0..self.nodes.len() {
            let (r, v) = (self.nodes[i], self.phi[i]);
            if !(v.is_finite() && self.grad[i].is_finite() && self.laplacian[i].is_finite()) {
                check.finite = false;
            }
            if !(-tol..=1.0 + tol).contains(&v) {
                check.in_unit_interval = false;
            }
            if r <= self.plateau_radius {
                check.plateau_defect = check.plateau_defect.max(1.0 - v);
            }
            if r >= self.support_radius {
                check.support_excess = check.support_excess.max(v.abs());
            }
        }
        check.plateau = check.plateau_defect <= tol;
        check.support = check.support_excess <= tol;
        check
    }

    /// Whether the function equals one on `[0, radius]` at every sampled node.
    pub fn equals_one_on(&self, radius: f64, tol: f64) -> bool {
        self.nodes
            .iter()
            .zip(&self.phi)
            .filter(|(r, _)| **r <= radius)
            .all(|(_, v)| (1.0 - v).abs() <= tol)
    }
}

/// Composes the falling unit step with `levels` on a radial function given by its jet.
pub(crate) fn compose<F>(nodes: &[f64], levels: (f64, f64), mut jet: F) -> Result<(Vec<f64>, Vec<f64>, Vec<f64>)>
where
    F: FnMut(f64) -> Result<(f64, f64, f64)>,
{
    let width = levels.1 - levels.0;
    let step = SmoothStep::falling(0.0, 1.0)?;
    let mut phi = Vec::with_capacity(nodes.len());
    let mut grad = Vec::with_capacity(nodes.len());
    let mut lap = Vec::with_capacity(nodes.len());
    for &r in nodes {
        let (v, v1, vlap) = jet(r)?;
        let (s, s1, s2) = step.eval((v - levels.0) / width);
        phi.push(s);
        grad.push(s1 * v1 / width);
        lap.push(s2 * v1 * v1 / (width * width) + s1 * vlap / width);
    }
    Ok((phi, grad, lap))
}

fn sup_abs(xs: &[f64]) -> f64 {
    xs.iter().fold(0.0, |m, x| m.max(x.abs()))
}

/// Uniform sampling of `[0, 1.1 * outer]` with the two radii inserted.
fn sampling_nodes(plateau: f64, support: f64, n: usize) -> Vec<f64> {
    let top = 1.1 * support;
    let mut nodes: Vec<f64> = (0..=n).map(|i| top * i as f64 / n as f64).collect();
    nodes.push(plateau);
    nodes.push(support);
    nodes.sort_by(|a, b| a.partial_cmp(b).expect("finite nodes"));
    nodes.dedup();
    nodes
}

const SAMPLES: usize = 3000;

/// Radius-ratio threshold `(D₂/D₁)^(1/(1 - alpha/2))` of the rescaled family.
pub fn gamma_threshold(exh: &ExhaustionProfile) -> f64 {
    if exh.alpha >= 2.0 {
        f64::INFINITY
    } else {
        exh.fit.level_ratio().powf(1.0 / (1.0 - exh.alpha / 2.0))
    }
}

/// Cut-off equal to one on `B_R` and supported in `B_{gamma R}`, built on `exh`.
pub fn build_cutoff_general(exh: &ExhaustionProfile, radius: f64, gamma: f64, family: CutoffFamily) -> Result<CutoffProfile> {
    check_range("R", radius, GLUE_END, f64::MAX, "[1, inf)")?;
    check_range("gamma", gamma, 1.0 + 1e-12, f64::MAX, "(1, inf)")?;
    let outer = gamma * radius;
    if 1.1 * outer > exh.r_eval() {
        return Err(LabError::InsufficientDomain {
            needed: 1.1 * outer,
            available: exh.r_eval(),
        });
    }
    let threshold = gamma_threshold(exh);
    let rescaled_ok = gamma > threshold;
    let family = match family {
        CutoffFamily::Auto if rescaled_ok => CutoffFamily::Rescaled,
        CutoffFamily::Auto => CutoffFamily::LevelNormalized,
        CutoffFamily::Rescaled if !rescaled_ok => {
            return Err(LabError::InvalidParameter {
                name: "gamma",
                value: gamma,
                range: "above the exhaustion threshold (D2/D1)^(1/(1-alpha/2))",
            })
        }
        CutoffFamily::Rescaled | CutoffFamily::LevelNormalized => family,
        CutoffFamily::Annulus | CutoffFamily::Sequence => {
            return Err(LabError::InvalidParameter {
                name: "family",
                value: f64::NAN,
                range: "Rescaled, LevelNormalized or Auto",
            })
        }
    };
    let levels = match family {
        CutoffFamily::Rescaled => {
            let e = 1.0 - exh.alpha / 2.0;
            // A relative margin keeps the sampled sandwich strict between nodes.
            (exh.fit.d2 * radius.powf(e) * (1.0 + 1e-9), exh.fit.d1 * outer.powf(e) * (1.0 - 1e-9))
        }
        _ => (exh.max_on(radius)?, exh.jet(outer)?.0),
    };
    if !(levels.1 > levels.0) {
        return Err(LabError::NotOrdered {
            r: outer,
            low: levels.1,
            high: levels.0,
        });
    }
    let nodes = sampling_nodes(radius, outer, SAMPLES);
    let (phi, grad, laplacian) = compose(&nodes, levels, |r| exh.jet(r))?;
    Ok(CutoffProfile {
        family,
        alpha: exh.alpha,
        d: exh.d,
        plateau_radius: radius,
        support_radius: outer,
        gamma,
        levels,
        gamma_threshold: Some(threshold),
        sup_grad: sup_abs(&grad),
        sup_laplacian: sup_abs(&laplacian),
        nodes,
        phi,
        grad,
        laplacian,
    })
}

/// Exhaustion sequence with levels `c_n = c_1 2^(n-1)` and its rate table.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SequenceReport {
    pub alpha: f64,
    pub levels: Vec<f64>,
    /// `max_n |c_{n+1}/c_n - 2| * n`; at most one when the ratio condition holds.
    pub ratio_defect: f64,
    /// `closure{phi_n > 0}` contained in `{phi_{n+1} = 1}` for every `n`.
    pub nested: bool,
    /// Every member equals one on the plateau of the first.
    pub eventually_one: bool,
    pub sup_grad: Vec<f64>,
    pub sup_laplacian: Vec<f64>,
    /// `sup |phi_n'| n^(1/(1-alpha/2))` (empty for `alpha = 2`).
    pub grad_products: Vec<f64>,
    /// `sup |Δphi_n| n^((1+alpha/2)/(1-alpha/2))` (empty for `alpha = 2`).
    pub laplacian_products: Vec<f64>,
    pub grad_nonincreasing: bool,
    pub laplacian_nonincreasing: bool,
    pub checks: Vec<CutoffCheck>,
}

impl SequenceReport {
    pub fn grad_product_spread(&self) -> f64 {
        spread(&self.grad_products)
    }

    pub fn max_grad_product(&self) -> f64 {
        self.grad_products.iter().cloned().fold(0.0, f64::max)
    }

    pub fn max_laplacian_product(&self) -> f64 {
        self.laplacian_products.iter().cloned().fold(0.0, f64::max)
    }
}

fn nonincreasing_from_second(xs: &[f64]) -> bool {
    xs.windows(2).skip(1).all(|w| w[1] <= w[0] * (1.0 + 1e-9))
}

/// Builds `phi_1, ..., phi_{n_max}` with `phi_n = 1` on `{profile <= c_n}` and `0` on `{profile >= c_{n+1}}`.
pub fn build_sequence(exh: &ExhaustionProfile, n_max: usize) -> Result<(Vec<CutoffProfile>, SequenceReport)> {
    check_range("n_max", n_max as f64, 1.0, 64.0, "{1, ..., 64}")?;
    if exh.alpha <= -2.0 {
        return Err(LabError::InvalidParameter {
            name: "alpha",
            value: exh.alpha,
            range: "(-2, 2]",
        });
    }
    let c1 = 1.25 * exh.max_on(GLUE_END)?;
    let levels: Vec<f64> = (0..=n_max).map(|k| c1 * 2f64.powi(k as i32)).collect();
    let radii: Vec<f64> = levels.iter().map(|&c| exh.radius_of_level(c)).collect::<Result<_>>()?;
    let top = 1.1 * radii[n_max];
    if top > exh.r_eval() {
        return Err(LabError::InsufficientDomain {
            needed: top,
            available: exh.r_eval(),
        });
    }
    let mut profiles = Vec::with_capacity(n_max);
    for n in 0..n_max {
        let nodes = sampling_nodes(radii[n], radii[n + 1], SAMPLES);
        let lv = (levels[n], levels[n + 1]);
        let (phi, grad, laplacian) = compose(&nodes, lv, |r| exh.jet(r))?;
        profiles.push(CutoffProfile {
            family: CutoffFamily::Sequence,
            alpha: exh.alpha,
            d: exh.d,
            plateau_radius: radii[n],
            support_radius: radii[n + 1],
            gamma: radii[n + 1] / radii[n],
            levels: lv,
            gamma_threshold: None,
            sup_grad: sup_abs(&grad),
            sup_laplacian: sup_abs(&laplacian),
            nodes,
            phi,
            grad,
            laplacian,
        });
    }
    let tol = 1e-12;
    let checks: Vec<CutoffCheck> = profiles.iter().map(|p| p.certify(tol)).collect();
    let nested = profiles.windows(2).all(|w| {
        // Support of phi_n ends where phi_{n+1} starts to leave one.
        w[0].support_radius <= w[1].plateau_radius * (1.0 + 1e-12) && w[1].equals_one_on(w[0].support_radius, tol)
    });
    let k = profiles[0].plateau_radius;
    let eventually_one = profiles.iter().all(|p| p.equals_one_on(k, tol));
    let ratio_defect = levels
        .windows(2)
        .enumerate()
        .map(|(i, w)| (w[1] / w[0] - 2.0).abs() * (i + 1) as f64)
        .fold(0.0, f64::max);
    let sup_grad: Vec<f64> = profiles.iter().map(|p| p.sup_grad).collect();
    let sup_laplacian: Vec<f64> = profiles.iter().map(|p| p.sup_laplacian).collect();
    let (grad_products, laplacian_products) = if exh.alpha < 2.0 {
        let e = 1.0 - exh.alpha / 2.0;
        let gp = sup_grad.iter().enumerate().map(|(i, g)| g * ((i + 1) as f64).powf(1.0 / e)).collect();
        let lp = sup_laplacian
            .iter()
            .enumerate()
            .map(|(i, g)| g * ((i + 1) as f64).powf((1.0 + exh.alpha / 2.0) / e))
            .collect();
        (gp, lp)
    } else {
        (Vec::new(), Vec::new())
    };
    let report = SequenceReport {
        alpha: exh.alpha,
        ratio_defect,
        nested,
        eventually_one,
        grad_nonincreasing: nonincreasing_from_second(&sup_grad),
        laplacian_nonincreasing: nonincreasing_from_second(&sup_laplacian),
        levels,
        sup_grad,
        sup_laplacian,
        grad_products,
        laplacian_products,
        checks,
    };
    Ok((profiles, report))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cutoff::exhaustion::{solve_exhaustion, ExhaustionOptions};

    fn exh(alpha: f64) -> ExhaustionProfile {
        solve_exhaustion(alpha, 1.0, 3, &ExhaustionOptions::for_alpha(alpha)).unwrap()
    }

    #[test]
    fn plateau_and_support_hold() {
        let e = exh(1.0);
        for r in [1.0, 3.0, 10.0] {
            let c = build_cutoff_general(&e, r, 3.0, CutoffFamily::LevelNormalized).unwrap();
            let chk = c.certify(1e-12);
            assert!(chk.passed(), "{chk:?}");
            assert!(c.sup_grad > 0.0 && c.sup_laplacian > 0.0);
        }
    }

    #[test]
    fn rescaled_family_respects_threshold() {
        let e = exh(0.0);
        let thr = gamma_threshold(&e);
        assert!(thr > 1.0 && thr < 3.0, "{thr}");
        let c = build_cutoff_general(&e, 4.0, 3.0, CutoffFamily::Rescaled).unwrap();
        assert!(c.certify(1e-12).passed());
        assert!(build_cutoff_general(&e, 4.0, 0.5 * (1.0 + thr), CutoffFamily::Rescaled).is_err());
        let auto = build_cutoff_general(&e, 4.0, 0.5 * (1.0 + thr), CutoffFamily::Auto).unwrap();
        assert_eq!(auto.family, CutoffFamily::LevelNormalized);
    }

    #[test]
    fn laplacian_rate_across_radius_sweep() {
        let e = exh(1.0);
        let consts: Vec<f64> = [1.0, 2.0, 4.0, 8.0, 16.0]
            .iter()
            .map(|&r| build_cutoff_general(&e, r, 3.0, CutoffFamily::LevelNormalized).unwrap().laplacian_constant())
            .collect();
        assert!(spread(&consts) < 4.0, "{consts:?}");
    }

    #[test]
    fn gradient_vanishes_as_radius_grows() {
        let e = exh(0.0);
        let a = build_cutoff_general(&e, 1.0, 3.0, CutoffFamily::Auto).unwrap();
        let b = build_cutoff_general(&e, 16.0, 3.0, CutoffFamily::Auto).unwrap();
        assert!(b.sup_grad < a.sup_grad / 8.0);
    }

    #[test]
    fn domain_and_parameter_errors() {
        let e = exh(0.0);
        assert!(build_cutoff_general(&e, 0.5, 3.0, CutoffFamily::Auto).is_err());
        assert!(build_cutoff_general(&e, 2.0, 1.0, CutoffFamily::Auto).is_err());
        assert!(matches!(
            build_cutoff_general(&e, 400.0, 3.0, CutoffFamily::Auto),
            Err(LabError::InsufficientDomain { .. })
        ));
    }

    #[test]
    fn sequence_is_nested_with_linear_rate() {
        let e = exh(0.0);
        let (profiles, rep) = build_sequence(&e, 8).unwrap();
        assert_eq!(profiles.len(), 8);
        assert!(rep.nested && rep.eventually_one);
        assert!(rep.ratio_defect <= 1.0);
        assert!(rep.checks.iter().all(|c| c.passed()));
        assert!(rep.grad_nonincreasing && rep.laplacian_nonincreasing, "{rep:?}");
        assert!(rep.max_grad_product().is_finite() && rep.max_grad_product() <= 2.0 * rep.grad_products[0]);
    }

    #[test]
    fn sequence_needs_room() {
        let e = exh(1.0);
        assert!(matches!(build_sequence(&e, 30), Err(LabError::InsufficientDomain { .. })));
    }
}

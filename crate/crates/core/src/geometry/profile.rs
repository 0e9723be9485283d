use crate::error::{check_range, LabError, Result};
use crate::numeric::interp::MonotoneCubic;
use crate::numeric::{lit, Real};

/// Radial curvature lower-bound function `G(r) >= 0`.
///
/// A model manifold built from `G` has radial Ricci curvature
/// `-(d-1) G(r)`; every radial quantity derives from the warping ODE
/// `h'' = G h`.
#[derive(Debug, Clone, PartialEq)]
pub enum CurvatureProfile<T> {
    /// `kappa^2 / (1 + r^2)^(alpha/2)`.
    Standard { kappa: T, alpha: T },
    /// Constant value `G` (pass `kappa^2`).
    Constant { value: T },
    /// `kappa^2 / (r0 - s)^alpha` on `[0, r0)`: the majorant used for off-pole balls.
    PowerTail { kappa: T, alpha: T, r0: T },
    /// `kappa^2 / (1 + r0 - s)^alpha` on `[0, 1 + r0)`: the majorant for negative `alpha`.
    ShiftedTail { kappa: T, alpha: T, r0: T },
    /// `kappa^2 / (1 + (center - s)^2)^(alpha/2)`: the standard profile seen from a point at distance `center`.
    Centered { kappa: T, alpha: T, center: T },
    /// Monotone-cubic interpolation of samples starting at `r = 0`.
    Tabulated(MonotoneCubic<T>),
    /// Pointwise sum; used to build ordered pairs `G <= G + bump`.
    Sum(Box<CurvatureProfile<T>>, Box<CurvatureProfile<T>>),
}

fn validate_kappa_alpha<T: Real>(kappa: T, alpha: T) -> Result<()> {
    check_range("kappa", kappa.as_f64(), 0.0, f64::MAX, "[0, inf)")?;
    check_range("alpha", alpha.as_f64(), -2.0, 2.0, "[-2, 2]")
}

impl<T: Real> CurvatureProfile<T> {
    pub fn standard(kappa: T, alpha: T) -> Result<Self> {
        validate_kappa_alpha(kappa, alpha)?;
        Ok(Self::Standard { kappa, alpha })
    }

    pub fn constant(value: T) -> Result<Self> {
        check_range("G", value.as_f64(), 0.0, f64::MAX, "[0, inf)")?;
        Ok(Self::Constant { value })
    }

    pub fn flat() -> Self {
        Self::Constant { value: T::zero() }
    }

    pub fn power_tail(kappa: T, alpha: T, r0: T) -> Result<Self> {
        validate_kappa_alpha(kappa, alpha)?;
        check_range("r0", r0.as_f64(), f64::MIN_POSITIVE, f64::MAX, "(0, inf)")?;
        Ok(Self::PowerTail { kappa, alpha, r0 })
    }

    pub fn shifted_tail(kappa: T, alpha: T, r0: T) -> Result<Self> {
        validate_kappa_alpha(kappa, alpha)?;
        check_range("r0", r0.as_f64(), 0.0, f64::MAX, "[0, inf)")?;
        Ok(Self::ShiftedTail { kappa, alpha, r0 })
    }

    pub fn centered(kappa: T, alpha: T, center: T) -> Result<Self> {
        validate_kappa_alpha(kappa, alpha)?;
        check_range("center", center.as_f64(), 0.0, f64::MAX, "[0, inf)")?;
        Ok(Self::Centered { kappa, alpha, center })
    }

    pub fn tabulated(xs: Vec<T>, values: Vec<T>) -> Result<Self> {
        if xs.first().copied() != Some(T::zero()) {
            return Err(LabError::InvalidGrid("tabulated profile must start at r = 0".into()));
        }
        if let Some(v) = values.iter().find(|v| !(**v >= T::zero())) {
            return Err(LabError::InvalidParameter {
                name: "G sample",
                value: v.as_f64(),
                range: "[0, inf)",
            });
        }
        Ok(Self::Tabulated(MonotoneCubic::new(xs, values)?))
    }

    pub fn sum(a: Self, b: Self) -> Self {
        Self::Sum(Box::new(a), Box::new(b))
    }

    /// Right end of the domain: `(end, exclusive)`, or `None` for `[0, inf)`.
    pub fn domain_end(&self) -> Option<(T, bool)> {
        match self {
            Self::PowerTail { r0, .. } => Some((*r0, true)),
            Self::ShiftedTail { r0, .. } => Some((T::one() + *r0, true)),
            Self::Tabulated(t) => Some((t.x_max(), false)),
            Self::Sum(a, b) => match (a.domain_end(), b.domain_end()) {
                (None, x) | (x, None) => x,
                (Some(x), Some(y)) => Some(if x.0 <= y.0 { x } else { y }),
            },
            _ => None,
        }
    }

    /// Whether `[0, r]` lies inside the domain.
    pub fn covers(&self, r: T) -> bool {
        match self.domain_end() {
            None => true,
            Some((end, true)) => r < end,
            Some((end, false)) => r <= end,
        }
    }

    /// Evaluate with domain checking.
    pub fn eval(&self, r: T) -> Result<T> {
        if !(r >= T::zero()) || !self.covers(r) {
            return Err(LabError::ProfileDomain {
                r: r.as_f64(),
                end: self.domain_end().map_or(f64::INFINITY, |e| e.0.as_f64()),
            });
        }
        Ok(self.value(r))
    }

    /// Evaluate without domain checking (callers validate the range once).
    pub fn value(&self, r: T) -> T {
        match self {
            Self::Standard { kappa, alpha } => {
                *kappa * *kappa * (T::one() + r * r).powf(-*alpha * lit(0.5))
            }
            Self::Constant { value } => *value,
            Self::PowerTail { kappa, alpha, r0 } => *kappa * *kappa * (*r0 - r).powf(-*alpha),
            Self::ShiftedTail { kappa, alpha, r0 } => *kappa * *kappa * (T::one() + *r0 - r).powf(-*alpha),
            Self::Centered { kappa, alpha, center } => {
                let x = *center - r;
                *kappa * *kappa * (T::one() + x * x).powf(-*alpha * lit(0.5))
            }
            Self::Tabulated(t) => t.eval(r).unwrap_or_else(T::nan),
            Self::Sum(a, b) => a.value(r) + b.value(r),
        }
    }

    /// Maximum of `G` over `[a, b]`, from endpoints, interior critical
    /// points of the closed forms, and a dense sample.
    pub fn max_on(&self, a: T, b: T) -> T {
        let mut best = self.value(a).max(self.value(b));
        if let Self::Centered { center, .. } = self {
            if *center > a && *center < b {
                best = best.max(self.value(*center));
            }
        }
        let n = 512;
        for i in 1..n {
            let r = a + (b - a) * T::from_usize_lossy(i) / T::from_usize_lossy(n);
            best = best.max(self.value(r));
        }
        best
    }

    /// Short label for reports.
    pub fn label(&self) -> String {
        match self {
            Self::Standard { kappa, alpha } => format!("standard(kappa={kappa}, alpha={alpha})"),
            Self::Constant { value } => format!("constant({value})"),
            Self::PowerTail { kappa, alpha, r0 } => {
                format!("power-tail(kappa={kappa}, alpha={alpha}, r0={r0})")
            }
            Self::ShiftedTail { kappa, alpha, r0 } => {
                format!("shifted-tail(kappa={kappa}, alpha={alpha}, r0={r0})")
            }
            Self::Centered { kappa, alpha, center } => {
                format!("centered(kappa={kappa}, alpha={alpha}, center={center})")
            }
            Self::Tabulated(t) => format!("tabulated({} samples)", t.samples().0.len()),
            Self::Sum(a, b) => format!("{} + {}", a.label(), b.label()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn standard_profile_closed_form() {
        let p = CurvatureProfile::standard(2.0f64, 2.0).unwrap();
        assert!((p.eval(1.0).unwrap() - 2.0).abs() < 1e-15);
        let p = CurvatureProfile::standard(1.0f64, 0.0).unwrap();
        assert_eq!(p.eval(7.0).unwrap(), 1.0);
    }

    #[test]
    fn domain_errors() {
        let p = CurvatureProfile::power_tail(1.0f64, 2.0, 3.0).unwrap();
        assert!(p.eval(3.0).is_err());
        assert!(p.eval(-0.1).is_err());
        assert!((p.eval(2.0).unwrap() - 1.0).abs() < 1e-15);
        let t = CurvatureProfile::tabulated(vec![0.0, 1.0, 2.0], vec![1.0, 0.5, 0.2]).unwrap();
        assert!(t.eval(2.5).is_err());
        assert!(t.eval(2.0).is_ok());
    }

    #[test]
    fn parameter_validation() {
        assert!(CurvatureProfile::standard(1.0f64, 3.0).is_err());
        assert!(CurvatureProfile::standard(-1.0f64, 1.0).is_err());
        assert!(CurvatureProfile::constant(-0.5f64).is_err());
        assert!(CurvatureProfile::tabulated(vec![0.5, 1.0], vec![1.0, 1.0]).is_err());
        assert!(CurvatureProfile::tabulated(vec![0.0, 1.0], vec![1.0, -1.0]).is_err());
    }

    #[test]
    fn centered_is_dominated_by_power_tail() {
        let c = CurvatureProfile::centered(1.0f64, 2.0, 5.0).unwrap();
        let p = CurvatureProfile::power_tail(1.0f64, 2.0, 5.0).unwrap();
        for i in 0..50 {
            let s = 4.9 * i as f64 / 50.0;
            assert!(c.value(s) <= p.value(s));
        }
    }

    #[test]
    fn shifted_tail_dominates_centered_for_negative_alpha() {
        let c = CurvatureProfile::centered(1.0f64, -1.5, 6.0).unwrap();
        let p = CurvatureProfile::shifted_tail(1.0f64, -1.5, 6.0).unwrap();
        let t = CurvatureProfile::power_tail(1.0f64, -1.5, 6.0).unwrap();
        assert!(c.value(5.0) > t.value(5.0));
        for i in 0..=60 {
            let s = 6.0 * i as f64 / 60.0;
            assert!(c.value(s) <= p.value(s));
        }
        assert_eq!(p.domain_end(), Some((7.0, true)));
    }

    #[test]
    fn sum_domain_is_intersection() {
        let a = CurvatureProfile::power_tail(1.0f64, 1.0, 4.0).unwrap();
        let b = CurvatureProfile::tabulated(vec![0.0, 2.0, 6.0], vec![0.0, 1.0, 1.0]).unwrap();
        let s = CurvatureProfile::sum(a, b);
        assert_eq!(s.domain_end(), Some((4.0, true)));
    }

    proptest! {
        #[test]
        fn standard_matches_formula(kappa in 0.0f64..3.0, alpha in -2.0f64..2.0, r in 0.0f64..50.0) {
            let p = CurvatureProfile::standard(kappa, alpha).unwrap();
            let expect = kappa * kappa / (1.0 + r * r).powf(alpha / 2.0);
            prop_assert!((p.eval(r).unwrap() - expect).abs() <= 1e-14 * (1.0 + expect));
        }

        #[test]
        fn profiles_are_nonnegative(kappa in 0.0f64..3.0, alpha in -2.0f64..2.0, r in 0.0f64..10.0) {
            let p = CurvatureProfile::centered(kappa, alpha, 5.0).unwrap();
            prop_assert!(p.eval(r).unwrap() >= 0.0);
        }
    }
}

//! Acceptance suite: each criterion runs its experiments and returns a list
//! of named checks with measured values, limits and margins.

mod criteria;
mod report;

use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

pub use criteria::{
    cutoff_certification, extinction_and_weak_conservation, linear_decay_gradient, porous_medium_suite, self_convergence,
    sharp_annulus, sturm_bishop_gromov, tail_closed_forms, warping_exactness,
};
pub use report::{render_markdown, SuiteReport};

use crate::error::LabError;

/// How a measured value is judged against its limit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Relation {
    AtMost,
    AtLeast,
    /// Boolean outcome; value is 1 for true.
    Holds,
}

/// One measured quantity and its verdict.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub label: String,
    pub passed: bool,
    pub relation: Relation,
    pub value: f64,
    pub limit: f64,
    /// Distance to the limit on the passing side; negative when failed.
    pub margin: f64,
    pub note: String,
}

impl Check {
    pub fn at_most(label: impl Into<String>, value: f64, limit: f64) -> Self {
        Self::judged(label, Relation::AtMost, value, limit, limit - value)
    }

    pub fn at_least(label: impl Into<String>, value: f64, limit: f64) -> Self {
        Self::judged(label, Relation::AtLeast, value, limit, value - limit)
    }

    pub fn holds(label: impl Into<String>, ok: bool) -> Self {
        let v = if ok { 1.0 } else { 0.0 };
        Check {
            label: label.into(),
            passed: ok,
            relation: Relation::Holds,
            value: v,
            limit: 1.0,
            margin: if ok { 0.0 } else { -1.0 },
            note: String::new(),
        }
    }

    /// A check that could not be evaluated because the computation failed.
    pub fn errored(label: impl Into<String>, err: &LabError) -> Self {
        let mut c = Self::holds(label, false);
        c.note = format!("computation failed: {err}");
        c
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.note = note.into();
        self
    }

    fn judged(label: impl Into<String>, relation: Relation, value: f64, limit: f64, margin: f64) -> Self {
        // NaN never passes.
        let passed = margin >= 0.0;
        Check {
            label: label.into(),
            passed,
            relation,
            value,
            limit,
            margin: if margin.is_nan() { f64::NEG_INFINITY } else { margin },
            note: String::new(),
        }
    }
}

/// Outcome of one acceptance criterion.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CriterionResult {
    pub id: u8,
    pub name: String,
    /// Name of the property or inequality the checks exercise.
    pub reference: String,
    pub passed: bool,
    pub checks: Vec<Check>,
    /// Wall-clock time; kept out of the deterministic report.
    #[serde(skip)]
    pub runtime: Duration,
    #[serde(skip)]
    pub budget: Option<Duration>,
}

impl CriterionResult {
    fn new(id: u8, name: &str, reference: &str, budget: Option<f64>) -> Self {
        CriterionResult {
            id,
            name: name.into(),
            reference: reference.into(),
            passed: true,
            checks: Vec::new(),
            runtime: Duration::ZERO,
            budget: budget.map(Duration::from_secs_f64),
        }
    }

    fn push(&mut self, check: Check) {
        self.checks.push(check);
    }

    /// Push the checks produced by `f`, or one failed check if it errors.
    fn attempt<F>(&mut self, label: &str, f: F)
    where
        F: FnOnce(&mut Vec<Check>) -> crate::Result<()>,
    {
        let mut local = Vec::new();
        if let Err(e) = f(&mut local) {
            local.push(Check::errored(label, &e));
        }
        self.checks.extend(local);
    }

    fn finish(mut self, started: Instant) -> Self {
        self.runtime = started.elapsed();
        self.passed = !self.checks.is_empty() && self.checks.iter().all(|c| c.passed);
        self
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed)
    }

    /// Failed check with the most negative margin.
    pub fn worst_failure(&self) -> Option<&Check> {
        self.failures().min_by(|a, b| a.margin.total_cmp(&b.margin))
    }

    pub fn within_budget(&self) -> bool {
        self.budget.map_or(true, |b| self.runtime <= b)
    }

    /// One summary line: id, verdict, name and either the check count or the worst failure.
    pub fn summary_line(&self) -> String {
        let verdict = if self.passed { "PASS" } else { "FAIL" };
        let detail = match self.worst_failure() {
            None => format!("{} checks", self.checks.len()),
            Some(c) => format!(
                "{} of {} checks failed; worst: {} (value {:.6e}, limit {:.6e}){}",
                self.failures().count(),
                self.checks.len(),
                c.label,
                c.value,
                c.limit,
                if c.note.is_empty() { String::new() } else { format!(": {}", c.note) }
            ),
        };
        format!("[{verdict}] criterion {}: {}: {detail} ({:.2} s)", self.id, self.name, self.runtime.as_secs_f64())
    }
}

/// Tolerances used by the suite; every field can be overridden.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Tolerances {
    /// Flat warping and ball volumes, relative.
    pub warping: f64,
    /// Constant-curvature warping against `sinh`, relative.
    pub sinh: f64,
    /// Sturm orderings and volume-ratio monotonicity, relative.
    pub sturm: f64,
    /// Power closed form against direct integration, relative.
    pub power: f64,
    /// Bessel closed form against direct integration, relative.
    pub bessel: f64,
    /// Largest allowed `max / min` of a scaled constant across a sweep.
    pub spread: f64,
    /// Required decay factor `first / last` of the cut-off sup norms.
    pub decay: f64,
    /// Cut-off certification tolerance on values.
    pub cutoff: f64,
    /// Annulus sandwich slack.
    pub sandwich: f64,
    /// Band parameter agreement across radii.
    pub theta: f64,
    /// Relative mass drift of porous-medium runs.
    pub mass: f64,
    /// Distance between runs from identical data, relative to mass.
    pub identical: f64,
    /// Fraction by which observed orders may fall short of nominal.
    pub order_allowance: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            warping: 1e-10,
            sinh: 1e-8,
            sturm: 1e-8,
            power: 1e-8,
            bessel: 1e-6,
            spread: 4.0,
            decay: 8.0,
            cutoff: 1e-9,
            sandwich: 1e-9,
            theta: 1e-10,
            mass: crate::diffusion::MASS_DRIFT_TOL,
            identical: 1e-10,
            order_allowance: crate::diffusion::ORDER_ALLOWANCE,
        }
    }
}

/// Which experiments the suite runs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Preset {
    /// All nine criteria at their full parameter sets.
    #[default]
    Full,
    /// Only zero-curvature experiments: criteria 1, 4, 7, 8 and 9 restricted to `kappa = 0` models.
    /// The cut-off sweep uses the quadratic-decay construction, whose rate is the sharp one on flat space.
    Flat,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SuiteConfig {
    pub seed: u64,
    pub preset: Preset,
    pub tol: Tolerances,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        SuiteConfig {
            seed: 20240607,
            preset: Preset::Full,
            tol: Tolerances::default(),
        }
    }
}

impl SuiteConfig {
    pub fn flat(&self) -> bool {
        self.preset == Preset::Flat
    }
}

/// Criterion identifiers the preset runs, in order.
pub fn criteria_for(preset: Preset) -> Vec<u8> {
    match preset {
        Preset::Full => (1..=9).collect(),
        Preset::Flat => vec![1, 4, 7, 8, 9],
    }
}

/// Run one criterion by identifier.
pub fn run_criterion(id: u8, cfg: &SuiteConfig) -> Option<CriterionResult> {
    Some(match id {
        1 => warping_exactness(cfg),
        2 => sturm_bishop_gromov(cfg),
        3 => tail_closed_forms(cfg),
        4 => cutoff_certification(cfg),
        5 => sharp_annulus(cfg),
        6 => linear_decay_gradient(cfg),
        7 => porous_medium_suite(cfg),
        8 => extinction_and_weak_conservation(cfg),
        9 => self_convergence(cfg),
        _ => return None,
    })
}

/// Run every criterion of the preset, sequentially; each criterion parallelises internally.
pub fn run_suite(cfg: &SuiteConfig) -> Vec<CriterionResult> {
    criteria_for(cfg.preset)
        .into_iter()
        .filter_map(|id| run_criterion(id, cfg))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn check_relations() {
        assert!(Check::at_most("x", 1.0, 2.0).passed);
        assert!(!Check::at_most("x", 3.0, 2.0).passed);
        assert!(Check::at_least("x", 3.0, 2.0).passed);
        assert!(!Check::at_least("x", f64::NAN, 2.0).passed);
        assert_eq!(Check::at_most("x", 3.0, 2.0).margin, -1.0);
    }

    #[test]
    fn empty_criterion_fails() {
        let r = CriterionResult::new(1, "n", "r", None).finish(Instant::now());
        assert!(!r.passed);
    }

    #[test]
    fn attempt_records_errors() {
        let mut r = CriterionResult::new(1, "n", "r", None);
        r.attempt("boom", |_| Err(LabError::Singular("test")));
        assert_eq!(r.checks.len(), 1);
        assert!(!r.checks[0].passed);
        assert!(r.checks[0].note.contains("failed"));
    }

    #[test]
    fn summary_names_worst_failure() {
        let mut r = CriterionResult::new(4, "name", "ref", None);
        r.push(Check::at_most("small", 3.0, 2.0));
        r.push(Check::at_most("large", 9.0, 2.0).with_note("why"));
        r.push(Check::holds("fine", true));
        let r = r.finish(Instant::now());
        let line = r.summary_line();
        assert!(line.starts_with("[FAIL] criterion 4"));
        assert!(line.contains("2 of 3") && line.contains("large") && line.contains("why"));
    }

    #[test]
    fn flat_preset_is_a_subset() {
        let flat = criteria_for(Preset::Flat);
        assert!(flat.iter().all(|id| criteria_for(Preset::Full).contains(id)));
        assert!(run_criterion(10, &SuiteConfig::default()).is_none());
    }
}

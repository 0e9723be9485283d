//! Machine report and Markdown summary of a suite run.

use std::fmt::Write;

use serde::Serialize;

use super::{Check, CriterionResult, Relation, SuiteConfig};

/// Deterministic report of a suite run: no timings.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteReport {
    pub config_hash: String,
    pub config: SuiteConfig,
    pub passed: bool,
    pub criteria: Vec<CriterionResult>,
}

impl SuiteReport {
    pub fn new(config_hash: String, config: SuiteConfig, criteria: Vec<CriterionResult>) -> Self {
        SuiteReport {
            config_hash,
            config,
            passed: criteria.iter().all(|c| c.passed),
            criteria,
        }
    }

    /// First failed check in criterion order, with its criterion.
    pub fn first_failure(&self) -> Option<(&CriterionResult, &Check)> {
        self.criteria
            .iter()
            .find_map(|c| c.checks.iter().find(|k| !k.passed).map(|k| (c, k)))
    }
}

fn relation_symbol(r: Relation) -> &'static str {
    match r {
        Relation::AtMost => "<=",
        Relation::AtLeast => ">=",
        Relation::Holds => "holds",
    }
}

fn check_row(out: &mut String, id: u8, c: &Check) {
    let verdict = if c.passed { "pass" } else { "FAIL" };
    let limit = match c.relation {
        Relation::Holds => "holds".to_string(),
        r => format!("{} {:.3e}", relation_symbol(r), c.limit),
    };
    let _ = writeln!(
        out,
        "| {id} | {verdict} | {} | {:.6e} | {limit} | {:.3e} | {} |",
        c.label.replace('|', "/"),
        c.value,
        c.margin,
        c.note.replace('|', "/")
    );
}

/// Human summary: failures first with margins, then every criterion.
pub fn render_markdown(report: &SuiteReport) -> String {
    let mut out = String::new();
    let passed = report.criteria.iter().filter(|c| c.passed).count();
    let _ = writeln!(out, "# Verification report\n");
    let _ = writeln!(out, "Config hash: `{}`\n", report.config_hash);
    let _ = writeln!(out, "Criteria passed: {passed} of {}\n", report.criteria.len());
    let header = "| criterion | verdict | check | value | limit | margin | note |\n|---|---|---|---|---|---|---|";
    let failed: Vec<(&CriterionResult, &Check)> = report
        .criteria
        .iter()
        .flat_map(|c| c.failures().map(move |k| (c, k)))
        .collect();
    if !failed.is_empty() {
        let _ = writeln!(out, "## Failures\n\n{header}");
        for (c, k) in &failed {
            check_row(&mut out, c.id, k);
        }
        let _ = writeln!(out);
    }
    let _ = writeln!(out, "## Criteria\n");
    let mut ordered: Vec<&CriterionResult> = report.criteria.iter().collect();
    ordered.sort_by_key(|c| (c.passed, c.id));
    for c in ordered {
        let verdict = if c.passed { "PASS" } else { "FAIL" };
        let _ = writeln!(out, "### {} {}: {}\n\nChecks: {}\n\n{header}", c.id, verdict, c.name, c.reference);
        for k in &c.checks {
            check_row(&mut out, c.id, k);
        }
        let _ = writeln!(out);
    }
    out
}

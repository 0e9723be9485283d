//! Runs every acceptance criterion at its default tolerances and prints one
//! line per criterion. Exits non-zero when a criterion's status differs from
//! the expected one or a runtime budget is exceeded.
//!
//! Criterion 3 is expected red: the hyperbolic barrier for negative `alpha`
//! starts below the true solution because its second derivative at the origin
//! is negative while the solution's is zero. Only those barrier checks may fail.

use std::process::ExitCode;

use cutofflab::verify::{run_suite, CriterionResult, SuiteConfig};

const KNOWN_RED: u8 = 3;
const KNOWN_RED_PREFIX: &str = "alpha = -1, kappa = 1, r = ";

fn unexpected(c: &CriterionResult) -> Option<String> {
    if c.id != KNOWN_RED {
        return (!c.passed).then(|| "expected to pass".to_string());
    }
    let failing: Vec<&str> = c.failures().map(|k| k.label.as_str()).collect();
    if failing.is_empty() {
        return Some("expected the negative-alpha barrier checks to fail; they passed".into());
    }
    let stray: Vec<&str> = failing.iter().copied().filter(|l| !l.starts_with(KNOWN_RED_PREFIX)).collect();
    if !stray.is_empty() {
        return Some(format!("unexpected failing checks: {}", stray.join("; ")));
    }
    // The violation sits next to the origin: the r = 4 case fails on an interval ending near 0.31.
    let r4 = c.failures().find(|k| k.label.starts_with("alpha = -1, kappa = 1, r = 4:"));
    match r4.and_then(|k| k.note.split("up to s = ").nth(1)).and_then(|s| s.split(';').next()) {
        Some(s) if s.trim().parse::<f64>().is_ok_and(|s| s > 0.25 && s < 0.35) => None,
        _ => Some("r = 4 barrier violation not located near the origin".into()),
    }
}

fn main() -> ExitCode {
    let results = run_suite(&SuiteConfig::default());
    let mut problems = 0;
    println!("acceptance: {} criteria", results.len());
    for c in &results {
        let mut line = c.summary_line();
        if c.id == KNOWN_RED && !c.passed {
            line.push_str(" [known red]");
        }
        if let Some(b) = c.budget {
            line.push_str(&format!(" [budget {:.0} s: {}]", b.as_secs_f64(), if c.within_budget() { "met" } else { "EXCEEDED" }));
        }
        println!("{line}");
        if let Some(why) = unexpected(c) {
            println!("    unexpected status: {why}");
            problems += 1;
        }
        if !c.within_budget() {
            problems += 1;
        }
    }
    if results.len() != 9 {
        println!("expected 9 criteria, got {}", results.len());
        problems += 1;
    }
    let green = results.iter().filter(|c| c.passed).count();
    println!("acceptance: {green} of {} criteria green; {problems} unexpected outcomes", results.len());
    if problems == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

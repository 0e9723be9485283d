//! End-to-end runs of the `cutofflab` binary.

use std::path::Path;
use std::process::{Command, Output};

fn cutofflab(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cutofflab"))
        .args(args)
        .current_dir(dir)
        .env_remove("CUTOFFLAB_OUT")
        .output()
        .expect("binary runs")
}

fn json(path: &Path) -> serde_json::Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn out_of_range_alpha_exits_with_two_and_names_the_range() {
    let tmp = tempfile::tempdir().unwrap();
    let out = cutofflab(&["cutoff", "--alpha", "3", "--out", "o"], tmp.path());
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("alpha") && err.contains("[-2, 2]"), "{err}");
    assert!(!tmp.path().join("o").exists());
}

#[test]
fn unknown_flag_and_bad_config_exit_with_two() {
    let tmp = tempfile::tempdir().unwrap();
    assert_eq!(cutofflab(&["geometry", "--beta", "1"], tmp.path()).status.code(), Some(2));
    std::fs::write(tmp.path().join("bad.toml"), "[cutoff]\nbeta = 1\n").unwrap();
    let out = cutofflab(&["cutoff", "--config", "bad.toml"], tmp.path());
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn flat_preset_passes_and_is_deterministic() {
    let tmp = tempfile::tempdir().unwrap();
    for dir in ["a", "b"] {
        let out = cutofflab(&["verify-all", "--preset", "flat", "--seed", "11", "--out", dir], tmp.path());
        assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    }
    let a = std::fs::read(tmp.path().join("a/report.json")).unwrap();
    let b = std::fs::read(tmp.path().join("b/report.json")).unwrap();
    assert_eq!(a, b);
    let report = json(&tmp.path().join("a/report.json"));
    let ids: Vec<u64> = report["criteria"].as_array().unwrap().iter().map(|c| c["id"].as_u64().unwrap()).collect();
    assert_eq!(ids, vec![1, 4, 7, 8, 9]);
    assert_eq!(report["passed"], true);
    assert_eq!(report["config_hash"].as_str().unwrap().len(), 64);
    for c in report["criteria"].as_array().unwrap() {
        assert!(!c["reference"].as_str().unwrap().is_empty());
    }
    let meta = json(&tmp.path().join("a/run_meta.json"));
    assert_eq!(meta["config_hash"], report["config_hash"]);
    assert!(meta["timings"].as_array().unwrap().len() == 5);
    let md = std::fs::read_to_string(tmp.path().join("a/report.md")).unwrap();
    assert!(md.contains("Criteria passed: 5 of 5") && !md.contains("## Failures"));
}

#[test]
fn full_suite_reports_the_barrier_failure_first() {
    let tmp = tempfile::tempdir().unwrap();
    let out = cutofflab(&["verify-all", "--out", "full"], tmp.path());
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("verification failed: criterion 3"), "{err}");
    let report = json(&tmp.path().join("full/report.json"));
    assert_eq!(report["criteria"].as_array().unwrap().len(), 9);
    let failed: Vec<u64> = report["criteria"]
        .as_array()
        .unwrap()
        .iter()
        .filter(|c| c["passed"] == false)
        .map(|c| c["id"].as_u64().unwrap())
        .collect();
    assert_eq!(failed, vec![3]);
    let md = std::fs::read_to_string(tmp.path().join("full/report.md")).unwrap();
    assert!(md.find("## Failures").unwrap() < md.find("### 1 PASS").unwrap());
}

#[test]
fn cutoff_sweep_writes_summary_and_per_radius_csv() {
    let tmp = tempfile::tempdir().unwrap();
    let args = ["cutoff", "--alpha", "2", "--kappa", "1", "--d", "3", "--gamma", "1.5", "--R", "1,2,4,8,16", "--out", "c"];
    let out = cutofflab(&args, tmp.path());
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let summary = json(&tmp.path().join("c/cutoff.json"));
    let entries = summary["results"]["entries"].as_array().unwrap();
    assert_eq!(entries.len(), 5);
    assert!(entries.iter().all(|e| e["certified"] == true));
    assert!(summary["results"]["laplacian_constant_spread"].as_f64().unwrap() < 4.0);
    for r in ["1", "2", "4", "8", "16"] {
        let csv = std::fs::read_to_string(tmp.path().join(format!("c/cutoff_R{r}.csv"))).unwrap();
        assert!(csv.starts_with("r,phi,grad,laplacian\n"));
    }
    let toml = std::fs::read_to_string(tmp.path().join("c/config.toml")).unwrap();
    assert!(toml.contains("gamma = 1.5"));
}

#[test]
fn config_file_sections_env_default_and_flag_override() {
    let tmp = tempfile::tempdir().unwrap();
    std::fs::write(tmp.path().join("run.toml"), "[geometry]\nalpha = 0.0\nkappa = 0.0\nR = [1.0, 2.0]\n").unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_cutofflab"))
        .args(["geometry", "--config", "run.toml", "--d", "4"])
        .current_dir(tmp.path())
        .env("CUTOFFLAB_OUT", "from_env")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = std::fs::read_to_string(tmp.path().join("from_env/volumes.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("R,V_G,ratio"));
    // Flat model: ratio to Euclidean balls is one.
    for line in lines {
        let ratio: f64 = line.split(',').nth(2).unwrap().parse().unwrap();
        assert!((ratio - 1.0).abs() < 1e-10, "{line}");
    }
    let report = json(&tmp.path().join("from_env/geometry.json"));
    assert_eq!(report["config"]["d"], 4);
}

#[test]
fn diffusion_run_balances_mass() {
    let tmp = tempfile::tempdir().unwrap();
    let args = ["diffusion", "--m", "2", "--r-max", "6", "--grid-n", "60", "--dt", "0.05", "--horizon", "0.5", "--out", "d"];
    let out = cutofflab(&args, tmp.path());
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let summary = json(&tmp.path().join("d/diffusion.json"));
    assert!(summary["results"]["mass_balance_error"].as_f64().unwrap() < 1e-10);
    assert_eq!(summary["results"]["admissible"], true);
    let series = std::fs::read_to_string(tmp.path().join("d/series.csv")).unwrap();
    assert!(series.starts_with("t,mass,sup_u,support_radius\n"));
    let profiles = std::fs::read_to_string(tmp.path().join("d/profiles.csv")).unwrap();
    assert!(profiles.starts_with("r,u_t0,"));
}

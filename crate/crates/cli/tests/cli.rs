use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_levy-rinv"));
    c.env_remove("LEVY_RINV_OUT");
    c
}

fn write_config(dir: &Path, text: &str) -> std::path::PathBuf {
    let p = dir.join("config.json");
    fs::write(&p, text).unwrap();
    p
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

const PURE_DRIFT: &str = r#"{"experiment": "rho-routes", "model": {"family": "pure_drift", "b": 1},
    "sim": {"dt": 0.001, "horizon": 4}, "seed": 3, "n_paths": 1000, "params": {"tail_window": 1}}"#;

#[test]
fn list_has_the_fixed_catalog() {
    let out = run(&["list"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 8);
    assert!(lines.iter().any(|l| l.starts_with("theorem1") && l.contains("Eq. (genexc)")));
    assert!(lines.iter().any(|l| l.starts_with("quintuple") && l.contains("Eq. (quintuple)")));
}

#[test]
fn config_errors_exit_with_2() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), PURE_DRIFT);
    let out = run(&["--config", cfg.to_str().unwrap(), "--experiment", "no-such-thing"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("no-such-thing"));

    let bad = write_config(dir.path(), r#"{"experiment": "nope", "model": {"family": "pure_drift", "b": 1}, "n_paths": 1}"#);
    assert_eq!(run(&["--config", bad.to_str().unwrap()]).status.code(), Some(2));
    assert_eq!(run(&["--config", "/nonexistent/config.json"]).status.code(), Some(2));
}

#[test]
fn runtime_errors_exit_with_1() {
    let dir = tempfile::tempdir().unwrap();
    // sigpos needs a Gaussian part
    let cfg = write_config(dir.path(), &PURE_DRIFT.replace("rho-routes", "sigpos"));
    let out = run(&["--config", cfg.to_str().unwrap(), "--out", dir.path().join("o").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn pure_drift_run_writes_artifacts() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), PURE_DRIFT);
    let out_dir = dir.path().join("out");
    let out = run(&["--config", cfg.to_str().unwrap(), "--out", out_dir.to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stdout));

    let report: serde_json::Value = serde_json::from_slice(&fs::read(out_dir.join("report.json")).unwrap()).unwrap();
    assert_eq!(report["passed"], true);
    assert!(report["anchor"].as_str().unwrap().contains("P1E1"));
    let manifest: serde_json::Value = serde_json::from_slice(&fs::read(out_dir.join("manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["seed"], 3);
    assert_eq!(manifest["config_sha256"].as_str().unwrap().len(), 64);

    let mut rdr = csv::Reader::from_path(out_dir.join("tables/rho.csv")).unwrap();
    let header = rdr.headers().unwrap().clone();
    let col = header.iter().position(|h| h == "diff_emp_closed").unwrap();
    let mut rows = 0;
    for rec in rdr.records() {
        assert_eq!(rec.unwrap()[col].parse::<f64>().unwrap(), 0.0);
        rows += 1;
    }
    assert_eq!(rows, 3);
}

#[test]
fn reports_are_reproducible_and_seed_flag_applies() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        r#"{"experiment": "bv-jumpstart",
            "model": {"family": "bounded_variation", "b": 1, "rate": 1,
                      "law": {"law": "two_sided_exponential", "p_up": 0.5, "rate_up": 2, "rate_down": 1}},
            "sim": {"dt": 0.01, "horizon": 16}, "seed": 1, "n_paths": 3000, "params": {"tail_window": 4}}"#,
    );
    let cfg = cfg.to_str().unwrap();
    let report = |name: &str, extra: &[&str]| {
        let d = dir.path().join(name);
        let mut args = vec!["--config", cfg, "--out", d.to_str().unwrap()];
        args.extend_from_slice(extra);
        assert!(run(&args).status.success());
        fs::read(d.join("report.json")).unwrap()
    };
    let a = report("a", &["--workers", "1"]);
    let b = report("b", &["--workers", "2"]);
    assert_eq!(a, b);
    let c = report("c", &["--seed", "2"]);
    assert_ne!(a, c);
}

#[test]
fn env_var_sets_default_output() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), PURE_DRIFT);
    let target = dir.path().join("from-env");
    let out = bin()
        .args(["--config", cfg.to_str().unwrap()])
        .env("LEVY_RINV_OUT", &target)
        .output()
        .unwrap();
    assert!(out.status.success());
    assert!(target.join("report.json").exists());
}

use rfharvest::validation::determinism_config;
use std::path::PathBuf;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_rfharvest"))
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("rfharvest-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

fn small_config(name: &str) -> PathBuf {
    let path = scratch(name);
    std::fs::write(&path, determinism_config(1).to_json()).unwrap();
    path
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn every_command_runs_and_is_reproducible() {
    let cfg = small_config("repro.json");
    let cfg = cfg.to_str().unwrap();
    for cmd in ["fit", "outage", "energy", "charging", "rfid"] {
        let a = run(&[cmd, "--config", cfg, "--seed", "5"]);
        assert_eq!(a.status.code(), Some(0), "{cmd}: {}", String::from_utf8_lossy(&a.stderr));
        let b = run(&[cmd, "--config", cfg, "--seed", "5"]);
        assert_eq!(a.stdout, b.stdout, "{cmd} output differs between runs");
        let text = stdout(&a);
        let header = text.lines().find(|l| !l.starts_with('#')).unwrap();
        let width = header.split(',').count();
        assert!(width >= 2);
        for row in text.lines().filter(|l| !l.starts_with('#')).skip(1) {
            assert_eq!(row.split(',').count(), width, "{cmd}: ragged row {row}");
        }
    }
}

#[test]
fn seed_changes_monte_carlo_columns() {
    let cfg = small_config("seed.json");
    let cfg = cfg.to_str().unwrap();
    let a = run(&["energy", "--config", cfg, "--seed", "1"]);
    let b = run(&["energy", "--config", cfg, "--seed", "2"]);
    assert_ne!(a.stdout, b.stdout);
}

#[test]
fn json_output_parses() {
    let cfg = small_config("json.json");
    let o = run(&["outage", "--config", cfg.to_str().unwrap(), "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let rows = v["rows"].as_array().unwrap();
    assert!(!rows.is_empty());
    for r in rows {
        let p = r["outage_probability"].as_f64().unwrap();
        assert!((0.0..=1.0).contains(&p));
    }
    assert!(v["columns"].as_array().unwrap().iter().any(|c| c == "d_m"));
}

#[test]
fn output_flag_writes_file() {
    let cfg = small_config("out.json");
    let out = scratch("fit.csv");
    let o = run(&["fit", "--config", cfg.to_str().unwrap(), "--output", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert!(o.stdout.is_empty());
    let text = std::fs::read_to_string(&out).unwrap();
    assert!(text.contains("input_dbm,measured_efficiency,fitted_efficiency,residual"));
}

#[test]
fn density_dump_written() {
    let mut cfg = determinism_config(1);
    let dump = scratch("density.csv");
    cfg.charging.density_dump = Some(dump.to_str().unwrap().to_string());
    let path = scratch("dump.json");
    std::fs::write(&path, cfg.to_json()).unwrap();
    let o = run(&["charging", "--config", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let text = std::fs::read_to_string(&dump).unwrap();
    assert!(text.lines().filter(|l| !l.starts_with('#')).count() > 100);
}

#[test]
fn configuration_errors_exit_two() {
    let bad = scratch("bad.json");
    std::fs::write(&bad, r#"{"link": {"distance_m": -3}}"#).unwrap();
    assert_eq!(run(&["energy", "--config", bad.to_str().unwrap()]).status.code(), Some(2));
    std::fs::write(&bad, r#"{"unknown": 1}"#).unwrap();
    assert_eq!(run(&["fit", "--config", bad.to_str().unwrap()]).status.code(), Some(2));
    let missing = scratch("does-not-exist.json");
    assert_eq!(run(&["fit", "--config", missing.to_str().unwrap()]).status.code(), Some(2));
    assert_eq!(run(&["energy", "--format", "xml"]).status.code(), Some(2));
}

#[test]
fn validate_passes_and_detects_fault() {
    let ok = run(&["validate", "--criteria", "8"]);
    assert_eq!(ok.status.code(), Some(0), "{}", String::from_utf8_lossy(&ok.stderr));
    let report: serde_json::Value = serde_json::from_slice(&ok.stdout).unwrap();
    assert_eq!(report["all_passed"], true);
    assert!(String::from_utf8_lossy(&ok.stderr).contains("criterion 8"));

    let bad = run(&["validate", "--criteria", "1", "--inject-fault", "perturbed-gamma"]);
    assert_eq!(bad.status.code(), Some(4));
    let report: serde_json::Value = serde_json::from_slice(&bad.stdout).unwrap();
    assert_eq!(report["criteria"][0]["passed"], false);
    assert!(String::from_utf8_lossy(&bad.stderr).contains("FAIL"));
}

#[test]
fn numerical_failures_exit_three() {
    let path = scratch("underfit.json");
    std::fs::write(&path, r#"{"harvester": {"fit_degree": 1}}"#).unwrap();
    let o = run(&["fit", "--config", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&o.stderr).contains("infeasible"));
}

#[test]
fn datapoint_spacing_uses_measured_points() {
    let mut cfg = determinism_config(1);
    cfg.harvester.dataset = rfharvest::harvester::Dataset::ModuleB;
    cfg.harvester.spacing = rfharvest::harvester::Spacing::Datapoints;
    let path = scratch("datapoints.json");
    std::fs::write(&path, cfg.to_json()).unwrap();
    let o = run(&["energy", "--config", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(stdout(&o).contains("# segments: 52"));
}

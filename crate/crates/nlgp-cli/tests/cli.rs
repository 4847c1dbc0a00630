//! End-to-end checks of the binary: exit codes, file outputs, determinism.

use std::path::Path;
use std::process::{Command, Output};

fn nlgp(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_nlgp"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("binary runs")
}

fn read(path: impl AsRef<Path>) -> String {
    std::fs::read_to_string(path).expect("output file exists")
}

#[test]
fn solve_gray_contact_recovers_explicit_profile() {
    let dir = tempfile::tempdir().unwrap();
    let out = nlgp(
        &["solve-gray", "--family", "contact", "--speed", "0.7", "--output", "run"],
        dir.path(),
    );
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));

    let csv = read(dir.path().join("run.profile.csv"));
    let mut lines = csv.lines();
    assert_eq!(lines.next().unwrap(), "x,eta,theta,u_re,u_im");
    let c: f64 = 0.7;
    let a = (2.0 - c * c).sqrt() / 2.0;
    let mut worst = 0.0f64;
    let mut rows = 0;
    for line in lines {
        let cols: Vec<f64> = line.split(',').map(|s| s.parse().unwrap()).collect();
        let exact = (1.0 - c * c / 2.0) / (a * cols[0]).cosh().powi(2);
        worst = worst.max((cols[1] - exact).abs());
        // |u|² = 1 − η row by row
        let m2 = cols[3] * cols[3] + cols[4] * cols[4];
        assert!((m2 - (1.0 - cols[1])).abs() < 1e-10);
        rows += 1;
    }
    assert_eq!(rows, 4096);
    assert!(worst < 1e-8, "profile deviates from the closed form by {worst:e}");

    let report: serde_json::Value = serde_json::from_str(&read(dir.path().join("run.report.json"))).unwrap();
    assert_eq!(report["report"]["converged"], serde_json::Value::Bool(true));
    let manifest: serde_json::Value =
        serde_json::from_str(&read(dir.path().join("run.manifest.json"))).unwrap();
    assert_eq!(manifest["command"], "solve-gray");
    assert_eq!(manifest["points"], 4096);
}

#[test]
fn solve_gray_rejects_supersonic_speed() {
    let dir = tempfile::tempdir().unwrap();
    let out = nlgp(
        &["solve-gray", "--family", "contact", "--speed", "1.5"],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn solve_gray_requires_a_family() {
    let dir = tempfile::tempdir().unwrap();
    let out = nlgp(&["solve-gray", "--speed", "0.5"], dir.path());
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn invalid_kernel_parameters_exit_1() {
    let dir = tempfile::tempdir().unwrap();
    // vanderwaals needs lambda < beta/2
    let out = nlgp(
        &[
            "solve-gray", "--family", "vanderwaals", "--beta", "1.0", "--lambda", "0.6",
            "--speed", "0.5",
        ],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn check_reports_hypothesis_constants() {
    let dir = tempfile::tempdir().unwrap();
    let out = nlgp(
        &[
            "check", "--family", "gaussian", "--lambda", "0.5", "--speed", "1.0",
            "--output", "chk",
        ],
        dir.path(),
    );
    assert!(out.status.success());
    let report: serde_json::Value =
        serde_json::from_str(&read(dir.path().join("chk.report.json"))).unwrap();
    assert!((report["m"].as_f64().unwrap() - 0.5).abs() < 1e-12);
    assert!((report["sonic_speed"].as_f64().unwrap() - std::f64::consts::SQRT_2).abs() < 1e-12);
    assert_eq!(report["flags"]["h0"], serde_json::Value::Bool(true));
}

#[test]
fn negative_lambda_values_are_accepted() {
    let dir = tempfile::tempdir().unwrap();
    let out = nlgp(
        &[
            "check", "--family", "vanderwaals", "--beta", "0.5", "--lambda", "-0.3",
            "--output", "neg",
        ],
        dir.path(),
    );
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let report: serde_json::Value =
        serde_json::from_str(&read(dir.path().join("neg.report.json"))).unwrap();
    assert!((report["mu_plus"].as_f64().unwrap() - 1.2).abs() < 1e-12);
    assert_eq!(report["thresholds"]["discriminant_root"]["class"], "negative_real");
}

#[test]
fn outputs_are_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    for stem in ["a", "b"] {
        let out = nlgp(
            &[
                "solve-gray", "--family", "gaussian", "--lambda", "0.2", "--speed", "0.5",
                "--box-length", "30", "--points", "512", "--output", stem,
            ],
            dir.path(),
        );
        assert!(out.status.success());
    }
    assert_eq!(
        read(dir.path().join("a.profile.csv")),
        read(dir.path().join("b.profile.csv"))
    );
    assert_eq!(
        read(dir.path().join("a.report.json")),
        read(dir.path().join("b.report.json"))
    );
}

#[test]
fn nonconvergence_exits_2_and_still_writes_the_report() {
    let dir = tempfile::tempdir().unwrap();
    let out = nlgp(
        &[
            "solve-black", "--family", "contact", "--tol", "1e-15", "--max-iter", "2",
            "--box-length", "30", "--points", "256", "--output", "stuck",
        ],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(2));
    let report: serde_json::Value =
        serde_json::from_str(&read(dir.path().join("stuck.report.json"))).unwrap();
    assert!(report["error"].as_str().unwrap().contains("no convergence"));
    assert_eq!(report["report"]["converged"], serde_json::Value::Bool(false));
    assert!(dir.path().join("stuck.manifest.json").exists());
}

#[test]
fn solve_black_matches_dark_front() {
    let dir = tempfile::tempdir().unwrap();
    let out = nlgp(
        &[
            "solve-black", "--family", "contact", "--box-length", "30", "--points", "1024",
            "--output", "blk",
        ],
        dir.path(),
    );
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let csv = read(dir.path().join("blk.profile.csv"));
    let mut worst = 0.0f64;
    for line in csv.lines().skip(1) {
        let cols: Vec<f64> = line.split(',').map(|s| s.parse().unwrap()).collect();
        let exact = (cols[0] / std::f64::consts::SQRT_2).tanh();
        worst = worst.max((cols[3] - exact).abs());
    }
    assert!(worst < 1e-5, "black profile error {worst:e}");
}

#[test]
fn sweep_writes_decreasing_distances() {
    let dir = tempfile::tempdir().unwrap();
    let out = nlgp(
        &[
            "sweep", "--family", "gaussian", "--speed", "0.5", "--lambdas", "0.1,0.05",
            "--box-length", "30", "--points", "512", "--output", "sw",
        ],
        dir.path(),
    );
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let csv = read(dir.path().join("sw.sweep.csv"));
    let rows: Vec<Vec<f64>> = csv
        .lines()
        .skip(1)
        .map(|l| l.split(',').map(|s| s.parse().unwrap()).collect())
        .collect();
    assert_eq!(rows.len(), 2);
    assert_eq!(csv.lines().next().unwrap(), "lambda,distance_eta,distance_u,energy,residual");
    // λ = 0.1 then λ = 0.05: distance to the local profile shrinks
    assert!(rows[0][1] > rows[1][1]);
}

#[test]
fn sweep_at_zero_speed_runs_black_solves() {
    let dir = tempfile::tempdir().unwrap();
    let out = nlgp(
        &[
            "sweep", "--family", "gaussian", "--speed", "0", "--lambdas", "0.1,0.05",
            "--box-length", "30", "--points", "512", "--tol", "1e-8", "--output", "bsw",
        ],
        dir.path(),
    );
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let csv = read(dir.path().join("bsw.sweep.csv"));
    let rows: Vec<Vec<f64>> = csv
        .lines()
        .skip(1)
        .map(|l| l.split(',').map(|s| s.parse().unwrap()).collect())
        .collect();
    assert_eq!(rows.len(), 2);
    assert!(rows[0][2] > rows[1][2], "black distances should shrink with lambda");
}

#[test]
fn oscillation_scan_of_a_stored_profile() {
    let dir = tempfile::tempdir().unwrap();
    let out = nlgp(
        &[
            "solve-gray", "--family", "contact", "--speed", "0.9", "--box-length", "30",
            "--points", "512", "--output", "prof",
        ],
        dir.path(),
    );
    assert!(out.status.success());
    let out = nlgp(
        &[
            "oscillation", "--profile-file", "prof.profile.csv", "--family", "contact",
            "--speed", "0.9", "--output", "osc",
        ],
        dir.path(),
    );
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let report: serde_json::Value =
        serde_json::from_str(&read(dir.path().join("osc.report.json"))).unwrap();
    assert_eq!(report["sign_changes_of_eta_prime"], 1);
    assert_eq!(report["oscillation_triples"].as_array().unwrap().len(), 0);
    assert_eq!(report["predicted_oscillatory"], serde_json::Value::Bool(false));
}

#[test]
fn config_file_supplies_flags_and_cli_overrides() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(
        dir.path().join("cfg.json"),
        r#"{
  "command": "solve-gray",
  "family": "gaussian",
  "lambda": 0.2,
  "speed": 0.5,
  "box_length": 30.0,
  "points": 512,
  "output": "from-config"
}
"#,
    )
    .unwrap();
    let out = nlgp(&["solve-gray", "--config", "cfg.json"], dir.path());
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    assert!(dir.path().join("from-config.profile.csv").exists());

    // explicit flag wins over the config value
    let out = nlgp(
        &["solve-gray", "--config", "cfg.json", "--lambda", "0.1", "--output", "override"],
        dir.path(),
    );
    assert!(out.status.success());
    let manifest: serde_json::Value =
        serde_json::from_str(&read(dir.path().join("override.manifest.json"))).unwrap();
    assert_eq!(manifest["lambda"].as_f64().unwrap(), 0.1);

    // config written for another command is rejected
    let out = nlgp(&["solve-black", "--config", "cfg.json"], dir.path());
    assert_eq!(out.status.code(), Some(1));
}

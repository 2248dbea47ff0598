//! End-to-end checks of the binary: CSV shapes, exit codes, determinism,
//! and config-file resolution.

use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_hawkes-ldp"))
}

fn run_ok(args: &[&str]) -> String {
    let out = bin().args(args).output().expect("spawn");
    assert!(
        out.status.success(),
        "command {args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).expect("utf8")
}

#[test]
fn rate_sweep_has_lln_zero_row() {
    let csv = run_ok(&[
        "rate", "--kind", "z", "--horizon", "5", "--x-min", "1", "--x-max", "1", "--steps", "1",
    ]);
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], "x,rate,theta_star,boundary");
    assert_eq!(lines.len(), 2);
    assert!(lines[1].starts_with("1,0,"), "row: {}", lines[1]);
    assert!(lines[1].ends_with("lln_zero"));
}

#[test]
fn rate_n_sweep_vanishes_at_psi() {
    let csv = run_ok(&[
        "rate", "--kind", "n", "--horizon", "5", "--x-min", "0", "--x-max", "12", "--steps", "13",
    ]);
    // x = 5 is ψ(5) at α = β = 1
    let row = csv.lines().find(|l| l.starts_with("5,")).expect("x=5 row");
    let rate: f64 = row.split(',').nth(1).unwrap().parse().unwrap();
    assert!(rate.abs() <= 1e-8, "rate at LLN point: {rate}");
}

#[test]
fn outputs_are_byte_identical_across_runs() {
    let args = [
        "validate", "--alpha", "1", "--beta", "2", "--mu", "1", "--z0", "1", "--horizon", "1",
        "--thetas", "0.1,0.2", "--trials", "5000",
    ];
    assert_eq!(run_ok(&args), run_ok(&args));
    let sim = ["simulate", "--z0", "3", "--horizon", "2", "--seed", "9"];
    assert_eq!(run_ok(&sim), run_ok(&sim));
}

#[test]
fn seed_changes_simulation_output() {
    let a = run_ok(&["simulate", "--z0", "3", "--horizon", "2", "--seed", "9"]);
    let b = run_ok(&["simulate", "--z0", "3", "--horizon", "2", "--seed", "10"]);
    assert_ne!(a, b);
}

#[test]
fn unknown_flags_are_usage_errors() {
    let out = bin()
        .args(["rate", "--kind", "z", "--horizon", "1", "--x-min", "1", "--x-max", "2", "--nope"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    let out = bin().args(["rate", "--kind", "q"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn nonpositive_magnitudes_are_usage_errors() {
    let out = bin()
        .args(["rate", "--kind", "z", "--horizon", "-1", "--x-min", "1", "--x-max", "2"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    let out = bin()
        .args(["queue", "--window", "0", "--x", "5", "--horizon", "2"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn infeasible_path_is_a_numerical_failure() {
    let out = bin()
        .args(["path", "--kind", "z", "--horizon", "1", "--x", "0.1"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(3));
    assert!(!out.stderr.is_empty());
}

#[test]
fn ruin_requires_a_coherent_argument_set() {
    let out = bin()
        .args(["ruin", "--claims", "poisson:1", "--x", "0.5"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    let out = bin()
        .args(["ruin", "--claims", "cauchy:1", "--x", "0.5", "--horizon", "0.2"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn ruin_single_point_and_sweep() {
    let csv = run_ok(&[
        "ruin", "--claims", "poisson:1", "--x", "0.5", "--horizon", "0.2",
    ]);
    assert!(csv.starts_with("T,I_tau\n0.2,0.064"), "{csv}");
    let csv = run_ok(&[
        "ruin", "--claims", "poisson:1", "--horizon", "0.2", "--x-min", "0.25", "--x-max", "1",
        "--steps", "4",
    ]);
    assert_eq!(csv.lines().next().unwrap(), "x,I_tau");
    let vals: Vec<f64> = csv
        .lines()
        .skip(1)
        .map(|l| l.split(',').nth(1).unwrap().parse().unwrap())
        .collect();
    assert_eq!(vals.len(), 4);
    assert!(vals.windows(2).all(|w| w[1] >= w[0] - 1e-9), "nondecreasing in x: {vals:?}");
}

#[test]
fn queue_degenerate_rows_are_zero() {
    let csv = run_ok(&[
        "queue", "--window", "1", "--horizon", "5", "--x-min", "0.5", "--x-max", "1", "--steps",
        "2",
    ]);
    for line in csv.lines().skip(1) {
        let g: f64 = line.split(',').nth(1).unwrap().parse().unwrap();
        assert_eq!(g, 0.0, "degenerate row {line}");
    }
}

#[test]
fn config_file_supplies_defaults_and_flags_override() {
    let dir = std::env::temp_dir().join(format!("hldp-cfg-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let cfg = dir.join("run.conf");
    std::fs::write(&cfg, "alpha = 1\nbeta = 2\nmu = 0 # comment\nseed = 5\n").unwrap();

    let with_cfg = run_ok(&[
        "--config",
        cfg.to_str().unwrap(),
        "simulate",
        "--z0",
        "4",
        "--horizon",
        "2",
    ]);
    let explicit = run_ok(&[
        "simulate", "--alpha", "1", "--beta", "2", "--z0", "4", "--horizon", "2", "--seed", "5",
    ]);
    assert_eq!(with_cfg, explicit, "config must resolve like explicit flags");

    // flag wins over config
    let overridden = run_ok(&[
        "--config",
        cfg.to_str().unwrap(),
        "simulate",
        "--z0",
        "4",
        "--horizon",
        "2",
        "--seed",
        "6",
    ]);
    assert_ne!(overridden, with_cfg);

    // malformed config is a usage error
    std::fs::write(&cfg, "beta two\n").unwrap();
    let out = bin()
        .args(["--config", cfg.to_str().unwrap(), "simulate", "--z0", "1", "--horizon", "1"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn validate_at_theta_zero_is_exact() {
    let csv = run_ok(&[
        "validate", "--z0", "1", "--horizon", "1", "--thetas", "0", "--trials", "100",
    ]);
    let mut lines = csv.lines();
    assert_eq!(
        lines.next(),
        Some("quantity,theta,mc_log_mgf,std_error,ode_log_mgf,z_score")
    );
    assert_eq!(lines.next(), Some("Z,0,0,0,0,0"));
    assert_eq!(lines.next(), Some("N,0,0,0,0,0"));
}

#[test]
fn validate_flags_thetas_past_the_boundary() {
    // θ = 2 is far past θ_c(1) ≈ 0.866 at α = β = 1
    let out = bin()
        .args(["validate", "--z0", "1", "--horizon", "1", "--thetas", "0.1,2", "--trials", "2000"])
        .output()
        .unwrap();
    assert!(out.status.success(), "boundary rows are excluded from the exit criterion");
    let csv = String::from_utf8(out.stdout).unwrap();
    assert!(csv.contains("infinite MGF"), "{csv}");
}

#[test]
fn help_lists_defaults() {
    let out = bin().args(["rate", "--help"]).output().unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("default"));
}

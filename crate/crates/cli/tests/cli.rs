//! Black-box tests of the `phase-switch` binary: exit-code contract,
//! artifact formats, flag round-trips, and the no-partial-artifact rule.

use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_phase-switch"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout_json(output: &Output) -> serde_json::Value {
    assert!(output.status.success(), "stderr: {}", String::from_utf8_lossy(&output.stderr));
    serde_json::from_slice(&output.stdout).expect("valid json on stdout")
}

#[test]
fn steady_at_switching_intensity() {
    let out = run(&["steady", "--big-gamma", "1", "--intensity", "0.25"]);
    let v = stdout_json(&out);
    assert!(v["b_out_re"].as_f64().unwrap().abs() <= 1e-12);
    assert!(v["b_out_im"].as_f64().unwrap().abs() <= 1e-12);
    assert!((v["sigma_z"].as_f64().unwrap() + 0.25).abs() <= 1e-12);
    assert!((v["p_noise"].as_f64().unwrap() - 0.25).abs() <= 1e-12);
}

#[test]
fn steady_zero_intensity_is_ground_state() {
    let out = run(&["steady", "--big-gamma", "1", "--intensity", "0"]);
    let v = stdout_json(&out);
    assert_eq!(v["sigma_z"].as_f64().unwrap(), -0.5);
    assert_eq!(v["p_noise"].as_f64().unwrap(), 0.0);
    assert_eq!(v["b_out_re"].as_f64().unwrap(), 0.0);
    assert_eq!(v["sigma_minus_re"].as_f64().unwrap(), 0.0);
}

#[test]
fn steady_metadata_round_trip() {
    let out = run(&[
        "steady",
        "--big-gamma",
        "1.25",
        "--gamma-loss",
        "0.375",
        "--intensity",
        "0.1",
    ]);
    let v = stdout_json(&out);
    assert_eq!(v["metadata"]["big_gamma"].as_f64().unwrap(), 1.25);
    assert_eq!(v["metadata"]["gamma_loss"].as_f64().unwrap(), 0.375);
    assert_eq!(v["metadata"]["intensity"].as_f64().unwrap(), 0.1);
}

#[test]
fn steady_amplitude_input() {
    // complex amplitude with |b_in|² = 0.25: same sigma_z, rotated output
    let out = run(&["steady", "--bin-re", "0.3", "--bin-im", "0.4"]);
    let v = stdout_json(&out);
    assert!((v["sigma_z"].as_f64().unwrap() + 0.25).abs() <= 1e-12);
    assert!(v["b_out_re"].as_f64().unwrap().abs() <= 1e-12);
    assert!(v["b_out_im"].as_f64().unwrap().abs() <= 1e-12);
}

#[test]
fn steady_conflicting_inputs_exit_2() {
    let out = run(&["steady", "--intensity", "0.25", "--bin-re", "0.5"]);
    assert_eq!(out.status.code(), Some(2));
    let out = run(&["steady"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn unknown_flag_exits_2() {
    let out = run(&["steady", "--intensity", "0.25", "--no-such-flag"]);
    assert_eq!(out.status.code(), Some(2));
    let out = run(&["no-such-subcommand"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn invalid_parameter_exits_2() {
    let out = run(&["steady", "--big-gamma", "-1", "--intensity", "0.25"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(out.stdout.is_empty());
}

#[test]
fn computation_error_exits_1() {
    // step too coarse for a strong drive: the integrator leaves the Bloch
    // sphere and must report a computation error
    let out = run(&[
        "simulate",
        "--drive",
        "constant",
        "--intensity",
        "2500",
        "--dt",
        "1",
        "--t-max",
        "100",
    ]);
    assert_eq!(out.status.code(), Some(1));
    assert!(out.stdout.is_empty());
}

#[test]
fn no_partial_artifact_on_error() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("out.csv");
    let out = run(&[
        "simulate",
        "--drive",
        "constant",
        "--intensity",
        "2500",
        "--dt",
        "1",
        "--t-max",
        "100",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(1));
    assert!(!path.exists(), "no bytes may be written on error");
}

#[test]
fn sweep_csv_default_grid() {
    let out = run(&["sweep", "--grid-min", "-2", "--grid-max", "2", "--points", "201", "--format", "csv"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 202);
    assert_eq!(
        lines[0],
        "axis_value,x,amplitude_ratio,coherent_fraction,noise_fraction,sigma_z,sigma_minus_mag"
    );
    // data row 101 sits at axis value 0: the switching point
    let row: Vec<f64> = lines[101].split(',').map(|v| v.parse().unwrap()).collect();
    assert_eq!(row[0], 0.0);
    assert!(row[2].abs() <= 1e-12, "amplitude_ratio = {}", row[2]);
    assert!((row[4] - 1.0).abs() <= 1e-12, "noise_fraction = {}", row[4]);
}

#[test]
fn sweep_json_is_array_of_rows() {
    let out = run(&["sweep", "--points", "5", "--format", "json"]);
    let v = stdout_json(&out);
    let rows = v.as_array().expect("json array");
    assert_eq!(rows.len(), 5);
    assert!(rows[0].get("amplitude_ratio").is_some());
    assert!(rows[0].get("noise_fraction").is_some());
}

#[test]
fn sweep_writes_to_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("sweep.csv");
    let out = run(&["sweep", "--points", "11", "--out", path.to_str().unwrap()]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    let text = std::fs::read_to_string(&path).unwrap();
    assert_eq!(text.lines().count(), 12);
}

#[test]
fn simulate_csv_trajectory() {
    let out = run(&[
        "simulate",
        "--drive",
        "constant",
        "--intensity",
        "0.25",
        "--t-max",
        "5",
        "--stride",
        "100",
    ]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(
        lines[0],
        "t,sigma_minus_re,sigma_minus_im,sigma_z,b_in_re,b_in_im,b_out_re,b_out_im,p_noise,residual"
    );
    assert!(lines.len() > 10);
    // first sample is the ground state at t = 0
    let first: Vec<f64> = lines[1].split(',').map(|v| v.parse().unwrap()).collect();
    assert_eq!(first[0], 0.0);
    assert_eq!(first[3], -0.5);
}

#[test]
fn simulate_square_pulse_json_budget() {
    let out = run(&[
        "simulate",
        "--drive",
        "square",
        "--photons",
        "2",
        "--duration",
        "4",
        "--t-max",
        "30",
        "--stride",
        "1000",
        "--format",
        "json",
    ]);
    let v = stdout_json(&out);
    assert!((v["budget"]["input"].as_f64().unwrap() - 2.0).abs() <= 1e-9);
    assert!(v["audit"]["closure_defect"].as_f64().unwrap().abs() <= 1e-6);
    assert!(v["audit"]["max_residual"].as_f64().unwrap() <= 1e-8);
}

#[test]
fn simulate_steps_drive() {
    let out = run(&[
        "simulate",
        "--drive",
        "steps",
        "--steps",
        "0:0.5;2:0:0.5;4:0",
        "--t-max",
        "6",
        "--stride",
        "500",
    ]);
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let out = run(&["simulate", "--drive", "steps", "--steps", "bogus", "--t-max", "1"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn linear_single_point() {
    let out = run(&["linear", "--beta", "0.7"]);
    let v = stdout_json(&out);
    assert!((v["linear_ratio"].as_f64().unwrap() + 0.4).abs() <= 1e-12);
    assert!((v["intensity_ratio"].as_f64().unwrap() - 0.16).abs() <= 1e-12);
}

#[test]
fn linear_from_gamma_loss() {
    // γ = 2Γ gives β = 1/2 and zero linear response
    let out = run(&["linear", "--gamma-loss", "2"]);
    let v = stdout_json(&out);
    assert!(v["linear_ratio"].as_f64().unwrap().abs() <= 1e-12);
    // --beta conflicts with --gamma-loss
    let out = run(&["linear", "--beta", "0.7", "--gamma-loss", "1"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn linear_beta_sweep_csv() {
    let out = run(&["linear", "--beta-sweep", "0.5", "1.0", "6"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "beta,linear_ratio");
    assert_eq!(lines.len(), 7);
    let last: Vec<f64> = lines[6].split(',').map(|v| v.parse().unwrap()).collect();
    assert_eq!(last, vec![1.0, -1.0]);
}

#[test]
fn params_reduction() {
    let out = run(&["params", "--g", "1", "--kappa", "10"]);
    let v = stdout_json(&out);
    assert!((v["big_gamma"].as_f64().unwrap() - 0.1).abs() <= 1e-15);
    assert!((v["coupling_ratio"].as_f64().unwrap() - 0.1).abs() <= 1e-15);
    assert!(v["bad_cavity_ok"].as_bool().unwrap());

    let out = run(&["params", "--g", "1", "--kappa", "1"]);
    let v = stdout_json(&out);
    assert_eq!(v["big_gamma"].as_f64().unwrap(), 1.0);
    assert!(!v["bad_cavity_ok"].as_bool().unwrap());
}

#[test]
fn pulse_check_boundary() {
    let out = run(&["pulse-check", "--duration", "4"]);
    let v = stdout_json(&out);
    assert_eq!(v["average_intensity"].as_f64().unwrap(), 0.5);
    assert!(v["exceeds"].as_bool().unwrap());

    let out = run(&["pulse-check", "--duration", "8"]);
    let v = stdout_json(&out);
    assert!(!v["exceeds"].as_bool().unwrap());

    let out = run(&["pulse-check", "--duration", "16"]);
    let v = stdout_json(&out);
    assert!(!v["exceeds"].as_bool().unwrap());
}

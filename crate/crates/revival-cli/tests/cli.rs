//! End-to-end tests of the `revival-sim` binary: flag handling, exit
//! codes, CSV structure, report contents, and determinism.

use std::collections::HashMap;
use std::path::PathBuf;
use std::process::{Command, Output};

fn binary() -> Command {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_revival-sim"));
    cmd.env_remove("REVIVAL_SIM_THREADS");
    cmd
}

fn run(args: &[&str]) -> Output {
    binary().args(args).output().expect("binary runs")
}

fn stdout_text(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("utf-8 stdout")
}

fn stderr_text(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).expect("utf-8 stderr")
}

fn exit_code(out: &Output) -> i32 {
    out.status.code().expect("no signal")
}

/// Numeric rows of a CSV body (comment preamble and header skipped).
fn data_rows(text: &str) -> Vec<Vec<f64>> {
    text.lines()
        .filter(|line| !line.starts_with('#') && !line.is_empty())
        .skip(1)
        .map(|line| {
            line.split(',')
                .map(|v| v.parse().expect("numeric cell"))
                .collect()
        })
        .collect()
}

/// `key = value` report lines as a map.
fn report_map(text: &str) -> HashMap<String, String> {
    text.lines()
        .filter_map(|line| line.split_once(" = "))
        .map(|(k, v)| (k.to_string(), v.to_string()))
        .collect()
}

fn parse_field(map: &HashMap<String, String>, key: &str) -> f64 {
    map[key].parse().expect("numeric report field")
}

fn close(a: f64, b: f64, rel: f64) -> bool {
    (a - b).abs() <= rel * b.abs()
}

fn temp_path(name: &str) -> PathBuf {
    std::env::temp_dir().join(format!("revival-sim-test-{}-{name}", std::process::id()))
}

#[test]
fn harmonic_wkb_levels_are_half_integers() {
    let out = run(&["spectrum", "--beta", "0", "--n", "10", "--method", "wkb"]);
    assert_eq!(exit_code(&out), 0);
    let rows = data_rows(&stdout_text(&out));
    assert_eq!(rows.len(), 10);
    for (n, row) in rows.iter().enumerate() {
        assert_eq!(row[0], n as f64);
        assert_eq!(row[1], n as f64 + 0.5);
    }
}

#[test]
fn negative_beta_values_parse() {
    let out = run(&[
        "spectrum", "--beta", "-0.01", "--levels", "5", "--method", "pt2",
    ]);
    assert_eq!(exit_code(&out), 0, "stderr: {}", stderr_text(&out));
    let rows = data_rows(&stdout_text(&out));
    assert_eq!(rows.len(), 5);
    assert!(rows[0][1] < 0.5);
}

#[test]
fn beta_above_cap_is_a_usage_error() {
    let out = run(&["spectrum", "--beta", "0.6", "--levels", "5"]);
    assert_eq!(exit_code(&out), 2);
    let err = stderr_text(&out);
    assert!(err.contains("0.5"), "stderr: {err}");
}

#[test]
fn all_method_emits_side_by_side_columns() {
    let out = run(&[
        "spectrum", "--beta", "1e-4", "--levels", "12", "--method", "all",
    ]);
    assert_eq!(exit_code(&out), 0, "stderr: {}", stderr_text(&out));
    let text = stdout_text(&out);
    let header = text
        .lines()
        .find(|line| !line.starts_with('#'))
        .expect("header");
    assert_eq!(header, "n,E_wkb,E_pt2,E_exact,abs_err_wkb,abs_err_pt2");
    let rows = data_rows(&text);
    assert_eq!(rows.len(), 12);
    for (n, row) in rows.iter().enumerate() {
        assert_eq!(row.len(), 6);
        assert!((row[3] - (n as f64 + 0.5)).abs() < 0.01);
        assert!((row[1] - row[3]).abs() - row[4] < 1e-18);
        assert!(row[4] < 1e-4 && row[5] < 1e-4);
    }
}

#[test]
fn harmonic_evolve_requires_skipping_the_envelope() {
    let rejected = run(&["evolve", "--beta", "0", "--displacement", "4"]);
    assert_eq!(exit_code(&rejected), 2);
    assert!(stderr_text(&rejected).contains("envelope"));

    let out = run(&[
        "evolve",
        "--beta",
        "0",
        "--displacement",
        "4",
        "--no-envelope",
        "--span",
        "6.283185307179586",
        "--samples",
        "5",
    ]);
    assert_eq!(exit_code(&out), 0, "stderr: {}", stderr_text(&out));
    let rows = data_rows(&stdout_text(&out));
    assert_eq!(rows.len(), 5);
    for row in &rows {
        assert_eq!(row.len(), 5);
        let t = row[0];
        assert!((row[1] - 4.0 * t.cos()).abs() < 1e-8, "t={t}");
        assert!((row[2] + 4.0 * t.sin()).abs() < 1e-8, "t={t}");
    }
}

#[test]
fn insufficient_basis_names_the_requirement() {
    let out = run(&[
        "evolve",
        "--beta",
        "1e-4",
        "--displacement",
        "4",
        "--basis",
        "20",
        "--span",
        "5",
        "--samples",
        "3",
    ]);
    assert_eq!(exit_code(&out), 3);
    assert!(
        stderr_text(&out).contains("57"),
        "stderr names required size"
    );
}

#[test]
fn unknown_preset_is_a_usage_error() {
    let out = run(&["experiment", "bogus"]);
    assert_eq!(exit_code(&out), 2);
    assert!(stderr_text(&out).contains("bogus"));
}

#[test]
fn lattice_preset_reports_derived_values() {
    let out = run(&["experiment", "lattice-35Er"]);
    assert_eq!(exit_code(&out), 0, "stderr: {}", stderr_text(&out));
    let map = report_map(&stdout_text(&out));
    assert_eq!(map["kind"], "lattice");
    assert!(close(
        parse_field(&map, "beta"),
        -3.984095364447979e-2,
        1e-12
    ));
    assert!(close(
        parse_field(&map, "displacement"),
        1.606384087797834,
        1e-12
    ));
    assert!(close(
        parse_field(&map, "t_r_s"),
        1.223625489592473e-3,
        1e-12
    ));
    assert!(close(
        parse_field(&map, "t_c_s"),
        2.4246510736900643e-4,
        1e-12
    ));
    assert!(close(
        parse_field(&map, "t_osc_s"),
        3.65628048067932e-5,
        1e-12
    ));
    let t_r = parse_field(&map, "t_r");
    let t_c = parse_field(&map, "t_c");
    let d = parse_field(&map, "displacement");
    assert!(close(t_r / t_c, std::f64::consts::PI * d, 1e-12));
    assert!(close(
        parse_field(&map, "t_osc"),
        2.0 * std::f64::consts::PI,
        1e-13
    ));
    assert!(close(
        parse_field(&map, "delta_exact"),
        4.8125961420296835e-6,
        1e-12
    ));
    assert!(parse_field(&map, "cubic_coefficient_J_per_m3") > 0.0);
}

#[test]
fn crossed_beam_preset_reports_limits() {
    let out = run(&["experiment", "crossed-beam-rb"]);
    assert_eq!(exit_code(&out), 0, "stderr: {}", stderr_text(&out));
    let map = report_map(&stdout_text(&out));
    assert_eq!(map["kind"], "crossed-beam");
    assert_eq!(map["n_max"], "19");
    assert!(close(
        parse_field(&map, "gamma_max"),
        3.1097722286464435,
        1e-12
    ));
    assert!(close(parse_field(&map, "d_max"), 4.397882061643006, 1e-12));
    assert!(close(parse_field(&map, "t_r_s"), 4.504269221027131, 1e-12));
}

#[test]
fn alpha_bound_is_rejected_via_spec_file() {
    let path = temp_path("alpha-bound.conf");
    std::fs::write(
        &path,
        "kind = lattice\ndepth_recoils = 35\nwavelength_m = 838e-9\nalpha = 0.5\n",
    )
    .unwrap();
    let out = run(&["experiment", "--spec", path.to_str().unwrap()]);
    std::fs::remove_file(&path).ok();
    assert_eq!(exit_code(&out), 2);
    assert!(stderr_text(&out).contains("alpha"));
}

#[test]
fn custom_spec_file_is_accepted() {
    let path = temp_path("custom-trap.conf");
    std::fs::write(
        &path,
        "kind = crossed-beam\nomega_z_rad_per_s = 1e4\nomega_x_rad_per_s = 9e4\nbeta = 1e-4\n",
    )
    .unwrap();
    let out = run(&["experiment", "--spec", path.to_str().unwrap()]);
    std::fs::remove_file(&path).ok();
    assert_eq!(exit_code(&out), 0, "stderr: {}", stderr_text(&out));
    let map = report_map(&stdout_text(&out));
    assert_eq!(map["n_max"], "9");
}

#[test]
fn malformed_spec_file_is_a_usage_error() {
    let path = temp_path("malformed.conf");
    std::fs::write(&path, "kind = lattice\ndepth_recoils\n").unwrap();
    let out = run(&["experiment", "--spec", path.to_str().unwrap()]);
    std::fs::remove_file(&path).ok();
    assert_eq!(exit_code(&out), 2);
}

#[test]
fn strong_beta_prints_a_series_warning() {
    let out = run(&[
        "evolve",
        "--beta",
        "0.3",
        "--displacement",
        "1",
        "--span",
        "5",
        "--samples",
        "3",
    ]);
    assert_eq!(exit_code(&out), 0, "stderr: {}", stderr_text(&out));
    assert!(stderr_text(&out).contains("warning"));
}

#[test]
fn envelope_report_matches_library_identities() {
    let out = run(&["envelope-report", "--beta", "1e-4", "--displacement", "4"]);
    assert_eq!(exit_code(&out), 0);
    let map = report_map(&stdout_text(&out));
    let t_r = parse_field(&map, "T_r");
    let t_c = parse_field(&map, "T_c");
    assert!(close(t_r / t_c, std::f64::consts::PI * 4.0, 1e-12));
    assert_eq!(map["applicable"], "true");
    assert_eq!(map["order"], "second-order-beta");
}

#[test]
fn thread_count_does_not_change_output() {
    let args = [
        "evolve",
        "--preset",
        "fig1",
        "--samples",
        "2001",
        "--span",
        "5000",
    ];
    let single = run(&[&args[..], &["--threads", "1"]].concat());
    let multi = run(&[&args[..], &["--threads", "3"]].concat());
    assert_eq!(exit_code(&single), 0, "stderr: {}", stderr_text(&single));
    assert_eq!(exit_code(&multi), 0, "stderr: {}", stderr_text(&multi));
    assert!(!single.stdout.is_empty());
    assert_eq!(single.stdout, multi.stdout);
}

#[test]
fn env_var_mirrors_the_threads_flag() {
    let ok = binary()
        .args([
            "spectrum", "--beta", "1e-3", "--levels", "4", "--method", "exact",
        ])
        .env("REVIVAL_SIM_THREADS", "2")
        .output()
        .expect("binary runs");
    assert_eq!(exit_code(&ok), 0, "stderr: {}", stderr_text(&ok));

    let bad = binary()
        .args(["spectrum", "--beta", "1e-3", "--levels", "4"])
        .env("REVIVAL_SIM_THREADS", "soon")
        .output()
        .expect("binary runs");
    assert_eq!(exit_code(&bad), 2);
    assert!(stderr_text(&bad).contains("REVIVAL_SIM_THREADS"));
}

#[test]
fn output_flag_writes_the_same_bytes_as_stdout() {
    let path = temp_path("spectrum-out.csv");
    let to_file = run(&[
        "spectrum",
        "--beta",
        "1e-3",
        "--levels",
        "8",
        "--method",
        "all",
        "--output",
        path.to_str().unwrap(),
    ]);
    assert_eq!(exit_code(&to_file), 0);
    let file_bytes = std::fs::read(&path).unwrap();
    std::fs::remove_file(&path).ok();
    let to_stdout = run(&[
        "spectrum", "--beta", "1e-3", "--levels", "8", "--method", "all",
    ]);
    assert_eq!(file_bytes, to_stdout.stdout);
}

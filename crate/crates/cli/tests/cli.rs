//! End-to-end tests against the built binary: command output, file formats,
//! exit codes, determinism, and environment overrides.

use std::io::Write;
use std::path::Path;
use std::process::{Command, Output};

use tempfile::NamedTempFile;

fn zigzag() -> Command {
    Command::new(env!("CARGO_BIN_EXE_zigzag"))
}

fn write_config(body: &str) -> NamedTempFile {
    let mut file = NamedTempFile::new().expect("temp config");
    file.write_all(body.as_bytes()).expect("write config");
    file
}

fn run_ok(args: &[&str], config: Option<&Path>) -> String {
    let output = run(args, config);
    assert!(
        output.status.success(),
        "exit {:?}: {}",
        output.status.code(),
        String::from_utf8_lossy(&output.stderr)
    );
    String::from_utf8(output.stdout).expect("utf8 output")
}

fn run(args: &[&str], config: Option<&Path>) -> Output {
    let mut cmd = zigzag();
    cmd.args(args);
    if let Some(path) = config {
        cmd.arg("--config").arg(path);
    }
    cmd.output().expect("spawn zigzag")
}

fn csv_value(report: &str, key: &str) -> f64 {
    for line in report.lines() {
        if let Some((name, value)) = line.split_once(',') {
            if name == key {
                return value.parse().expect("numeric csv value");
            }
        }
    }
    panic!("key {key} not found in report:\n{report}");
}

fn fit_line(report: &str, prefix: &str) -> f64 {
    for line in report.lines() {
        if let Some(rest) = line.strip_prefix(prefix) {
            return rest.trim_start_matches(" = ").trim().parse().expect("fit value");
        }
    }
    panic!("prefix {prefix} not found:\n{report}");
}

#[test]
fn modes_reports_design_numbers() {
    let cfg = write_config("[cavity]\nl_target_mm = 11\nR_mm = 50\n");
    let report = run_ok(&["modes"], Some(cfg.path()));
    assert!((csv_value(&report, "cavity_length_mm") - 24.7884).abs() < 1e-3);
    assert!((csv_value(&report, "transverse_spacing_0_3_mhz") - 28.26).abs() < 0.1);
    assert!((csv_value(&report, "operating_yaw_deg") - 8.41).abs() < 0.01);
}

#[test]
fn modes_json_roundtrips() {
    let report = run_ok(&["modes", "--format", "json"], None);
    let parsed: serde_json::Value = serde_json::from_str(&report).expect("valid json");
    let spacing = parsed["transverse_spacing_0_3_mhz"].as_f64().unwrap();
    assert!((spacing - 28.26).abs() < 0.1);
}

#[test]
fn modes_domain_error_is_exit_3() {
    // g = 0.4: no no-pendulum zigzag design exists
    let cfg = write_config("[cavity]\nL_mm = 30\nR_mm = 50\n");
    let output = run(&["modes"], Some(cfg.path()));
    assert_eq!(output.status.code(), Some(3));
    let err = String::from_utf8_lossy(&output.stderr);
    assert!(err.contains("g > 1/2"), "stderr: {err}");
}

#[test]
fn unknown_key_is_exit_2() {
    let cfg = write_config("[cavity]\nbogus = 1\n");
    let output = run(&["modes"], Some(cfg.path()));
    assert_eq!(output.status.code(), Some(2));
}

#[test]
fn conflicting_length_keys_are_exit_2() {
    let cfg = write_config("[cavity]\nL_mm = 24.8\nl_target_mm = 11\n");
    let output = run(&["modes"], Some(cfg.path()));
    assert_eq!(output.status.code(), Some(2));
}

#[test]
fn yaw_sweep_slope_near_85() {
    let cfg = write_config(
        "[cavity]\nl_target_mm = 11\n[pendulum]\nthickness_mm = 0.001\n\
         [sweep]\ndof = yaw\nmin_urad = -1.5\nmax_urad = 1.5\npoints = 31\n",
    );
    let report = run_ok(&["sweep"], Some(cfg.path()));
    let slope = fit_line(&report, "# fitted_slope_hz_per_rad").abs();
    assert!((slope - 85e12).abs() / 85e12 < 0.02, "slope {slope:.4e}");
}

#[test]
fn pitch_sweep_is_quadratic() {
    let cfg = write_config(
        "[pendulum]\nthickness_mm = 0.001\n[sweep]\ndof = pitch\nmin_urad = -500\nmax_urad = 500\npoints = 21\n",
    );
    let report = run_ok(&["sweep"], Some(cfg.path()));
    let slope = fit_line(&report, "# fitted_slope_hz_per_rad =").abs();
    let curvature = fit_line(&report, "# fitted_curvature_hz_per_rad2").abs();
    // linear term below the fit scale set by the quadratic one
    assert!(slope * 5e-4 < 1e-3 * curvature * 5e-4 * 5e-4 + 1.0, "slope {slope:.3e}");
    assert!((curvature - 2.93e14).abs() / 2.93e14 < 0.01, "curvature {curvature:.3e}");
}

#[test]
fn translation_triplet_ratios() {
    let base = "[cavity]\nl_target_mm = 11\n[pendulum]\nthickness_mm = 0.001\ndelta_alpha_deg = 0.2\n\
                [pose]\nat_operating_yaw = false\nyaw_deg = 8.5\n";
    let mut slopes = Vec::new();
    for dof in ["transverse", "x-axis", "longitudinal"] {
        let cfg = write_config(&format!(
            "{base}[sweep]\ndof = {dof}\nmin_um = -1\nmax_um = 1\npoints = 11\n"
        ));
        let report = run_ok(&["sweep"], Some(cfg.path()));
        slopes.push(fit_line(&report, "# fitted_slope_hz_per_m"));
    }
    let sin_alpha = 8.5f64.to_radians().sin();
    assert!(((slopes[1] / slopes[0]).abs() - sin_alpha).abs() / sin_alpha < 0.01);
    assert!((slopes[2] / slopes[0]).abs() < 1e-4);
}

#[test]
fn transverse_sweep_truncates_with_marker() {
    let cfg = write_config(
        "[pendulum]\nthickness_mm = 0.001\ndelta_alpha_deg = 0.2\n\
         [sweep]\ndof = transverse\nmin_mm = 0\nmax_mm = 8\npoints = 41\n",
    );
    let report = run_ok(&["sweep"], Some(cfg.path()));
    assert!(report.contains("# range_exceeded_at_m"), "no marker:\n{report}");
}

#[test]
fn noise_power_scan_scales_qrpn() {
    let mut columns = Vec::new();
    for p_in in ["0.04", "0.4", "4"] {
        let cfg = write_config(&format!(
            "[noise]\nP_in_uW = {p_in}\ngrid_min_hz = 10\ngrid_max_hz = 10\ngrid_points = 1\n"
        ));
        let report = run_ok(&["noise"], Some(cfg.path()));
        let header: Vec<&str> = report.lines().next().unwrap().split(',').collect();
        let row: Vec<&str> = report.lines().nth(1).unwrap().split(',').collect();
        let idx = header.iter().position(|h| *h == "qrpn_torque_n2m2_per_hz").unwrap();
        columns.push(row[idx].parse::<f64>().unwrap());
    }
    assert!((columns[1] / columns[0] - 10.0).abs() < 1e-9);
    assert!((columns[2] / columns[1] - 10.0).abs() < 1e-9);
}

#[test]
fn shot_conventions_differ_by_hbar() {
    let grab = |convention: &str| -> f64 {
        let cfg = write_config(&format!(
            "[noise]\nshot_convention = {convention}\ngrid_min_hz = 10\ngrid_max_hz = 10\ngrid_points = 1\n"
        ));
        let report = run_ok(&["noise"], Some(cfg.path()));
        let header: Vec<&str> = report.lines().next().unwrap().split(',').collect();
        let row: Vec<&str> = report.lines().nth(1).unwrap().split(',').collect();
        let idx = header.iter().position(|h| *h == "shot_angle_rad2_per_hz").unwrap();
        row[idx].parse().unwrap()
    };
    let ratio = grab("paper") / grab("sql");
    let hbar = 1.054571817e-34;
    assert!((ratio * hbar - 1.0).abs() < 1e-9, "ratio {ratio:.6e}");
}

#[test]
fn range_reports_design_span() {
    let report = run_ok(&["range"], None);
    let theta_deg = fit_line(&report, "# theta_rng_deg");
    assert!((theta_deg - 0.1959).abs() < 1e-3);
}

#[test]
fn validate_passes_by_default() {
    let cfg = write_config("[validate]\nposes = 60\n");
    let output = run(&["validate"], Some(cfg.path()));
    assert_eq!(output.status.code(), Some(0));
    let text = String::from_utf8_lossy(&output.stdout);
    assert!(text.contains("all checks passed"));
}

#[test]
fn injected_mismatch_fails_validation_with_named_check() {
    let cfg = write_config("[validate]\nposes = 40\ninject_delta_alpha_offset_deg = 0.05\n");
    let output = run(&["validate"], Some(cfg.path()));
    assert_eq!(output.status.code(), Some(1));
    let text = String::from_utf8_lossy(&output.stdout);
    assert!(text.contains("FAIL  translation-oracle"), "output:\n{text}");
}

#[test]
fn identical_config_gives_byte_identical_output() {
    let cfg = write_config("[sweep]\ndof = yaw\npoints = 11\n");
    let a = run_ok(&["sweep"], Some(cfg.path()));
    let b = run_ok(&["sweep"], Some(cfg.path()));
    assert_eq!(a, b);
    let n1 = run_ok(&["noise"], Some(cfg.path()));
    let n2 = run_ok(&["noise"], Some(cfg.path()));
    assert_eq!(n1, n2);
}

#[test]
fn out_flag_writes_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("modes.csv");
    let output = zigzag()
        .args(["modes", "--out"])
        .arg(&path)
        .output()
        .expect("spawn");
    assert!(output.status.success());
    let written = std::fs::read_to_string(&path).unwrap();
    assert!(written.starts_with("quantity,value\n"));
}

#[test]
fn env_override_changes_wavelength() {
    let output = zigzag()
        .args(["modes"])
        .env("ZIGZAG_CAVITY__lambda_nm", "1064")
        .output()
        .expect("spawn");
    assert!(output.status.success());
    let report = String::from_utf8(output.stdout).unwrap();
    // waist scales with sqrt(lambda): 73.2 um * sqrt(1064/780) = 85.5 um
    let w0 = csv_value(&report, "waist_w0_um");
    assert!((w0 - 85.5).abs() < 0.2, "w0 = {w0}");
}

#[test]
fn env_override_unknown_key_is_exit_2() {
    let output = zigzag()
        .args(["modes"])
        .env("ZIGZAG_CAVITY__nonsense", "1")
        .output()
        .expect("spawn");
    assert_eq!(output.status.code(), Some(2));
}

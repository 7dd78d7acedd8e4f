//! The five CLI commands. Each returns the serialized report body; the
//! caller handles output routing and exit codes.

use serde::Serialize;
use zigzag_core::modes::{mode_frequencies, transverse_mode_spacing, ModeGeometry};
use zigzag_core::noise::{format_sci, total_budget};
use zigzag_core::range::{coupling_efficiency, sensing_range};
use zigzag_core::raytrace::{fit_slope_curvature, sweep};
use zigzag_core::validate::{all_passed, run_all, CheckOutcome, ValidationConfig};
use zigzag_core::{DomainError, RaytraceError};

use crate::config::RunConfig;

/// Command failure, carrying the process exit code.
#[derive(Debug)]
pub struct CommandError {
    pub message: String,
    pub exit_code: i32,
}

impl CommandError {
    fn domain(e: DomainError) -> Self {
        Self { message: e.to_string(), exit_code: 3 }
    }
    fn raytrace(e: RaytraceError) -> Self {
        Self { message: e.to_string(), exit_code: 3 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Serialize)]
struct ModesReport {
    cavity_length_mm: f64,
    mirror_curvature_mm: f64,
    stability_g: f64,
    beam_separation_mm: f64,
    zigzag_length_mm: f64,
    delta_angle_deg: f64,
    operating_yaw_deg: f64,
    waist_w0_um: f64,
    fsr_on_ghz: f64,
    fsr_zig_ghz: f64,
    linewidth_on_mhz: f64,
    linewidth_zig_mhz: f64,
    transverse_spacing_0_3_mhz: f64,
}

fn key_value_csv(pairs: &[(&str, f64)]) -> String {
    let mut out = String::from("quantity,value\n");
    for (name, value) in pairs {
        out.push_str(name);
        out.push(',');
        out.push_str(&format_sci(*value));
        out.push('\n');
    }
    out
}

pub fn cmd_modes(cfg: &RunConfig, format: Format) -> Result<String, CommandError> {
    let mode = ModeGeometry::for_cavity(&cfg.cavity).map_err(CommandError::domain)?;
    let freqs = mode_frequencies(&cfg.cavity).map_err(CommandError::domain)?;
    let report = ModesReport {
        cavity_length_mm: cfg.cavity.length * 1e3,
        mirror_curvature_mm: cfg.cavity.radius * 1e3,
        stability_g: cfg.cavity.stability_parameter(),
        beam_separation_mm: mode.beam_sep_l * 1e3,
        zigzag_length_mm: mode.zig_length * 1e3,
        delta_angle_deg: mode.delta_angle.to_degrees(),
        operating_yaw_deg: mode.operating_yaw.to_degrees(),
        waist_w0_um: mode.waist_w0 * 1e6,
        fsr_on_ghz: freqs.fsr_on / 1e9,
        fsr_zig_ghz: freqs.fsr_zig / 1e9,
        linewidth_on_mhz: freqs.linewidth_on / 1e6,
        linewidth_zig_mhz: freqs.linewidth_zig / 1e6,
        transverse_spacing_0_3_mhz: transverse_mode_spacing(&cfg.cavity, 0, 3) / 1e6,
    };
    Ok(match format {
        Format::Json => serde_json::to_string_pretty(&report).expect("report serializes"),
        Format::Csv => key_value_csv(&[
            ("cavity_length_mm", report.cavity_length_mm),
            ("mirror_curvature_mm", report.mirror_curvature_mm),
            ("stability_g", report.stability_g),
            ("beam_separation_mm", report.beam_separation_mm),
            ("zigzag_length_mm", report.zigzag_length_mm),
            ("delta_angle_deg", report.delta_angle_deg),
            ("operating_yaw_deg", report.operating_yaw_deg),
            ("waist_w0_um", report.waist_w0_um),
            ("fsr_on_ghz", report.fsr_on_ghz),
            ("fsr_zig_ghz", report.fsr_zig_ghz),
            ("linewidth_on_mhz", report.linewidth_on_mhz),
            ("linewidth_zig_mhz", report.linewidth_zig_mhz),
            ("transverse_spacing_0_3_mhz", report.transverse_spacing_0_3_mhz),
        ]),
    })
}

/// Shift model note carried in every sweep report.
const SWEEP_MODEL_NOTE: &str =
    "shifts from geometric path length; Gouy-phase contributions excluded";

#[derive(Debug, Serialize)]
struct SweepReport {
    dof: String,
    offset_unit: &'static str,
    model: &'static str,
    points: Vec<(f64, f64)>,
    fitted_slope_hz_per_unit: f64,
    fitted_curvature_hz_per_unit2: f64,
    truncated_at: Option<f64>,
    truncation_reason: Option<String>,
}

pub fn cmd_sweep(cfg: &RunConfig, format: Format) -> Result<String, CommandError> {
    let pose = cfg.reference_pose().map_err(CommandError::domain)?;
    let grid: Vec<f64> = (0..cfg.sweep_points)
        .map(|i| {
            cfg.sweep_min
                + (cfg.sweep_max - cfg.sweep_min) * (i as f64) / ((cfg.sweep_points - 1) as f64)
        })
        .collect();
    let result = sweep(&cfg.cavity, &cfg.pendulum, &pose, cfg.sweep_dof, &grid)
        .map_err(CommandError::raytrace)?;
    let (slope, curvature) = fit_slope_curvature(&result.points);
    let report = SweepReport {
        dof: format!("{:?}", cfg.sweep_dof).to_lowercase(),
        offset_unit: if cfg.sweep_dof.is_angle() { "rad" } else { "m" },
        model: SWEEP_MODEL_NOTE,
        points: result.points.iter().map(|p| (p.offset, p.shift_hz)).collect(),
        fitted_slope_hz_per_unit: slope,
        fitted_curvature_hz_per_unit2: curvature,
        truncated_at: result.truncated.as_ref().map(|(off, _)| *off),
        truncation_reason: result.truncated.as_ref().map(|(_, e)| e.to_string()),
    };
    Ok(match format {
        Format::Json => serde_json::to_string_pretty(&report).expect("report serializes"),
        Format::Csv => {
            let unit = report.offset_unit;
            let mut out = format!("# {SWEEP_MODEL_NOTE}\noffset_{unit},shift_hz\n");
            for (offset, shift) in &report.points {
                out.push_str(&format_sci(*offset));
                out.push(',');
                out.push_str(&format_sci(*shift));
                out.push('\n');
            }
            out.push_str(&format!(
                "# fitted_slope_hz_per_{unit} = {}\n",
                format_sci(report.fitted_slope_hz_per_unit)
            ));
            out.push_str(&format!(
                "# fitted_curvature_hz_per_{unit}2 = {}\n",
                format_sci(report.fitted_curvature_hz_per_unit2)
            ));
            if let Some(offset) = report.truncated_at {
                out.push_str(&format!(
                    "# range_exceeded_at_{unit} = {} ({})\n",
                    format_sci(offset),
                    report.truncation_reason.as_deref().unwrap_or("")
                ));
            }
            out
        }
    })
}

pub fn cmd_noise(cfg: &RunConfig, format: Format) -> Result<String, CommandError> {
    let (min, max, count) = cfg.noise_grid;
    let grid: Vec<f64> = (0..count)
        .map(|k| min * (max / min).powf(k as f64 / (count - 1).max(1) as f64))
        .collect();
    let budget = total_budget(&cfg.noise, &grid, cfg.shot_convention);
    Ok(match format {
        Format::Json => budget.to_json(),
        Format::Csv => budget.to_csv(),
    })
}

#[derive(Debug, Serialize)]
struct RangeReport {
    stability_g: f64,
    waist_w0_um: f64,
    theta_rng_rad: f64,
    theta_rng_deg: f64,
    efficiency_curve: Vec<(f64, f64)>,
}

pub fn cmd_range(cfg: &RunConfig, format: Format) -> Result<String, CommandError> {
    let g = cfg.cavity.stability_parameter();
    let mode = ModeGeometry::for_cavity(&cfg.cavity).map_err(CommandError::domain)?;
    let theta_rng = sensing_range(g, mode.waist_w0, cfg.cavity.lambda).map_err(CommandError::domain)?;
    let theta_max = cfg.range_theta_max.unwrap_or(1.2 * theta_rng);
    let mut curve = Vec::with_capacity(cfg.range_points);
    for i in 0..cfg.range_points {
        let dt = theta_max * (i as f64) / ((cfg.range_points - 1).max(1) as f64);
        let overlap = coupling_efficiency(dt, g, mode.waist_w0, cfg.cavity.lambda)
            .map_err(CommandError::domain)?;
        curve.push((dt, overlap.coupling_efficiency));
    }
    let report = RangeReport {
        stability_g: g,
        waist_w0_um: mode.waist_w0 * 1e6,
        theta_rng_rad: theta_rng,
        theta_rng_deg: theta_rng.to_degrees(),
        efficiency_curve: curve,
    };
    Ok(match format {
        Format::Json => serde_json::to_string_pretty(&report).expect("report serializes"),
        Format::Csv => {
            let mut out = String::from("delta_theta_rad,coupling_efficiency\n");
            for (dt, eff) in &report.efficiency_curve {
                out.push_str(&format_sci(*dt));
                out.push(',');
                out.push_str(&format_sci(*eff));
                out.push('\n');
            }
            out.push_str(&format!("# theta_rng_rad = {}\n", format_sci(report.theta_rng_rad)));
            out.push_str(&format!("# theta_rng_deg = {}\n", format_sci(report.theta_rng_deg)));
            out
        }
    })
}

#[derive(Debug, Serialize)]
struct ValidateReport {
    passed: bool,
    checks: Vec<ValidateLine>,
}

#[derive(Debug, Serialize)]
struct ValidateLine {
    name: String,
    passed: bool,
    detail: String,
}

/// Returns (body, all_passed); the caller maps failures to exit code 1.
pub fn cmd_validate(cfg: &RunConfig, format: Format, seed: u64) -> (String, bool) {
    let vconfig = ValidationConfig {
        cavity: cfg.cavity,
        poses: cfg.validate_poses,
        seed,
        inject_delta_alpha_offset: cfg.inject_delta_alpha_offset,
    };
    let outcomes = run_all(&vconfig);
    let ok = all_passed(&outcomes);
    let body = match format {
        Format::Json => {
            let report = ValidateReport {
                passed: ok,
                checks: outcomes
                    .iter()
                    .map(|c| ValidateLine {
                        name: c.name.to_string(),
                        passed: c.passed,
                        detail: c.detail.clone(),
                    })
                    .collect(),
            };
            serde_json::to_string_pretty(&report).expect("report serializes")
        }
        Format::Csv => {
            let mut out = String::new();
            for CheckOutcome { name, passed, detail } in &outcomes {
                out.push_str(if *passed { "PASS" } else { "FAIL" });
                out.push_str("  ");
                out.push_str(name);
                out.push_str(" — ");
                out.push_str(detail);
                out.push('\n');
            }
            out.push_str(if ok { "all checks passed\n" } else { "VALIDATION FAILED\n" });
            out
        }
    };
    (body, ok)
}


//! Closed-form sensitivities and finite-difference extraction.
//!
//! The closed forms are the leading-order models: yaw slope (c/λ) l/L_zig
//! with dimensionless S = 2lℱ/λ, pitch curvature (c/λ)(1+g)/4g, transverse
//! slope (c/λ) δα/2L, and the translation/roll path-change projections. The
//! finite-difference path extracts the same quantities from the ray tracer
//! with Richardson extrapolation for cross-validation.

use serde::Serialize;

use crate::constants::SPEED_OF_LIGHT;
use crate::error::{DomainError, RaytraceError};
use crate::geometry::{CavityConfig, PendulumPose, PendulumSpec};
use crate::modes::ModeGeometry;
use crate::raytrace::{frequency_shift, solve_zigzag_path, SweepDof};

/// How a [`SensitivityReport`] was produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum SensitivityMethod {
    ClosedForm,
    FiniteDifference,
}

/// Step sizes and truncation estimates of a finite-difference run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FiniteDifferenceInfo {
    /// First-derivative step for angles (rad).
    pub angle_step: f64,
    /// First-derivative step for translations (m).
    pub translation_step: f64,
    /// Step used for the pitch second derivative (rad).
    pub pitch_step: f64,
    /// Richardson truncation estimate on the yaw slope (relative).
    pub yaw_truncation: f64,
}

/// All first- and second-order sensitivities of the zigzag mode.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SensitivityReport {
    pub yaw_hz_per_rad: f64,
    /// Eq.-style dimensionless yaw sensitivity, shift per linewidth per rad.
    pub yaw_s: f64,
    pub pitch2_hz_per_rad2: f64,
    pub pitch2_s2: f64,
    pub transverse_hz_per_m: f64,
    pub transverse_s: f64,
    pub roll_hz_per_rad: f64,
    /// Mixed yaw–transverse derivative (Hz per rad per m); finite-difference
    /// path only.
    pub yaw_transverse_cross: Option<f64>,
    /// Mixed pitch–roll derivative (Hz per rad²); finite-difference path
    /// only. Vanishes for a centered, bend-free pendulum.
    pub pitch_roll_cross: Option<f64>,
    pub method: SensitivityMethod,
    pub finite_difference: Option<FiniteDifferenceInfo>,
}

/// Yaw sensitivity: (c/λ) l / L_zig in Hz/rad and S = 2lℱ/λ.
///
/// S uses the zigzag-mode finesse and is independent of the cavity length.
pub fn yaw_sensitivity(cfg: &CavityConfig, mode: &ModeGeometry) -> (f64, f64) {
    let slope = (SPEED_OF_LIGHT / cfg.lambda) * mode.beam_sep_l / mode.zig_length;
    let s = 2.0 * mode.beam_sep_l * cfg.finesse_zig / cfg.lambda;
    (slope, s)
}

/// Pitch sensitivity: cavity shift per squared pitch angle,
/// (c/λ)(1+g)/4g, and S⁽²⁾ = (L/λ)((1+g)/g) ℱ.
pub fn pitch_sensitivity(cfg: &CavityConfig) -> Result<(f64, f64), DomainError> {
    let g = cfg.stability_parameter();
    if g <= 0.0 {
        return Err(DomainError("pitch sensitivity diverges at g = 0".into()));
    }
    let curvature = (SPEED_OF_LIGHT / cfg.lambda) * (1.0 + g) / (4.0 * g);
    let s2 = (cfg.length / cfg.lambda) * ((1.0 + g) / g) * cfg.finesse_zig;
    Ok((curvature, s2))
}

/// Residual transverse-translation sensitivity of a bent pendulum:
/// (c/λ) δα/2L in Hz/m and S = 2δαℱ/λ.
pub fn transverse_sensitivity(cfg: &CavityConfig, delta_alpha: f64) -> (f64, f64) {
    let slope = (SPEED_OF_LIGHT / cfg.lambda) * delta_alpha / (2.0 * cfg.length);
    let s = 2.0 * delta_alpha * cfg.finesse_zig / cfg.lambda;
    (slope, s)
}

/// Path-length change for an in-plane translation of magnitude `v` at
/// azimuth `phi`: δs = v sin(φ−α) δα − v β cos(φ−α) δβ.
pub fn translation_path_change(
    v: f64,
    phi: f64,
    alpha: f64,
    beta: f64,
    delta_alpha: f64,
    delta_beta: f64,
) -> f64 {
    v * (phi - alpha).sin() * delta_alpha - v * beta * (phi - alpha).cos() * delta_beta
}

/// Path-length change for a roll rotation at central pitch `beta`:
/// δs ≈ γ l β.
pub fn roll_path_change(gamma: f64, width_l: f64, beta: f64) -> f64 {
    gamma * width_l * beta
}

/// Path-length change for a vertical translation: δs = v δβ.
pub fn z_translation_path_change(v: f64, delta_beta: f64) -> f64 {
    v * delta_beta
}

/// Transverse translation accompanying the roll normal mode of a suspended
/// pendulum: −(I/ξm) γ.
pub fn roll_mode_translation(gamma: f64, i_roll: f64, xi: f64, m: f64) -> f64 {
    -(i_roll / (xi * m)) * gamma
}

/// Full closed-form report at a cavity's design geometry.
pub fn closed_form_sensitivities(
    cfg: &CavityConfig,
    spec: &PendulumSpec,
) -> Result<SensitivityReport, DomainError> {
    let mode = ModeGeometry::for_cavity(cfg)?;
    let (yaw, yaw_s) = yaw_sensitivity(cfg, &mode);
    let (pitch, pitch_s2) = pitch_sensitivity(cfg)?;
    let (transverse, transverse_s) = transverse_sensitivity(cfg, spec.delta_alpha);
    Ok(SensitivityReport {
        yaw_hz_per_rad: yaw,
        yaw_s,
        pitch2_hz_per_rad2: pitch,
        pitch2_s2: pitch_s2,
        transverse_hz_per_m: transverse,
        transverse_s,
        // pure roll decouples at the aligned (β = 0) operating pose
        roll_hz_per_rad: 0.0,
        yaw_transverse_cross: None,
        pitch_roll_cross: None,
        method: SensitivityMethod::ClosedForm,
        finite_difference: None,
    })
}

const ANGLE_STEP: f64 = 1e-8;
const TRANSLATION_STEP: f64 = 1e-9;
const PITCH_STEP: f64 = 2e-4;

/// Richardson-extrapolated central first derivative of the frequency shift
/// along one DOF. Returns (derivative, truncation estimate).
fn richardson_slope(
    cfg: &CavityConfig,
    spec: &PendulumSpec,
    pose: &PendulumPose,
    dof: SweepDof,
    h: f64,
) -> Result<(f64, f64), RaytraceError> {
    let shift = |offset: f64| -> Result<f64, RaytraceError> {
        frequency_shift(cfg, spec, pose, &dof.apply(pose, offset))
    };
    let d_full = (shift(h)? - shift(-h)?) / (2.0 * h);
    let d_half = (shift(0.5 * h)? - shift(-0.5 * h)?) / h;
    let extrapolated = (4.0 * d_half - d_full) / 3.0;
    let truncation = ((d_half - d_full) / 3.0).abs();
    Ok((extrapolated, truncation))
}

/// Extract the sensitivities from the ray tracer by central differences
/// with Richardson extrapolation.
pub fn finite_difference_sensitivities(
    cfg: &CavityConfig,
    spec: &PendulumSpec,
    pose: &PendulumPose,
) -> Result<SensitivityReport, RaytraceError> {
    let reference = solve_zigzag_path(cfg, spec, pose, None)?;

    let (yaw, yaw_trunc) = richardson_slope(cfg, spec, pose, SweepDof::Yaw, ANGLE_STEP)?;
    let (transverse, _) =
        richardson_slope(cfg, spec, pose, SweepDof::Transverse, TRANSLATION_STEP)?;
    let (roll, _) = richardson_slope(cfg, spec, pose, SweepDof::Roll, ANGLE_STEP)?;

    // pitch second derivative needs a larger step to clear the solver noise
    // floor; Richardson over h and h/2 removes the leading truncation term
    let shift_pitch = |offset: f64| -> Result<f64, RaytraceError> {
        frequency_shift(cfg, spec, pose, &SweepDof::Pitch.apply(pose, offset))
    };
    let h = PITCH_STEP;
    let c_full = (shift_pitch(h)? + shift_pitch(-h)?) / (h * h);
    let c_half = (shift_pitch(0.5 * h)? + shift_pitch(-0.5 * h)?) / (0.25 * h * h);
    let pitch_curvature = ((4.0 * c_half - c_full) / 3.0) / 2.0;

    // mixed derivatives from four-point stencils
    let cross_stencil = |dof_a: SweepDof, ha: f64, dof_b: SweepDof, hb: f64| -> Result<f64, RaytraceError> {
        let corner = |sa: f64, sb: f64| -> Result<f64, RaytraceError> {
            let moved = dof_b.apply(&dof_a.apply(pose, sa * ha), sb * hb);
            frequency_shift(cfg, spec, pose, &moved)
        };
        Ok((corner(1.0, 1.0)? - corner(1.0, -1.0)? - corner(-1.0, 1.0)? + corner(-1.0, -1.0)?)
            / (4.0 * ha * hb))
    };
    let yaw_transverse = cross_stencil(SweepDof::Yaw, 1e-6, SweepDof::Transverse, 1e-7)?;
    let pitch_roll = cross_stencil(SweepDof::Pitch, 2e-4, SweepDof::Roll, 2e-4)?;

    // express S values through the mode linewidth implied by the solved path
    let fsr = SPEED_OF_LIGHT / (2.0 * reference.roundtrip_s);
    let per_linewidth = cfg.finesse_zig / fsr;

    Ok(SensitivityReport {
        yaw_hz_per_rad: yaw,
        yaw_s: yaw.abs() * per_linewidth,
        pitch2_hz_per_rad2: pitch_curvature.abs(),
        pitch2_s2: pitch_curvature.abs() * per_linewidth,
        transverse_hz_per_m: transverse,
        transverse_s: transverse.abs() * per_linewidth,
        roll_hz_per_rad: roll,
        yaw_transverse_cross: Some(yaw_transverse),
        pitch_roll_cross: Some(pitch_roll),
        method: SensitivityMethod::FiniteDifference,
        finite_difference: Some(FiniteDifferenceInfo {
            angle_step: ANGLE_STEP,
            translation_step: TRANSLATION_STEP,
            pitch_step: PITCH_STEP,
            yaw_truncation: yaw_trunc / yaw.abs().max(f64::MIN_POSITIVE),
        }),
    })
}

//! Closed-form cavity mode geometry.
//!
//! The cavity is built around the *no-pendulum zigzag*: a self-replicating
//! geometric path that exists (for g > 1/2) without the pendulum, whose two
//! parallel normal-incidence end beams the pendulum faces later intercept at
//! right angles. Everything observable about the cavity design derives from
//! it: the beam separation, the operating yaw angle, the zigzag mode length,
//! the free spectral ranges and linewidths, and the transverse-mode spacing
//! used to verify the cavity length during assembly.

use nalgebra::Vector3;
use serde::Serialize;

use crate::constants::SPEED_OF_LIGHT;
use crate::error::DomainError;
use crate::geometry::{yaw_pitch_unit, CavityConfig};

/// Solved no-pendulum zigzag geometry for one cavity configuration.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ModeGeometry {
    /// Separation of the two parallel zigzag end beams (m).
    pub beam_sep_l: f64,
    /// Exact geometric length of the zigzag path P1-M1-M2-P2 for a
    /// zero-thickness pendulum at the operating pose (m).
    pub zig_length: f64,
    /// Beam waist at the cavity center (m).
    pub waist_w0: f64,
    /// Tilt angle of the end beams to the cavity axis (rad).
    pub delta_angle: f64,
    /// Central pendulum yaw at the operating pose; equals `delta_angle`
    /// because the faces sit perpendicular to the end beams (rad).
    pub operating_yaw: f64,
}

/// Internals of the exact construction, shared with the ray-trace seeding
/// and with test oracles.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ZigzagConstruction {
    /// Mirror reflection point on the x > 0 mirror (the symmetric partner
    /// is its point reflection through the origin).
    pub m1: Vector3<f64>,
    /// Length of the crossing chord M1-M2 (m).
    pub crossing: f64,
    /// Length of each end segment M_i-P_i for a zero-thickness pendulum (m).
    pub end_segment: f64,
    /// Cosine of the incidence angle at the spherical mirrors.
    pub cos_incidence: f64,
}

/// tan δ and the beam separation l of the no-pendulum zigzag.
///
/// tan δ = √((2g+5)(2g−1)) / (2g²+4g−1), l = R sin δ (1+g). The
/// configuration only exists for g > 1/2.
pub fn no_pendulum_zigzag(g: f64, radius: f64) -> Result<(f64, f64), DomainError> {
    if !(g > 0.5) {
        return Err(DomainError(format!(
            "no-pendulum zigzag only exists if g > 1/2 (got g = {g:.6})"
        )));
    }
    if g > 1.0 {
        return Err(DomainError(format!("stability parameter g = {g:.6} > 1")));
    }
    let tan_delta = ((2.0 * g + 5.0) * (2.0 * g - 1.0)).sqrt() / (2.0 * g * g + 4.0 * g - 1.0);
    let sin_delta = tan_delta / (1.0 + tan_delta * tan_delta).sqrt();
    let l = radius * sin_delta * (1.0 + g);
    Ok((tan_delta, l))
}

/// Beam separation from the stability parameter, the closed form the
/// construction reduces to: l = R √(1 − 1/(4(g²+2g−1))).
pub fn beam_separation_closed_form(g: f64, radius: f64) -> Result<f64, DomainError> {
    if !(g > 0.5) || g > 1.0 {
        return Err(DomainError(format!("beam separation needs 1/2 < g ≤ 1, got {g:.6}")));
    }
    Ok(radius * (1.0 - 0.25 / (g * g + 2.0 * g - 1.0)).sqrt())
}

/// Largest attainable beam separation, reached at g = 1: R √(7/8).
pub fn max_beam_separation(radius: f64) -> f64 {
    radius * (7.0f64 / 8.0).sqrt()
}

/// Invert the beam-separation relation: the unique cavity length L (with
/// g > 1/2) whose no-pendulum zigzag beams sit `l_target` apart.
pub fn required_cavity_length(l_target: f64, radius: f64) -> Result<f64, DomainError> {
    if !(l_target > 0.0) || l_target >= max_beam_separation(radius) {
        return Err(DomainError(format!(
            "target beam separation {l_target:.6e} m outside attainable range (0, {:.6e}) m",
            max_beam_separation(radius)
        )));
    }
    let ratio = l_target / radius;
    // l/R = sqrt(1 - 1/(4u)) with u = g^2 + 2g - 1  =>  g = -1 + sqrt(2 + u)
    let u = 1.0 / (4.0 * (1.0 - ratio * ratio));
    let g = -1.0 + (2.0 + u).sqrt();
    Ok(radius * (1.0 - g))
}

/// Beam waist at the cavity center: w0 = √(λL/2π) ((1+g)/(1−g))^¼.
pub fn beam_waist(cfg: &CavityConfig) -> Result<f64, DomainError> {
    let g = cfg.stability_parameter();
    if g >= 1.0 {
        return Err(DomainError("beam waist diverges at g = 1".into()));
    }
    Ok((cfg.lambda * cfg.length / (2.0 * std::f64::consts::PI)).sqrt()
        * ((1.0 + g) / (1.0 - g)).powf(0.25))
}

/// Approximate zigzag mode length, L_zig ≈ 2L − (l²/2L) g/(1+g).
pub fn zigzag_mode_length(length: f64, l: f64, g: f64) -> f64 {
    2.0 * length - (l * l / (2.0 * length)) * g / (1.0 + g)
}

/// Free spectral ranges and full linewidths of the on-axis and zigzag modes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ModeFrequencies {
    pub fsr_on: f64,
    pub fsr_zig: f64,
    pub linewidth_on: f64,
    pub linewidth_zig: f64,
}

/// fsr_on = c/2L, fsr_zig = c/2L_zig, linewidth = fsr/finesse.
pub fn mode_frequencies(cfg: &CavityConfig) -> Result<ModeFrequencies, DomainError> {
    let g = cfg.stability_parameter();
    let (_, l) = no_pendulum_zigzag(g, cfg.radius)?;
    let l_zig = zigzag_mode_length(cfg.length, l, g);
    let fsr_on = SPEED_OF_LIGHT / (2.0 * cfg.length);
    let fsr_zig = SPEED_OF_LIGHT / (2.0 * l_zig);
    Ok(ModeFrequencies {
        fsr_on,
        fsr_zig,
        linewidth_on: fsr_on / cfg.finesse_on,
        linewidth_zig: fsr_zig / cfg.finesse_zig,
    })
}

/// Smallest frequency distance between transverse orders `order_a` and
/// `order_b` of the on-axis mode, folded to the nearer longitudinal
/// resonance.
///
/// The per-order spacing is (FSR/π) arccos g; an n-order offset lands at
/// n·(FSR/π)·arccos g away, and the observable beat is its distance to the
/// closest resonance of the comb.
pub fn transverse_mode_spacing(cfg: &CavityConfig, order_a: i32, order_b: i32) -> f64 {
    let g = cfg.stability_parameter().clamp(-1.0, 1.0);
    let fsr = SPEED_OF_LIGHT / (2.0 * cfg.length);
    let per_order = fsr * g.acos() / std::f64::consts::PI;
    let offset = ((order_b - order_a) as f64 * per_order).abs();
    let folded = offset % fsr;
    folded.min(fsr - folded)
}

/// Exact no-pendulum zigzag construction.
///
/// The end beams run through the opposite mirror's sphere center, hitting
/// their own mirror at normal incidence; the pendulum faces intercept them
/// perpendicularly at the operating pose. With the convention δ > 0 the
/// crossing segment rises from M1 at (x > 0, y < 0) to M2 = −M1 and the
/// operating yaw is +δ.
pub fn zigzag_construction(cfg: &CavityConfig) -> Result<ZigzagConstruction, DomainError> {
    let g = cfg.stability_parameter();
    let (tan_delta, _) = no_pendulum_zigzag(g, cfg.radius)?;
    let delta = tan_delta.atan();
    let radius = cfg.radius;
    let length = cfg.length;

    // beta_hat: polar angle of M1 on its sphere; solves
    // R sin b = (R - L + R(1 - cos b)) tan delta  (Newton, seeded small)
    let mut b = tan_delta / 2.0;
    for _ in 0..64 {
        let f = radius * b.sin() - (radius - length + radius * (1.0 - b.cos())) * tan_delta;
        let df = radius * b.cos() - radius * b.sin() * tan_delta;
        let step = f / df;
        b -= step;
        if step.abs() < 1e-17 {
            break;
        }
    }

    let m1 = Vector3::new(
        0.5 * length - radius * (1.0 - b.cos()),
        -radius * b.sin(),
        0.0,
    );
    let crossing = 2.0 * m1.norm();
    let u = yaw_pitch_unit(delta, 0.0);
    let end_segment = m1.dot(&u);

    let (o1, _) = cfg.sphere_centers();
    let s1 = (m1 - o1) / radius;
    let cos_incidence = u.dot(&s1).abs();

    Ok(ZigzagConstruction { m1, crossing, end_segment, cos_incidence })
}

impl ModeGeometry {
    /// Solve the full mode geometry for a cavity with g > 1/2.
    pub fn for_cavity(cfg: &CavityConfig) -> Result<Self, DomainError> {
        let g = cfg.stability_parameter();
        let (tan_delta, l) = no_pendulum_zigzag(g, cfg.radius)?;
        let construction = zigzag_construction(cfg)?;
        let delta = tan_delta.atan();
        Ok(Self {
            beam_sep_l: l,
            zig_length: construction.crossing + 2.0 * construction.end_segment,
            waist_w0: beam_waist(cfg)?,
            delta_angle: delta,
            operating_yaw: delta,
        })
    }
}

//! Coordinate conventions, configuration types and pendulum face normals.
//!
//! Frame: origin at the cavity center, x along the line joining the two
//! spherical mirror centers, z vertical. Yaw, pitch and roll are pendulum
//! rotations about z, the transverse horizontal direction and the cavity
//! axis respectively, applied about the pendulum centroid. Angles are
//! radians everywhere; unit conversion happens at the CLI boundary.

use nalgebra::Vector3;
use serde::Serialize;

use crate::error::ConfigError;

/// Two-mirror cavity: identical spherical mirrors of curvature radius `r`
/// separated by `length`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CavityConfig {
    /// Mirror separation L (m).
    pub length: f64,
    /// Mirror radius of curvature R (m), equal for both mirrors.
    pub radius: f64,
    /// Optical wavelength (m).
    pub lambda: f64,
    /// Finesse of the on-axis mode.
    pub finesse_on: f64,
    /// Finesse of the zigzag mode.
    pub finesse_zig: f64,
}

impl CavityConfig {
    pub fn new(
        length: f64,
        radius: f64,
        lambda: f64,
        finesse_on: f64,
        finesse_zig: f64,
    ) -> Result<Self, ConfigError> {
        if !(length > 0.0) {
            return Err(ConfigError(format!("cavity length must be > 0, got {length}")));
        }
        if !(radius > 0.0) {
            return Err(ConfigError(format!("mirror curvature must be > 0, got {radius}")));
        }
        if !(lambda > 0.0) {
            return Err(ConfigError(format!("wavelength must be > 0, got {lambda}")));
        }
        if !(finesse_on > 1.0) || !(finesse_zig > 1.0) {
            return Err(ConfigError(format!(
                "finesses must be > 1, got {finesse_on} / {finesse_zig}"
            )));
        }
        let g = 1.0 - length / radius;
        if !(0.0..=1.0).contains(&g) {
            return Err(ConfigError(format!(
                "stability parameter g = 1 - L/R = {g:.6} outside [0, 1]"
            )));
        }
        Ok(Self { length, radius, lambda, finesse_on, finesse_zig })
    }

    /// Stability parameter g = 1 − L/R.
    pub fn stability_parameter(&self) -> f64 {
        stability_parameter(self.length, self.radius)
    }

    /// Centers of the two mirror spheres, on the far side of the cavity
    /// center from their respective surfaces: mirror 1 (surface near
    /// x = +L/2) is centered at x = L/2 − R, mirror 2 at x = R − L/2.
    pub fn sphere_centers(&self) -> (Vector3<f64>, Vector3<f64>) {
        (
            Vector3::new(0.5 * self.length - self.radius, 0.0, 0.0),
            Vector3::new(self.radius - 0.5 * self.length, 0.0, 0.0),
        )
    }
}

/// g = 1 − L/R for mirror separation `length` and curvature `radius`.
pub fn stability_parameter(length: f64, radius: f64) -> f64 {
    1.0 - length / radius
}

/// Pendulum body: a bar of width `width_l` (which doubles as the
/// mirror-face center-to-center separation), height `height_h` and
/// thickness `thickness_t`, with residual relative bends `delta_alpha`
/// (yaw) and `delta_beta` (pitch) between its two mirror faces.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PendulumSpec {
    pub width_l: f64,
    pub height_h: f64,
    pub thickness_t: f64,
    pub mass_m: f64,
    pub delta_alpha: f64,
    pub delta_beta: f64,
}

/// Bends past this magnitude leave the small-angle regime the first-order
/// face-normal expansion assumes.
pub const MAX_FACE_BEND: f64 = 0.1;

impl PendulumSpec {
    pub fn new(
        width_l: f64,
        height_h: f64,
        thickness_t: f64,
        mass_m: f64,
        delta_alpha: f64,
        delta_beta: f64,
    ) -> Result<Self, ConfigError> {
        for (name, v) in [("width", width_l), ("height", height_h), ("thickness", thickness_t)] {
            if !(v > 0.0) {
                return Err(ConfigError(format!("pendulum {name} must be > 0, got {v}")));
            }
        }
        if !(mass_m > 0.0) {
            return Err(ConfigError(format!("pendulum mass must be > 0, got {mass_m}")));
        }
        if delta_alpha.abs() >= MAX_FACE_BEND || delta_beta.abs() >= MAX_FACE_BEND {
            return Err(ConfigError(format!(
                "face bends must satisfy |delta| < {MAX_FACE_BEND} rad, got {delta_alpha} / {delta_beta}"
            )));
        }
        Ok(Self { width_l, height_h, thickness_t, mass_m, delta_alpha, delta_beta })
    }

    /// Same as [`PendulumSpec::new`] but with the mass derived from a
    /// material density (kg/m³) and the bar volume.
    pub fn with_density(
        width_l: f64,
        height_h: f64,
        thickness_t: f64,
        density: f64,
        delta_alpha: f64,
        delta_beta: f64,
    ) -> Result<Self, ConfigError> {
        if !(density > 0.0) {
            return Err(ConfigError(format!("density must be > 0, got {density}")));
        }
        let mass = density * width_l * height_h * thickness_t;
        Self::new(width_l, height_h, thickness_t, mass, delta_alpha, delta_beta)
    }
}

/// Kinematic pendulum pose: yaw/pitch/roll about the centroid plus a
/// translation of the centroid in the cavity frame.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PendulumPose {
    pub yaw_alpha: f64,
    pub pitch_beta: f64,
    pub roll_gamma: f64,
    pub translation_v: Vector3<f64>,
}

impl PendulumPose {
    pub fn new(yaw: f64, pitch: f64, roll: f64, translation: Vector3<f64>) -> Self {
        Self { yaw_alpha: yaw, pitch_beta: pitch, roll_gamma: roll, translation_v: translation }
    }

    /// Pure yaw pose, the usual starting point for sweeps.
    pub fn from_yaw(yaw: f64) -> Self {
        Self::new(yaw, 0.0, 0.0, Vector3::zeros())
    }

    pub fn with_translation(mut self, v: Vector3<f64>) -> Self {
        self.translation_v = v;
        self
    }
}

impl Default for PendulumPose {
    fn default() -> Self {
        Self::from_yaw(0.0)
    }
}

/// Unit vector at yaw `a`, pitch `b`: (cos a cos b, sin a cos b, sin b).
pub fn yaw_pitch_unit(a: f64, b: f64) -> Vector3<f64> {
    let (sa, ca) = a.sin_cos();
    let (sb, cb) = b.sin_cos();
    Vector3::new(ca * cb, sa * cb, sb)
}

fn roll_about_x(gamma: f64, v: Vector3<f64>) -> Vector3<f64> {
    let (s, c) = gamma.sin_cos();
    Vector3::new(v.x, c * v.y - s * v.z, s * v.y + c * v.z)
}

/// Inward normals of the two pendulum mirror faces for a given pose.
///
/// Each normal points along the beam propagation direction from its cavity
/// mirror onto the face. Face i carries the exact composed orientation
/// yaw = α ∓ δα/2, pitch = β ∓ δβ/2; roll is applied last, about the
/// cavity axis. At zero pose this is n̂1 = (−1, 0, 0), n̂2 = (+1, 0, 0).
pub fn pendulum_normals(
    spec: &PendulumSpec,
    pose: &PendulumPose,
) -> (Vector3<f64>, Vector3<f64>) {
    let n1 = -yaw_pitch_unit(
        pose.yaw_alpha - 0.5 * spec.delta_alpha,
        pose.pitch_beta - 0.5 * spec.delta_beta,
    );
    let n2 = yaw_pitch_unit(
        pose.yaw_alpha + 0.5 * spec.delta_alpha,
        pose.pitch_beta + 0.5 * spec.delta_beta,
    );
    (roll_about_x(pose.roll_gamma, n1), roll_about_x(pose.roll_gamma, n2))
}

/// Apply the central pose rotation to a body-frame vector: pitch about the
/// transverse horizontal, yaw about z, then roll about the cavity axis.
pub fn pose_rotate(pose: &PendulumPose, v: Vector3<f64>) -> Vector3<f64> {
    let (sa, ca) = pose.yaw_alpha.sin_cos();
    let (sb, cb) = pose.pitch_beta.sin_cos();
    let pitched = Vector3::new(cb * v.x - sb * v.z, v.y, sb * v.x + cb * v.z);
    let yawed = Vector3::new(
        ca * pitched.x - sa * pitched.y,
        sa * pitched.x + ca * pitched.y,
        pitched.z,
    );
    roll_about_x(pose.roll_gamma, yawed)
}

/// Centers of the two pendulum mirror faces in the cavity frame.
///
/// In the body frame face 1 sits at (+t/2, −l/2, 0) and face 2 at
/// (−t/2, +l/2, 0); the central yaw/pitch/roll rotation and the centroid
/// translation carry them into the cavity frame. Face bends tilt the
/// normals about these anchor points and do not move them.
pub fn face_anchors(spec: &PendulumSpec, pose: &PendulumPose) -> (Vector3<f64>, Vector3<f64>) {
    let body1 = Vector3::new(0.5 * spec.thickness_t, -0.5 * spec.width_l, 0.0);
    let a1 = pose.translation_v + pose_rotate(pose, body1);
    let a2 = pose.translation_v + pose_rotate(pose, -body1);
    (a1, a2)
}

/// First-order face-normal expansion used as a test oracle against the
/// exact rotation composition:
/// n̂1,2 = ∓n̂⁽⁰⁾ + cos β (δα/2) n̂⁽δα⁾ + (δβ/2) n̂⁽δβ⁾.
pub fn normals_first_order(
    spec: &PendulumSpec,
    pose: &PendulumPose,
) -> (Vector3<f64>, Vector3<f64>) {
    let (n0, nda, ndb) = expansion_triad(pose.yaw_alpha, pose.pitch_beta);
    let correction =
        pose.pitch_beta.cos() * 0.5 * spec.delta_alpha * nda + 0.5 * spec.delta_beta * ndb;
    (-n0 + correction, n0 + correction)
}

/// The mutually orthogonal triad (n̂⁽⁰⁾, n̂⁽δα⁾, n̂⁽δβ⁾) of the first-order
/// expansion, a Cartesian basis for every (α, β).
pub fn expansion_triad(alpha: f64, beta: f64) -> (Vector3<f64>, Vector3<f64>, Vector3<f64>) {
    let (sa, ca) = alpha.sin_cos();
    let (sb, cb) = beta.sin_cos();
    (
        Vector3::new(ca * cb, sa * cb, sb),
        Vector3::new(-sa, ca, 0.0),
        Vector3::new(-ca * sb, -sa * sb, cb),
    )
}

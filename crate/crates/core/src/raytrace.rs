//! Numerical solver for the self-replicating zigzag ray path.
//!
//! The path P1 → M1 → M2 → P2 closes on itself when the rays M_i → P_i hit
//! the pendulum faces at normal incidence and the spherical-mirror normals
//! bisect the ray pairs at M1, M2. With M_i parametrized by two spherical
//! angles each, the bisection conditions
//!
//! ```text
//! unit(M2 − M1) + n̂1 = λ1 (O1 − M1)
//! unit(M1 − M2) + n̂2 = λ2 (O2 − M2)
//! ```
//!
//! together with the two proportionality constants form a closed 6×6 system
//! solved by damped Newton iteration. The face reflection points P1, P2
//! follow by intersecting the rays cast along the face normals with the face
//! planes, which also makes the path length exactly linear in pendulum
//! translations.

use nalgebra::{Matrix6, Vector3, Vector6};

use crate::constants::SPEED_OF_LIGHT;
use crate::error::{NoSolutionReason, RaytraceError};
use crate::geometry::{
    face_anchors, pendulum_normals, pose_rotate, yaw_pitch_unit, CavityConfig, PendulumPose,
    PendulumSpec,
};

/// Residual tolerance on the reported path-closure residual (m).
pub const RESIDUAL_TOLERANCE: f64 = 1e-12;
/// Dimensionless Newton target; well below the reported tolerance.
const NEWTON_TOLERANCE: f64 = 1e-14;
const MAX_ITERATIONS: u32 = 50;

/// Solved zigzag geometry for one pendulum pose.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RayPath {
    /// Reflection point on the x > 0 spherical mirror (m).
    pub m1: Vector3<f64>,
    /// Reflection point on the x < 0 spherical mirror (m).
    pub m2: Vector3<f64>,
    /// Normal-incidence point on pendulum face 1 (m).
    pub p1: Vector3<f64>,
    /// Normal-incidence point on pendulum face 2 (m).
    pub p2: Vector3<f64>,
    /// Length of P1-M1-M2-P2 (m); the physical round trip retraces it.
    pub roundtrip_s: f64,
    /// Path-closure residual, the Newton residual scaled to meters (m).
    pub residual: f64,
}

/// Mirror-sphere placement. Tests translate it rigidly to exercise gauge
/// invariance; everything else derives it from the cavity config.
#[derive(Debug, Clone, Copy)]
pub(crate) struct MirrorFrame {
    pub o1: Vector3<f64>,
    pub o2: Vector3<f64>,
    pub radius: f64,
}

impl MirrorFrame {
    pub fn from_cavity(cfg: &CavityConfig) -> Self {
        let (o1, o2) = cfg.sphere_centers();
        Self { o1, o2, radius: cfg.radius }
    }

    pub fn translated(&self, w: Vector3<f64>) -> Self {
        Self { o1: self.o1 + w, o2: self.o2 + w, radius: self.radius }
    }
}

fn sphere_point(frame: &MirrorFrame, center: Vector3<f64>, azimuth: f64, elevation: f64) -> Vector3<f64> {
    center + frame.radius * yaw_pitch_unit(azimuth, elevation)
}

fn residual_vec(
    frame: &MirrorFrame,
    n1: Vector3<f64>,
    n2: Vector3<f64>,
    x: &Vector6<f64>,
) -> Vector6<f64> {
    let s1 = yaw_pitch_unit(x[0], x[1]);
    let s2 = yaw_pitch_unit(x[2], x[3]);
    let m1 = frame.o1 + frame.radius * s1;
    let m2 = frame.o2 + frame.radius * s2;
    let d = (m2 - m1).normalize();
    let f1 = d + n1 + x[4] * s1;
    let f2 = -d + n2 + x[5] * s2;
    Vector6::new(f1.x, f1.y, f1.z, f2.x, f2.y, f2.z)
}

fn jacobian(
    frame: &MirrorFrame,
    n1: Vector3<f64>,
    n2: Vector3<f64>,
    x: &Vector6<f64>,
) -> Matrix6<f64> {
    let mut j = Matrix6::zeros();
    for col in 0..6 {
        let h = 1e-7 * (1.0 + x[col].abs());
        let mut xp = *x;
        let mut xm = *x;
        xp[col] += h;
        xm[col] -= h;
        let fp = residual_vec(frame, n1, n2, &xp);
        let fm = residual_vec(frame, n1, n2, &xm);
        j.set_column(col, &((fp - fm) / (2.0 * h)));
    }
    j
}

/// Seed from the end-line construction: the zigzag end beams run close to
/// the lines through the opposite sphere centers along the face-normal
/// direction, exactly so at the designed operating pose.
fn seed_from_pose(frame: &MirrorFrame, pose: &PendulumPose) -> Option<Vector6<f64>> {
    seed_from_direction(frame, yaw_pitch_unit(pose.yaw_alpha, pose.pitch_beta))
}

fn seed_from_direction(frame: &MirrorFrame, u: Vector3<f64>) -> Option<Vector6<f64>> {
    let w = frame.o2 - frame.o1;
    let wu = w.dot(&u);
    let disc = wu * wu - w.norm_squared() + frame.radius * frame.radius;
    if disc < 0.0 {
        return None;
    }
    let rho = wu - disc.sqrt();
    let m1 = frame.o2 - rho * u;
    let m2 = frame.o1 + rho * u;
    Some(seed_from_points(frame, m1, m2, -u, u))
}

fn seed_from_points(
    frame: &MirrorFrame,
    m1: Vector3<f64>,
    m2: Vector3<f64>,
    n1: Vector3<f64>,
    n2: Vector3<f64>,
) -> Vector6<f64> {
    let s1 = (m1 - frame.o1) / frame.radius;
    let s2 = (m2 - frame.o2) / frame.radius;
    let d = (m2 - m1).normalize();
    let mu1 = -(d + n1).dot(&s1);
    let mu2 = -(-d + n2).dot(&s2);
    Vector6::new(
        s1.y.atan2(s1.x),
        s1.z.clamp(-1.0, 1.0).asin(),
        s2.y.atan2(s2.x),
        s2.z.clamp(-1.0, 1.0).asin(),
        mu1,
        mu2,
    )
}

fn newton(
    frame: &MirrorFrame,
    n1: Vector3<f64>,
    n2: Vector3<f64>,
    seed: Vector6<f64>,
) -> Result<(Vector6<f64>, f64, u32), RaytraceError> {
    let mut x = seed;
    let mut f = residual_vec(frame, n1, n2, &x);
    let mut iterations = 0;
    while iterations < MAX_ITERATIONS {
        let norm = f.amax();
        if norm < NEWTON_TOLERANCE {
            break;
        }
        let j = jacobian(frame, n1, n2, &x);
        let Some(step) = j.lu().solve(&f) else {
            return Err(RaytraceError::NoConvergence {
                iterations,
                residual: norm * frame.radius,
            });
        };
        // damped update: halve the step while the residual grows
        let f_norm = f.norm();
        let mut lambda = 1.0;
        let mut accepted = false;
        for _ in 0..30 {
            let candidate = x - lambda * step;
            let fc = residual_vec(frame, n1, n2, &candidate);
            if fc.norm() <= (1.0 - 1e-4 * lambda) * f_norm || fc.norm() < NEWTON_TOLERANCE {
                x = candidate;
                f = fc;
                accepted = true;
                break;
            }
            lambda *= 0.5;
        }
        iterations += 1;
        if !accepted {
            break;
        }
    }
    let residual = f.amax() * frame.radius;
    if residual < RESIDUAL_TOLERANCE {
        Ok((x, residual, iterations))
    } else {
        Err(RaytraceError::NoConvergence { iterations, residual })
    }
}

pub(crate) fn solve_in_frame(
    frame: &MirrorFrame,
    spec: &PendulumSpec,
    pose: &PendulumPose,
    guess: Option<&RayPath>,
) -> Result<RayPath, RaytraceError> {
    solve_in_frame_with_offsets(frame, spec, pose, (Vector3::zeros(), Vector3::zeros()), guess)
}

/// Variant with independent translations of the two face planes, realizing
/// the "translations of the two mirror ends" picture behind the roll
/// coupling estimate. The face normals stay fixed.
pub(crate) fn solve_in_frame_with_offsets(
    frame: &MirrorFrame,
    spec: &PendulumSpec,
    pose: &PendulumPose,
    face_offsets: (Vector3<f64>, Vector3<f64>),
    guess: Option<&RayPath>,
) -> Result<RayPath, RaytraceError> {
    let (n1, n2) = pendulum_normals(spec, pose);

    let mut seeds: Vec<Vector6<f64>> = Vec::new();
    if let Some(path) = guess {
        seeds.push(seed_from_points(frame, path.m1, path.m2, n1, n2));
    }
    if let Some(s) = seed_from_pose(frame, pose) {
        seeds.push(s);
    }

    let mut solved = None;
    let mut last_err = RaytraceError::NoSolution { reason: NoSolutionReason::SeedUnavailable };
    for seed in &seeds {
        match newton(frame, n1, n2, *seed) {
            Ok(sol) => {
                solved = Some(sol);
                break;
            }
            Err(e) => last_err = e,
        }
    }
    if solved.is_none() {
        // coarse fallback: scan seed directions around the cavity axis
        for i in 0..69 {
            let phi = -0.85 + 1.7 * (i as f64) / 68.0;
            let Some(seed) = seed_from_direction(frame, yaw_pitch_unit(phi, pose.pitch_beta))
            else {
                continue;
            };
            if let Ok(sol) = newton(frame, n1, n2, seed) {
                solved = Some(sol);
                break;
            }
        }
    }
    let Some((x, residual, _)) = solved else {
        return Err(last_err);
    };

    let m1 = sphere_point(frame, frame.o1, x[0], x[1]);
    let m2 = sphere_point(frame, frame.o2, x[2], x[3]);

    // rays cast from the mirrors along the (inward) face normals intersect
    // the face planes through the mirror-face centers
    let (mut a1, mut a2) = face_anchors(spec, pose);
    a1 += face_offsets.0;
    a2 += face_offsets.1;
    let s1 = (a1 - m1).dot(&n1);
    let s2 = (a2 - m2).dot(&n2);
    if s1 <= 0.0 || s2 <= 0.0 {
        return Err(RaytraceError::NoSolution { reason: NoSolutionReason::RayBehindFace });
    }
    let p1 = m1 + s1 * n1;
    let p2 = m2 + s2 * n2;

    // aperture classification: the spot must stay on the face rectangle
    let e_y = pose_rotate(pose, Vector3::new(0.0, 1.0, 0.0));
    let e_z = pose_rotate(pose, Vector3::new(0.0, 0.0, 1.0));
    for (p, a) in [(p1, a1), (p2, a2)] {
        let d = p - a;
        if d.dot(&e_y).abs() > 0.5 * spec.width_l || d.dot(&e_z).abs() > 0.5 * spec.height_h {
            return Err(RaytraceError::NoSolution { reason: NoSolutionReason::FaceAperture });
        }
    }

    let roundtrip_s = s1 + (m2 - m1).norm() + s2;
    Ok(RayPath { m1, m2, p1, p2, roundtrip_s, residual })
}

/// Solve the zigzag path for an arbitrary pendulum pose.
///
/// `guess` seeds the Newton iteration from a previously solved path
/// (continuation); without it the seed comes from the end-line
/// construction at the pose orientation.
pub fn solve_zigzag_path(
    cfg: &CavityConfig,
    spec: &PendulumSpec,
    pose: &PendulumPose,
    guess: Option<&RayPath>,
) -> Result<RayPath, RaytraceError> {
    solve_in_frame(&MirrorFrame::from_cavity(cfg), spec, pose, guess)
}

/// Zigzag resonance shift between two poses: δν = (c/λ) (s − s_ref)/s_ref.
pub fn frequency_shift(
    cfg: &CavityConfig,
    spec: &PendulumSpec,
    pose_ref: &PendulumPose,
    pose: &PendulumPose,
) -> Result<f64, RaytraceError> {
    let reference = solve_zigzag_path(cfg, spec, pose_ref, None)?;
    let path = solve_zigzag_path(cfg, spec, pose, Some(&reference))?;
    Ok(shift_from_lengths(cfg, reference.roundtrip_s, path.roundtrip_s))
}

pub(crate) fn shift_from_lengths(cfg: &CavityConfig, s_ref: f64, s: f64) -> f64 {
    (SPEED_OF_LIGHT / cfg.lambda) * (s - s_ref) / s_ref
}

/// Degree of freedom scanned by [`sweep`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepDof {
    Yaw,
    Pitch,
    Roll,
    /// Translation perpendicular to the pendulum normal, in the horizontal
    /// plane (φ − α = π/2).
    Transverse,
    /// Translation along the pendulum normal (φ = α).
    Longitudinal,
    /// Translation along the cavity axis (φ = 0).
    XAxis,
    /// Vertical translation.
    Z,
}

impl SweepDof {
    /// The swept pose at a given offset from the reference pose.
    pub fn apply(&self, base: &PendulumPose, offset: f64) -> PendulumPose {
        let mut pose = *base;
        match self {
            SweepDof::Yaw => pose.yaw_alpha += offset,
            SweepDof::Pitch => pose.pitch_beta += offset,
            SweepDof::Roll => pose.roll_gamma += offset,
            SweepDof::Transverse => {
                let (sa, ca) = base.yaw_alpha.sin_cos();
                pose.translation_v += offset * Vector3::new(-sa, ca, 0.0);
            }
            SweepDof::Longitudinal => {
                let (sa, ca) = base.yaw_alpha.sin_cos();
                pose.translation_v += offset * Vector3::new(ca, sa, 0.0);
            }
            SweepDof::XAxis => pose.translation_v += offset * Vector3::x(),
            SweepDof::Z => pose.translation_v += offset * Vector3::z(),
        }
        pose
    }

    pub fn is_angle(&self) -> bool {
        matches!(self, SweepDof::Yaw | SweepDof::Pitch | SweepDof::Roll)
    }
}

/// One sweep sample: DOF offset (rad or m) and the resonance shift (Hz).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepPoint {
    pub offset: f64,
    pub shift_hz: f64,
}

/// Sweep output; `truncated` records the first offset, if any, at which the
/// pose stopped admitting a closed path.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    pub points: Vec<SweepPoint>,
    pub truncated: Option<(f64, RaytraceError)>,
}

/// Continuation sweep over one degree of freedom: each solve seeds the next,
/// shifts are reported relative to the reference pose.
pub fn sweep(
    cfg: &CavityConfig,
    spec: &PendulumSpec,
    pose_ref: &PendulumPose,
    dof: SweepDof,
    grid: &[f64],
) -> Result<SweepResult, RaytraceError> {
    let reference = solve_zigzag_path(cfg, spec, pose_ref, None)?;
    let mut points = Vec::with_capacity(grid.len());
    let mut truncated = None;
    let mut previous = reference;
    for &offset in grid {
        let pose = dof.apply(pose_ref, offset);
        match solve_zigzag_path(cfg, spec, &pose, Some(&previous)) {
            Ok(path) => {
                points.push(SweepPoint {
                    offset,
                    shift_hz: shift_from_lengths(cfg, reference.roundtrip_s, path.roundtrip_s),
                });
                previous = path;
            }
            Err(e) => {
                truncated = Some((offset, e));
                break;
            }
        }
    }
    Ok(SweepResult { points, truncated })
}

/// Least-squares fit of shift = slope·x + curvature·x² to sweep points.
/// Returns (slope, curvature).
pub fn fit_slope_curvature(points: &[SweepPoint]) -> (f64, f64) {
    // normal equations for the 2-parameter model (no constant term: the
    // reference point pins shift(0) = 0)
    let (mut s2, mut s3, mut s4, mut sy1, mut sy2) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for p in points {
        let x = p.offset;
        s2 += x * x;
        s3 += x * x * x;
        s4 += x * x * x * x;
        sy1 += x * p.shift_hz;
        sy2 += x * x * p.shift_hz;
    }
    let det = s2 * s4 - s3 * s3;
    if det == 0.0 {
        return (0.0, 0.0);
    }
    ((s4 * sy1 - s3 * sy2) / det, (s2 * sy2 - s3 * sy1) / det)
}

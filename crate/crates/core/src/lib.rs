//! Simulation library for a zigzag optical-cavity torsion sensor.
//!
//! A torsional pendulum with reflective coatings on both faces sits inside a
//! two-mirror cavity. One cavity eigenpath (the *zigzag mode*) reflects off
//! both pendulum faces and both spherical mirrors, so its round-trip length —
//! and hence its resonance frequency — tracks the pendulum yaw angle linearly
//! while staying decoupled, to first or second order, from every other rigid
//! body degree of freedom.
//!
//! The crate is organised around that physics:
//!
//! - [`geometry`]: coordinate conventions, cavity/pendulum configuration
//!   types, pendulum face normals.
//! - [`modes`]: closed-form cavity mode geometry (no-pendulum zigzag,
//!   design-length inversion, waist, free spectral ranges, transverse mode
//!   spacing).
//! - [`raytrace`]: numerical solver for the self-replicating zigzag path at
//!   an arbitrary pendulum pose, plus frequency-shift sweeps.
//! - [`sensitivity`]: closed-form yaw/pitch/translation/roll sensitivities
//!   and finite-difference extraction from the ray tracer.
//! - [`noise`]: the full noise budget (suspension thermal, quantum radiation
//!   pressure, shot, mirror Brownian, swing/roll leakage) and rms mode-shift
//!   estimates.
//! - [`range`]: Gaussian mode-overlap computation and the yaw sensing range.
//! - [`validate`]: the cross-validation suite wiring closed forms against the
//!   ray tracer and quadrature oracles.
//!
//! All types are immutable after construction and all operations are pure
//! functions, so everything here is safe to share across threads.

// validation guards are written `!(x > 0.0)` so NaN inputs are rejected too
#![allow(clippy::neg_cmp_op_on_partial_ord)]
// frozen oracle values keep their full computed digits
#![allow(clippy::excessive_precision)]

pub mod constants;
pub mod error;
pub mod geometry;
pub mod modes;
pub mod noise;
pub mod range;
pub mod raytrace;
pub mod sensitivity;
pub mod validate;

pub use error::{ConfigError, DomainError, RaytraceError};
pub use geometry::{CavityConfig, PendulumPose, PendulumSpec};
pub use modes::ModeGeometry;
pub use noise::{NoiseBudget, NoiseParams};
pub use raytrace::RayPath;
pub use sensitivity::SensitivityReport;

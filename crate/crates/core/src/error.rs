//! Error types shared across the crate.

use thiserror::Error;

/// A configuration value violates a type invariant (negative length,
/// finesse below one, ...).
#[derive(Debug, Clone, Error, PartialEq)]
#[error("invalid configuration: {0}")]
pub struct ConfigError(pub String);

/// A mathematically well-formed input lies outside the domain of the
/// requested closed form (e.g. the no-pendulum zigzag needs g > 1/2).
#[derive(Debug, Clone, Error, PartialEq)]
#[error("domain error: {0}")]
pub struct DomainError(pub String);

/// Why a pose admits no closed zigzag path.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NoSolutionReason {
    /// The ray cast from a cavity mirror never reaches the pendulum face
    /// plane in the forward direction.
    RayBehindFace,
    /// The reflection point lies outside the pendulum face extent.
    FaceAperture,
    /// No seed geometry exists (the end line misses the spherical mirrors).
    SeedUnavailable,
}

impl std::fmt::Display for NoSolutionReason {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Self::RayBehindFace => write!(f, "ray does not reach the pendulum face"),
            Self::FaceAperture => write!(f, "reflection point outside the pendulum face"),
            Self::SeedUnavailable => write!(f, "no seed geometry for this pose"),
        }
    }
}

/// Errors from the zigzag path solver.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum RaytraceError {
    /// The damped Newton iteration did not reach the residual tolerance
    /// within the iteration cap.
    #[error("no convergence after {iterations} iterations (residual {residual:.3e} m)")]
    NoConvergence { iterations: u32, residual: f64 },
    /// The pose admits no closed zigzag path.
    #[error("no solution: {reason}")]
    NoSolution { reason: NoSolutionReason },
}

//! Mode-overlap computation and the yaw sensing range.
//!
//! A yaw change Δθ tilts the zigzag mode at the central waist by
//! Δα = Δθ/g. The intensity coupling efficiency between the original and
//! tilted fundamental Gaussians is |∫ψ₂*ψ₁ dx|², which carries the closed
//! form exp(−(π w0 Δα/λ)²). The 1/e criterion bounds the usable yaw span at
//! θ_rng = 2gλ/(π w0), a purely geometric limit independent of finesse.

use serde::Serialize;

use crate::error::DomainError;

/// Outcome of one overlap evaluation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OverlapResult {
    /// Yaw change of the pendulum (rad).
    pub delta_theta_yaw: f64,
    /// Resulting mode tilt at the waist, Δθ/g (rad).
    pub delta_alpha_tilt: f64,
    /// Intensity coupling efficiency in [0, 1].
    pub coupling_efficiency: f64,
}

/// Adaptive Simpson quadrature to absolute tolerance `tol`.
fn adaptive_simpson(f: &impl Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    fn simpson(f: &impl Fn(f64) -> f64, a: f64, fa: f64, b: f64, fb: f64) -> (f64, f64, f64) {
        let m = 0.5 * (a + b);
        let fm = f(m);
        ((b - a) / 6.0 * (fa + 4.0 * fm + fb), m, fm)
    }
    #[allow(clippy::too_many_arguments)]
    fn recurse(
        f: &impl Fn(f64) -> f64,
        a: f64,
        fa: f64,
        b: f64,
        fb: f64,
        whole: f64,
        m: f64,
        fm: f64,
        tol: f64,
        depth: u32,
    ) -> f64 {
        let (left, lm, flm) = simpson(f, a, fa, m, fm);
        let (right, rm, frm) = simpson(f, m, fm, b, fb);
        let delta = left + right - whole;
        if depth == 0 || delta.abs() <= 15.0 * tol {
            left + right + delta / 15.0
        } else {
            recurse(f, a, fa, m, fm, left, lm, flm, 0.5 * tol, depth - 1)
                + recurse(f, m, fm, b, fb, right, rm, frm, 0.5 * tol, depth - 1)
        }
    }
    let fa = f(a);
    let fb = f(b);
    let (whole, m, fm) = simpson(f, a, fa, b, fb);
    recurse(f, a, fa, b, fb, whole, m, fm, tol, 48)
}

/// Numerically integrated overlap |∫ψ₂*(x) ψ₁(x) dx|² of the two waist mode
/// functions for a mode tilt `delta_alpha` (rad).
pub fn overlap_quadrature(delta_alpha: f64, w0: f64, lambda: f64) -> f64 {
    let norm = (2.0 / (std::f64::consts::PI * w0 * w0)).sqrt();
    let k = 2.0 * std::f64::consts::PI / lambda;
    // the integrand's imaginary part is odd; only the cosine part survives
    let real = adaptive_simpson(
        &|x: f64| norm * (-2.0 * x * x / (w0 * w0)).exp() * (k * delta_alpha * x).cos(),
        -6.0 * w0,
        6.0 * w0,
        1e-12,
    );
    real * real
}

/// Closed-form coupling efficiency exp(−(π w0 Δα/λ)²).
pub fn overlap_closed_form(delta_alpha: f64, w0: f64, lambda: f64) -> f64 {
    let arg = std::f64::consts::PI * w0 * delta_alpha / lambda;
    (-arg * arg).exp()
}

/// Coupling efficiency after a yaw change `delta_theta`, evaluated by
/// quadrature and cross-checked against the closed form to 1e-10.
pub fn coupling_efficiency(
    delta_theta: f64,
    g: f64,
    w0: f64,
    lambda: f64,
) -> Result<OverlapResult, DomainError> {
    if !(g > 0.0) {
        return Err(DomainError(format!("mode tilt Δα = Δθ/g needs g > 0, got {g}")));
    }
    let delta_alpha = delta_theta / g;
    let quad = overlap_quadrature(delta_alpha, w0, lambda);
    let closed = overlap_closed_form(delta_alpha, w0, lambda);
    debug_assert!((quad - closed).abs() < 1e-9);
    Ok(OverlapResult {
        delta_theta_yaw: delta_theta,
        delta_alpha_tilt: delta_alpha,
        coupling_efficiency: quad,
    })
}

/// Full sensing range θ_rng = 2gλ/(π w0), twice the 1/e yaw excursion.
pub fn sensing_range(g: f64, w0: f64, lambda: f64) -> Result<f64, DomainError> {
    if !(g > 0.0) || !(w0 > 0.0) {
        return Err(DomainError(format!("sensing range needs g > 0 and w0 > 0, got {g}, {w0}")));
    }
    Ok(2.0 * g * lambda / (std::f64::consts::PI * w0))
}

//! Physical constants (SI, 2018 CODATA exact values).

/// Speed of light in vacuum (m/s).
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

/// Boltzmann constant (J/K).
pub const BOLTZMANN: f64 = 1.380_649e-23;

/// Reduced Planck constant (J·s).
pub const HBAR: f64 = 1.054_571_817e-34;

//! Noise budget for a future milligram-scale torsional pendulum.
//!
//! Four fundamental sources — suspension thermal torque noise, quantum
//! radiation pressure torque noise, photon shot noise and mirror
//! substrate/coating Brownian noise — plus thermal leakage from the
//! transverse-swing and roll suspension modes through the residual
//! yaw-bend coupling. Structural damping throughout: γ_m(ω) =
//! (ω_m/Q_m)(ω_m/ω), so the loss term ω·γ_m(ω) = ω_m²/Q_m is constant.
//!
//! Every source is expressed in three representations linked pointwise by
//! the torsional susceptibility and the design-cavity yaw slope:
//! S_θ = |χ|² S_τ and S_ν = (dν/dθ)² S_θ.

use serde::Serialize;

use crate::constants::{BOLTZMANN, HBAR, SPEED_OF_LIGHT};
use crate::geometry::stability_parameter;
use crate::modes::zigzag_mode_length;
use crate::sensitivity::roll_mode_translation;

/// Shot-noise convention. The printed angle form ħ/S_τ^QRPN is dimensionally
/// inconsistent; the default pairs the torque PSD with ħ²/S_τ^QRPN so the
/// product S_θ^shot · S_τ^QRPN = ħ² holds. The printed form stays selectable.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ShotConvention {
    /// ħ / S_τ^QRPN, verbatim.
    Paper,
    /// ħ² / S_τ^QRPN.
    Sql,
}

/// All parameters of the anticipated experiment, defaulting to the
/// published table row for row.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NoiseParams {
    /// Temperature (K).
    pub temperature: f64,
    /// Pendulum width = zigzag beam separation (m).
    pub width_l: f64,
    /// Pendulum height (m).
    pub height_h: f64,
    /// Pendulum thickness (m).
    pub thickness_t: f64,
    /// Pendulum mass (kg).
    pub mass_m: f64,
    /// Yaw moment of inertia (kg·m²), default m l²/12.
    pub inertia_yaw: f64,
    /// Roll moment of inertia about the cavity axis (kg·m²), default
    /// m (l² + h²)/12.
    pub inertia_roll: f64,
    /// Suspension fiber diameter (m); informational.
    pub fiber_diameter: f64,
    /// Torsional (yaw) angular frequency ω_m (rad/s).
    pub omega_m: f64,
    /// Yaw mode quality factor.
    pub q_m: f64,
    /// Mirror substrate Poisson ratio.
    pub sigma: f64,
    /// Mirror substrate Young's modulus (Pa).
    pub young_e: f64,
    /// Beam radius at the mirrors (m).
    pub w0: f64,
    /// Substrate loss angle.
    pub phi_sub: f64,
    /// Coating loss angle.
    pub phi_coat: f64,
    /// Coating thickness (m).
    pub coating_d: f64,
    /// Cavity finesse.
    pub finesse: f64,
    /// Sensing laser wavelength (m).
    pub lambda_l: f64,
    /// Incident laser power (W).
    pub p_in: f64,
    /// Residual relative yaw bend driving the leakage signals (rad).
    pub leak_delta_alpha: f64,
    /// Suspension fiber length (m).
    pub xi: f64,
    /// Transverse-swing mode frequency (Hz).
    pub f_swing: f64,
    /// Roll mode frequency (Hz).
    pub f_roll: f64,
    /// Swing mode quality factor (dissipation-dilution enhanced).
    pub q_swing: f64,
    /// Roll mode quality factor.
    pub q_roll: f64,
    /// Design cavity length for the frequency-axis conversion (m).
    pub cavity_length: f64,
    /// Design cavity mirror curvature (m).
    pub cavity_radius: f64,
}

impl Default for NoiseParams {
    fn default() -> Self {
        let l = 5e-3;
        let h = 1e-3;
        let m = 6e-6;
        Self {
            temperature: 300.0,
            width_l: l,
            height_h: h,
            thickness_t: 0.5e-3,
            mass_m: m,
            inertia_yaw: m * l * l / 12.0,
            inertia_roll: m * (l * l + h * h) / 12.0,
            fiber_diameter: 1e-6,
            omega_m: 2.0 * std::f64::consts::PI * 10e-3,
            q_m: 2e4,
            sigma: 0.15,
            young_e: 70e9,
            w0: 100e-6,
            phi_sub: 1e-7,
            phi_coat: 1e-4,
            coating_d: 10e-6,
            finesse: 2e4,
            lambda_l: 780e-9,
            p_in: 0.4e-6,
            leak_delta_alpha: 60e-3f64.to_radians(),
            xi: 0.05,
            f_swing: 2.0,
            f_roll: 2.0,
            q_swing: 1e6,
            q_roll: 1e6,
            cavity_length: 0.05,
            cavity_radius: 0.10,
        }
    }
}

impl NoiseParams {
    /// Sensing laser angular frequency ω_L = 2πc/λ_L.
    pub fn omega_laser(&self) -> f64 {
        2.0 * std::f64::consts::PI * SPEED_OF_LIGHT / self.lambda_l
    }

    /// Yaw slope (c/λ)(l/L_zig) of the design cavity, converting angle PSDs
    /// to cavity-frequency PSDs.
    pub fn yaw_slope(&self) -> f64 {
        let g = stability_parameter(self.cavity_length, self.cavity_radius);
        let l_zig = zigzag_mode_length(self.cavity_length, self.width_l, g);
        (SPEED_OF_LIGHT / self.lambda_l) * self.width_l / l_zig
    }

    /// Transverse-translation slope (c/λ)(δα/2L) at the residual bend.
    pub fn leak_transverse_slope(&self) -> f64 {
        (SPEED_OF_LIGHT / self.lambda_l) * self.leak_delta_alpha / (2.0 * self.cavity_length)
    }
}

/// Squared magnitude of the torsional susceptibility (rad/(N·m))²:
/// |χ|² = 1/(I²[(ω_m²−ω²)² + (ω_m²/Q_m)²]).
pub fn susceptibility(omega: f64, p: &NoiseParams) -> f64 {
    let loss = p.omega_m * p.omega_m / p.q_m;
    let detune = p.omega_m * p.omega_m - omega * omega;
    1.0 / (p.inertia_yaw * p.inertia_yaw * (detune * detune + loss * loss))
}

/// Suspension thermal torque noise S_τ = 4 k_B T I γ_m(ω) (N²m²/Hz).
pub fn psd_suspension_thermal(omega: f64, p: &NoiseParams) -> f64 {
    let gamma = (p.omega_m / p.q_m) * (p.omega_m / omega);
    4.0 * BOLTZMANN * p.temperature * p.inertia_yaw * gamma
}

/// Quantum radiation pressure torque noise
/// S_τ = 8 l² ℱ² ħ ω_L P_in / (π² c²) (N²m²/Hz), frequency independent.
pub fn psd_qrpn(p: &NoiseParams) -> f64 {
    8.0 * p.width_l * p.width_l * p.finesse * p.finesse * HBAR * p.omega_laser() * p.p_in
        / (std::f64::consts::PI * std::f64::consts::PI * SPEED_OF_LIGHT * SPEED_OF_LIGHT)
}

/// Photon shot noise in angle units (rad²/Hz); see [`ShotConvention`].
pub fn psd_shot(p: &NoiseParams, convention: ShotConvention) -> f64 {
    let qrpn = psd_qrpn(p);
    if qrpn == 0.0 {
        return f64::INFINITY;
    }
    match convention {
        ShotConvention::Paper => HBAR / qrpn,
        ShotConvention::Sql => HBAR * HBAR / qrpn,
    }
}

/// Mirror substrate + coating Brownian noise (rad²/Hz):
/// S_θ = (16 k_B T / ω l²) (1−σ²)/(√π E w0) (φ_sub + (2/√π)((1−2σ)/(1−σ))(d/w0) φ_coat).
pub fn psd_mirror_brownian(omega: f64, p: &NoiseParams) -> f64 {
    let prefactor = 16.0 * BOLTZMANN * p.temperature / (omega * p.width_l * p.width_l)
        * (1.0 - p.sigma * p.sigma)
        / (std::f64::consts::PI.sqrt() * p.young_e * p.w0);
    let coating = (2.0 / std::f64::consts::PI.sqrt())
        * ((1.0 - 2.0 * p.sigma) / (1.0 - p.sigma))
        * (p.coating_d / p.w0)
        * p.phi_coat;
    prefactor * (p.phi_sub + coating)
}

/// Which suspension mode leaks into the yaw readout.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum LeakageMode {
    Swing,
    Roll,
}

/// Thermal leakage of a suspension mode, expressed as yaw-equivalent angle
/// PSD (rad²/Hz).
///
/// The mode is thermal-noise limited with structural damping; its motion
/// maps to a transverse translation (directly for swing, through the
/// roll-translation coupling −(I/ξm)γ for roll), couples to the cavity via
/// the residual-bend transverse sensitivity, and divides by the yaw slope.
pub fn leakage_psd(mode: LeakageMode, omega: f64, p: &NoiseParams) -> f64 {
    let translation_psd = match mode {
        LeakageMode::Swing => {
            let w0 = 2.0 * std::f64::consts::PI * p.f_swing;
            let gamma = (w0 / p.q_swing) * (w0 / omega);
            let force = 4.0 * BOLTZMANN * p.temperature * p.mass_m * gamma;
            let loss = w0 * w0 / p.q_swing;
            let detune = w0 * w0 - omega * omega;
            force / (p.mass_m * p.mass_m * (detune * detune + loss * loss))
        }
        LeakageMode::Roll => {
            let w0 = 2.0 * std::f64::consts::PI * p.f_roll;
            let gamma = (w0 / p.q_roll) * (w0 / omega);
            let torque = 4.0 * BOLTZMANN * p.temperature * p.inertia_roll * gamma;
            let loss = w0 * w0 / p.q_roll;
            let detune = w0 * w0 - omega * omega;
            let angle_psd =
                torque / (p.inertia_roll * p.inertia_roll * (detune * detune + loss * loss));
            let coupling = roll_mode_translation(1.0, p.inertia_roll, p.xi, p.mass_m);
            angle_psd * coupling * coupling
        }
    };
    let to_yaw = p.leak_transverse_slope() / p.yaw_slope();
    translation_psd * to_yaw * to_yaw
}

/// One noise source in all three representations at every grid frequency.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SourceSpectra {
    pub name: String,
    /// Torque representation (N²m²/Hz).
    pub torque: Vec<f64>,
    /// Angle representation (rad²/Hz).
    pub angle: Vec<f64>,
    /// Cavity-frequency representation (Hz²/Hz).
    pub cavity: Vec<f64>,
}

/// Complete budget on a frequency grid.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NoiseBudget {
    pub freq_hz: Vec<f64>,
    pub sources: Vec<SourceSpectra>,
    pub total_torque: Vec<f64>,
    pub total_angle: Vec<f64>,
    pub total_cavity: Vec<f64>,
    pub params: NoiseParams,
    pub shot_convention: ShotConvention,
}

/// Default logarithmic grid matching the published budget span:
/// 0.1–1000 Hz, 400 points.
pub fn default_grid() -> Vec<f64> {
    let n = 400;
    (0..n)
        .map(|k| 0.1 * 10f64.powf(4.0 * k as f64 / (n - 1) as f64))
        .collect()
}

/// Assemble the full budget: four fundamental sources plus the two leakage
/// lines, each converted into all three representations.
///
/// The grid must be strictly positive and ascending; an empty grid yields an
/// empty budget.
pub fn total_budget(p: &NoiseParams, freq_hz: &[f64], convention: ShotConvention) -> NoiseBudget {
    let slope = p.yaw_slope();
    let slope2 = slope * slope;
    let n = freq_hz.len();

    let mut torque_sources: Vec<(&str, Vec<f64>)> = Vec::new();
    let mut angle_sources: Vec<(&str, Vec<f64>)> = Vec::new();

    torque_sources.push((
        "suspension_thermal",
        freq_hz
            .iter()
            .map(|&f| psd_suspension_thermal(2.0 * std::f64::consts::PI * f, p))
            .collect(),
    ));
    torque_sources.push(("qrpn", freq_hz.iter().map(|_| psd_qrpn(p)).collect()));
    angle_sources.push(("shot", freq_hz.iter().map(|_| psd_shot(p, convention)).collect()));
    angle_sources.push((
        "mirror_brownian",
        freq_hz
            .iter()
            .map(|&f| psd_mirror_brownian(2.0 * std::f64::consts::PI * f, p))
            .collect(),
    ));
    angle_sources.push((
        "leak_swing",
        freq_hz
            .iter()
            .map(|&f| leakage_psd(LeakageMode::Swing, 2.0 * std::f64::consts::PI * f, p))
            .collect(),
    ));
    angle_sources.push((
        "leak_roll",
        freq_hz
            .iter()
            .map(|&f| leakage_psd(LeakageMode::Roll, 2.0 * std::f64::consts::PI * f, p))
            .collect(),
    ));

    let chi2: Vec<f64> = freq_hz
        .iter()
        .map(|&f| susceptibility(2.0 * std::f64::consts::PI * f, p))
        .collect();

    let mut sources = Vec::new();
    for (name, torque) in torque_sources {
        let angle: Vec<f64> = torque.iter().zip(&chi2).map(|(t, x)| t * x).collect();
        let cavity: Vec<f64> = angle.iter().map(|a| a * slope2).collect();
        sources.push(SourceSpectra { name: name.into(), torque, angle, cavity });
    }
    for (name, angle) in angle_sources {
        let torque: Vec<f64> = angle.iter().zip(&chi2).map(|(a, x)| a / x).collect();
        let cavity: Vec<f64> = angle.iter().map(|a| a * slope2).collect();
        sources.push(SourceSpectra { name: name.into(), torque, angle, cavity });
    }

    let mut total_torque = vec![0.0; n];
    let mut total_angle = vec![0.0; n];
    let mut total_cavity = vec![0.0; n];
    for s in &sources {
        for i in 0..n {
            total_torque[i] += s.torque[i];
            total_angle[i] += s.angle[i];
            total_cavity[i] += s.cavity[i];
        }
    }

    NoiseBudget {
        freq_hz: freq_hz.to_vec(),
        sources,
        total_torque,
        total_angle,
        total_cavity,
        params: *p,
        shot_convention: convention,
    }
}

impl NoiseBudget {
    pub fn source(&self, name: &str) -> Option<&SourceSpectra> {
        self.sources.iter().find(|s| s.name == name)
    }

    /// CSV with unit-suffixed headers, one row per grid frequency, floats in
    /// scientific notation with 9 significant digits.
    pub fn to_csv(&self) -> String {
        let mut header = vec!["f_hz".to_string()];
        for s in &self.sources {
            header.push(format!("{}_torque_n2m2_per_hz", s.name));
            header.push(format!("{}_angle_rad2_per_hz", s.name));
            header.push(format!("{}_cavity_hz2_per_hz", s.name));
        }
        header.push("total_torque_n2m2_per_hz".into());
        header.push("total_angle_rad2_per_hz".into());
        header.push("total_cavity_hz2_per_hz".into());
        let mut out = header.join(",");
        out.push('\n');
        for i in 0..self.freq_hz.len() {
            let mut row = vec![format_sci(self.freq_hz[i])];
            for s in &self.sources {
                row.push(format_sci(s.torque[i]));
                row.push(format_sci(s.angle[i]));
                row.push(format_sci(s.cavity[i]));
            }
            row.push(format_sci(self.total_torque[i]));
            row.push(format_sci(self.total_angle[i]));
            row.push(format_sci(self.total_cavity[i]));
            out.push_str(&row.join(","));
            out.push('\n');
        }
        out
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("budget serializes")
    }
}

/// Scientific notation with 9 significant digits, the fixed on-disk format.
pub fn format_sci(x: f64) -> String {
    format!("{x:.8e}")
}

/// Pendulum geometry and mode frequencies for the rms mode-shift
/// comparison of the thermally excited suspension modes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RmsParams {
    /// Bar width (m); also the beam separation of the host cavity.
    pub width: f64,
    /// Bar thickness (m).
    pub thickness: f64,
    /// Bar height (m).
    pub height: f64,
    /// Material density (kg/m³).
    pub density: f64,
    /// Suspension fiber length (m).
    pub fiber_length: f64,
    /// Yaw mode frequency (Hz).
    pub f_yaw: f64,
    /// Transverse-swing mode frequency (Hz).
    pub f_swing: f64,
    /// Roll mode frequency (Hz).
    pub f_roll: f64,
    pub temperature: f64,
    /// Residual relative yaw bend of the host pendulum (rad).
    pub delta_alpha: f64,
    /// Yaw slope of the host cavity (Hz/rad).
    pub yaw_slope: f64,
    /// Transverse slope of the host cavity at `delta_alpha` (Hz/m).
    pub transverse_slope: f64,
}

impl RmsParams {
    /// The rms comparison of the demonstration: 12×0.5×0.5 mm³ fused-silica
    /// bar on a 5 cm fiber, 5 mHz yaw / 2 Hz swing / 2 Hz roll, read out with
    /// the supplied cavity slopes.
    pub fn demonstration(yaw_slope: f64, transverse_slope: f64) -> Self {
        Self {
            width: 12e-3,
            thickness: 0.5e-3,
            height: 0.5e-3,
            density: 2200.0,
            fiber_length: 0.05,
            f_yaw: 5e-3,
            f_swing: 2.0,
            f_roll: 2.0,
            temperature: 300.0,
            delta_alpha: 0.2f64.to_radians(),
            yaw_slope,
            transverse_slope,
        }
    }

    pub fn mass(&self) -> f64 {
        self.density * self.width * self.thickness * self.height
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum RmsMode {
    Yaw,
    Swing,
    Roll,
}

/// rms cavity shift of one thermally excited mode: equipartition assigns
/// k_B T/2 to the mode coordinate, and the matching sensitivity converts
/// the rms coordinate to a cavity-frequency shift.
pub fn rms_mode_shift(mode: RmsMode, p: &RmsParams) -> f64 {
    let kt = BOLTZMANN * p.temperature;
    let m = p.mass();
    match mode {
        RmsMode::Yaw => {
            let inertia = m * (p.width * p.width + p.thickness * p.thickness) / 12.0;
            let omega = 2.0 * std::f64::consts::PI * p.f_yaw;
            let theta_rms = (kt / (inertia * omega * omega)).sqrt();
            p.yaw_slope.abs() * theta_rms
        }
        RmsMode::Swing => {
            let omega = 2.0 * std::f64::consts::PI * p.f_swing;
            let x_rms = (kt / (m * omega * omega)).sqrt();
            p.transverse_slope.abs() * x_rms
        }
        RmsMode::Roll => {
            let inertia = m * (p.width * p.width + p.height * p.height) / 12.0;
            let omega = 2.0 * std::f64::consts::PI * p.f_roll;
            let gamma_rms = (kt / (inertia * omega * omega)).sqrt();
            let x = roll_mode_translation(gamma_rms, inertia, p.fiber_length, m).abs();
            p.transverse_slope.abs() * x
        }
    }
}

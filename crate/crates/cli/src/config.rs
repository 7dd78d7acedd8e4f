//! Line-oriented sectioned key-value configuration with explicit unit
//! suffixes on every dimensioned key (`L_mm`, `P_in_uW`, `yaw_deg`, ...).
//!
//! Unknown sections or keys are rejected. Any key can be overridden
//! through the environment as `ZIGZAG_<SECTION>__<key>` with the section
//! upper-cased and the key spelled exactly as in the file.

use std::collections::BTreeMap;

use zigzag_core::geometry::{CavityConfig, PendulumPose, PendulumSpec};
use zigzag_core::modes::{required_cavity_length, ModeGeometry};
use zigzag_core::noise::{NoiseParams, ShotConvention};
use zigzag_core::raytrace::SweepDof;

/// Configuration-level failure; maps to exit code 2.
#[derive(Debug)]
pub struct ConfigFileError(pub String);

impl std::fmt::Display for ConfigFileError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "config error: {}", self.0)
    }
}

type Sections = BTreeMap<String, BTreeMap<String, String>>;

const KNOWN: &[(&str, &[&str])] = &[
    ("cavity", &["L_mm", "l_target_mm", "R_mm", "lambda_nm", "finesse_on", "finesse_zig"]),
    (
        "pendulum",
        &[
            "width_mm",
            "height_mm",
            "thickness_mm",
            "mass_mg",
            "density_kg_m3",
            "delta_alpha_deg",
            "delta_alpha_rad",
            "delta_beta_deg",
            "delta_beta_rad",
        ],
    ),
    (
        "pose",
        &[
            "at_operating_yaw",
            "yaw_deg",
            "yaw_rad",
            "pitch_deg",
            "pitch_rad",
            "roll_deg",
            "roll_rad",
            "x_um",
            "x_mm",
            "y_um",
            "y_mm",
            "z_um",
            "z_mm",
        ],
    ),
    (
        "sweep",
        &["dof", "min_urad", "max_urad", "min_deg", "max_deg", "min_um", "max_um", "min_mm", "max_mm", "points"],
    ),
    (
        "noise",
        &[
            "T_K",
            "l_mm",
            "h_mm",
            "t_mm",
            "m_mg",
            "D_um",
            "f_m_mHz",
            "Q_m",
            "sigma",
            "E_GPa",
            "w0_um",
            "phi_sub",
            "phi_coat",
            "d_um",
            "finesse",
            "lambda_L_nm",
            "P_in_uW",
            "leak_delta_alpha_mdeg",
            "xi_cm",
            "f_swing_Hz",
            "f_roll_Hz",
            "Q_swing",
            "Q_roll",
            "cavity_L_cm",
            "cavity_R_cm",
            "shot_convention",
            "grid_min_hz",
            "grid_max_hz",
            "grid_points",
        ],
    ),
    ("range", &["theta_max_mrad", "points"]),
    ("validate", &["poses", "inject_delta_alpha_offset_deg"]),
    ("output", &["format", "path"]),
];

fn known_keys(section: &str) -> Option<&'static [&'static str]> {
    KNOWN.iter().find(|(s, _)| *s == section).map(|(_, keys)| *keys)
}

fn parse_sections(text: &str) -> Result<Sections, ConfigFileError> {
    let mut sections: Sections = BTreeMap::new();
    let mut current: Option<String> = None;
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        if let Some(name) = line.strip_prefix('[').and_then(|s| s.strip_suffix(']')) {
            let name = name.trim().to_string();
            if known_keys(&name).is_none() {
                return Err(ConfigFileError(format!("unknown section [{name}] at line {}", lineno + 1)));
            }
            sections.entry(name.clone()).or_default();
            current = Some(name);
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(ConfigFileError(format!("expected key = value at line {}", lineno + 1)));
        };
        let Some(section) = current.clone() else {
            return Err(ConfigFileError(format!("key outside any section at line {}", lineno + 1)));
        };
        let key = key.trim().to_string();
        if !known_keys(&section).unwrap().contains(&key.as_str()) {
            return Err(ConfigFileError(format!("unknown key '{key}' in section [{section}]")));
        }
        sections.get_mut(&section).unwrap().insert(key, value.trim().to_string());
    }
    Ok(sections)
}

fn apply_env_overrides(sections: &mut Sections) -> Result<(), ConfigFileError> {
    for (var, value) in std::env::vars() {
        let Some(rest) = var.strip_prefix("ZIGZAG_") else { continue };
        let Some((section_upper, key)) = rest.split_once("__") else { continue };
        let section = section_upper.to_lowercase();
        let Some(keys) = known_keys(&section) else {
            return Err(ConfigFileError(format!("env override {var}: unknown section")));
        };
        if !keys.contains(&key) {
            return Err(ConfigFileError(format!("env override {var}: unknown key '{key}'")));
        }
        sections.entry(section).or_default().insert(key.to_string(), value);
    }
    Ok(())
}

struct SectionView<'a> {
    name: &'a str,
    map: Option<&'a BTreeMap<String, String>>,
}

impl<'a> SectionView<'a> {
    fn raw(&self, key: &str) -> Option<&'a str> {
        self.map.and_then(|m| m.get(key)).map(|s| s.as_str())
    }

    fn f64(&self, key: &str) -> Result<Option<f64>, ConfigFileError> {
        match self.raw(key) {
            None => Ok(None),
            Some(s) => s.parse::<f64>().map(Some).map_err(|_| {
                ConfigFileError(format!("[{}] {key} = '{s}' is not a number", self.name))
            }),
        }
    }

    fn f64_or(&self, key: &str, default: f64) -> Result<f64, ConfigFileError> {
        Ok(self.f64(key)?.unwrap_or(default))
    }

    fn usize_or(&self, key: &str, default: usize) -> Result<usize, ConfigFileError> {
        match self.raw(key) {
            None => Ok(default),
            Some(s) => s.parse::<usize>().map_err(|_| {
                ConfigFileError(format!("[{}] {key} = '{s}' is not a count", self.name))
            }),
        }
    }

    fn bool_or(&self, key: &str, default: bool) -> Result<bool, ConfigFileError> {
        match self.raw(key) {
            None => Ok(default),
            Some("true") => Ok(true),
            Some("false") => Ok(false),
            Some(s) => Err(ConfigFileError(format!(
                "[{}] {key} = '{s}' is not true/false",
                self.name
            ))),
        }
    }

    /// Value from a pair of alternative unit-suffixed keys (at most one).
    fn with_units(
        &self,
        keys: &[(&str, f64)],
        default: f64,
    ) -> Result<f64, ConfigFileError> {
        let mut found = None;
        for (key, scale) in keys {
            if let Some(v) = self.f64(key)? {
                if found.is_some() {
                    return Err(ConfigFileError(format!(
                        "[{}] give only one of {:?}",
                        self.name,
                        keys.iter().map(|(k, _)| *k).collect::<Vec<_>>()
                    )));
                }
                found = Some(v * scale);
            }
        }
        Ok(found.unwrap_or(default))
    }
}

/// Fully resolved run configuration.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub cavity: CavityConfig,
    pub pendulum: PendulumSpec,
    /// Pose before the operating-yaw resolution (yaw holds the offset when
    /// `at_operating_yaw` is set).
    pub pose_offsets: PendulumPose,
    pub at_operating_yaw: bool,
    pub sweep_dof: SweepDof,
    pub sweep_min: f64,
    pub sweep_max: f64,
    pub sweep_points: usize,
    pub noise: NoiseParams,
    pub shot_convention: ShotConvention,
    pub noise_grid: (f64, f64, usize),
    pub range_theta_max: Option<f64>,
    pub range_points: usize,
    pub validate_poses: usize,
    pub inject_delta_alpha_offset: f64,
    pub output_format: Option<String>,
    pub output_path: Option<String>,
}

impl RunConfig {
    /// Resolve the reference pose, adding the design operating yaw when
    /// requested (which needs g > 1/2).
    pub fn reference_pose(&self) -> Result<PendulumPose, zigzag_core::DomainError> {
        let mut pose = self.pose_offsets;
        if self.at_operating_yaw {
            let mode = ModeGeometry::for_cavity(&self.cavity)?;
            pose.yaw_alpha += mode.operating_yaw;
        }
        Ok(pose)
    }
}

pub fn parse(text: &str) -> Result<RunConfig, ConfigFileError> {
    let mut sections = parse_sections(text)?;
    apply_env_overrides(&mut sections)?;
    build(&sections)
}

fn build(sections: &Sections) -> Result<RunConfig, ConfigFileError> {
    let view = |name: &'static str| SectionView { name, map: sections.get(name) };

    // cavity: exactly one of L / l_target
    let cavity_view = view("cavity");
    let radius = cavity_view.f64_or("R_mm", 50.0)? * 1e-3;
    let lambda = cavity_view.f64_or("lambda_nm", 780.0)? * 1e-9;
    let finesse_on = cavity_view.f64_or("finesse_on", 880.0)?;
    let finesse_zig = cavity_view.f64_or("finesse_zig", 230.0)?;
    let explicit_length = cavity_view.f64("L_mm")?;
    let l_target = cavity_view.f64("l_target_mm")?;
    let length = match (explicit_length, l_target) {
        (Some(_), Some(_)) => {
            return Err(ConfigFileError("[cavity] give exactly one of L_mm / l_target_mm".into()))
        }
        (Some(l_mm), None) => l_mm * 1e-3,
        (None, Some(lt_mm)) => required_cavity_length(lt_mm * 1e-3, radius)
            .map_err(|e| ConfigFileError(e.to_string()))?,
        (None, None) => required_cavity_length(11e-3, radius)
            .map_err(|e| ConfigFileError(e.to_string()))?,
    };
    let cavity = CavityConfig::new(length, radius, lambda, finesse_on, finesse_zig)
        .map_err(|e| ConfigFileError(e.to_string()))?;

    // pendulum
    let p = view("pendulum");
    let width = p.f64_or("width_mm", 11.0)? * 1e-3;
    let height = p.f64_or("height_mm", 12.0)? * 1e-3;
    let thickness = p.f64_or("thickness_mm", 2.0)? * 1e-3;
    let delta_alpha = p.with_units(&[("delta_alpha_deg", 1f64.to_radians()), ("delta_alpha_rad", 1.0)], 0.0)?;
    let delta_beta = p.with_units(&[("delta_beta_deg", 1f64.to_radians()), ("delta_beta_rad", 1.0)], 0.0)?;
    let mass = p.f64("mass_mg")?;
    let density = p.f64("density_kg_m3")?;
    let pendulum = match (mass, density) {
        (Some(_), Some(_)) => {
            return Err(ConfigFileError("[pendulum] give only one of mass_mg / density_kg_m3".into()))
        }
        (Some(mg), None) => PendulumSpec::new(width, height, thickness, mg * 1e-6, delta_alpha, delta_beta),
        (None, Some(rho)) => PendulumSpec::with_density(width, height, thickness, rho, delta_alpha, delta_beta),
        (None, None) => PendulumSpec::new(width, height, thickness, 1e-3, delta_alpha, delta_beta),
    }
    .map_err(|e| ConfigFileError(e.to_string()))?;

    // pose
    let pose_view = view("pose");
    let at_operating_yaw = pose_view.bool_or("at_operating_yaw", true)?;
    let yaw = pose_view.with_units(&[("yaw_deg", 1f64.to_radians()), ("yaw_rad", 1.0)], 0.0)?;
    let pitch = pose_view.with_units(&[("pitch_deg", 1f64.to_radians()), ("pitch_rad", 1.0)], 0.0)?;
    let roll = pose_view.with_units(&[("roll_deg", 1f64.to_radians()), ("roll_rad", 1.0)], 0.0)?;
    let x = pose_view.with_units(&[("x_um", 1e-6), ("x_mm", 1e-3)], 0.0)?;
    let y = pose_view.with_units(&[("y_um", 1e-6), ("y_mm", 1e-3)], 0.0)?;
    let z = pose_view.with_units(&[("z_um", 1e-6), ("z_mm", 1e-3)], 0.0)?;
    let pose_offsets = PendulumPose::new(yaw, pitch, roll, nalgebra_vec(x, y, z));

    // sweep
    let s = view("sweep");
    let sweep_dof = match s.raw("dof").unwrap_or("yaw") {
        "yaw" => SweepDof::Yaw,
        "pitch" => SweepDof::Pitch,
        "roll" => SweepDof::Roll,
        "transverse" => SweepDof::Transverse,
        "longitudinal" => SweepDof::Longitudinal,
        "x-axis" => SweepDof::XAxis,
        "z" => SweepDof::Z,
        other => {
            return Err(ConfigFileError(format!(
                "[sweep] dof = '{other}' not one of yaw|pitch|roll|transverse|longitudinal|x-axis|z"
            )))
        }
    };
    let (sweep_min, sweep_max) = if sweep_dof.is_angle() {
        (
            s.with_units(&[("min_urad", 1e-6), ("min_deg", 1f64.to_radians())], -1.5e-6)?,
            s.with_units(&[("max_urad", 1e-6), ("max_deg", 1f64.to_radians())], 1.5e-6)?,
        )
    } else {
        (
            s.with_units(&[("min_um", 1e-6), ("min_mm", 1e-3)], -1e-6)?,
            s.with_units(&[("max_um", 1e-6), ("max_mm", 1e-3)], 1e-6)?,
        )
    };
    let sweep_points = s.usize_or("points", 21)?;
    if sweep_points < 2 {
        return Err(ConfigFileError("[sweep] points must be at least 2".into()));
    }

    // noise: anticipated-parameter defaults, overridable key by key
    let n = view("noise");
    let defaults = NoiseParams::default();
    let width_l = n.f64_or("l_mm", defaults.width_l * 1e3)? * 1e-3;
    let height_h = n.f64_or("h_mm", defaults.height_h * 1e3)? * 1e-3;
    let mass_m = n.f64_or("m_mg", defaults.mass_m * 1e6)? * 1e-6;
    let noise = NoiseParams {
        temperature: n.f64_or("T_K", defaults.temperature)?,
        width_l,
        height_h,
        thickness_t: n.f64_or("t_mm", defaults.thickness_t * 1e3)? * 1e-3,
        mass_m,
        inertia_yaw: mass_m * width_l * width_l / 12.0,
        inertia_roll: mass_m * (width_l * width_l + height_h * height_h) / 12.0,
        fiber_diameter: n.f64_or("D_um", defaults.fiber_diameter * 1e6)? * 1e-6,
        omega_m: 2.0 * std::f64::consts::PI * n.f64_or("f_m_mHz", 10.0)? * 1e-3,
        q_m: n.f64_or("Q_m", defaults.q_m)?,
        sigma: n.f64_or("sigma", defaults.sigma)?,
        young_e: n.f64_or("E_GPa", defaults.young_e / 1e9)? * 1e9,
        w0: n.f64_or("w0_um", defaults.w0 * 1e6)? * 1e-6,
        phi_sub: n.f64_or("phi_sub", defaults.phi_sub)?,
        phi_coat: n.f64_or("phi_coat", defaults.phi_coat)?,
        coating_d: n.f64_or("d_um", defaults.coating_d * 1e6)? * 1e-6,
        finesse: n.f64_or("finesse", defaults.finesse)?,
        lambda_l: n.f64_or("lambda_L_nm", defaults.lambda_l * 1e9)? * 1e-9,
        p_in: n.f64_or("P_in_uW", defaults.p_in * 1e6)? * 1e-6,
        leak_delta_alpha: n.f64_or("leak_delta_alpha_mdeg", 60.0)? * 1e-3 * 1f64.to_radians(),
        xi: n.f64_or("xi_cm", defaults.xi * 1e2)? * 1e-2,
        f_swing: n.f64_or("f_swing_Hz", defaults.f_swing)?,
        f_roll: n.f64_or("f_roll_Hz", defaults.f_roll)?,
        q_swing: n.f64_or("Q_swing", defaults.q_swing)?,
        q_roll: n.f64_or("Q_roll", defaults.q_roll)?,
        cavity_length: n.f64_or("cavity_L_cm", defaults.cavity_length * 1e2)? * 1e-2,
        cavity_radius: n.f64_or("cavity_R_cm", defaults.cavity_radius * 1e2)? * 1e-2,
    };
    let shot_convention = match n.raw("shot_convention").unwrap_or("sql") {
        "sql" => ShotConvention::Sql,
        "paper" => ShotConvention::Paper,
        other => {
            return Err(ConfigFileError(format!(
                "[noise] shot_convention = '{other}' not one of sql|paper"
            )))
        }
    };
    let noise_grid = (
        n.f64_or("grid_min_hz", 0.1)?,
        n.f64_or("grid_max_hz", 1000.0)?,
        n.usize_or("grid_points", 400)?,
    );
    if !(noise_grid.0 > 0.0) || noise_grid.1 < noise_grid.0 || noise_grid.2 == 0 {
        return Err(ConfigFileError("[noise] grid must be positive and ascending".into()));
    }

    // range, validate, output
    let r = view("range");
    let range_theta_max = r.f64("theta_max_mrad")?.map(|v| v * 1e-3);
    let range_points = r.usize_or("points", 41)?;
    let v = view("validate");
    let validate_poses = v.usize_or("poses", 1000)?;
    let inject = v.f64_or("inject_delta_alpha_offset_deg", 0.0)?.to_radians();
    let o = view("output");
    let output_format = o.raw("format").map(|s| s.to_string());
    if let Some(fmt) = &output_format {
        if fmt != "csv" && fmt != "json" {
            return Err(ConfigFileError(format!("[output] format = '{fmt}' not one of csv|json")));
        }
    }
    let output_path = o.raw("path").map(|s| s.to_string());

    Ok(RunConfig {
        cavity,
        pendulum,
        pose_offsets,
        at_operating_yaw,
        sweep_dof,
        sweep_min,
        sweep_max,
        sweep_points,
        noise,
        shot_convention,
        noise_grid,
        range_theta_max,
        range_points,
        validate_poses,
        inject_delta_alpha_offset: inject,
        output_format,
        output_path,
    })
}

fn nalgebra_vec(x: f64, y: f64, z: f64) -> nalgebra::Vector3<f64> {
    nalgebra::Vector3::new(x, y, z)
}

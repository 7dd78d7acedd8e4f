//! Acceptance suite: one test per release criterion, each printing a
//! PASS line with the measured value against its bound.
//!
//! Run with `cargo test -p zigzag-core --test acceptance -- --nocapture`
//! to see the per-criterion report.

use std::time::Instant;

use zigzag_core::constants::SPEED_OF_LIGHT;
use zigzag_core::geometry::{CavityConfig, PendulumPose, PendulumSpec};
use zigzag_core::modes::{
    mode_frequencies, required_cavity_length, transverse_mode_spacing, ModeGeometry,
};
use zigzag_core::noise::{
    default_grid, psd_mirror_brownian, psd_qrpn, psd_suspension_thermal, rms_mode_shift,
    susceptibility, total_budget, NoiseParams, RmsMode, RmsParams, ShotConvention,
};
use zigzag_core::range::{overlap_closed_form, overlap_quadrature, sensing_range};
use zigzag_core::raytrace::{fit_slope_curvature, frequency_shift, sweep, SweepDof};
use zigzag_core::sensitivity::yaw_sensitivity;
use zigzag_core::validate::{all_passed, run_all, ValidationConfig};

fn design_cavity() -> CavityConfig {
    let length = required_cavity_length(0.011, 0.050).expect("design length");
    CavityConfig::new(length, 0.050, 780e-9, 880.0, 230.0).expect("design cavity")
}

fn design_pendulum(delta_alpha: f64) -> PendulumSpec {
    PendulumSpec::new(0.011, 0.012, 1e-6, 1e-3, delta_alpha, 0.0).expect("pendulum")
}

fn operating_pose(cfg: &CavityConfig) -> PendulumPose {
    PendulumPose::from_yaw(ModeGeometry::for_cavity(cfg).expect("mode").operating_yaw)
}

fn within(value: f64, target: f64, tol: f64) -> bool {
    (value - target).abs() / target.abs() <= tol
}

#[test]
fn acceptance_01_design_length_inversion() {
    let length = required_cavity_length(0.011, 0.050).unwrap();
    assert!(
        (length - 0.0248).abs() <= 0.05e-3,
        "L = {:.4} mm outside 24.8 ± 0.05 mm",
        length * 1e3
    );
    println!(
        "ACCEPTANCE 1 design-length inversion: PASS — L = {:.4} mm (target 24.8 ± 0.05 mm)",
        length * 1e3
    );
}

#[test]
fn acceptance_02_yaw_sensitivity() {
    let cfg = design_cavity();
    let spec = design_pendulum(0.0);
    let pose = operating_pose(&cfg);
    let grid: Vec<f64> = (-15..=15).map(|i| i as f64 * 1e-7).collect();
    let result = sweep(&cfg, &spec, &pose, SweepDof::Yaw, &grid).unwrap();
    assert!(result.truncated.is_none());
    let (slope, _) = fit_slope_curvature(&result.points);
    let slope_mhz_per_urad = slope.abs() / 1e12;
    assert!(
        within(slope.abs(), 85e12, 0.02),
        "ray-traced yaw slope {slope_mhz_per_urad:.3} MHz/µrad outside 85 ± 2%"
    );

    let mode = ModeGeometry::for_cavity(&cfg).unwrap();
    let (_, s) = yaw_sensitivity(&cfg, &mode);
    assert!(within(s, 6.5e6, 0.02), "S = {s:.4e} rad⁻¹ outside 6.5e6 ± 2%");
    println!(
        "ACCEPTANCE 2 yaw sensitivity: PASS — ray-traced slope {slope_mhz_per_urad:.3} MHz/µrad \
         (85 ± 2%), S = {s:.4e} rad⁻¹ (6.5e6 ± 2%)"
    );
}

#[test]
fn acceptance_03_transverse_residual_coupling() {
    let cfg = design_cavity();
    let da = 0.2f64.to_radians();
    let spec = design_pendulum(da);
    let pose = operating_pose(&cfg);
    let grid: Vec<f64> = (-10..=10).map(|i| i as f64 * 1e-7).collect();
    let result = sweep(&cfg, &spec, &pose, SweepDof::Transverse, &grid).unwrap();
    let (transverse_slope, _) = fit_slope_curvature(&result.points);
    assert!(
        within(transverse_slope.abs(), 30e12, 0.15),
        "transverse slope {:.3} MHz/µm outside 30 ± 15%",
        transverse_slope.abs() / 1e12
    );

    let yaw_grid: Vec<f64> = (-10..=10).map(|i| i as f64 * 1e-7).collect();
    let yaw_result = sweep(&cfg, &spec, &pose, SweepDof::Yaw, &yaw_grid).unwrap();
    let (yaw_slope, _) = fit_slope_curvature(&yaw_result.points);
    let endpoint_ratio = yaw_slope.abs() * (2.0 / 0.011) / transverse_slope.abs();
    assert!(
        within(endpoint_ratio, 570.0, 0.05),
        "end-point ratio {endpoint_ratio:.1} outside 570 ± 5%"
    );
    println!(
        "ACCEPTANCE 3 transverse residual coupling: PASS — slope {:.3} MHz/µm (30 ± 15%), \
         end-point ratio {endpoint_ratio:.1} (570 ± 5%)",
        transverse_slope.abs() / 1e12
    );
}

#[test]
fn acceptance_04_directional_ratios() {
    // the quoted operating angle of the demonstration
    let cfg = design_cavity();
    let da = 0.2f64.to_radians();
    let spec = design_pendulum(da);
    let pose = PendulumPose::from_yaw(8.5f64.to_radians());
    let grid: Vec<f64> = (-10..=10).map(|i| i as f64 * 1e-7).collect();

    let mut slopes = Vec::new();
    for dof in [SweepDof::Transverse, SweepDof::XAxis, SweepDof::Longitudinal] {
        let result = sweep(&cfg, &spec, &pose, dof, &grid).unwrap();
        let (slope, _) = fit_slope_curvature(&result.points);
        slopes.push(slope);
    }
    let ratio = (slopes[1] / slopes[0]).abs();
    let expected = 8.5f64.to_radians().sin();
    assert!(
        within(ratio, expected, 0.01),
        "x-axis/transverse ratio {ratio:.5} outside sin 8.5° = {expected:.5} ± 1%"
    );
    let longitudinal_fraction = (slopes[2] / slopes[0]).abs();
    assert!(
        longitudinal_fraction < 1e-4,
        "longitudinal slope not at noise floor: {longitudinal_fraction:.2e} of transverse"
    );
    println!(
        "ACCEPTANCE 4 directional ratios: PASS — x-axis/transverse = {ratio:.5} \
         (sin 8.5° ± 1%), longitudinal/transverse = {longitudinal_fraction:.1e} (noise floor)"
    );
}

#[test]
fn acceptance_05_cavity_verification_numbers() {
    let cfg = design_cavity();
    let spacing = transverse_mode_spacing(&cfg, 0, 3);
    assert!(within(spacing, 28.3e6, 0.10), "spacing {spacing:.4e} outside 28.3 MHz ± 10%");
    let f = mode_frequencies(&cfg).unwrap();
    assert!(within(f.fsr_on, 6.2e9, 0.10), "on-axis FSR {:.4e}", f.fsr_on);
    assert!(within(f.fsr_zig, 3.2e9, 0.10), "zigzag FSR {:.4e}", f.fsr_zig);
    assert!(within(f.linewidth_on, 7e6, 0.10), "on-axis linewidth {:.4e}", f.linewidth_on);
    assert!(within(f.linewidth_zig, 14e6, 0.10), "zigzag linewidth {:.4e}", f.linewidth_zig);
    println!(
        "ACCEPTANCE 5 cavity verification numbers: PASS — spacing {:.2} MHz (28.3 ± 10%), \
         FSR {:.2}/{:.2} GHz (6.2/3.2 ± 10%), linewidths {:.2}/{:.2} MHz (7/14 ± 10%)",
        spacing / 1e6,
        f.fsr_on / 1e9,
        f.fsr_zig / 1e9,
        f.linewidth_on / 1e6,
        f.linewidth_zig / 1e6
    );
}

#[test]
fn acceptance_06_sensing_range() {
    let cfg = design_cavity();
    let mode = ModeGeometry::for_cavity(&cfg).unwrap();
    let rng = sensing_range(cfg.stability_parameter(), mode.waist_w0, cfg.lambda).unwrap();
    assert!(
        within(rng.to_degrees(), 0.2, 0.10),
        "sensing range {:.4}° outside 0.2° ± 10%",
        rng.to_degrees()
    );

    let alpha_max = 5.0 * cfg.lambda / (std::f64::consts::PI * mode.waist_w0);
    let mut worst: f64 = 0.0;
    for i in 0..=100 {
        let da = alpha_max * (i as f64) / 100.0;
        let quad = overlap_quadrature(da, mode.waist_w0, cfg.lambda);
        let closed = overlap_closed_form(da, mode.waist_w0, cfg.lambda);
        worst = worst.max((quad - closed).abs());
    }
    assert!(worst <= 1e-10, "overlap quadrature/closed-form gap {worst:.2e}");
    println!(
        "ACCEPTANCE 6 sensing range: PASS — θ_rng = {:.4}° (0.2° ± 10%), \
         overlap agreement {worst:.1e} (≤ 1e-10)",
        rng.to_degrees()
    );
}

#[test]
fn acceptance_07_noise_budget_bands() {
    let p = NoiseParams::default();
    let start = Instant::now();
    let budget = total_budget(&p, &default_grid(), ShotConvention::Sql);
    let elapsed = start.elapsed();

    let qrpn = psd_qrpn(&p);
    let mut floor_min = f64::INFINITY;
    for &f in budget.freq_hz.iter().filter(|&&f| (2.0..=200.0).contains(&f)) {
        let w = 2.0 * std::f64::consts::PI * f;
        let susp = psd_suspension_thermal(w, &p);
        assert!(qrpn > susp, "QRPN below suspension thermal at {f} Hz");
        // thermal-limited torque floor: suspension plus mirror Brownian
        // referred to torque through the susceptibility
        let floor = susp + psd_mirror_brownian(w, &p) / susceptibility(w, &p);
        floor_min = floor_min.min(floor.sqrt());
    }
    assert!(
        (1e-20..=1e-19).contains(&floor_min),
        "thermal floor min {floor_min:.3e} outside [1e-20, 1e-19]"
    );
    assert!(elapsed.as_secs_f64() < 5.0, "400-point budget took {elapsed:?}");
    println!(
        "ACCEPTANCE 7 noise budget bands: PASS — thermal floor min {floor_min:.3e} N·m/√Hz \
         in [1e-20, 1e-19], QRPN above suspension thermal across 2–200 Hz, grid in {:.2} ms",
        elapsed.as_secs_f64() * 1e3
    );
}

#[test]
fn acceptance_08_rms_mode_shifts() {
    // demonstration pendulum in the experimental cavity, model slopes at
    // the measured 0.2° bend and the pendulum's 0.5 mm thickness
    let cfg = design_cavity();
    let pendulum = PendulumSpec::new(0.011, 0.012, 0.5e-3, 6.6e-6, 0.0, 0.0).unwrap();
    let pose = operating_pose(&cfg);
    let path = zigzag_core::raytrace::solve_zigzag_path(&cfg, &pendulum, &pose, None).unwrap();
    let yaw_slope = (SPEED_OF_LIGHT / cfg.lambda) * 0.011 / path.roundtrip_s;
    let transverse_slope =
        (SPEED_OF_LIGHT / cfg.lambda) * 2.0 * (0.1f64.to_radians()).sin() / path.roundtrip_s;

    let p = RmsParams::demonstration(yaw_slope, transverse_slope);
    let yaw = rms_mode_shift(RmsMode::Yaw, &p);
    let swing = rms_mode_shift(RmsMode::Swing, &p);
    let roll = rms_mode_shift(RmsMode::Roll, &p);
    for (name, value, target) in [("yaw", yaw, 25e9), ("swing", swing, 75e3), ("roll", roll, 4e3)]
    {
        let factor = value / target;
        assert!(
            (0.5..=2.0).contains(&factor),
            "{name} rms shift {value:.3e} Hz not within factor 2 of {target:.1e}"
        );
    }
    assert!(yaw / swing >= 1e5, "yaw/swing dominance {:.2e} < 1e5", yaw / swing);
    println!(
        "ACCEPTANCE 8 rms mode shifts: PASS — yaw {:.1} GHz (25 ×/÷2), swing {:.1} kHz \
         (75 ×/÷2), roll {:.2} kHz (4 ×/÷2), dominance {:.2e} (≥ 1e5)",
        yaw / 1e9,
        swing / 1e3,
        roll / 1e3,
        yaw / swing
    );
}

#[test]
fn acceptance_09_oracle_equivalence_suite() {
    let cfg = ValidationConfig::with_default_cavity(1000, 42);
    let start = Instant::now();
    let outcomes = run_all(&cfg);
    let elapsed = start.elapsed();
    for c in &outcomes {
        assert!(c.passed, "{} failed: {}", c.name, c.detail);
    }
    assert!(all_passed(&outcomes));
    assert!(elapsed.as_secs_f64() < 60.0, "validation took {elapsed:?}");
    println!(
        "ACCEPTANCE 9 oracle equivalence suite: PASS — {} checks ({}) in {:.2} s (< 60 s)",
        outcomes.len(),
        outcomes.iter().map(|c| c.name).collect::<Vec<_>>().join(", "),
        elapsed.as_secs_f64()
    );
}

#[test]
fn acceptance_10_property_suite() {
    let cfg = design_cavity();

    // pitch symmetry without bends
    let spec0 = design_pendulum(0.0);
    let pose = operating_pose(&cfg);
    let beta = 5e-4;
    let up = frequency_shift(&cfg, &spec0, &pose, &SweepDof::Pitch.apply(&pose, beta)).unwrap();
    let dn = frequency_shift(&cfg, &spec0, &pose, &SweepDof::Pitch.apply(&pose, -beta)).unwrap();
    assert!((up - dn).abs() / up.abs() < 1e-6, "pitch asymmetry {:.2e}", (up - dn) / up);

    // pitch-response minimum stays at beta = 0 under first-order bends
    let bent = PendulumSpec::new(0.011, 0.012, 1e-6, 1e-3, 0.2f64.to_radians(), 0.1f64.to_radians())
        .unwrap();
    let grid: Vec<f64> = (-10..=10).map(|i| i as f64 * 1e-4).collect();
    let result = sweep(&cfg, &bent, &pose, SweepDof::Pitch, &grid).unwrap();
    let (slope, curvature) = fit_slope_curvature(&result.points);
    let vertex = -0.5 * slope / curvature;
    assert!(
        vertex.abs() <= 1e-4,
        "pitch minimum moved to {vertex:.2e} rad (resolution 1e-4)"
    );

    // S independent of the cavity length at fixed l, lambda, finesse
    let mode_a = ModeGeometry::for_cavity(&cfg).unwrap();
    let longer = CavityConfig::new(0.023, 0.050, 780e-9, 880.0, 230.0).unwrap();
    let mode_b = ModeGeometry {
        beam_sep_l: mode_a.beam_sep_l,
        ..ModeGeometry::for_cavity(&longer).unwrap()
    };
    let (_, s_a) = yaw_sensitivity(&cfg, &mode_a);
    let (_, s_b) = yaw_sensitivity(&longer, &mode_b);
    assert_eq!(s_a, s_b, "S changed with cavity length");

    // noise scaling laws
    let p = NoiseParams::default();
    let w = 2.0 * std::f64::consts::PI * 33.0;
    let scaled = NoiseParams {
        temperature: 2.0 * p.temperature,
        q_m: 4.0 * p.q_m,
        p_in: 3.0 * p.p_in,
        width_l: 2.0 * p.width_l,
        ..p
    };
    let thermal_ratio = psd_suspension_thermal(w, &scaled) / psd_suspension_thermal(w, &p);
    assert!((thermal_ratio - 0.5).abs() < 1e-12, "thermal scaling {thermal_ratio}");
    let qrpn_ratio = psd_qrpn(&scaled) / psd_qrpn(&p);
    assert!((qrpn_ratio - 12.0).abs() < 1e-9, "QRPN scaling {qrpn_ratio}");
    let brownian_ratio = psd_mirror_brownian(w, &scaled) / psd_mirror_brownian(w, &p);
    assert!((brownian_ratio - 0.5).abs() < 1e-12, "brownian scaling {brownian_ratio}");

    // gauge invariance is part of the validation suite
    let gauge = run_all(&ValidationConfig { poses: 10, ..ValidationConfig::default() })
        .into_iter()
        .find(|c| c.name == "gauge-invariance")
        .unwrap();
    assert!(gauge.passed, "gauge invariance: {}", gauge.detail);

    println!(
        "ACCEPTANCE 10 property suite: PASS — pitch symmetry {:.1e}, pitch minimum at \
         {vertex:.1e} rad, S length-independent, scaling laws exact, gauge invariant",
        ((up - dn) / up).abs()
    );
}

#[test]
fn acceptance_margin_note_yaw_slope() {
    // the ±2% bound on the yaw slope is tight: the exact path length is
    // 48.775 mm, putting the slope at +1.98% of 85 MHz/µrad; the 2L
    // approximation would misstate it by ~1.7%. Keep a visible record of
    // the margin.
    let cfg = design_cavity();
    let mode = ModeGeometry::for_cavity(&cfg).unwrap();
    let slope = (SPEED_OF_LIGHT / cfg.lambda) * mode.beam_sep_l / mode.zig_length;
    let margin = slope / 85e12 - 1.0;
    assert!(margin < 0.02 && margin > 0.0);
    println!("ACCEPTANCE margin note: yaw slope sits {:.3}% above 85 MHz/µrad", margin * 100.0);
}

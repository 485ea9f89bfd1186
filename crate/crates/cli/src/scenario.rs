//! Scenario presets and the measurement pipeline behind each CLI verb.

use std::f64::consts::{FRAC_PI_4, TAU};

use optoforce::constants::{BOLTZMANN, PA_PER_MBAR};
use optoforce::dynamics::{
    derive_seed, DriveConfig, ForceModel, Langevin, PhaseMode, SignalDrive, SimConfig,
    SimulationSetup, TrapModel,
};
use optoforce::optics::{interference_force_amplitude, Direction};
use optoforce::readout::{
    calibrate_displacement, extract_peak, force_from_peak, inverse_susceptibility, Detector,
    PeakReport, PsdAccumulator, PsdEstimate, SpectralUnit,
};
use optoforce::sensing::{
    log_grid, min_detectable_force, photon_flux, projection_curve, reference_kappa,
    sensitivity_chain, transduction_kappa, SensitivityReport,
};
use optoforce::stats::log_log_fit;
use rayon::prelude::*;

use crate::config::{
    DampingSection, Pressure, ScenarioConfig, ScenarioKind, SweepSection, Transduction,
};
use crate::error::CliError;
use crate::output::{RunOutput, Summary, Table};

/// Phase for which a fixed-phase drive carries the same line power as a
/// uniformly randomized one.
pub const RMS_EQUIVALENT_PHASE: f64 = FRAC_PI_4;

/// Offsets separating the seed streams of different sub-runs.
const DETECTION_SEED_OFFSET: u64 = 1 << 20;

/// Fully resolved preset for `kind`.
pub fn preset(kind: ScenarioKind) -> ScenarioConfig {
    let mut c = ScenarioConfig {
        scenario: kind,
        ..ScenarioConfig::default()
    };
    match kind {
        ScenarioKind::Custom => {}
        ScenarioKind::Fig2 => {
            // slow phase wander keeps the line inside one 30 Hz bin per shot
            c.drive.phase_mode = PhaseMode::Randomized {
                correlation_time: 0.1,
            };
        }
        ScenarioKind::Fig3 => {
            c.drive.phase_mode = PhaseMode::Fixed {
                phase: RMS_EQUIVALENT_PHASE,
            };
            // 10 Hz bins keep the thermal shoulder small against the line
            c.analysis.segment_duration = 0.1;
            c.sweep = SweepSection {
                powers: vec![66e-9, 98e-9, 146e-9, 218e-9, 326e-9, 493e-9],
                segments_at_reference: 54,
                reference_power: 493e-9,
                min_segments: 100,
            };
        }
        ScenarioKind::Fig4 => {
            let pressure = 6.8e-4 * PA_PER_MBAR;
            c.environment.pressure = Pressure(pressure);
            c.environment.damping = DampingSection::Calibrated {
                gamma: matched_damping(&c),
                pressure: Pressure(pressure),
            };
            c.drive.signal_power = 58.2e-12;
            c.drive.phase_mode = PhaseMode::Fixed {
                phase: RMS_EQUIVALENT_PHASE,
            };
            c.feedback.enabled = true;
            c.feedback.velocity_gain = 200.0;
            c.analysis.segment_duration = 1.0;
        }
        ScenarioKind::Fig5 => {}
    }
    c
}

/// Gas damping for which the thermal force noise equals the empirical
/// transduction times the measured power sensitivity in a 1 Hz band.
fn matched_damping(c: &ScenarioConfig) -> f64 {
    let s_f = reference_kappa().powi(2) * c.chain.measured_sensitivity;
    s_f / (4.0 * BOLTZMANN * c.environment.temperature * c.particle.mass())
}

pub fn description(kind: ScenarioKind) -> &'static str {
    match kind {
        ScenarioKind::Fig2 => "single-shot PSDs with the weak beam on, off and without particle",
        ScenarioKind::Fig3 => "driven-peak band power against weak-beam power",
        ScenarioKind::Fig4 => "driven peak at low pressure and picowatt weak-beam power",
        ScenarioKind::Fig5 => {
            "co- and counter-propagating force projections against the thermal floor"
        }
        ScenarioKind::Custom => "driven run with the configured parameters",
    }
}

fn model_kappa_peak(cfg: &ScenarioConfig) -> Result<f64, CliError> {
    let tweezer = cfg.tweezer.beam();
    let signal = cfg.signal.beam(&tweezer, 1.0);
    Ok(interference_force_amplitude(
        &tweezer,
        &signal,
        &cfg.particle,
    )?)
}

/// Peak force per sqrt(W) handed to the integrator.
pub fn kappa_peak(cfg: &ScenarioConfig) -> Result<f64, CliError> {
    match cfg.drive.transduction {
        Transduction::Empirical {
            force_rms,
            signal_power,
        } => {
            if !(force_rms > 0.0 && signal_power > 0.0) {
                return Err(CliError::Config(
                    "empirical transduction needs force_rms and signal_power > 0".into(),
                ));
            }
            // the line at the drive frequency carries force_rms at signal_power
            let anchor = DriveConfig {
                signal_power,
                ..cfg.drive.config()
            };
            Ok(anchor.kappa_peak_for_tone_rms(force_rms))
        }
        Transduction::Model => model_kappa_peak(cfg),
        Transduction::Fixed { kappa_peak } => Ok(kappa_peak),
    }
}

pub fn omega_z(cfg: &ScenarioConfig) -> Result<f64, CliError> {
    Ok(cfg.trap.omega_z(&cfg.tweezer.beam(), &cfg.particle)?)
}

/// Simulation setup for `segments` single shots at `signal_power`.
pub fn build_setup(
    cfg: &ScenarioConfig,
    driven: bool,
    signal_power: f64,
    segments: usize,
    seed: u64,
) -> Result<SimulationSetup, CliError> {
    let drive = if driven {
        Some(SignalDrive {
            config: DriveConfig {
                signal_power,
                ..cfg.drive.config()
            },
            kappa_peak: kappa_peak(cfg)?,
        })
    } else {
        None
    };
    let seg = cfg.segment_length();
    let setup = SimulationSetup {
        particle: cfg.particle,
        environment: cfg.environment.environment(),
        omega_z: omega_z(cfg)?,
        drive,
        feedback: cfg.feedback,
        sim: SimConfig {
            sample_rate: cfg.sim.sample_rate,
            decimation: cfg.sim.decimation,
            duration: (segments * seg) as f64 / cfg.sim.sample_rate,
            seed,
            initial_state: cfg.sim.initial_state,
            record_velocity: false,
        },
        force_model: ForceModel::Harmonic,
    };
    setup.validate()?;
    Ok(setup)
}

/// Simulate (or, without a setup, record detector noise only), detect and
/// average `segments` periodograms without holding the whole trace.
pub fn measure(
    cfg: &ScenarioConfig,
    setup: Option<SimulationSetup>,
    segments: usize,
    detection_seed: u64,
) -> Result<PsdEstimate, CliError> {
    let seg = cfg.segment_length();
    if seg < 2 || segments == 0 {
        return Err(CliError::Config(
            "analysis needs segment_duration * sample_rate >= 2 and segments >= 1".into(),
        ));
    }
    let mut acc = PsdAccumulator::new(
        seg,
        cfg.sim.sample_rate,
        cfg.analysis.window,
        SpectralUnit::VoltsSquaredPerHz,
    )?;
    let mut detector = Detector::new(cfg.readout(), detection_seed)?;
    let mut langevin = setup.map(Langevin::new).transpose()?;
    let mut buf = Vec::with_capacity(seg);
    for _ in 0..segments {
        buf.clear();
        match langevin.as_mut() {
            Some(l) => l.advance(seg, &mut buf, None)?,
            None => buf.resize(seg, 0.0),
        }
        detector.apply(&mut buf);
        acc.push(&buf)?;
    }
    Ok(acc.finish()?)
}

/// Thermal calibration plus driven-peak analysis of one voltage spectrum.
#[derive(Debug, Clone)]
pub struct DrivenAnalysis {
    pub gain: f64,
    pub psd_m: PsdEstimate,
    pub peak: PeakReport,
    pub z_rms: f64,
    pub force_rms: f64,
}

pub fn analyze(
    cfg: &ScenarioConfig,
    setup: &SimulationSetup,
    psd_volts: &PsdEstimate,
) -> Result<DrivenAnalysis, CliError> {
    let motion = setup.motion();
    let cal = calibrate_displacement(
        psd_volts,
        setup.omega_z,
        motion.total_damping(),
        motion.mass,
        motion.effective_temperature(),
    )?;
    analyze_with_gain(cfg, setup, cal.gain, cal.psd_m)
}

fn analyze_with_gain(
    cfg: &ScenarioConfig,
    setup: &SimulationSetup,
    gain: f64,
    psd_m: PsdEstimate,
) -> Result<DrivenAnalysis, CliError> {
    let motion = setup.motion();
    let f_am = cfg.drive.am_frequency / TAU;
    let peak = extract_peak(
        &psd_m,
        f_am,
        cfg.analysis.half_band_bins * psd_m.resolution_bw,
    )?;
    let force_rms = force_from_peak(
        &peak,
        cfg.drive.am_frequency,
        setup.omega_z,
        motion.total_damping(),
        motion.mass,
    );
    Ok(DrivenAnalysis {
        gain,
        z_rms: peak.band_power.max(0.0).sqrt(),
        psd_m,
        peak,
        force_rms,
    })
}

fn injected_tone_rms(cfg: &ScenarioConfig, signal_power: f64) -> Result<f64, CliError> {
    let drive = DriveConfig {
        signal_power,
        ..cfg.drive.config()
    };
    Ok(drive.tone_rms(kappa_peak(cfg)?))
}

fn add_setup_summary(s: &mut Summary, cfg: &ScenarioConfig, setup: &SimulationSetup) {
    let motion = setup.motion();
    s.add("omega_z", setup.omega_z, "rad/s");
    s.add("gamma_gas", motion.gamma, "1/s");
    s.add("gamma_total", motion.total_damping(), "1/s");
    s.add("effective_temperature", motion.effective_temperature(), "K");
    s.add("mass", motion.mass, "kg");
    s.add("segment_length", cfg.segment_length(), "samples");
}

fn add_driven_summary(s: &mut Summary, a: &DrivenAnalysis, injected: f64) {
    s.add("calibration_gain", a.gain, "V/m");
    s.add("resolution_bw", a.psd_m.resolution_bw, "Hz");
    s.add("segments", a.psd_m.n_segments, "1");
    s.add("band_power", a.peak.band_power, "m^2");
    s.add("z_rms", a.z_rms, "m");
    s.add("background_psd", a.peak.background_psd, "m^2/Hz");
    s.add("snr", a.peak.snr, "1");
    s.add("significance", a.peak.significance, "1");
    s.add("force_rms", a.force_rms, "N");
    s.add("injected_force_rms", injected, "N");
}

fn psd_rows(t: &mut Table, psds: &[&PsdEstimate], scale: &[f64], f_lo: f64, f_hi: f64) {
    let base = psds[0];
    for (k, &f) in base.frequencies.iter().enumerate() {
        if f < f_lo || f > f_hi {
            continue;
        }
        let mut row = vec![f.into()];
        for (p, s) in psds.iter().zip(scale) {
            row.push((p.psd[k] * s).into());
        }
        t.push(row);
    }
}

/// Weak beam on, weak beam off and no particle, calibrated on the "off" trace.
pub fn run_fig2(cfg: &ScenarioConfig) -> Result<RunOutput, CliError> {
    let n = cfg.analysis.segments;
    let p = cfg.drive.signal_power;
    let on = build_setup(cfg, true, p, n, derive_seed(cfg.seed, 0))?;
    let off = build_setup(cfg, false, p, n, derive_seed(cfg.seed, 1))?;
    let det = |i| derive_seed(cfg.seed, DETECTION_SEED_OFFSET + i);
    let v_on = measure(cfg, Some(on.clone()), n, det(0))?;
    let v_off = measure(cfg, Some(off.clone()), n, det(1))?;
    let v_empty = measure(cfg, None, n, det(2))?;
    let motion = off.motion();
    let cal = calibrate_displacement(
        &v_off,
        off.omega_z,
        motion.total_damping(),
        motion.mass,
        motion.effective_temperature(),
    )?;
    let to_m = 1.0 / (cal.gain * cal.gain);
    let analysis = analyze_with_gain(
        cfg,
        &on,
        cal.gain,
        v_on.scaled(to_m, SpectralUnit::MetersSquaredPerHz),
    )?;
    let mut table = Table::new(
        "fig2_psd",
        &[
            "frequency_Hz",
            "psd_on_m2_per_Hz",
            "psd_off_m2_per_Hz",
            "psd_no_particle_m2_per_Hz",
        ],
    );
    psd_rows(
        &mut table,
        &[&v_on, &v_off, &v_empty],
        &[to_m, to_m, to_m],
        0.0,
        f64::INFINITY,
    );
    let mut s = Summary::default();
    add_setup_summary(&mut s, cfg, &on);
    add_driven_summary(&mut s, &analysis, injected_tone_rms(cfg, p)?);
    s.add("signal_power", p, "W");
    s.add("kappa_empirical", reference_kappa(), "N/sqrt(W)");
    s.add(
        "kappa_model",
        model_kappa_peak(cfg)? / std::f64::consts::SQRT_2,
        "N/sqrt(W)",
    );
    Ok(RunOutput {
        tables: vec![table],
        summary: s,
    })
}

/// One sweep point.
#[derive(Debug, Clone)]
pub struct SweepPoint {
    pub signal_power: f64,
    pub segments: usize,
    pub analysis: DrivenAnalysis,
    pub injected: f64,
}

pub fn sweep_points(cfg: &ScenarioConfig) -> Result<Vec<SweepPoint>, CliError> {
    let powers = &cfg.sweep.powers;
    if powers.len() < 2 || powers.iter().any(|&p| !p.is_finite() || p <= 0.0) {
        return Err(CliError::Config(
            "sweep needs at least two positive powers".into(),
        ));
    }
    powers
        .par_iter()
        .enumerate()
        .map(|(i, &power)| {
            let segments = cfg.sweep.segments_for(power);
            let setup = build_setup(cfg, true, power, segments, derive_seed(cfg.seed, i as u64))?;
            let psd = measure(
                cfg,
                Some(setup.clone()),
                segments,
                derive_seed(cfg.seed, DETECTION_SEED_OFFSET + i as u64),
            )?;
            Ok(SweepPoint {
                signal_power: power,
                segments,
                analysis: analyze(cfg, &setup, &psd)?,
                injected: injected_tone_rms(cfg, power)?,
            })
        })
        .collect()
}

pub fn run_sweep(cfg: &ScenarioConfig, name: &str) -> Result<RunOutput, CliError> {
    let points = sweep_points(cfg)?;
    let mut table = Table::new(
        name,
        &[
            "signal_power_W",
            "segments",
            "band_power_m2",
            "z_rms_m",
            "force_rms_N",
            "injected_force_rms_N",
            "snr",
            "calibration_gain_V_per_m",
        ],
    );
    for p in &points {
        table.push(vec![
            p.signal_power.into(),
            p.segments.into(),
            p.analysis.peak.band_power.into(),
            p.analysis.z_rms.into(),
            p.analysis.force_rms.into(),
            p.injected.into(),
            p.analysis.peak.snr.into(),
            p.analysis.gain.into(),
        ]);
    }
    let x: Vec<f64> = points.iter().map(|p| p.signal_power).collect();
    let y: Vec<f64> = points.iter().map(|p| p.analysis.peak.band_power).collect();
    let mut s = Summary::default();
    match log_log_fit(&x, &y) {
        Ok(fit) => {
            s.add("loglog_slope", fit.slope, "1");
            s.add("loglog_intercept", fit.intercept, "ln(m^2)");
            s.add("r_squared", fit.r_squared, "1");
        }
        Err(e) => s.add("fit_error", e.to_string(), ""),
    }
    if let Some(last) = points.last() {
        s.add("force_rms_at_max_power", last.analysis.force_rms, "N");
        s.add("injected_force_rms_at_max_power", last.injected, "N");
    }
    Ok(RunOutput {
        tables: vec![table],
        summary: s,
    })
}

/// Driven peak in a long-segment spectrum, with the expected SNR.
pub fn run_driven(
    cfg: &ScenarioConfig,
    name: &str,
    span: Option<f64>,
) -> Result<RunOutput, CliError> {
    let n = cfg.analysis.segments;
    let p = cfg.drive.signal_power;
    let setup = build_setup(cfg, cfg.drive.enabled, p, n, derive_seed(cfg.seed, 0))?;
    let v = measure(
        cfg,
        Some(setup.clone()),
        n,
        derive_seed(cfg.seed, DETECTION_SEED_OFFSET),
    )?;
    let a = analyze(cfg, &setup, &v)?;
    let mut table = Table::new(name, &["frequency_Hz", "psd_V2_per_Hz", "psd_m2_per_Hz"]);
    let f_am = cfg.drive.am_frequency / TAU;
    let (lo, hi) = match span {
        Some(w) => {
            let f_z = setup.omega_z / TAU;
            (f_z.min(f_am) - w, f_z.max(f_am) + w)
        }
        None => (0.0, f64::INFINITY),
    };
    psd_rows(
        &mut table,
        &[&v, &v],
        &[1.0, 1.0 / (a.gain * a.gain)],
        lo,
        hi,
    );

    let motion = setup.motion();
    let injected = if cfg.drive.enabled {
        injected_tone_rms(cfg, p)?
    } else {
        0.0
    };
    // thermal force noise shaped by the mechanics plus the detector floor
    let chi_inv = inverse_susceptibility(
        cfg.drive.am_frequency,
        setup.omega_z,
        motion.total_damping(),
        motion.mass,
    );
    let s_f = 4.0 * BOLTZMANN * motion.temperature * motion.mass * motion.gamma;
    let background =
        s_f / (chi_inv * chi_inv) + cfg.readout.noise_floor_psd / cfg.readout.gain.powi(2);
    let line = (injected / chi_inv).powi(2) / a.psd_m.resolution_bw;
    let mut s = Summary::default();
    add_setup_summary(&mut s, cfg, &setup);
    add_driven_summary(&mut s, &a, injected);
    s.add("signal_power", p, "W");
    s.add("expected_snr", 1.0 + line / background, "1");
    let kappa = reference_kappa();
    let env = cfg.environment.environment();
    s.add(
        "power_sensitivity_configured_damping",
        s_f / (kappa * kappa),
        "W/Hz",
    );
    let free = optoforce::dynamics::Environment {
        damping: optoforce::dynamics::DampingModel::FreeMolecular,
        ..env
    };
    s.add(
        "power_sensitivity_free_molecular_damping",
        optoforce::sensing::light_power_sensitivity(&free, &cfg.particle, kappa, 1.0)?,
        "W/Hz",
    );
    Ok(RunOutput {
        tables: vec![table],
        summary: s,
    })
}

/// Transduction factors (RMS, N/sqrt(W)) of both geometries.
#[derive(Debug, Clone, Copy)]
pub struct Transductions {
    pub co_empirical: f64,
    pub co_model: f64,
    pub counter_model: f64,
}

impl Transductions {
    pub fn ratio(&self) -> f64 {
        self.counter_model / self.co_model
    }

    pub fn counter_empirical(&self) -> f64 {
        self.co_empirical * self.ratio()
    }
}

pub fn transductions(cfg: &ScenarioConfig) -> Result<Transductions, CliError> {
    let tweezer = cfg.tweezer.beam();
    let signal = cfg.signal.beam(&tweezer, 1.0);
    let co = signal.with_direction(Direction::Co);
    let counter = signal.with_direction(Direction::Counter);
    Ok(Transductions {
        co_empirical: optoforce::sensing::empirical_kappa(
            cfg.chain.force_rms,
            cfg.chain.signal_power,
        )?,
        co_model: transduction_kappa(&tweezer, &co, &cfg.particle)?,
        counter_model: transduction_kappa(&tweezer, &counter, &cfg.particle)?,
    })
}

fn projection_env(cfg: &ScenarioConfig) -> optoforce::dynamics::Environment {
    cfg.environment
        .environment()
        .at_pressure(cfg.projection.pressure.0)
}

/// Analytic projection: co curve on the empirical anchor, counter curve
/// scaled by the model's counter/co ratio.
pub fn run_projection(cfg: &ScenarioConfig) -> Result<RunOutput, CliError> {
    let pr = &cfg.projection;
    if !(pr.power_min > 0.0 && pr.power_max > pr.power_min && pr.points >= 2) {
        return Err(CliError::Config(
            "projection needs 0 < power_min < power_max and points >= 2".into(),
        ));
    }
    let k = transductions(cfg)?;
    let env = projection_env(cfg);
    let grid = log_grid(pr.power_min, pr.power_max, pr.points);
    let co = projection_curve(
        Direction::Co,
        k.co_empirical,
        &env,
        &cfg.particle,
        &grid,
        pr.tau,
    )?;
    let counter = projection_curve(
        Direction::Counter,
        k.counter_empirical(),
        &env,
        &cfg.particle,
        &grid,
        pr.tau,
    )?;
    let mut table = Table::new(
        "fig5_projection",
        &[
            "signal_power_W",
            "force_co_N",
            "force_counter_N",
            "threshold_N",
            "counter_over_co",
        ],
    );
    for (a, b) in co.points.iter().zip(&counter.points) {
        table.push(vec![
            a.power.into(),
            a.force.into(),
            b.force.into(),
            co.threshold.into(),
            (b.force / a.force).into(),
        ]);
    }
    let model_only = (co.threshold / k.counter_model).powi(2);
    let wavelength = cfg.tweezer.wavelength;
    let mut s = Summary::default();
    s.add("pressure", env.pressure, "Pa");
    s.add("tau", pr.tau, "s");
    s.add("threshold_force", co.threshold, "N");
    s.add("kappa_co_empirical", k.co_empirical, "N/sqrt(W)");
    s.add("kappa_co_model", k.co_model, "N/sqrt(W)");
    s.add("kappa_counter_model", k.counter_model, "N/sqrt(W)");
    s.add("counter_over_co", k.ratio(), "1");
    s.add("co_crossing_power", co.crossing_power, "W");
    s.add("counter_crossing_power", counter.crossing_power, "W");
    s.add("counter_crossing_power_model_only", model_only, "W");
    s.add(
        "counter_crossing_photon_flux",
        photon_flux(counter.crossing_power, wavelength),
        "1/s",
    );
    Ok(RunOutput {
        tables: vec![table],
        summary: s,
    })
}

/// Sensitivity reports and the empirical chain.
pub fn run_sensitivity(cfg: &ScenarioConfig) -> Result<RunOutput, CliError> {
    let k = transductions(cfg)?;
    let env = cfg.environment.environment();
    let low = projection_env(cfg);
    let mut table = Table::new(
        "sensitivity",
        &[
            "label",
            "geometry",
            "pressure_Pa",
            "tau_s",
            "force_asd_N_per_rtHz",
            "f_min_N",
            "kappa_N_per_rtW",
            "p_min_W_per_Hz",
        ],
    );
    let tau = cfg.projection.tau;
    let cases = [
        ("configured", &env, Direction::Co, k.co_empirical),
        ("projection", &low, Direction::Co, k.co_empirical),
        (
            "projection",
            &low,
            Direction::Counter,
            k.counter_empirical(),
        ),
    ];
    for (label, e, geometry, kappa) in cases {
        let r = SensitivityReport::new(e, &cfg.particle, kappa, tau, geometry)?;
        table.push(vec![
            label.into(),
            match r.geometry {
                Direction::Co => "co",
                Direction::Counter => "counter",
            }
            .into(),
            r.pressure.into(),
            r.tau.into(),
            r.s_f_sqrt.into(),
            r.f_min.into(),
            r.kappa.into(),
            r.p_min.into(),
        ]);
    }
    let chain = sensitivity_chain(&cfg.chain, &env, &cfg.particle)?;
    let mut s = Summary::default();
    s.add("kappa_empirical", chain.kappa, "N/sqrt(W)");
    s.add("p_min_reference", chain.p_min, "W/Hz");
    s.add(
        "predicted_at_measured_pressure",
        chain.predicted_at_measured,
        "W/Hz",
    );
    s.add("measured_at_measured_pressure", chain.measured, "W/Hz");
    s.add(
        "measured_over_predicted",
        chain.measured_over_predicted,
        "1",
    );
    s.add("within_gauge_band", chain.within_gauge_band, "");
    s.add("scaled_projection", chain.scaled_projection, "W/Hz");
    s.add("thermal_projection", chain.thermal_projection, "W/Hz");
    s.add(
        "force_floor_configured",
        min_detectable_force(&env, &cfg.particle, 1.0)?,
        "N",
    );
    Ok(RunOutput {
        tables: vec![table],
        summary: s,
    })
}

/// The preset's full pipeline.
pub fn run_scenario(cfg: &ScenarioConfig) -> Result<RunOutput, CliError> {
    check(cfg)?;
    match cfg.scenario {
        ScenarioKind::Fig2 => run_fig2(cfg),
        ScenarioKind::Fig3 => run_sweep(cfg, "fig3_sweep"),
        ScenarioKind::Fig4 => run_driven(cfg, "fig4_psd", Some(5e3)),
        ScenarioKind::Fig5 => {
            let mut out = run_projection(cfg)?;
            let sens = run_sensitivity(cfg)?;
            out.summary.entries.extend(sens.summary.entries);
            Ok(out)
        }
        ScenarioKind::Custom => run_driven(cfg, "psd", None),
    }
}

/// Checks that do not need the physics: ranges and seed representability.
pub fn check(cfg: &ScenarioConfig) -> Result<(), CliError> {
    if cfg.seed > i64::MAX as u64 {
        return Err(CliError::Config(format!(
            "seed {} does not fit a signed 64-bit integer",
            cfg.seed
        )));
    }
    if let TrapModel::Measured { omega_z } = cfg.trap {
        if !omega_z.is_finite() || omega_z <= 0.0 {
            return Err(CliError::Config("trap.omega_z must be > 0".into()));
        }
    }
    Ok(())
}

//! Thermal-limited force and light-power sensitivity.
//!
//! The weak beam's interference force grows as `F_si = kappa sqrt(P_s)`, so a
//! force floor `F_min` maps to a power floor `P_min = (F_min / kappa)^2`.
//! That is why the power sensitivity is quoted per bandwidth (W/Hz) rather
//! than per root bandwidth.

use serde::{Deserialize, Serialize};

use crate::constants::{PA_PER_MBAR, PLANCK, SPEED_OF_LIGHT};
use crate::dynamics::{thermal_force_psd, Environment};
use crate::error::{ensure, Result};
use crate::optics::{interference_force_amplitude, BeamParams, Direction, ParticleParams};

/// Measured interference force (RMS) at the reference operating point, N.
pub const REFERENCE_FORCE_RMS: f64 = 145e-18;
/// Mean signal power of the reference operating point, W.
pub const REFERENCE_SIGNAL_POWER: f64 = 493e-9;

/// `kappa = F_rms / sqrt(P_s)` from one measured operating point.
pub fn empirical_kappa(force_rms: f64, signal_power: f64) -> Result<f64> {
    ensure(force_rms > 0.0 && signal_power > 0.0, || {
        "empirical transduction needs force and power > 0".to_string()
    })?;
    Ok(force_rms / signal_power.sqrt())
}

/// Transduction anchored to the reference measurement, 2.07e-13 N/sqrt(W).
pub fn reference_kappa() -> f64 {
    REFERENCE_FORCE_RMS / REFERENCE_SIGNAL_POWER.sqrt()
}

/// Model transduction factor, N/sqrt(W).
///
/// The interference force at the tweezer focus for a 1 W signal beam of the
/// given geometry, taken as the RMS over a uniformly random signal phase
/// (peak / sqrt 2). The signal's own power and phase are ignored.
pub fn transduction_kappa(
    tweezer: &BeamParams,
    signal: &BeamParams,
    particle: &ParticleParams,
) -> Result<f64> {
    let peak = interference_force_amplitude(tweezer, &signal.with_power(1.0), particle)?;
    Ok(peak / std::f64::consts::SQRT_2)
}

/// `F_min = sqrt(S_F / tau)` for a measurement of duration `tau`.
pub fn min_detectable_force(env: &Environment, particle: &ParticleParams, tau: f64) -> Result<f64> {
    ensure(tau > 0.0, || {
        format!("measurement time must be > 0, got {tau}")
    })?;
    env.validate()?;
    particle.validate()?;
    Ok((thermal_force_psd(env, particle).psd / tau).sqrt())
}

/// `P_min = (F_min / kappa)^2`, W per `1/tau` of bandwidth.
pub fn light_power_sensitivity(
    env: &Environment,
    particle: &ParticleParams,
    kappa: f64,
    tau: f64,
) -> Result<f64> {
    ensure(kappa > 0.0, || {
        format!("transduction must be > 0, got {kappa}")
    })?;
    let f_min = min_detectable_force(env, particle, tau)?;
    Ok((f_min / kappa).powi(2))
}

/// Photons per second carried by `power` at `wavelength`.
pub fn photon_flux(power: f64, wavelength: f64) -> f64 {
    power * wavelength / (PLANCK * SPEED_OF_LIGHT)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SensitivityReport {
    /// N/sqrt(Hz)
    pub s_f_sqrt: f64,
    /// N
    pub f_min: f64,
    /// N/sqrt(W)
    pub kappa: f64,
    /// W
    pub p_min: f64,
    /// Pa
    pub pressure: f64,
    /// s
    pub tau: f64,
    pub geometry: Direction,
}

impl SensitivityReport {
    pub fn new(
        env: &Environment,
        particle: &ParticleParams,
        kappa: f64,
        tau: f64,
        geometry: Direction,
    ) -> Result<Self> {
        ensure(kappa > 0.0, || {
            format!("transduction must be > 0, got {kappa}")
        })?;
        let f_min = min_detectable_force(env, particle, tau)?;
        Ok(Self {
            s_f_sqrt: thermal_force_psd(env, particle).asd,
            f_min,
            kappa,
            p_min: (f_min / kappa).powi(2),
            pressure: env.pressure,
            tau,
            geometry,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ProjectionPoint {
    /// W
    pub power: f64,
    /// N
    pub force: f64,
}

/// `F_si(P) = kappa sqrt(P)` over a power grid, with the detection threshold.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProjectionCurve {
    pub geometry: Direction,
    /// N/sqrt(W)
    pub kappa: f64,
    /// `F_min` at the curve's pressure and measurement time, N.
    pub threshold: f64,
    /// Power at which the curve meets the threshold, W.
    pub crossing_power: f64,
    pub points: Vec<ProjectionPoint>,
}

pub fn projection_curve(
    geometry: Direction,
    kappa: f64,
    env: &Environment,
    particle: &ParticleParams,
    power_grid: &[f64],
    tau: f64,
) -> Result<ProjectionCurve> {
    ensure(kappa > 0.0, || {
        format!("transduction must be > 0, got {kappa}")
    })?;
    ensure(!power_grid.is_empty(), || "power grid is empty".to_string())?;
    ensure(power_grid.iter().all(|&p| p > 0.0), || {
        "power grid must be positive".to_string()
    })?;
    ensure(power_grid.windows(2).all(|w| w[0] < w[1]), || {
        "power grid must be strictly ascending".to_string()
    })?;
    let threshold = min_detectable_force(env, particle, tau)?;
    Ok(ProjectionCurve {
        geometry,
        kappa,
        threshold,
        crossing_power: (threshold / kappa).powi(2),
        points: power_grid
            .iter()
            .map(|&power| ProjectionPoint {
                power,
                force: kappa * power.sqrt(),
            })
            .collect(),
    })
}

/// `n` log-spaced powers from `low` to `high` inclusive.
pub fn log_grid(low: f64, high: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![low];
    }
    let (a, b) = (low.ln(), high.ln());
    (0..n)
        .map(|i| (a + (b - a) * i as f64 / (n - 1) as f64).exp())
        .collect()
}

/// Measured quantities the empirical sensitivity chain starts from.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ChainInputs {
    /// Thermal force noise at `pressure`, N/sqrt(Hz).
    pub force_asd: f64,
    /// Interference force at `signal_power`, N.
    pub force_rms: f64,
    /// W
    pub signal_power: f64,
    /// Pa
    pub pressure: f64,
    /// Pressure of the low-pressure measurement, Pa.
    pub measured_pressure: f64,
    /// Power sensitivity observed at `measured_pressure`, W/Hz.
    pub measured_sensitivity: f64,
    /// Pressure of the projection, Pa.
    pub projection_pressure: f64,
    /// Relative uncertainty of each pressure reading.
    pub gauge_uncertainty: f64,
}

impl Default for ChainInputs {
    fn default() -> Self {
        Self {
            force_asd: 18.5e-18,
            force_rms: REFERENCE_FORCE_RMS,
            signal_power: REFERENCE_SIGNAL_POWER,
            pressure: 0.1 * PA_PER_MBAR,
            measured_pressure: 6.8e-4 * PA_PER_MBAR,
            measured_sensitivity: 37.2e-12,
            projection_pressure: 1e-7 * PA_PER_MBAR,
            gauge_uncertainty: 0.3,
        }
    }
}

/// Power sensitivities carried from one measured operating point to lower
/// pressures, side by side with the thermal-limited model.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ChainReport {
    /// N/sqrt(W)
    pub kappa: f64,
    /// `(force_asd / force_rms)^2 signal_power`, W/Hz.
    pub p_min: f64,
    /// `p_min` scaled linearly to `measured_pressure`, W/Hz.
    pub predicted_at_measured: f64,
    /// W/Hz
    pub measured: f64,
    pub measured_over_predicted: f64,
    /// Whether the ratio lies inside the band spanned by two independent
    /// pressure readings each off by the gauge uncertainty.
    pub within_gauge_band: bool,
    /// Measured sensitivity scaled linearly to `projection_pressure`, W/Hz.
    pub scaled_projection: f64,
    /// `(F_min / kappa)^2` at `projection_pressure` with the model damping, W/Hz.
    pub thermal_projection: f64,
}

pub fn sensitivity_chain(
    inputs: &ChainInputs,
    env: &Environment,
    particle: &ParticleParams,
) -> Result<ChainReport> {
    ensure(
        inputs.force_asd > 0.0
            && inputs.pressure > 0.0
            && inputs.measured_pressure > 0.0
            && inputs.projection_pressure > 0.0
            && inputs.measured_sensitivity > 0.0,
        || "sensitivity chain inputs must be > 0".to_string(),
    )?;
    ensure((0.0..1.0).contains(&inputs.gauge_uncertainty), || {
        "gauge uncertainty must lie in [0, 1)".to_string()
    })?;
    let kappa = empirical_kappa(inputs.force_rms, inputs.signal_power)?;
    let p_min = (inputs.force_asd / kappa).powi(2);
    let predicted_at_measured = p_min * inputs.measured_pressure / inputs.pressure;
    let ratio = inputs.measured_sensitivity / predicted_at_measured;
    let u = inputs.gauge_uncertainty;
    let band = (1.0 + u) / (1.0 - u);
    let thermal_projection = light_power_sensitivity(
        &env.at_pressure(inputs.projection_pressure),
        particle,
        kappa,
        1.0,
    )?;
    Ok(ChainReport {
        kappa,
        p_min,
        predicted_at_measured,
        measured: inputs.measured_sensitivity,
        measured_over_predicted: ratio,
        within_gauge_band: ratio >= 1.0 / band && ratio <= band,
        scaled_projection: inputs.measured_sensitivity * inputs.projection_pressure
            / inputs.measured_pressure,
        thermal_projection,
    })
}

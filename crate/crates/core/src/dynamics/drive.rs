//! Amplitude-modulated, phase-randomized interference drive.

use std::f64::consts::{PI, TAU};

use serde::{Deserialize, Serialize};

use crate::error::{ensure, Result};

/// How the relative phase between signal and tweezer evolves.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "lowercase", deny_unknown_fields)]
pub enum PhaseMode {
    /// Constant cross-term phase `k z_s + phi(z_s)`, rad.
    Fixed { phase: f64 },
    /// Phase diffusion wrapped to `[0, 2 pi)`: the drive's phase factor
    /// decorrelates as `exp(-|s| / correlation_time)`.
    Randomized { correlation_time: f64 },
}

impl Default for PhaseMode {
    fn default() -> Self {
        PhaseMode::Randomized {
            correlation_time: 1e-3,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DriveConfig {
    /// `Omega_AM`, rad/s.
    pub am_frequency: f64,
    /// Mean signal power `P_s`, W.
    pub signal_power: f64,
    /// Intensity modulation depth in `[0, 1]`.
    pub modulation_depth: f64,
    pub phase_mode: PhaseMode,
}

impl Default for DriveConfig {
    fn default() -> Self {
        Self {
            am_frequency: TAU * 86e3,
            signal_power: 493e-9,
            modulation_depth: 1.0,
            phase_mode: PhaseMode::default(),
        }
    }
}

impl DriveConfig {
    pub fn validate(&self) -> Result<()> {
        ensure(self.am_frequency > 0.0, || {
            format!("AM frequency must be > 0, got {}", self.am_frequency)
        })?;
        ensure(
            self.signal_power >= 0.0 && self.signal_power.is_finite(),
            || format!("signal power must be >= 0, got {}", self.signal_power),
        )?;
        ensure((0.0..=1.0).contains(&self.modulation_depth), || {
            format!(
                "modulation depth must lie in [0, 1], got {}",
                self.modulation_depth
            )
        })?;
        if let PhaseMode::Randomized { correlation_time } = self.phase_mode {
            ensure(correlation_time > 0.0, || {
                format!("phase correlation time must be > 0, got {correlation_time}")
            })?;
        }
        Ok(())
    }

    /// Instantaneous signal power `P_s (1 + m cos(Omega_AM t))`.
    pub fn power_at(&self, t: f64) -> f64 {
        self.signal_power * (1.0 + self.modulation_depth * (self.am_frequency * t).cos())
    }

    /// Coefficient of `cos(Omega_AM t)` in `sqrt(1 + m cos(Omega_AM t))`.
    ///
    /// The force follows the field, not the intensity, so the drive line
    /// carries only this fraction of `kappa sqrt(P_s)`.
    pub fn fundamental_coefficient(&self) -> f64 {
        const N: usize = 4096;
        let m = self.modulation_depth;
        // periodic trapezoid rule; the integrand is smooth except at m = 1
        let sum: f64 = (0..N)
            .map(|i| {
                let x = TAU * i as f64 / N as f64;
                (1.0 + m * x.cos()).max(0.0).sqrt() * x.cos()
            })
            .sum();
        2.0 * sum / N as f64
    }

    /// RMS of the force component at `Omega_AM` for a transduction
    /// `kappa_peak` (force per sqrt(W) at the most favourable phase).
    pub fn tone_rms(&self, kappa_peak: f64) -> f64 {
        let amplitude = kappa_peak * self.signal_power.sqrt() * self.fundamental_coefficient();
        match self.phase_mode {
            PhaseMode::Fixed { phase } => amplitude * phase.cos().abs() / 2f64.sqrt(),
            PhaseMode::Randomized { .. } => amplitude / 2.0,
        }
    }

    /// Inverse of [`DriveConfig::tone_rms`].
    pub fn kappa_peak_for_tone_rms(&self, tone_rms: f64) -> f64 {
        let unit = self.tone_rms(1.0);
        if unit == 0.0 {
            0.0
        } else {
            tone_rms / unit
        }
    }
}

/// `kappa sqrt(P_s (1 + m cos(Omega_AM t))) cos(phase)`.
pub fn drive_force(t: f64, drive: &DriveConfig, kappa_peak: f64, phase: f64) -> f64 {
    kappa_peak * drive.power_at(t).max(0.0).sqrt() * phase.cos()
}

/// Phase state of the drive.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DrivePhase {
    phase: f64,
    diffusion: f64,
}

impl DrivePhase {
    /// `initial_uniform` is a uniform draw in `[0, 1)`; it is only used in
    /// randomized mode.
    pub fn new(mode: PhaseMode, dt: f64, initial_uniform: f64) -> Self {
        match mode {
            PhaseMode::Fixed { phase } => Self {
                phase,
                diffusion: 0.0,
            },
            PhaseMode::Randomized { correlation_time } => Self {
                phase: TAU * initial_uniform,
                diffusion: (2.0 * dt / correlation_time).sqrt(),
            },
        }
    }

    pub fn is_random(&self) -> bool {
        self.diffusion > 0.0
    }

    pub fn phase(&self) -> f64 {
        self.phase
    }

    /// Advance one integrator step with a standard-normal draw.
    pub fn advance(&mut self, normal: f64) {
        if self.is_random() {
            self.phase = (self.phase + self.diffusion * normal).rem_euclid(TAU);
        }
    }
}

/// Phase of the cross term that makes the co-propagating force vanish.
pub const QUADRATURE: f64 = 0.5 * PI;

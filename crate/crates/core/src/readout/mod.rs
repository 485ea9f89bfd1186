//! Homodyne readout and spectral analysis.
//!
//! The detector is a linear gain plus white noise. Spectra are averaged
//! single-shot periodograms; the thermal peak fixes the absolute
//! displacement scale and the driven line is converted back to force through
//! the mechanical susceptibility.

mod peak;
mod psd;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

pub use peak::{
    calibrate_displacement, extract_peak, force_from_peak, inverse_susceptibility, Calibration,
    PeakReport, CALIBRATION_HALF_WIDTH, FLANK_GAP_BINS, FLANK_WIDTH_BINS, MIN_CALIBRATION_CONTRAST,
};
pub use psd::{psd_average, PsdAccumulator, PsdEstimate, SpectralUnit, Window};

use crate::dynamics::{SampleUnit, TraceRecord};
use crate::error::{ensure, Error, Result};

/// RNG stream used for detection noise, distinct from the simulation stream
/// that shares the seed.
const DETECTION_STREAM: u64 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReadoutConfig {
    /// V/m
    pub gain: f64,
    /// One-sided white detection noise, V^2/Hz.
    pub noise_floor_psd: f64,
    /// Hz
    pub sample_rate: f64,
}

impl Default for ReadoutConfig {
    fn default() -> Self {
        Self {
            gain: 1e6,
            noise_floor_psd: 1e-11,
            sample_rate: 250e3,
        }
    }
}

impl ReadoutConfig {
    pub fn validate(&self) -> Result<()> {
        ensure(self.gain > 0.0, || {
            format!("gain must be > 0, got {}", self.gain)
        })?;
        ensure(self.noise_floor_psd >= 0.0, || {
            format!("noise floor must be >= 0, got {}", self.noise_floor_psd)
        })?;
        ensure(self.sample_rate > 0.0, || {
            "sample rate must be > 0".to_string()
        })
    }
}

/// Detector noise generator; consecutive calls continue one noise stream.
pub struct Detector {
    config: ReadoutConfig,
    rng: ChaCha8Rng,
    sigma: f64,
}

impl Detector {
    pub fn new(config: ReadoutConfig, seed: u64) -> Result<Self> {
        config.validate()?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(DETECTION_STREAM);
        Ok(Self {
            config,
            rng,
            // one-sided density S over a band fs/2 gives variance S fs / 2
            sigma: (0.5 * config.noise_floor_psd * config.sample_rate).sqrt(),
        })
    }

    /// `v = gain z + n` applied in place.
    pub fn apply(&mut self, samples: &mut [f64]) {
        let gain = self.config.gain;
        for x in samples.iter_mut() {
            let n: f64 = if self.sigma > 0.0 {
                self.rng.sample(StandardNormal)
            } else {
                0.0
            };
            *x = gain * *x + self.sigma * n;
        }
    }
}

/// Convert a displacement trace into detector volts.
pub fn detect(trace: &TraceRecord, cfg: &ReadoutConfig, seed: u64) -> Result<TraceRecord> {
    cfg.validate()?;
    ensure(trace.unit == SampleUnit::Meters, || {
        "detect expects a displacement trace".to_string()
    })?;
    if (trace.sample_rate - cfg.sample_rate).abs() > 1e-9 * cfg.sample_rate {
        return Err(Error::SampleRateMismatch {
            trace: trace.sample_rate,
            readout: cfg.sample_rate,
        });
    }
    let mut samples = trace.samples.clone();
    Detector::new(*cfg, seed)?.apply(&mut samples);
    Ok(TraceRecord {
        samples,
        velocities: None,
        unit: SampleUnit::Volts,
        ..trace.clone()
    })
}

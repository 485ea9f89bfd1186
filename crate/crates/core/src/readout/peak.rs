//! Peak extraction, thermal calibration and force back-out.

use std::f64::consts::PI;

use serde::Serialize;

use super::psd::{PsdEstimate, SpectralUnit};
use crate::constants::BOLTZMANN;
use crate::error::{ensure, Error, Result};

/// Gap between band edge and flank, in resolution bandwidths.
pub const FLANK_GAP_BINS: usize = 10;
/// Width of each flank, in bins.
pub const FLANK_WIDTH_BINS: usize = 20;
/// Calibration band half width, in damping rates.
pub const CALIBRATION_HALF_WIDTH: f64 = 4.0;
/// Minimum peak-to-background ratio for calibration.
pub const MIN_CALIBRATION_CONTRAST: f64 = 5.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PeakReport {
    /// Hz
    pub center_freq: f64,
    /// Background-subtracted power in the band (V^2 or m^2).
    pub band_power: f64,
    /// Median density of the flanking bands.
    pub background_psd: f64,
    /// Highest bin in the band over the background.
    pub snr: f64,
    /// Excess of the highest bin over the background in units of the
    /// background's per-bin standard error `background / sqrt(n_segments)`.
    pub significance: f64,
    pub band_bins: usize,
}

struct Band {
    lo: usize,
    hi: usize,
    flanks: Vec<f64>,
}

fn band_and_flanks(psd: &PsdEstimate, center: f64, half_band: f64) -> Result<Band> {
    let df = psd.resolution_bw;
    let nyquist = psd.nyquist();
    let (low, high) = (center - half_band, center + half_band);
    if low < 0.0 || high > nyquist {
        return Err(Error::BandOutOfRange { low, high, nyquist });
    }
    let lo = (low / df).ceil() as usize;
    let hi = ((high / df).floor() as usize).min(psd.psd.len() - 1);
    ensure(hi >= lo, || "band contains no bins".to_string())?;
    let mut flanks = Vec::with_capacity(2 * FLANK_WIDTH_BINS);
    let below_end = lo.checked_sub(FLANK_GAP_BINS);
    if let Some(end) = below_end {
        let start = end.saturating_sub(FLANK_WIDTH_BINS);
        flanks.extend_from_slice(&psd.psd[start..end]);
    }
    let above_start = hi + 1 + FLANK_GAP_BINS;
    if above_start < psd.psd.len() {
        let end = (above_start + FLANK_WIDTH_BINS).min(psd.psd.len());
        flanks.extend_from_slice(&psd.psd[above_start..end]);
    }
    ensure(flanks.len() >= FLANK_WIDTH_BINS / 2, || {
        format!("not enough spectrum around {center} Hz for a background estimate")
    })?;
    Ok(Band { lo, hi, flanks })
}

fn median(values: &mut [f64]) -> f64 {
    values.sort_by(|a, b| a.total_cmp(b));
    let n = values.len();
    if n % 2 == 1 {
        values[n / 2]
    } else {
        0.5 * (values[n / 2 - 1] + values[n / 2])
    }
}

/// Background-subtracted power of the line near `center`.
pub fn extract_peak(psd: &PsdEstimate, center: f64, half_band: f64) -> Result<PeakReport> {
    ensure(half_band >= psd.resolution_bw * (1.0 - 1e-9), || {
        format!(
            "half band {half_band} Hz is narrower than the resolution bandwidth {} Hz",
            psd.resolution_bw
        )
    })?;
    let mut band = band_and_flanks(psd, center, half_band)?;
    let background = median(&mut band.flanks);
    let in_band = &psd.psd[band.lo..=band.hi];
    let band_power = in_band.iter().map(|p| p - background).sum::<f64>() * psd.resolution_bw;
    let peak = in_band.iter().cloned().fold(f64::MIN, f64::max);
    let (snr, significance) = if background > 0.0 {
        (
            peak / background,
            (peak - background) / background * (psd.n_segments as f64).sqrt(),
        )
    } else {
        (f64::INFINITY, f64::INFINITY)
    };
    Ok(PeakReport {
        center_freq: center,
        band_power,
        background_psd: background,
        snr: snr.max(0.0),
        significance,
        band_bins: in_band.len(),
    })
}

/// Result of referencing a voltage spectrum to the thermal peak.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Calibration {
    /// Detector gain `c_cal`, V/m.
    pub gain: f64,
    /// Spectrum converted to m^2/Hz.
    #[serde(skip)]
    pub psd_m: PsdEstimate,
    /// Integrated thermal-peak power before tail correction, V^2.
    pub band_power: f64,
    /// Fraction of the Lorentzian captured by the band after subtraction.
    pub band_fraction: f64,
    /// `k_B T / (m Omega_z^2)`, m^2.
    pub reference_variance: f64,
}

/// Expected share of a Lorentzian of half width `b` (Hz) left in a band of
/// half width `h` after subtracting the mean of flanks `[h + g, h + g + w]`.
fn lorentzian_band_fraction(h: f64, g: f64, w: f64, b: f64) -> f64 {
    let captured = 2.0 / PI * (h / b).atan();
    let flank_mean = (((h + g + w) / b).atan() - ((h + g) / b).atan()) / (PI * w);
    captured - 2.0 * h * flank_mean
}

/// Calibrate a voltage PSD by equating the thermal peak around `omega_z`
/// to the equipartition variance `k_B T / (m Omega_z^2)`.
///
/// `gamma` is the full linewidth in rad/s; the band spans
/// `+-4 gamma` (at least two bins) and the Lorentzian tails outside it are
/// restored analytically.
pub fn calibrate_displacement(
    psd: &PsdEstimate,
    omega_z: f64,
    gamma: f64,
    mass: f64,
    temperature: f64,
) -> Result<Calibration> {
    ensure(psd.unit == SpectralUnit::VoltsSquaredPerHz, || {
        "calibration expects a voltage spectrum".to_string()
    })?;
    ensure(
        omega_z > 0.0 && gamma > 0.0 && mass > 0.0 && temperature > 0.0,
        || "calibration needs positive Omega_z, gamma, mass and temperature".to_string(),
    )?;
    let df = psd.resolution_bw;
    let f0 = omega_z / (2.0 * PI);
    let linewidth_hz = gamma / (2.0 * PI);
    let half_band = (CALIBRATION_HALF_WIDTH * linewidth_hz).max(2.0 * df);
    let mut band =
        band_and_flanks(psd, f0, half_band).map_err(|e| Error::CalibrationFailed(e.to_string()))?;
    let background = median(&mut band.flanks);
    let in_band = &psd.psd[band.lo..=band.hi];
    let peak = in_band.iter().cloned().fold(f64::MIN, f64::max);
    if peak.is_nan() || peak < MIN_CALIBRATION_CONTRAST * background {
        return Err(Error::CalibrationFailed(format!(
            "thermal peak at {f0:.1} Hz is only {:.2}x the background",
            peak / background
        )));
    }
    let band_power = in_band.iter().map(|p| p - background).sum::<f64>() * df;
    // effective band edges follow the bin grid
    let h = 0.5 * in_band.len() as f64 * df;
    let g = FLANK_GAP_BINS as f64 * df;
    let w = FLANK_WIDTH_BINS as f64 * df;
    let band_fraction = lorentzian_band_fraction(h, g, w, 0.5 * linewidth_hz);
    let total_power = band_power / band_fraction;
    let reference_variance = BOLTZMANN * temperature / (mass * omega_z * omega_z);
    let gain = (total_power / reference_variance).sqrt();
    ensure(gain.is_finite() && gain > 0.0, || {
        "calibration produced a non-positive gain".to_string()
    })
    .map_err(|e| Error::CalibrationFailed(e.to_string()))?;
    Ok(Calibration {
        gain,
        psd_m: psd.scaled(1.0 / (gain * gain), SpectralUnit::MetersSquaredPerHz),
        band_power,
        band_fraction,
        reference_variance,
    })
}

/// `|chi(Omega)|^-1 / m = sqrt((Omega_z^2 - Omega^2)^2 + (gamma Omega)^2)`.
pub fn inverse_susceptibility(omega_drive: f64, omega_z: f64, gamma: f64, mass: f64) -> f64 {
    let detuning = omega_z * omega_z - omega_drive * omega_drive;
    mass * detuning.hypot(gamma * omega_drive)
}

/// RMS force at `omega_drive` from a displacement peak in m^2.
pub fn force_from_peak(
    peak: &PeakReport,
    omega_drive: f64,
    omega_z: f64,
    gamma: f64,
    mass: f64,
) -> f64 {
    peak.band_power.max(0.0).sqrt() * inverse_susceptibility(omega_drive, omega_z, gamma, mass)
}

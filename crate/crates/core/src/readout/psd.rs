//! Averaged one-sided periodograms.

use std::f64::consts::PI;
use std::sync::Arc;

use rustfft::num_complex::Complex;
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};

use crate::error::{ensure, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Window {
    #[default]
    Rectangular,
    Hann,
}

impl Window {
    pub fn coefficients(&self, n: usize) -> Vec<f64> {
        match self {
            Window::Rectangular => vec![1.0; n],
            // periodic Hann
            Window::Hann => (0..n)
                .map(|i| 0.5 - 0.5 * (2.0 * PI * i as f64 / n as f64).cos())
                .collect(),
        }
    }
}

/// Unit of a spectral density.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SpectralUnit {
    #[serde(rename = "V^2/Hz")]
    VoltsSquaredPerHz,
    #[serde(rename = "m^2/Hz")]
    MetersSquaredPerHz,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PsdEstimate {
    /// Bin centres `k fs / N`, Hz.
    pub frequencies: Vec<f64>,
    /// One-sided spectral density.
    pub psd: Vec<f64>,
    pub n_segments: usize,
    pub segment_length: usize,
    /// Hz
    pub sample_rate: f64,
    /// `fs / N`, Hz.
    pub resolution_bw: f64,
    pub window: Window,
    pub unit: SpectralUnit,
}

impl PsdEstimate {
    /// `sum(psd) * df`, the mean-square power in the spectrum.
    pub fn total_power(&self) -> f64 {
        self.psd.iter().sum::<f64>() * self.resolution_bw
    }

    /// Index of the bin closest to `frequency`.
    pub fn bin_of(&self, frequency: f64) -> usize {
        let k = (frequency / self.resolution_bw).round().max(0.0) as usize;
        k.min(self.psd.len() - 1)
    }

    pub fn nyquist(&self) -> f64 {
        *self.frequencies.last().unwrap_or(&0.0)
    }

    /// Same frequencies with every density multiplied by `factor`.
    pub fn scaled(&self, factor: f64, unit: SpectralUnit) -> PsdEstimate {
        PsdEstimate {
            psd: self.psd.iter().map(|p| p * factor).collect(),
            unit,
            ..self.clone()
        }
    }
}

/// Running mean of segment periodograms; feed it segments as they are
/// produced to avoid holding long traces in memory.
pub struct PsdAccumulator {
    fft: Arc<dyn Fft<f64>>,
    window: Window,
    coefficients: Vec<f64>,
    scale: Vec<f64>,
    sum: Vec<f64>,
    buffer: Vec<Complex<f64>>,
    scratch: Vec<Complex<f64>>,
    segments: usize,
    sample_rate: f64,
    unit: SpectralUnit,
}

impl PsdAccumulator {
    pub fn new(
        segment_length: usize,
        sample_rate: f64,
        window: Window,
        unit: SpectralUnit,
    ) -> Result<Self> {
        ensure(segment_length >= 2, || {
            format!("segment length must be >= 2, got {segment_length}")
        })?;
        ensure(sample_rate > 0.0, || {
            format!("sample rate must be > 0, got {sample_rate}")
        })?;
        let fft = FftPlanner::new().plan_fft_forward(segment_length);
        let coefficients = window.coefficients(segment_length);
        let power: f64 = coefficients.iter().map(|w| w * w).sum();
        let bins = segment_length / 2 + 1;
        let base = 1.0 / (sample_rate * power);
        // double every bin except DC and (for even N) Nyquist
        let scale = (0..bins)
            .map(|k| {
                if k == 0 || (segment_length.is_multiple_of(2) && k == segment_length / 2) {
                    base
                } else {
                    2.0 * base
                }
            })
            .collect();
        let scratch = vec![Complex::default(); fft.get_inplace_scratch_len()];
        Ok(Self {
            fft,
            window,
            coefficients,
            scale,
            sum: vec![0.0; bins],
            buffer: vec![Complex::default(); segment_length],
            scratch,
            segments: 0,
            sample_rate,
            unit,
        })
    }

    pub fn segment_length(&self) -> usize {
        self.coefficients.len()
    }

    pub fn segments(&self) -> usize {
        self.segments
    }

    pub fn push(&mut self, segment: &[f64]) -> Result<()> {
        let n = self.segment_length();
        if segment.len() != n {
            return Err(Error::InsufficientSamples {
                required: n,
                available: segment.len(),
            });
        }
        for ((b, &x), &w) in self.buffer.iter_mut().zip(segment).zip(&self.coefficients) {
            *b = Complex::new(x * w, 0.0);
        }
        self.fft
            .process_with_scratch(&mut self.buffer, &mut self.scratch);
        for ((acc, c), s) in self.sum.iter_mut().zip(&self.buffer).zip(&self.scale) {
            *acc += c.norm_sqr() * s;
        }
        self.segments += 1;
        Ok(())
    }

    pub fn finish(self) -> Result<PsdEstimate> {
        ensure(self.segments > 0, || "no segments accumulated".to_string())?;
        let n = self.segment_length();
        let df = self.sample_rate / n as f64;
        let inv = 1.0 / self.segments as f64;
        Ok(PsdEstimate {
            frequencies: (0..self.sum.len()).map(|k| k as f64 * df).collect(),
            psd: self.sum.iter().map(|s| s * inv).collect(),
            n_segments: self.segments,
            segment_length: n,
            sample_rate: self.sample_rate,
            resolution_bw: df,
            window: self.window,
            unit: self.unit,
        })
    }
}

/// Mean of `n_segments` consecutive, non-overlapping one-sided periodograms.
///
/// Normalised so that for the rectangular window `sum(psd) * df` equals the
/// mean of `x^2` over the analysed samples.
pub fn psd_average(
    samples: &[f64],
    sample_rate: f64,
    segment_length: usize,
    window: Window,
    n_segments: usize,
    unit: SpectralUnit,
) -> Result<PsdEstimate> {
    ensure(n_segments >= 1, || "need at least one segment".to_string())?;
    let required = n_segments * segment_length;
    if samples.len() < required {
        return Err(Error::InsufficientSamples {
            required,
            available: samples.len(),
        });
    }
    let mut acc = PsdAccumulator::new(segment_length, sample_rate, window, unit)?;
    for segment in samples.chunks_exact(segment_length).take(n_segments) {
        acc.push(segment)?;
    }
    acc.finish()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn parseval_rectangular() {
        let x: Vec<f64> = (0..1000)
            .map(|i| ((i * 7919) % 113) as f64 - 50.0)
            .collect();
        let est = psd_average(
            &x,
            1e3,
            200,
            Window::Rectangular,
            5,
            SpectralUnit::VoltsSquaredPerHz,
        )
        .unwrap();
        let mean_square = x.iter().map(|v| v * v).sum::<f64>() / x.len() as f64;
        assert_relative_eq!(est.total_power(), mean_square, max_relative = 1e-12);
        // odd segment length has no Nyquist bin
        let est = psd_average(
            &x,
            1e3,
            199,
            Window::Rectangular,
            5,
            SpectralUnit::VoltsSquaredPerHz,
        )
        .unwrap();
        let used = &x[..995];
        let mean_square = used.iter().map(|v| v * v).sum::<f64>() / used.len() as f64;
        assert_relative_eq!(est.total_power(), mean_square, max_relative = 1e-12);
    }

    #[test]
    fn tone_at_bin_centre() {
        let fs = 250e3;
        let n = 8250;
        let f0 = 86e3; // bin 2838
        let amp = 3.0;
        let x: Vec<f64> = (0..2 * n)
            .map(|i| amp * (2.0 * PI * f0 * i as f64 / fs + 0.4).cos())
            .collect();
        let est = psd_average(
            &x,
            fs,
            n,
            Window::Rectangular,
            2,
            SpectralUnit::VoltsSquaredPerHz,
        )
        .unwrap();
        let k = est.bin_of(f0);
        assert_eq!(k, 2838);
        assert_relative_eq!(
            est.psd[k] * est.resolution_bw,
            amp * amp / 2.0,
            max_relative = 1e-9
        );
        assert_relative_eq!(est.resolution_bw, 1.0 / 33e-3, max_relative = 1e-12);
    }

    #[test]
    fn hann_preserves_tone_power_in_main_lobe() {
        let fs = 1e3;
        let n = 1000;
        let x: Vec<f64> = (0..n)
            .map(|i| (2.0 * PI * 100.0 * i as f64 / fs).sin())
            .collect();
        let est = psd_average(&x, fs, n, Window::Hann, 1, SpectralUnit::VoltsSquaredPerHz).unwrap();
        let lobe: f64 = est.psd[98..=102].iter().sum::<f64>() * est.resolution_bw;
        assert_relative_eq!(lobe, 0.5, max_relative = 1e-9);
    }

    #[test]
    fn insufficient_samples_names_length() {
        let err = psd_average(
            &[0.0; 10],
            1.0,
            4,
            Window::Rectangular,
            3,
            SpectralUnit::VoltsSquaredPerHz,
        )
        .unwrap_err();
        assert_eq!(
            err,
            Error::InsufficientSamples {
                required: 12,
                available: 10
            }
        );
    }
}

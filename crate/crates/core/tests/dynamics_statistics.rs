//! Statistical checks of the Langevin simulator against closed-form oscillator results.

use std::f64::consts::TAU;

use optoforce::constants::BOLTZMANN;
use optoforce::dynamics::{
    simulate, DampingModel, DriveConfig, Environment, FeedbackConfig, ForceModel, InitialState,
    Langevin, PhaseMode, SignalDrive, SimConfig, SimulationSetup,
};
use optoforce::optics::ParticleParams;
use optoforce::readout::{psd_average, SpectralUnit, Window};
use optoforce::stats::linear_fit;

const OMEGA_Z: f64 = TAU * 83.8e3;

fn setup(seed: u64) -> SimulationSetup {
    SimulationSetup {
        particle: ParticleParams::default(),
        environment: Environment::default(),
        omega_z: OMEGA_Z,
        drive: None,
        feedback: FeedbackConfig::default(),
        sim: SimConfig {
            seed,
            ..SimConfig::default()
        },
        force_model: ForceModel::Harmonic,
    }
}

fn with_gamma(mut s: SimulationSetup, gamma: f64) -> SimulationSetup {
    s.environment.damping = DampingModel::Calibrated {
        gamma,
        pressure: s.environment.pressure,
    };
    s
}

/// Variance of `z` over `duration`, streamed in chunks.
fn streamed_variance(s: SimulationSetup, duration: f64) -> f64 {
    let fs = s.sim.sample_rate;
    let mut lv = Langevin::new(s).unwrap();
    let total = (duration * fs) as usize;
    let mut buf = Vec::with_capacity(250_000);
    let (mut sum, mut sum2, mut n) = (0.0, 0.0, 0usize);
    while n < total {
        buf.clear();
        let chunk = (total - n).min(250_000);
        lv.advance(chunk, &mut buf, None).unwrap();
        for &z in &buf {
            sum += z;
            sum2 += z * z;
        }
        n += chunk;
    }
    let mean = sum / n as f64;
    sum2 / n as f64 - mean * mean
}

#[test]
fn equipartition_at_default_pressure() {
    let seeds = 8;
    let per_seed = 2.0; // s, about 1150 / gamma
    let mean_var: f64 = (0..seeds)
        .map(|seed| streamed_variance(setup(seed), per_seed))
        .sum::<f64>()
        / seeds as f64;
    let s = setup(0);
    let expected = BOLTZMANN * 300.0 / (s.particle.mass() * OMEGA_Z * OMEGA_Z);
    let err = mean_var / expected - 1.0;
    assert!(err.abs() < 0.03, "variance off by {:.2} %", 100.0 * err);
}

#[test]
fn cold_damping_reduces_variance() {
    let gas = 577.0;
    let gain = 4423.0;
    let mut s = with_gamma(setup(11), gas);
    s.feedback = FeedbackConfig {
        enabled: true,
        velocity_gain: gain,
    };
    let cooled = streamed_variance(s.clone(), 2.0);
    let reference = BOLTZMANN * 300.0 / (s.particle.mass() * OMEGA_Z * OMEGA_Z);
    let ratio = cooled / reference;
    let expected = gas / (gas + gain);
    assert!(
        (ratio / expected - 1.0).abs() < 0.05,
        "ratio {ratio}, expected {expected}"
    );
}

/// Linewidth from a linear fit of `1/(S w^2)` against `(w0^2 - w^2)^2 / w^2`,
/// exact for the oscillator response `S = C / ((w0^2 - w^2)^2 + gamma^2 w^2)`.
fn fitted_linewidth(s: SimulationSetup, duration: f64) -> f64 {
    let total_damping = s.motion().total_damping();
    let trace = simulate(&SimulationSetup {
        sim: SimConfig {
            duration,
            decimation: 48,
            ..s.sim
        },
        ..s
    })
    .unwrap();
    let seg = 25_000; // 0.1 s, 10 Hz bins
    let n_seg = trace.samples.len() / seg;
    let psd = psd_average(
        &trace.samples,
        trace.sample_rate,
        seg,
        Window::Hann,
        n_seg,
        SpectralUnit::MetersSquaredPerHz,
    )
    .unwrap();
    let span = 3.0 * total_damping;
    let (mut xs, mut ys) = (Vec::new(), Vec::new());
    for (f, &p) in psd.frequencies.iter().zip(&psd.psd) {
        let w = TAU * f;
        if (w - OMEGA_Z).abs() <= span {
            xs.push((OMEGA_Z * OMEGA_Z - w * w).powi(2) / (w * w));
            ys.push(1.0 / (p * w * w));
        }
    }
    let fit = linear_fit(&xs, &ys).unwrap();
    (fit.intercept / fit.slope).sqrt()
}

#[test]
fn lorentzian_linewidth_matches_damping() {
    let s = with_gamma(setup(3), 5000.0);
    let gamma = fitted_linewidth(s, 10.0);
    assert!((gamma / 5000.0 - 1.0).abs() < 0.05, "fitted {gamma}");
}

#[test]
fn lorentzian_linewidth_includes_feedback() {
    let mut s = with_gamma(setup(4), 1000.0);
    s.feedback = FeedbackConfig {
        enabled: true,
        velocity_gain: 4000.0,
    };
    let gamma = fitted_linewidth(s, 10.0);
    assert!((gamma / 5000.0 - 1.0).abs() < 0.05, "fitted {gamma}");
}

/// Steady-state amplitude at the drive frequency of a noiseless run, by
/// projection onto `cos` and `sin` over whole drive periods.
fn driven_amplitude(s: &SimulationSetup, settle: f64) -> f64 {
    let drive = s.drive.unwrap().config;
    let mut lv = Langevin::new(s.clone()).unwrap();
    let fs = s.sim.sample_rate;
    let mut z = Vec::new();
    lv.advance((settle * fs) as usize, &mut z, None).unwrap();
    let t0 = z.len() as f64 / fs;
    z.clear();
    // 43 periods of 86 kHz fit 125 samples at 250 kHz exactly
    let n = 125 * 200;
    lv.advance(n, &mut z, None).unwrap();
    let (mut c, mut si) = (0.0, 0.0);
    for (i, &x) in z.iter().enumerate() {
        let th = drive.am_frequency * (t0 + i as f64 / fs);
        c += x * th.cos();
        si += x * th.sin();
    }
    2.0 * c.hypot(si) / n as f64
}

fn driven_setup(gamma: f64, feedback: f64) -> SimulationSetup {
    let mut s = with_gamma(setup(0), gamma);
    s.environment.temperature = 1e-30;
    s.sim.initial_state = InitialState::At { z: 0.0, v: 0.0 };
    s.sim.decimation = 48;
    s.feedback = FeedbackConfig {
        enabled: feedback > 0.0,
        velocity_gain: feedback,
    };
    s.drive = Some(SignalDrive {
        config: DriveConfig {
            phase_mode: PhaseMode::Fixed { phase: 0.0 },
            ..DriveConfig::default()
        },
        kappa_peak: 3e-13,
    });
    s
}

fn response(omega: f64, gamma: f64, mass: f64) -> f64 {
    1.0 / (mass * (OMEGA_Z * OMEGA_Z - omega * omega).hypot(gamma * omega))
}

#[test]
fn driven_amplitude_follows_susceptibility() {
    let gamma = 577.0;
    let s = driven_setup(gamma, 0.0);
    let drive = s.drive.unwrap();
    let tone_amplitude = drive.config.tone_rms(drive.kappa_peak) * 2f64.sqrt();
    let expected = tone_amplitude * response(drive.config.am_frequency, gamma, s.particle.mass());
    let got = driven_amplitude(&s, 30e-3);
    assert!(
        (got / expected - 1.0).abs() < 0.02,
        "got {got}, expected {expected}"
    );
}

#[test]
fn feedback_changes_driven_peak_per_susceptibility() {
    let (gas, gain) = (577.0, 40_000.0);
    let open = driven_amplitude(&driven_setup(gas, 0.0), 30e-3);
    let closed = driven_amplitude(&driven_setup(gas, gain), 30e-3);
    let w = TAU * 86e3;
    let m = ParticleParams::default().mass();
    let expected = response(w, gas + gain, m) / response(w, gas, m);
    assert!(
        ((closed / open) / expected - 1.0).abs() < 0.05,
        "ratio {}, expected {expected}",
        closed / open
    );
}

//! Stochastic axial motion of the trapped particle.
//!
//! The mode is driven by gas collisions (thermal force and damping), the
//! amplitude-modulated interference force of the signal beam and optional
//! cold-damping feedback. Runs are bit-reproducible for a fixed seed.

mod drive;
mod integrator;

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

pub use drive::{drive_force, DriveConfig, DrivePhase, PhaseMode, QUADRATURE};
pub use integrator::{step, Baoab, MotionParams, State};

use crate::constants::{AVOGADRO, BOLTZMANN, PA_PER_MBAR};
use crate::error::{ensure, Result};
use crate::optics::{self, BeamParams, ParticleParams};

/// Largest `dt * Omega_z` accepted by [`SimConfig::validate`].
pub const MAX_PHASE_STEP: f64 = 0.1;

/// Free-molecular drag prefactor (diffuse reflection, Epstein regime).
const EPSTEIN_FACTOR: f64 = 0.619;

/// How the gas damping rate depends on pressure. Both variants are exactly
/// linear in pressure.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
#[serde(tag = "model", rename_all = "kebab-case", deny_unknown_fields)]
pub enum DampingModel {
    /// Kinetic-theory damping of a sphere in the free-molecular regime,
    /// `gamma = 0.619 * 6 pi r^2 p / (m vbar)` with
    /// `vbar = sqrt(pi k_B T / (2 m_gas))`.
    #[default]
    FreeMolecular,
    /// Measured damping rate `gamma` at `pressure`, scaled linearly.
    Calibrated { gamma: f64, pressure: f64 },
}

/// Residual gas around the particle.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Environment {
    /// Pa
    pub pressure: f64,
    /// K
    pub temperature: f64,
    /// kg/mol
    pub gas_molar_mass: f64,
    /// Dynamic viscosity, Pa s. Only enters the Knudsen number.
    pub gas_viscosity: f64,
    pub damping: DampingModel,
}

impl Default for Environment {
    /// Air at 300 K and 0.1 mbar.
    fn default() -> Self {
        Self {
            pressure: 0.1 * PA_PER_MBAR,
            temperature: 300.0,
            gas_molar_mass: 0.028_97,
            gas_viscosity: 1.84e-5,
            damping: DampingModel::FreeMolecular,
        }
    }
}

impl Environment {
    pub fn at_pressure(mut self, pressure: f64) -> Self {
        self.pressure = pressure;
        self
    }

    pub fn validate(&self) -> Result<()> {
        ensure(self.pressure > 0.0 && self.pressure.is_finite(), || {
            format!("pressure must be > 0, got {} Pa", self.pressure)
        })?;
        ensure(self.temperature > 0.0, || {
            format!("temperature must be > 0, got {} K", self.temperature)
        })?;
        ensure(
            self.gas_molar_mass > 0.0 && self.gas_viscosity > 0.0,
            || "gas molar mass and viscosity must be > 0".to_string(),
        )?;
        if let DampingModel::Calibrated { gamma, pressure } = self.damping {
            ensure(gamma > 0.0 && pressure > 0.0, || {
                "calibrated damping needs gamma > 0 and pressure > 0".to_string()
            })?;
        }
        Ok(())
    }

    fn molecular_speed(&self) -> f64 {
        let m_gas = self.gas_molar_mass / AVOGADRO;
        (PI * BOLTZMANN * self.temperature / (2.0 * m_gas)).sqrt()
    }

    /// Mean free path `(eta / p) sqrt(pi k_B T / (2 m_gas))`, m.
    pub fn mean_free_path(&self) -> f64 {
        self.gas_viscosity / self.pressure * self.molecular_speed()
    }

    pub fn knudsen_number(&self, particle: &ParticleParams) -> f64 {
        self.mean_free_path() / particle.radius
    }
}

/// Velocity damping rate from gas collisions, 1/s.
pub fn gas_damping_rate(env: &Environment, particle: &ParticleParams) -> f64 {
    let per_pascal = match env.damping {
        DampingModel::FreeMolecular => {
            EPSTEIN_FACTOR * 6.0 * PI * particle.radius * particle.radius
                / (particle.mass() * env.molecular_speed())
        }
        DampingModel::Calibrated { gamma, pressure } => gamma / pressure,
    };
    per_pascal * env.pressure
}

/// One-sided thermal force noise `S_F = 4 k_B T m gamma`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ThermalForceNoise {
    /// N^2/Hz
    pub psd: f64,
    /// N/sqrt(Hz)
    pub asd: f64,
}

pub fn thermal_force_psd(env: &Environment, particle: &ParticleParams) -> ThermalForceNoise {
    force_noise_for_damping(
        env.temperature,
        particle.mass(),
        gas_damping_rate(env, particle),
    )
}

pub fn force_noise_for_damping(temperature: f64, mass: f64, gamma: f64) -> ThermalForceNoise {
    let psd = 4.0 * BOLTZMANN * temperature * mass * gamma;
    ThermalForceNoise {
        psd,
        asd: psd.sqrt(),
    }
}

/// Axial trap frequency source.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "lowercase", deny_unknown_fields)]
pub enum TrapModel {
    /// Measured `Omega_z` in rad/s; bypasses paraxial-model error.
    Measured { omega_z: f64 },
    /// Harmonic expansion of the paraxial tweezer potential.
    Paraxial,
}

impl Default for TrapModel {
    fn default() -> Self {
        TrapModel::Measured {
            omega_z: 2.0 * PI * 83.8e3,
        }
    }
}

impl TrapModel {
    pub fn omega_z(&self, tweezer: &BeamParams, particle: &ParticleParams) -> Result<f64> {
        match *self {
            TrapModel::Measured { omega_z } => {
                ensure(omega_z > 0.0, || {
                    format!("trap frequency must be > 0, got {omega_z}")
                })?;
                Ok(omega_z)
            }
            TrapModel::Paraxial => Ok(optics::trap_stiffness(tweezer, particle)?.omega_z),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
#[serde(default, deny_unknown_fields)]
pub struct FeedbackConfig {
    pub enabled: bool,
    /// Added velocity damping, 1/s.
    pub velocity_gain: f64,
}

impl FeedbackConfig {
    pub fn validate(&self) -> Result<()> {
        ensure(self.velocity_gain >= 0.0, || {
            format!("feedback gain must be >= 0, got {}", self.velocity_gain)
        })
    }

    pub fn gain(&self) -> f64 {
        if self.enabled {
            self.velocity_gain
        } else {
            0.0
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum InitialState {
    /// Drawn from the stationary distribution of the undriven mode.
    #[default]
    Thermal,
    At {
        z: f64,
        v: f64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    /// Recorded sample rate, Hz.
    pub sample_rate: f64,
    /// Integrator steps per recorded sample; `dt = 1 / (sample_rate * decimation)`.
    pub decimation: usize,
    /// s
    pub duration: f64,
    pub seed: u64,
    pub initial_state: InitialState,
    pub record_velocity: bool,
}

impl Default for SimConfig {
    /// 250 kHz recording rate from a 6 MHz integrator.
    fn default() -> Self {
        Self {
            sample_rate: 250e3,
            decimation: 24,
            duration: 33e-3,
            seed: 0,
            initial_state: InitialState::Thermal,
            record_velocity: false,
        }
    }
}

impl SimConfig {
    pub fn validate(&self, omega_z: f64) -> Result<()> {
        ensure(self.sample_rate > 0.0, || {
            format!("sample rate must be > 0, got {}", self.sample_rate)
        })?;
        ensure(self.decimation >= 1, || {
            "decimation must be >= 1".to_string()
        })?;
        ensure(self.duration >= self.dt(), || {
            format!(
                "duration {} s is shorter than dt {} s",
                self.duration,
                self.dt()
            )
        })?;
        ensure(self.dt() * omega_z < MAX_PHASE_STEP, || {
            format!(
                "dt * Omega_z = {:.4} exceeds {MAX_PHASE_STEP}; raise the decimation",
                self.dt() * omega_z
            )
        })
    }

    /// Integrator step, s.
    pub fn dt(&self) -> f64 {
        1.0 / (self.sample_rate * self.decimation as f64)
    }

    pub fn sample_count(&self) -> usize {
        (self.duration * self.sample_rate).round() as usize
    }
}

/// Signal beam drive with its transduction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SignalDrive {
    pub config: DriveConfig,
    /// Interference force per sqrt(W) at the most favourable phase, N/sqrt(W).
    pub kappa_peak: f64,
}

/// Force law used by the integrator.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
#[serde(tag = "model", rename_all = "kebab-case")]
pub enum ForceModel {
    /// `-m Omega_z^2 z` plus the origin-evaluated interference drive.
    #[default]
    Harmonic,
    /// `-dU/dz` of the full two-beam potential at every step. The signal
    /// beam's power follows the AM waveform and its phase the drive phase.
    FullPotential {
        tweezer: BeamParams,
        signal: BeamParams,
    },
}

/// Everything a run depends on; its JSON form is hashed into the trace.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulationSetup {
    pub particle: ParticleParams,
    pub environment: Environment,
    /// Resolved axial trap frequency, rad/s.
    pub omega_z: f64,
    pub drive: Option<SignalDrive>,
    pub feedback: FeedbackConfig,
    pub sim: SimConfig,
    #[serde(default)]
    pub force_model: ForceModel,
}

impl SimulationSetup {
    pub fn validate(&self) -> Result<()> {
        self.particle.validate()?;
        self.environment.validate()?;
        self.feedback.validate()?;
        ensure(self.omega_z > 0.0, || {
            "trap frequency must be > 0".to_string()
        })?;
        self.sim.validate(self.omega_z)?;
        if let Some(drive) = &self.drive {
            drive.config.validate()?;
            ensure(drive.kappa_peak >= 0.0, || {
                "transduction must be >= 0".to_string()
            })?;
        }
        if let ForceModel::FullPotential { tweezer, signal } = &self.force_model {
            optics::total_potential(0.0, tweezer, signal, &self.particle)?;
            let paraxial = optics::trap_stiffness(tweezer, &self.particle)?.omega_z;
            ensure((paraxial - self.omega_z).abs() <= 1e-9 * paraxial, || {
                "full-potential mode needs the paraxial trap frequency".to_string()
            })?;
        }
        Ok(())
    }

    pub fn gamma(&self) -> f64 {
        gas_damping_rate(&self.environment, &self.particle)
    }

    pub fn motion(&self) -> MotionParams {
        MotionParams {
            mass: self.particle.mass(),
            gamma: self.gamma(),
            feedback_gain: self.feedback.gain(),
            temperature: self.environment.temperature,
        }
    }

    /// Stationary position variance of the undriven mode, m^2.
    pub fn thermal_variance(&self) -> f64 {
        let motion = self.motion();
        BOLTZMANN * motion.effective_temperature() / (motion.mass * self.omega_z * self.omega_z)
    }

    /// SHA-256 of the canonical JSON form.
    pub fn digest(&self) -> String {
        let json = serde_json::to_string(self).expect("setup serializes");
        hex::encode(Sha256::digest(json.as_bytes()))
    }
}

/// Unit of the samples in a [`TraceRecord`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SampleUnit {
    Meters,
    Volts,
}

/// Uniformly sampled time series with provenance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceRecord {
    /// Hz
    pub sample_rate: f64,
    pub samples: Vec<f64>,
    /// Velocities in m/s when recorded.
    pub velocities: Option<Vec<f64>>,
    pub unit: SampleUnit,
    pub seed: u64,
    /// Integrator steps per sample.
    pub decimation: usize,
    pub config_digest: String,
}

impl TraceRecord {
    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn duration(&self) -> f64 {
        self.samples.len() as f64 / self.sample_rate
    }
}

/// Integrator state that can be advanced in chunks; consecutive chunks are
/// identical to one long run.
pub struct Langevin {
    setup: SimulationSetup,
    baoab: Baoab,
    rng: ChaCha8Rng,
    state: State,
    force: f64,
    phase: DrivePhase,
    step_index: u64,
    spring: f64,
    alpha: f64,
}

impl Langevin {
    pub fn new(setup: SimulationSetup) -> Result<Self> {
        setup.validate()?;
        let motion = setup.motion();
        let baoab = Baoab::new(&motion, setup.sim.dt());
        let mut rng = ChaCha8Rng::seed_from_u64(setup.sim.seed);
        let state = match setup.sim.initial_state {
            InitialState::Thermal => {
                let kt = BOLTZMANN * motion.effective_temperature();
                let z: f64 = rng.sample(StandardNormal);
                let v: f64 = rng.sample(StandardNormal);
                State {
                    z: z * setup.thermal_variance().sqrt(),
                    v: v * (kt / motion.mass).sqrt(),
                }
            }
            InitialState::At { z, v } => State { z, v },
        };
        let phase_mode = setup
            .drive
            .map(|d| d.config.phase_mode)
            .unwrap_or(PhaseMode::Fixed { phase: 0.0 });
        let phase = DrivePhase::new(phase_mode, setup.sim.dt(), rng.random::<f64>());
        let spring = motion.mass * setup.omega_z * setup.omega_z;
        let alpha = setup.particle.polarizability();
        let mut langevin = Self {
            setup,
            baoab,
            rng,
            state,
            force: 0.0,
            phase,
            step_index: 0,
            spring,
            alpha,
        };
        langevin.force = langevin.force_at(state.z, 0.0);
        Ok(langevin)
    }

    pub fn setup(&self) -> &SimulationSetup {
        &self.setup
    }

    pub fn state(&self) -> State {
        self.state
    }

    pub fn time(&self) -> f64 {
        self.step_index as f64 * self.baoab.dt()
    }

    #[inline]
    fn force_at(&self, z: f64, t: f64) -> f64 {
        match &self.setup.force_model {
            ForceModel::Harmonic => {
                let drive = match &self.setup.drive {
                    Some(d) => drive_force(t, &d.config, d.kappa_peak, self.phase.phase()),
                    None => 0.0,
                };
                -self.spring * z + drive
            }
            ForceModel::FullPotential { tweezer, signal } => {
                let signal = match &self.setup.drive {
                    Some(d) => signal
                        .with_power(d.config.power_at(t).max(0.0))
                        .with_phase(signal.phase + self.phase.phase()),
                    None => signal.with_power(0.0),
                };
                optics::force_terms_unchecked(z, tweezer, &signal, self.alpha).total()
            }
        }
    }

    /// Advance by `n` recorded samples, appending positions (and velocities
    /// when `velocities` is given).
    pub fn advance(
        &mut self,
        n: usize,
        positions: &mut Vec<f64>,
        mut velocities: Option<&mut Vec<f64>>,
    ) -> Result<()> {
        let decimation = self.setup.sim.decimation;
        let dt = self.baoab.dt();
        positions.reserve(n);
        for _ in 0..n {
            for _ in 0..decimation {
                let t = self.step_index as f64 * dt;
                let normal: f64 = self.rng.sample(StandardNormal);
                if self.phase.is_random() {
                    let phase_normal: f64 = self.rng.sample(StandardNormal);
                    self.phase.advance(phase_normal);
                }
                let mut state = self.state;
                let mut force = self.force;
                let baoab = self.baoab;
                baoab.step(&mut state, &mut force, t, normal, |z, t| {
                    self.force_at(z, t)
                });
                self.state = state;
                self.force = force;
                self.step_index += 1;
            }
            integrator::check_finite(&self.state, self.step_index)?;
            positions.push(self.state.z);
            if let Some(v) = velocities.as_deref_mut() {
                v.push(self.state.v);
            }
        }
        Ok(())
    }
}

/// Independent seed for sub-run `index` of a master seed. Serial and
/// parallel sweeps draw identical per-point streams.
pub fn derive_seed(master: u64, index: u64) -> u64 {
    let mut rng = ChaCha8Rng::seed_from_u64(master);
    rng.set_stream(index.wrapping_add(2));
    rng.random()
}

/// Run `setup` for its configured duration.
pub fn simulate(setup: &SimulationSetup) -> Result<TraceRecord> {
    let mut langevin = Langevin::new(setup.clone())?;
    let n = setup.sim.sample_count();
    let mut positions = Vec::with_capacity(n);
    let mut velocities = setup.sim.record_velocity.then(|| Vec::with_capacity(n));
    langevin.advance(n, &mut positions, velocities.as_mut())?;
    Ok(TraceRecord {
        sample_rate: setup.sim.sample_rate,
        samples: positions,
        velocities,
        unit: SampleUnit::Meters,
        seed: setup.sim.seed,
        decimation: setup.sim.decimation,
        config_digest: setup.digest(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::Error;
    use approx::assert_relative_eq;

    fn setup() -> SimulationSetup {
        SimulationSetup {
            particle: ParticleParams::default(),
            environment: Environment::default(),
            omega_z: 2.0 * PI * 83.8e3,
            drive: None,
            feedback: FeedbackConfig::default(),
            sim: SimConfig::default(),
            force_model: ForceModel::Harmonic,
        }
    }

    #[test]
    fn damping_is_linear_in_pressure() {
        let p = ParticleParams::default();
        let env = Environment::default();
        let g = gas_damping_rate(&env, &p);
        assert_eq!(
            gas_damping_rate(&env.at_pressure(2.0 * env.pressure), &p),
            2.0 * g
        );
        for decade in -6..=0 {
            let c = 10f64.powi(decade);
            let scaled = gas_damping_rate(&env.at_pressure(c * env.pressure), &p);
            assert_relative_eq!(scaled, c * g, max_relative = 1e-14);
        }
        assert!(gas_damping_rate(&env.at_pressure(1e-30), &p) < 1e-25);
    }

    #[test]
    fn free_molecular_damping_at_reference_pressure() {
        // 0.619 * 6 pi r^2 p / (m sqrt(pi k_B T / (2 m_air))), evaluated independently
        let p = ParticleParams::default();
        let env = Environment::default();
        let g = gas_damping_rate(&env, &p);
        assert!((g - 576.6).abs() < 0.5, "gamma {g}");
        assert!(env.knudsen_number(&p) > 1e3);
    }

    #[test]
    fn thermal_force_reference_values() {
        let p = ParticleParams::default();
        let noise = force_noise_for_damping(300.0, 2.77e-18, 7.4e3);
        assert!(
            (noise.asd - 18.5e-18).abs() / 18.5e-18 < 0.01,
            "{}",
            noise.asd
        );
        assert_eq!(force_noise_for_damping(300.0, p.mass(), 0.0).psd, 0.0);
        let env = Environment::default();
        let half = thermal_force_psd(&env.at_pressure(0.5 * env.pressure), &p);
        assert_relative_eq!(
            half.psd,
            0.5 * thermal_force_psd(&env, &p).psd,
            max_relative = 1e-14
        );
    }

    #[test]
    fn free_molecular_damping_below_force_noise_inversion() {
        // 18.5 aN/sqrt(Hz) at 0.1 mbar implies a damping the kinetic formula
        // does not reach for a 142 nm silica sphere
        let p = ParticleParams::default();
        let implied = (18.5e-18f64).powi(2) / (4.0 * BOLTZMANN * 300.0 * p.mass());
        let kinetic = gas_damping_rate(&Environment::default(), &p);
        let ratio = implied / kinetic;
        assert!((ratio - 12.92).abs() < 0.01, "ratio {ratio}");
    }

    #[test]
    fn calibrated_damping_scales() {
        let p = ParticleParams::default();
        let env = Environment {
            damping: DampingModel::Calibrated {
                gamma: 7.4e3,
                pressure: 10.0,
            },
            ..Environment::default()
        };
        assert_relative_eq!(gas_damping_rate(&env, &p), 7.4e3, max_relative = 1e-15);
        assert_relative_eq!(
            gas_damping_rate(&env.at_pressure(0.068), &p),
            7.4e3 * 0.0068,
            max_relative = 1e-14
        );
    }

    #[test]
    fn resolution_guard() {
        let mut s = setup();
        s.sim.decimation = 2;
        assert!(matches!(s.validate(), Err(Error::InvalidConfiguration(_))));
    }

    #[test]
    fn sample_count_for_single_shot() {
        let s = setup();
        assert!(s.sim.dt() * s.omega_z < 0.09);
        assert_eq!(s.sim.sample_count(), 8250);
        let trace = simulate(&s).unwrap();
        assert_eq!(trace.len(), 8250);
        assert_eq!(trace.config_digest.len(), 64);
    }

    #[test]
    fn same_seed_same_trace() {
        let mut s = setup();
        s.sim.duration = 2e-3;
        s.drive = Some(SignalDrive {
            config: DriveConfig::default(),
            kappa_peak: 1e-13,
        });
        let a = simulate(&s).unwrap();
        let b = simulate(&s).unwrap();
        assert_eq!(a, b);
        s.sim.seed = 1;
        assert_ne!(simulate(&s).unwrap().samples, a.samples);
    }

    #[test]
    fn chunked_advance_matches_single_run() {
        let mut s = setup();
        s.sim.duration = 4e-3;
        let whole = simulate(&s).unwrap();
        let mut lv = Langevin::new(s.clone()).unwrap();
        let mut chunks = Vec::new();
        lv.advance(300, &mut chunks, None).unwrap();
        lv.advance(700, &mut chunks, None).unwrap();
        assert_eq!(whole.samples, chunks);
    }
}

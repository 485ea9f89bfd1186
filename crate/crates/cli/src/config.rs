//! Scenario configuration files.
//!
//! A config is TOML. Every key is optional: the chosen scenario supplies a
//! preset and the file overrides it key by key. Unknown keys are rejected.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use optoforce::constants::PA_PER_MBAR;
use optoforce::dynamics::{
    DampingModel, DriveConfig, Environment, FeedbackConfig, InitialState, PhaseMode, TrapModel,
};
use optoforce::optics::{
    diffraction_limited_waist, BeamParams, Direction, ParticleParams, DEFAULT_FOCUS_OFFSET,
    DEFAULT_NUMERICAL_APERTURE, DEFAULT_WAVELENGTH,
};
use optoforce::readout::{ReadoutConfig, Window};
use optoforce::sensing::{ChainInputs, REFERENCE_FORCE_RMS, REFERENCE_SIGNAL_POWER};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum ScenarioKind {
    Fig2,
    Fig3,
    Fig4,
    Fig5,
    #[default]
    Custom,
}

impl ScenarioKind {
    pub fn name(&self) -> &'static str {
        match self {
            ScenarioKind::Fig2 => "fig2",
            ScenarioKind::Fig3 => "fig3",
            ScenarioKind::Fig4 => "fig4",
            ScenarioKind::Fig5 => "fig5",
            ScenarioKind::Custom => "custom",
        }
    }
}

impl fmt::Display for ScenarioKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Pressure in pascal. Reads a bare number as Pa or a string with a unit,
/// e.g. `"0.1 mbar"`, `"10 Pa"`. Always written back as a number in Pa.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Pressure(pub f64);

impl FromStr for Pressure {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        let split = s
            .find(|c: char| c.is_ascii_alphabetic() && c != 'e' && c != 'E')
            .unwrap_or(s.len());
        let (number, unit) = s.split_at(split);
        let value: f64 = number
            .trim()
            .parse()
            .map_err(|_| format!("cannot read pressure {s:?}"))?;
        let factor = match unit.trim() {
            "" | "Pa" => 1.0,
            "mbar" => PA_PER_MBAR,
            "hPa" => 100.0,
            "bar" => 1e5,
            other => return Err(format!("unknown pressure unit {other:?} (use Pa or mbar)")),
        };
        Ok(Pressure(value * factor))
    }
}

impl Serialize for Pressure {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_f64(self.0)
    }
}

impl<'de> Deserialize<'de> for Pressure {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Number(f64),
            Text(String),
        }
        match Raw::deserialize(deserializer)? {
            Raw::Number(v) => Ok(Pressure(v)),
            Raw::Text(s) => s.parse().map_err(serde::de::Error::custom),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TweezerSection {
    /// W
    pub power: f64,
    /// m
    pub wavelength: f64,
    pub numerical_aperture: f64,
    /// m; the diffraction-limited waist when absent.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub waist: Option<f64>,
}

impl Default for TweezerSection {
    fn default() -> Self {
        Self {
            power: 0.414,
            wavelength: DEFAULT_WAVELENGTH,
            numerical_aperture: DEFAULT_NUMERICAL_APERTURE,
            waist: None,
        }
    }
}

impl TweezerSection {
    pub fn beam(&self) -> BeamParams {
        let waist = self
            .waist
            .unwrap_or_else(|| diffraction_limited_waist(self.wavelength, self.numerical_aperture));
        BeamParams::new(self.power, self.wavelength, waist)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SignalSection {
    /// Focus offset in units of the tweezer Rayleigh range.
    pub focus_offset_rayleigh: f64,
    /// rad
    pub phase: f64,
    pub direction: Direction,
}

impl Default for SignalSection {
    fn default() -> Self {
        Self {
            focus_offset_rayleigh: DEFAULT_FOCUS_OFFSET,
            phase: 0.0,
            direction: Direction::Co,
        }
    }
}

impl SignalSection {
    /// Signal beam matched to `tweezer` at `power`.
    pub fn beam(&self, tweezer: &BeamParams, power: f64) -> BeamParams {
        BeamParams::new(power, tweezer.wavelength, tweezer.waist)
            .with_focus_offset(self.focus_offset_rayleigh * tweezer.rayleigh_range())
            .with_phase(self.phase)
            .with_direction(self.direction)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "kebab-case", deny_unknown_fields)]
pub enum DampingSection {
    FreeMolecular,
    /// Damping rate `gamma` (1/s) measured at `pressure`.
    Calibrated {
        gamma: f64,
        pressure: Pressure,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EnvironmentSection {
    pub pressure: Pressure,
    /// K
    pub temperature: f64,
    /// kg/mol
    pub gas_molar_mass: f64,
    /// Pa s
    pub gas_viscosity: f64,
    pub damping: DampingSection,
}

impl Default for EnvironmentSection {
    fn default() -> Self {
        let env = Environment::default();
        Self {
            pressure: Pressure(env.pressure),
            temperature: env.temperature,
            gas_molar_mass: env.gas_molar_mass,
            gas_viscosity: env.gas_viscosity,
            damping: DampingSection::FreeMolecular,
        }
    }
}

impl EnvironmentSection {
    pub fn environment(&self) -> Environment {
        Environment {
            pressure: self.pressure.0,
            temperature: self.temperature,
            gas_molar_mass: self.gas_molar_mass,
            gas_viscosity: self.gas_viscosity,
            damping: match self.damping {
                DampingSection::FreeMolecular => DampingModel::FreeMolecular,
                DampingSection::Calibrated { gamma, pressure } => DampingModel::Calibrated {
                    gamma,
                    pressure: pressure.0,
                },
            },
        }
    }
}

/// Where the drive's force per sqrt(W) comes from.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "source", rename_all = "lowercase", deny_unknown_fields)]
pub enum Transduction {
    /// Drive-frequency force `force_rms` (N) observed at `signal_power` (W),
    /// scaled as the square root of power.
    Empirical { force_rms: f64, signal_power: f64 },
    /// Interference force from the optics model.
    Model,
    /// Peak force per sqrt(W) given directly.
    Fixed { kappa_peak: f64 },
}

impl Default for Transduction {
    fn default() -> Self {
        Transduction::Empirical {
            force_rms: REFERENCE_FORCE_RMS,
            signal_power: REFERENCE_SIGNAL_POWER,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DriveSection {
    pub enabled: bool,
    /// rad/s
    pub am_frequency: f64,
    /// W
    pub signal_power: f64,
    pub modulation_depth: f64,
    pub phase_mode: PhaseMode,
    pub transduction: Transduction,
}

impl Default for DriveSection {
    fn default() -> Self {
        let d = DriveConfig::default();
        Self {
            enabled: true,
            am_frequency: d.am_frequency,
            signal_power: d.signal_power,
            modulation_depth: d.modulation_depth,
            phase_mode: d.phase_mode,
            transduction: Transduction::default(),
        }
    }
}

impl DriveSection {
    pub fn config(&self) -> DriveConfig {
        DriveConfig {
            am_frequency: self.am_frequency,
            signal_power: self.signal_power,
            modulation_depth: self.modulation_depth,
            phase_mode: self.phase_mode,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SimSection {
    /// Hz
    pub sample_rate: f64,
    pub decimation: usize,
    pub initial_state: InitialState,
}

impl Default for SimSection {
    fn default() -> Self {
        Self {
            sample_rate: 250e3,
            decimation: 24,
            initial_state: InitialState::Thermal,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ReadoutSection {
    /// V/m
    pub gain: f64,
    /// V^2/Hz
    pub noise_floor_psd: f64,
}

impl Default for ReadoutSection {
    fn default() -> Self {
        let r = ReadoutConfig::default();
        Self {
            gain: r.gain,
            noise_floor_psd: r.noise_floor_psd,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AnalysisSection {
    /// Length of one single-shot trace, s.
    pub segment_duration: f64,
    pub segments: usize,
    pub window: Window,
    /// Half width of the driven-peak band in resolution bandwidths.
    pub half_band_bins: f64,
}

impl Default for AnalysisSection {
    fn default() -> Self {
        Self {
            segment_duration: 33e-3,
            segments: 35,
            window: Window::Rectangular,
            half_band_bins: 1.0,
        }
    }
}

/// Signal-power sweep of the driven peak.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepSection {
    /// W
    pub powers: Vec<f64>,
    /// Segments at `reference_power`; other points use
    /// `segments_at_reference * reference_power / P`, at least `min_segments`.
    pub segments_at_reference: usize,
    /// W
    pub reference_power: f64,
    pub min_segments: usize,
}

impl Default for SweepSection {
    fn default() -> Self {
        Self {
            powers: vec![66e-9, 98e-9, 146e-9, 218e-9, 326e-9, 493e-9],
            segments_at_reference: 35,
            reference_power: 493e-9,
            min_segments: 35,
        }
    }
}

impl SweepSection {
    pub fn segments_for(&self, power: f64) -> usize {
        let scaled = (self.segments_at_reference as f64 * self.reference_power / power).round();
        (scaled as usize).max(self.min_segments)
    }
}

/// Analytic co/counter projection at low pressure.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ProjectionSection {
    pub pressure: Pressure,
    /// Measurement time, s.
    pub tau: f64,
    /// W
    pub power_min: f64,
    /// W
    pub power_max: f64,
    pub points: usize,
}

impl Default for ProjectionSection {
    fn default() -> Self {
        Self {
            pressure: Pressure(1e-7 * PA_PER_MBAR),
            tau: 1.0,
            power_min: 1e-22,
            power_max: 1e-9,
            points: 66,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScenarioConfig {
    pub scenario: ScenarioKind,
    pub seed: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub output_dir: Option<PathBuf>,
    pub tweezer: TweezerSection,
    pub signal: SignalSection,
    pub particle: ParticleParams,
    pub environment: EnvironmentSection,
    pub trap: TrapModel,
    pub drive: DriveSection,
    pub feedback: FeedbackConfig,
    pub sim: SimSection,
    pub readout: ReadoutSection,
    pub analysis: AnalysisSection,
    pub sweep: SweepSection,
    pub projection: ProjectionSection,
    pub chain: ChainInputs,
    /// Written into manifests for the record; ignored on input.
    #[serde(skip_serializing)]
    pub provenance: Option<toml::Table>,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        Self {
            scenario: ScenarioKind::Custom,
            seed: 0,
            output_dir: None,
            tweezer: TweezerSection::default(),
            signal: SignalSection::default(),
            particle: ParticleParams::default(),
            environment: EnvironmentSection::default(),
            trap: TrapModel::default(),
            drive: DriveSection::default(),
            feedback: FeedbackConfig::default(),
            sim: SimSection::default(),
            readout: ReadoutSection::default(),
            analysis: AnalysisSection::default(),
            sweep: SweepSection::default(),
            projection: ProjectionSection::default(),
            chain: ChainInputs::default(),
            provenance: None,
        }
    }
}

impl ScenarioConfig {
    pub fn readout(&self) -> ReadoutConfig {
        ReadoutConfig {
            gain: self.readout.gain,
            noise_floor_psd: self.readout.noise_floor_psd,
            sample_rate: self.sim.sample_rate,
        }
    }

    pub fn segment_length(&self) -> usize {
        (self.analysis.segment_duration * self.sim.sample_rate).round() as usize
    }

    /// Resolved config as TOML.
    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }
}

fn parse_error(origin: &str, err: toml::de::Error) -> CliError {
    CliError::Config(format!("{origin}: {err}"))
}

/// Overlay `top` onto `base`, recursing into tables.
fn merge(base: &mut toml::Table, top: toml::Table) {
    for (key, value) in top {
        match (base.get_mut(&key), value) {
            (Some(toml::Value::Table(b)), toml::Value::Table(t)) if !is_tagged(&t) => merge(b, t),
            (_, v) => {
                base.insert(key, v);
            }
        }
    }
}

/// Tagged enums (`model = ...`, `mode = ...`) replace rather than merge, so
/// switching variant does not inherit fields of the preset's variant.
fn is_tagged(t: &toml::Table) -> bool {
    ["model", "mode", "source", "kind"]
        .iter()
        .any(|k| t.contains_key(*k))
}

/// Resolve a config document: the scenario named in `text` (or `scenario`
/// when given) supplies the preset and `text` overrides it.
pub fn resolve(
    text: &str,
    origin: &str,
    scenario: Option<ScenarioKind>,
) -> Result<ScenarioConfig, CliError> {
    // strict pass first so errors point at the user's file
    let user: ScenarioConfig = toml::from_str(text).map_err(|e| parse_error(origin, e))?;
    let table: toml::Table = toml::from_str(text).map_err(|e| parse_error(origin, e))?;
    let kind = scenario.unwrap_or(if table.contains_key("scenario") {
        user.scenario
    } else {
        ScenarioKind::Custom
    });
    let preset = crate::scenario::preset(kind);
    let mut base: toml::Table =
        toml::from_str(&preset.to_toml()).expect("preset round-trips through TOML");
    merge(&mut base, table);
    base.insert("scenario".into(), toml::Value::String(kind.name().into()));
    base.remove("provenance");
    let merged = toml::to_string(&base).expect("merged table serializes");
    toml::from_str(&merged).map_err(|e| parse_error(origin, e))
}

pub fn load(path: &Path, scenario: Option<ScenarioKind>) -> Result<ScenarioConfig, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
    resolve(&text, &path.display().to_string(), scenario)
}

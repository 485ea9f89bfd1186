//! Axial optical fields, two-beam interference potential and dipole forces.
//!
//! A strong tweezer beam and a weak signal beam of the same wavelength are
//! modelled as paraxial Gaussian beams along the optical axis. The particle
//! sees the time-averaged dipole potential
//!
//! ```text
//! U(z) = -(alpha / 4) |E_tw(z) + E_s(z)|^2
//! ```
//!
//! with real envelope amplitudes, so the tweezer term is attractive and the
//! particle is trapped at the tweezer focus. The force ratios used downstream
//! (interference over standalone force, square-root scaling with signal
//! power) do not depend on the `1/4` prefactor or the sign.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::constants::{EPSILON_0, SPEED_OF_LIGHT};
use crate::error::{ensure, Error, Result};

/// Largest `|z_s| / z_r` for which [`force_expansion_origin`] is offered.
pub const EXPANSION_LIMIT: f64 = 0.05;

pub const DEFAULT_WAVELENGTH: f64 = 1064e-9;
pub const DEFAULT_NUMERICAL_APERTURE: f64 = 0.8;
/// Default signal focus offset in Rayleigh ranges.
pub const DEFAULT_FOCUS_OFFSET: f64 = 0.1;

/// Propagation sense of a beam relative to the tweezer (+z).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    #[default]
    Co,
    Counter,
}

/// One coherent Gaussian beam on the optical axis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BeamParams {
    /// Optical power, W.
    pub power: f64,
    /// Vacuum wavelength, m.
    pub wavelength: f64,
    /// 1/e^2 intensity radius at the focus, m.
    pub waist: f64,
    /// Axial position of this beam's focus relative to the tweezer focus, m.
    pub focus_offset: f64,
    /// Additional phase of this beam relative to the tweezer, rad.
    pub phase: f64,
    pub direction: Direction,
}

impl BeamParams {
    /// A co-propagating beam focused at the origin with zero phase.
    pub fn new(power: f64, wavelength: f64, waist: f64) -> Self {
        Self {
            power,
            wavelength,
            waist,
            focus_offset: 0.0,
            phase: 0.0,
            direction: Direction::Co,
        }
    }

    /// 414 mW at 1064 nm behind an NA 0.8 objective, diffraction-limited waist.
    pub fn default_tweezer() -> Self {
        let wavelength = DEFAULT_WAVELENGTH;
        Self::new(
            0.414,
            wavelength,
            diffraction_limited_waist(wavelength, DEFAULT_NUMERICAL_APERTURE),
        )
    }

    /// 493 nW signal matched to `tweezer`, focused `0.1 z_r` past its focus.
    pub fn default_signal(tweezer: &BeamParams) -> Self {
        Self::new(493e-9, tweezer.wavelength, tweezer.waist)
            .with_focus_offset(DEFAULT_FOCUS_OFFSET * tweezer.rayleigh_range())
    }

    pub fn with_power(mut self, power: f64) -> Self {
        self.power = power;
        self
    }

    pub fn with_focus_offset(mut self, focus_offset: f64) -> Self {
        self.focus_offset = focus_offset;
        self
    }

    pub fn with_phase(mut self, phase: f64) -> Self {
        self.phase = phase;
        self
    }

    pub fn with_direction(mut self, direction: Direction) -> Self {
        self.direction = direction;
        self
    }

    pub fn validate(&self) -> Result<()> {
        ensure(self.power >= 0.0 && self.power.is_finite(), || {
            format!("beam power must be finite and >= 0, got {}", self.power)
        })?;
        ensure(self.wavelength > 0.0 && self.wavelength.is_finite(), || {
            format!("wavelength must be > 0, got {}", self.wavelength)
        })?;
        ensure(self.waist > 0.0 && self.waist.is_finite(), || {
            format!("waist must be > 0, got {}", self.waist)
        })?;
        ensure(
            self.focus_offset.is_finite() && self.phase.is_finite(),
            || "focus offset and phase must be finite".to_string(),
        )
    }

    /// `z_r = pi w0^2 / lambda`.
    pub fn rayleigh_range(&self) -> f64 {
        PI * self.waist * self.waist / self.wavelength
    }

    /// `k = 2 pi / lambda`.
    pub fn wavenumber(&self) -> f64 {
        2.0 * PI / self.wavelength
    }

    /// Peak on-axis field amplitude at the focus, V/m.
    pub fn field_amplitude(&self) -> f64 {
        field_amplitude_from_power(self)
    }
}

/// Dielectric sphere in the Rayleigh regime.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ParticleParams {
    /// m
    pub radius: f64,
    /// kg/m^3
    pub density: f64,
    /// Relative permittivity at the trapping wavelength.
    pub rel_permittivity: f64,
}

impl Default for ParticleParams {
    /// Silica sphere of 142 nm nominal diameter.
    fn default() -> Self {
        Self {
            radius: 71e-9,
            density: 1850.0,
            rel_permittivity: 2.1,
        }
    }
}

impl ParticleParams {
    pub fn validate(&self) -> Result<()> {
        ensure(self.radius > 0.0 && self.radius.is_finite(), || {
            format!("particle radius must be > 0, got {}", self.radius)
        })?;
        ensure(self.density > 0.0 && self.density.is_finite(), || {
            format!("particle density must be > 0, got {}", self.density)
        })?;
        ensure(self.rel_permittivity > 1.0, || {
            format!(
                "relative permittivity must exceed 1, got {}",
                self.rel_permittivity
            )
        })
    }

    pub fn volume(&self) -> f64 {
        4.0 / 3.0 * PI * self.radius.powi(3)
    }

    pub fn mass(&self) -> f64 {
        self.density * self.volume()
    }

    /// Clausius-Mossotti polarizability `3 eps0 V (eps - 1)/(eps + 2)`, F m^2.
    pub fn polarizability(&self) -> f64 {
        let eps = self.rel_permittivity;
        3.0 * EPSILON_0 * self.volume() * (eps - 1.0) / (eps + 2.0)
    }
}

/// Complex axial field of one beam, split into real envelope and phase.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FieldSample {
    /// `E * a(z - z_s)`, V/m.
    pub amplitude: f64,
    /// Accumulated phase, rad.
    pub phase: f64,
}

/// `0.61 lambda / NA`.
pub fn diffraction_limited_waist(wavelength: f64, numerical_aperture: f64) -> f64 {
    0.61 * wavelength / numerical_aperture
}

/// Gaussian envelope `a(z) = w0 / w(z)` at distance `z` from the focus.
pub fn envelope(z: f64, beam: &BeamParams) -> f64 {
    let u = z / beam.rayleigh_range();
    1.0 / (1.0 + u * u).sqrt()
}

/// Gouy phase `atan(z / z_r)` at distance `z` from the focus.
pub fn gouy_phase(z: f64, beam: &BeamParams) -> f64 {
    (z / beam.rayleigh_range()).atan()
}

/// `E = sqrt(4 P / (pi w0^2 eps0 c))`, the focal amplitude for peak intensity
/// `2 P / (pi w0^2)`.
pub fn field_amplitude_from_power(beam: &BeamParams) -> f64 {
    (4.0 * beam.power / (PI * beam.waist * beam.waist * EPSILON_0 * SPEED_OF_LIGHT)).sqrt()
}

/// Field of `beam` at axial position `z` (tweezer frame).
///
/// A co-propagating beam carries `Phi(u) = -k u + psi(u)`; a counter-propagating
/// beam is its mirror image `Phi(-u) = k u - psi(u)`, with `u = z - z_s`.
pub fn field_at(z: f64, beam: &BeamParams) -> FieldSample {
    let p = Profile::eval(z, beam);
    FieldSample {
        amplitude: p.amplitude,
        phase: p.phase,
    }
}

/// Amplitude, phase and their axial derivatives.
#[derive(Debug, Clone, Copy)]
struct Profile {
    amplitude: f64,
    d_amplitude: f64,
    phase: f64,
    d_phase: f64,
}

impl Profile {
    fn eval(z: f64, beam: &BeamParams) -> Self {
        let zr = beam.rayleigh_range();
        let k = beam.wavenumber();
        let e0 = field_amplitude_from_power(beam);
        let u = z - beam.focus_offset;
        let s = 1.0 + (u / zr) * (u / zr);
        let a = 1.0 / s.sqrt();
        let da = -u / (zr * zr) * a / s;
        let psi = (u / zr).atan();
        let dpsi = 1.0 / (zr * s);
        let (phase, d_phase) = match beam.direction {
            Direction::Co => (-k * u + psi + beam.phase, -k + dpsi),
            Direction::Counter => (k * u - psi + beam.phase, k - dpsi),
        };
        Self {
            amplitude: e0 * a,
            d_amplitude: e0 * da,
            phase,
            d_phase,
        }
    }
}

fn check_pair(tweezer: &BeamParams, signal: &BeamParams, particle: &ParticleParams) -> Result<()> {
    tweezer.validate()?;
    signal.validate()?;
    particle.validate()?;
    let rel = (tweezer.wavelength - signal.wavelength).abs() / tweezer.wavelength;
    ensure(rel < 1e-12, || {
        format!(
            "tweezer and signal wavelengths differ ({} m vs {} m); interference needs one frequency",
            tweezer.wavelength, signal.wavelength
        )
    })
}

/// Interference potential of the two beams, J.
pub fn total_potential(
    z: f64,
    tweezer: &BeamParams,
    signal: &BeamParams,
    particle: &ParticleParams,
) -> Result<f64> {
    check_pair(tweezer, signal, particle)?;
    Ok(potential_unchecked(
        z,
        tweezer,
        signal,
        particle.polarizability(),
    ))
}

fn potential_unchecked(z: f64, tweezer: &BeamParams, signal: &BeamParams, alpha: f64) -> f64 {
    let t = field_at(z, tweezer);
    let s = field_at(z, signal);
    let intensity = t.amplitude * t.amplitude
        + s.amplitude * s.amplitude
        + 2.0 * t.amplitude * s.amplitude * (s.phase - t.phase).cos();
    -0.25 * alpha * intensity
}

/// `-dU/dz` by central difference with step `step`. Independent of the
/// analytic gradient below.
pub fn force_numeric(
    z: f64,
    tweezer: &BeamParams,
    signal: &BeamParams,
    particle: &ParticleParams,
    step: f64,
) -> Result<f64> {
    check_pair(tweezer, signal, particle)?;
    ensure(step > 0.0 && step.is_finite(), || {
        format!("finite-difference step must be > 0, got {step}")
    })?;
    let alpha = particle.polarizability();
    let up = potential_unchecked(z + step, tweezer, signal, alpha);
    let down = potential_unchecked(z - step, tweezer, signal, alpha);
    Ok(-(up - down) / (2.0 * step))
}

/// Axial force split by origin of the intensity term.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ForceTerms {
    /// From the tweezer intensity alone (restoring force).
    pub tweezer: f64,
    /// From the signal intensity alone (`F_s0`).
    pub standalone: f64,
    /// From the tweezer-signal cross term (`F_si`).
    pub interference: f64,
}

impl ForceTerms {
    pub fn total(&self) -> f64 {
        self.tweezer + self.standalone + self.interference
    }
}

/// Exact analytic `-dU/dz` at `z`, decomposed into its three terms.
pub fn force_analytic(
    z: f64,
    tweezer: &BeamParams,
    signal: &BeamParams,
    particle: &ParticleParams,
) -> Result<ForceTerms> {
    check_pair(tweezer, signal, particle)?;
    Ok(force_terms_unchecked(
        z,
        tweezer,
        signal,
        particle.polarizability(),
    ))
}

pub(crate) fn force_terms_unchecked(
    z: f64,
    tweezer: &BeamParams,
    signal: &BeamParams,
    alpha: f64,
) -> ForceTerms {
    let t = Profile::eval(z, tweezer);
    let s = Profile::eval(z, signal);
    let delta = s.phase - t.phase;
    let d_delta = s.d_phase - t.d_phase;
    let half_alpha = 0.5 * alpha;
    ForceTerms {
        tweezer: half_alpha * t.amplitude * t.d_amplitude,
        standalone: half_alpha * s.amplitude * s.d_amplitude,
        interference: half_alpha
            * ((t.d_amplitude * s.amplitude + t.amplitude * s.d_amplitude) * delta.cos()
                - t.amplitude * s.amplitude * delta.sin() * d_delta),
    }
}

/// Signal-induced force at the tweezer focus.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OriginForce {
    /// `F_s0`: the signal beam's own gradient force.
    pub standalone: f64,
    /// `F_si`: the interference force.
    pub interference: f64,
}

impl OriginForce {
    pub fn total(&self) -> f64 {
        self.standalone + self.interference
    }
}

/// Closed-form signal-induced force at `z = 0`, valid for any focus offset
/// and either geometry. Its leading order in `z_s / z_r` is
/// [`force_expansion_origin`].
pub fn force_analytic_origin(
    tweezer: &BeamParams,
    signal: &BeamParams,
    particle: &ParticleParams,
) -> Result<OriginForce> {
    let terms = force_analytic(0.0, tweezer, signal, particle)?;
    Ok(OriginForce {
        standalone: terms.standalone,
        interference: terms.interference,
    })
}

/// Small-offset expansion of the co-propagating force at the origin:
///
/// ```text
/// F_s0 = (alpha/2) (z_s / z_r^2) E_s^2
/// F_si = (alpha/2) (z_s / z_r^2) cos(k z_s + phi(z_s)) E_tw E_s
/// phi(z_s) = phi_s - atan(z_s / z_r)
/// ```
///
/// Relative truncation error is `O((z_s/z_r)^2)` plus `O(z_s/z_r * tan)` of
/// the cross-term phase, so it is only offered for `|z_s| < 0.05 z_r` and
/// matching beam profiles.
pub fn force_expansion_origin(
    tweezer: &BeamParams,
    signal: &BeamParams,
    particle: &ParticleParams,
) -> Result<OriginForce> {
    check_pair(tweezer, signal, particle)?;
    ensure(signal.direction == Direction::Co, || {
        "the small-offset expansion covers co-propagation only".to_string()
    })?;
    ensure(
        (tweezer.waist - signal.waist).abs() <= 1e-12 * tweezer.waist,
        || "the small-offset expansion assumes equal beam waists".to_string(),
    )?;
    let zr = tweezer.rayleigh_range();
    let zs = signal.focus_offset;
    let limit = EXPANSION_LIMIT * zr;
    if zs.abs() >= limit {
        return Err(Error::OutOfValidity {
            focus_offset: zs,
            limit,
        });
    }
    let alpha = particle.polarizability();
    let e_tw = tweezer.field_amplitude();
    let e_s = signal.field_amplitude();
    let prefactor = 0.5 * alpha * zs / (zr * zr);
    Ok(OriginForce {
        standalone: prefactor * e_s * e_s,
        interference: prefactor * interference_phase_cos(tweezer, signal) * e_tw * e_s,
    })
}

/// `cos(k z_s + phi(z_s))` of the co-propagating cross term at the origin.
pub fn interference_phase_cos(tweezer: &BeamParams, signal: &BeamParams) -> f64 {
    let zs = signal.focus_offset;
    let phi = signal.phase - gouy_phase(zs, tweezer);
    (tweezer.wavenumber() * zs + phi).cos()
}

/// Interference force at the origin for a counter-propagating signal beam.
pub fn counter_force_origin(
    tweezer: &BeamParams,
    signal: &BeamParams,
    particle: &ParticleParams,
) -> Result<f64> {
    ensure(signal.direction == Direction::Counter, || {
        "counter_force_origin needs a counter-propagating signal beam".to_string()
    })?;
    Ok(force_analytic_origin(tweezer, signal, particle)?.interference)
}

/// Peak of `F_si` over the signal phase `phi_s`, at the origin.
///
/// `F_si` is sinusoidal in `phi_s`, so two quadrature evaluations fix its
/// amplitude exactly.
pub fn interference_force_amplitude(
    tweezer: &BeamParams,
    signal: &BeamParams,
    particle: &ParticleParams,
) -> Result<f64> {
    let in_phase = force_analytic_origin(tweezer, signal, particle)?.interference;
    let quadrature = force_analytic_origin(
        tweezer,
        &signal.with_phase(signal.phase + 0.5 * PI),
        particle,
    )?
    .interference;
    Ok(in_phase.hypot(quadrature))
}

/// Harmonic expansion of the tweezer potential at its focus.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TrapStiffness {
    /// Axial trap frequency, rad/s.
    pub omega_z: f64,
    /// Axial spring constant `d^2U/dz^2`, N/m.
    pub kappa_z: f64,
}

/// `kappa_z = alpha E_tw^2 / (2 z_r^2)`, `Omega_z = sqrt(kappa_z / m)`.
pub fn trap_stiffness(tweezer: &BeamParams, particle: &ParticleParams) -> Result<TrapStiffness> {
    tweezer.validate()?;
    particle.validate()?;
    ensure(tweezer.power > 0.0, || {
        "trap needs tweezer power > 0".to_string()
    })?;
    let zr = tweezer.rayleigh_range();
    let e = tweezer.field_amplitude();
    let kappa_z = particle.polarizability() * e * e / (2.0 * zr * zr);
    Ok(TrapStiffness {
        omega_z: (kappa_z / particle.mass()).sqrt(),
        kappa_z,
    })
}

/// Waist for which the paraxial trap reproduces a measured axial frequency.
///
/// `kappa_z = 2 alpha P lambda^2 / (pi^3 eps0 c w0^6)` is inverted for `w0`.
pub fn waist_for_trap_frequency(
    omega_z: f64,
    power: f64,
    wavelength: f64,
    particle: &ParticleParams,
) -> Result<f64> {
    particle.validate()?;
    ensure(omega_z > 0.0 && power > 0.0 && wavelength > 0.0, || {
        "trap frequency, power and wavelength must be > 0".to_string()
    })?;
    let kappa_z = particle.mass() * omega_z * omega_z;
    let w6 = 2.0 * particle.polarizability() * power * wavelength * wavelength
        / (PI.powi(3) * EPSILON_0 * SPEED_OF_LIGHT * kappa_z);
    Ok(w6.powf(1.0 / 6.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn tweezer() -> BeamParams {
        BeamParams::new(0.414, 1064e-9, 600e-9)
    }

    #[test]
    fn envelope_reference_points() {
        let b = tweezer();
        let zr = b.rayleigh_range();
        assert_eq!(envelope(0.0, &b), 1.0);
        assert_relative_eq!(envelope(zr, &b), 1.0 / 2f64.sqrt(), max_relative = 1e-15);
        assert_relative_eq!(
            envelope(2.0 * zr, &b),
            1.0 / 5f64.sqrt(),
            max_relative = 1e-15
        );
        assert_eq!(envelope(-0.3 * zr, &b), envelope(0.3 * zr, &b));
    }

    #[test]
    fn gouy_reference_points() {
        let b = tweezer();
        let zr = b.rayleigh_range();
        assert_eq!(gouy_phase(0.0, &b), 0.0);
        assert_relative_eq!(gouy_phase(zr, &b), PI / 4.0, max_relative = 1e-15);
        assert_relative_eq!(gouy_phase(-zr, &b), -PI / 4.0, max_relative = 1e-15);
    }

    #[test]
    fn field_amplitude_closed_form() {
        let b = tweezer();
        assert_eq!(field_amplitude_from_power(&b.with_power(0.0)), 0.0);
        // 4 * 0.414 / (pi * (600e-9)^2 * eps0 * c), evaluated by hand
        let expected = (1.656 / (PI * 3.6e-13 * EPSILON_0 * SPEED_OF_LIGHT)).sqrt();
        assert_relative_eq!(b.field_amplitude(), expected, max_relative = 1e-14);
        assert!((b.field_amplitude() - 2.3495e7).abs() / 2.3495e7 < 1e-3);
        let quad = b.with_power(4.0 * b.power).field_amplitude();
        assert_relative_eq!(quad, 2.0 * b.field_amplitude(), max_relative = 1e-14);
    }

    #[test]
    fn wavelength_mismatch_rejected() {
        let t = tweezer();
        let s = BeamParams::new(1e-6, 1550e-9, 600e-9);
        let err = total_potential(0.0, &t, &s, &ParticleParams::default()).unwrap_err();
        assert!(matches!(err, Error::InvalidConfiguration(_)));
    }

    #[test]
    fn single_beam_limits() {
        let p = ParticleParams::default();
        let t = tweezer();
        let off = t.with_power(0.0);
        let zr = t.rayleigh_range();
        let e = t.field_amplitude();
        for z in [0.0, 0.2 * zr, -1.3 * zr] {
            let a = envelope(z, &t);
            let u = total_potential(z, &t, &off, &p).unwrap();
            assert_relative_eq!(
                u,
                -0.25 * p.polarizability() * e * e * a * a,
                max_relative = 1e-14
            );
            assert!(u >= total_potential(0.0, &t, &off, &p).unwrap());
        }
        // swapping roles with z_s = 0 gives the same shape
        let s = t.with_power(1e-6);
        let u_s = total_potential(0.4 * zr, &off, &s, &p).unwrap();
        let u_t = total_potential(0.4 * zr, &s, &off, &p).unwrap();
        assert_relative_eq!(u_s, u_t, max_relative = 1e-14);
    }

    #[test]
    fn constructive_interference_at_zero_offset() {
        let p = ParticleParams::default();
        let t = tweezer();
        let s = t.with_power(1e-3);
        let sum = t.field_amplitude() + s.field_amplitude();
        for z in [0.0, 0.5 * t.rayleigh_range()] {
            let a = envelope(z, &t);
            let expected = -0.25 * p.polarizability() * sum * sum * a * a;
            assert_relative_eq!(
                total_potential(z, &t, &s, &p).unwrap(),
                expected,
                max_relative = 1e-13
            );
        }
    }

    #[test]
    fn stationary_points_have_zero_force() {
        let p = ParticleParams::default();
        let t = tweezer();
        let h = t.rayleigh_range() * 1e-5;
        let scale = trap_stiffness(&t, &p).unwrap().kappa_z * t.rayleigh_range();
        let f = force_numeric(0.0, &t, &t.with_power(0.0), &p, h).unwrap();
        assert!(f.abs() < 1e-12 * scale);
        let f = force_numeric(0.0, &t, &t.with_power(1e-6), &p, h).unwrap();
        assert!(f.abs() < 1e-12 * scale);
        assert!(force_numeric(0.0, &t, &t, &p, 0.0).is_err());
    }

    #[test]
    fn expansion_rejects_large_offsets() {
        let t = tweezer();
        let zr = t.rayleigh_range();
        let s = t.with_power(1e-6).with_focus_offset(0.1 * zr);
        let err = force_expansion_origin(&t, &s, &ParticleParams::default()).unwrap_err();
        assert!(matches!(err, Error::OutOfValidity { .. }));
        let zero =
            force_expansion_origin(&t, &t.with_power(1e-6), &ParticleParams::default()).unwrap();
        assert_eq!(zero.standalone, 0.0);
        assert_eq!(zero.interference, 0.0);
    }

    #[test]
    fn counter_force_requires_counter_beam() {
        let t = tweezer();
        let s = t.with_power(1e-6).with_focus_offset(1e-8);
        assert!(counter_force_origin(&t, &s, &ParticleParams::default()).is_err());
        let s = s.with_direction(Direction::Counter).with_power(0.0);
        assert_eq!(
            counter_force_origin(&t, &s, &ParticleParams::default()).unwrap(),
            0.0
        );
    }

    #[test]
    fn stiffness_matches_second_difference() {
        let p = ParticleParams::default();
        let t = tweezer();
        let off = t.with_power(0.0);
        let h = t.rayleigh_range() * 1e-3;
        let u = |z: f64| total_potential(z, &t, &off, &p).unwrap();
        let curvature = (u(h) - 2.0 * u(0.0) + u(-h)) / (h * h);
        let stiff = trap_stiffness(&t, &p).unwrap();
        assert_relative_eq!(stiff.kappa_z, curvature, max_relative = 1e-6);
        let doubled = trap_stiffness(&t.with_power(2.0 * t.power), &p).unwrap();
        assert_relative_eq!(doubled.kappa_z, 2.0 * stiff.kappa_z, max_relative = 1e-14);
        assert_relative_eq!(
            doubled.omega_z,
            2f64.sqrt() * stiff.omega_z,
            max_relative = 1e-14
        );
    }

    #[test]
    fn waist_back_solve_round_trips() {
        let p = ParticleParams::default();
        let t = tweezer();
        let omega = trap_stiffness(&t, &p).unwrap().omega_z;
        let w0 = waist_for_trap_frequency(omega, t.power, t.wavelength, &p).unwrap();
        assert_relative_eq!(w0, t.waist, max_relative = 1e-12);
    }

    #[test]
    fn silica_particle_defaults() {
        let p = ParticleParams::default();
        assert_relative_eq!(p.mass(), 2.7735e-18, max_relative = 1e-4);
        assert!(p.polarizability() > 0.0);
        let bad = ParticleParams {
            rel_permittivity: 1.0,
            ..p
        };
        assert!(bad.validate().is_err());
    }
}

//! BAOAB splitting for the underdamped Langevin equation
//!
//! ```text
//! m z'' = F(z, t) - m (gamma + g_fb) z' + xi(t),  <xi(t) xi(t')> = 2 m gamma k_B T delta(t - t')
//! ```
//!
//! The O step is the exact Ornstein-Uhlenbeck update of the velocity, so the
//! velocity stays Maxwellian at `T gamma / (gamma + g_fb)` for any `dt`.
//! For a harmonic force the scheme samples the position marginal exactly.

use crate::constants::BOLTZMANN;
use crate::error::{Error, Result};

/// Axial mechanical mode.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MotionParams {
    /// kg
    pub mass: f64,
    /// Gas damping rate, 1/s.
    pub gamma: f64,
    /// Cold-damping rate added by feedback, 1/s.
    pub feedback_gain: f64,
    /// K
    pub temperature: f64,
}

impl MotionParams {
    pub fn total_damping(&self) -> f64 {
        self.gamma + self.feedback_gain
    }

    /// Temperature the mode equilibrates to under cold damping.
    pub fn effective_temperature(&self) -> f64 {
        let total = self.total_damping();
        if total > 0.0 {
            self.temperature * self.gamma / total
        } else {
            self.temperature
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct State {
    /// m
    pub z: f64,
    /// m/s
    pub v: f64,
}

#[derive(Debug, Clone, Copy)]
pub struct Baoab {
    dt: f64,
    inv_mass: f64,
    friction: f64,
    noise: f64,
}

impl Baoab {
    pub fn new(params: &MotionParams, dt: f64) -> Self {
        let total = params.total_damping();
        let friction = (-total * dt).exp();
        let noise = if total > 0.0 {
            // gamma k_B T / (m (gamma + g)) * (1 - e^{-2 (gamma + g) dt})
            (params.gamma * BOLTZMANN * params.temperature / (params.mass * total)
                * -(-2.0 * total * dt).exp_m1())
            .sqrt()
        } else {
            0.0
        };
        Self {
            dt,
            inv_mass: 1.0 / params.mass,
            friction,
            noise,
        }
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    /// One step from `t` to `t + dt`.
    ///
    /// `force` holds `F(z, t)` on entry and `F(z', t + dt)` on exit, so each
    /// step costs one force evaluation. `normal` is a standard-normal draw.
    #[inline]
    pub fn step(
        &self,
        state: &mut State,
        force: &mut f64,
        t: f64,
        normal: f64,
        mut force_at: impl FnMut(f64, f64) -> f64,
    ) {
        let half = 0.5 * self.dt;
        state.v += half * *force * self.inv_mass;
        state.z += half * state.v;
        state.v = self.friction * state.v + self.noise * normal;
        state.z += half * state.v;
        *force = force_at(state.z, t + self.dt);
        state.v += half * *force * self.inv_mass;
    }
}

/// Single BAOAB update with an explicit force function; `step_index` names
/// the step in the divergence error.
pub fn step(
    state: State,
    t: f64,
    integrator: &Baoab,
    normal: f64,
    step_index: u64,
    force_at: impl FnMut(f64, f64) -> f64,
) -> Result<State> {
    let mut force_at = force_at;
    let mut next = state;
    let mut force = force_at(state.z, t);
    integrator.step(&mut next, &mut force, t, normal, &mut force_at);
    check_finite(&next, step_index)?;
    Ok(next)
}

#[inline]
pub(crate) fn check_finite(state: &State, step_index: u64) -> Result<()> {
    if state.z.is_finite() && state.v.is_finite() {
        Ok(())
    } else {
        Err(Error::Diverged { step: step_index })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::TAU;

    const MASS: f64 = 2.77e-18;

    fn harmonic(omega: f64) -> impl FnMut(f64, f64) -> f64 {
        move |z, _| -MASS * omega * omega * z
    }

    #[test]
    fn frictionless_energy_is_conserved() {
        let omega = TAU * 83.8e3;
        let params = MotionParams {
            mass: MASS,
            gamma: 0.0,
            feedback_gain: 0.0,
            temperature: 0.0,
        };
        let dt = 0.05 / omega;
        let baoab = Baoab::new(&params, dt);
        let z0 = 1e-9;
        let mut state = State { z: z0, v: 0.0 };
        let mut force_at = harmonic(omega);
        let mut force = force_at(z0, 0.0);
        let energy = |s: &State| 0.5 * MASS * s.v * s.v + 0.5 * MASS * omega * omega * s.z * s.z;
        let e0 = energy(&state);
        let mut worst: f64 = 0.0;
        for i in 0..100_000 {
            baoab.step(&mut state, &mut force, i as f64 * dt, 0.0, &mut force_at);
            worst = worst.max((energy(&state) - e0).abs() / e0);
        }
        // velocity Verlet: bounded energy error of order (omega dt)^2 / 4
        assert!(worst < 0.25 * (omega * dt).powi(2) * 1.1, "drift {worst}");
        assert!(worst > 0.0);
    }

    #[test]
    fn cold_damped_amplitude_decays_at_half_gamma() {
        let omega = TAU * 83.8e3;
        let gamma = 2000.0;
        let params = MotionParams {
            mass: MASS,
            gamma,
            feedback_gain: 0.0,
            temperature: 0.0,
        };
        let dt = 0.05 / omega;
        let baoab = Baoab::new(&params, dt);
        let mut state = State { z: 1e-9, v: 0.0 };
        let mut force_at = harmonic(omega);
        let mut force = force_at(state.z, 0.0);
        let steps = (2.0 / gamma / dt).round() as usize; // two amplitude e-folds
        for i in 0..steps {
            baoab.step(&mut state, &mut force, i as f64 * dt, 0.0, &mut force_at);
        }
        let t = steps as f64 * dt;
        let amplitude = (state.z.powi(2) + (state.v / omega).powi(2)).sqrt();
        let expected = 1e-9 * (-0.5 * gamma * t).exp();
        assert!(
            (amplitude - expected).abs() / expected < 0.01,
            "amplitude {amplitude}, expected {expected}"
        );
    }

    #[test]
    fn divergence_names_step() {
        let params = MotionParams {
            mass: MASS,
            gamma: 0.0,
            feedback_gain: 0.0,
            temperature: 0.0,
        };
        let baoab = Baoab::new(&params, 1e-7);
        let err = step(State { z: 1.0, v: 0.0 }, 0.0, &baoab, 0.0, 42, |_, _| {
            f64::INFINITY
        })
        .unwrap_err();
        assert_eq!(err, Error::Diverged { step: 42 });
    }

    #[test]
    fn effective_temperature_under_feedback() {
        let params = MotionParams {
            mass: MASS,
            gamma: 100.0,
            feedback_gain: 300.0,
            temperature: 300.0,
        };
        assert!((params.effective_temperature() - 75.0).abs() < 1e-12);
    }
}

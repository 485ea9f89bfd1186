//! Interference-enhanced optical force sensing with a levitated nanoparticle.
//!
//! * [`optics`]: two-beam axial dipole potential and forces.
//! * [`dynamics`]: Langevin simulation of the trapped particle.
//! * [`readout`]: detection, PSD estimation, calibration and force back-out.
//! * [`sensing`]: analytic force and light-power sensitivity.
//!
//! All quantities are SI.

pub mod constants;
pub mod dynamics;
pub mod error;
pub mod optics;
pub mod readout;
pub mod sensing;
pub mod stats;

pub use error::{Error, Result};

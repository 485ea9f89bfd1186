use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid configuration: {0}")]
    InvalidConfiguration(String),

    #[error(
        "focus offset {focus_offset:e} m is outside the small-offset expansion \
         (|z_s| < {limit:e} m); use the exact or finite-difference force"
    )]
    OutOfValidity { focus_offset: f64, limit: f64 },

    #[error("integration diverged at step {step}")]
    Diverged { step: u64 },

    #[error("insufficient samples: need {required}, have {available}")]
    InsufficientSamples { required: usize, available: usize },

    #[error("sample-rate mismatch: trace at {trace} Hz, readout expects {readout} Hz")]
    SampleRateMismatch { trace: f64, readout: f64 },

    #[error("band [{low} Hz, {high} Hz] lies outside the spectrum [0, {nyquist} Hz]")]
    BandOutOfRange { low: f64, high: f64, nyquist: f64 },

    #[error("calibration failed: {0}")]
    CalibrationFailed(String),
}

pub(crate) fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(Error::InvalidConfiguration(msg()))
    }
}

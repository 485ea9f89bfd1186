//! Small descriptive statistics used by the estimators and scenarios.

use serde::Serialize;

use crate::error::{ensure, Result};

pub fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Population variance about the sample mean.
pub fn variance(xs: &[f64]) -> f64 {
    let m = mean(xs);
    xs.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / xs.len() as f64
}

/// Ordinary least squares `y = slope x + intercept`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LinearFit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
}

pub fn linear_fit(x: &[f64], y: &[f64]) -> Result<LinearFit> {
    ensure(x.len() == y.len() && x.len() >= 2, || {
        format!(
            "fit needs two equal-length series of >= 2 points, got {} and {}",
            x.len(),
            y.len()
        )
    })?;
    let (mx, my) = (mean(x), mean(y));
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let syy: f64 = y.iter().map(|b| (b - my).powi(2)).sum();
    ensure(sxx > 0.0, || "fit abscissae are all equal".to_string())?;
    let slope = sxy / sxx;
    let r_squared = if syy > 0.0 {
        sxy * sxy / (sxx * syy)
    } else {
        1.0
    };
    Ok(LinearFit {
        slope,
        intercept: my - slope * mx,
        r_squared,
    })
}

/// Fit of `ln y` against `ln x`; all values must be positive.
pub fn log_log_fit(x: &[f64], y: &[f64]) -> Result<LinearFit> {
    ensure(x.iter().chain(y).all(|&v| v > 0.0), || {
        "log-log fit needs positive values".to_string()
    })?;
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    linear_fit(&lx, &ly)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_line() {
        let x = [1.0, 2.0, 3.0, 4.0];
        let y: Vec<f64> = x.iter().map(|v| 3.0 * v - 1.0).collect();
        let fit = linear_fit(&x, &y).unwrap();
        assert!((fit.slope - 3.0).abs() < 1e-12);
        assert!((fit.intercept + 1.0).abs() < 1e-12);
        assert!((fit.r_squared - 1.0).abs() < 1e-12);
    }

    #[test]
    fn power_law() {
        let x = [66e-9, 146e-9, 493e-9];
        let y: Vec<f64> = x.iter().map(|v| 2.5 * v).collect();
        let fit = log_log_fit(&x, &y).unwrap();
        assert!((fit.slope - 1.0).abs() < 1e-12);
        assert!(log_log_fit(&[1.0, -1.0], &[1.0, 1.0]).is_err());
    }
}

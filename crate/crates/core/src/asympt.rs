//! Phase-transition maps.
//!
//! With `n = (d / 2x)^(d/2 + beta)` the expected normalized volume tends to
//! `e^-x` as `d -> infinity`. The maps below fix the vanishing correction in
//! the threshold to zero, which makes [`threshold_log_n`] and [`x_of`] exact
//! inverses. The predictor is a pointwise value: it carries no limit claim
//! for sequences along which it oscillates.

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

fn check_model(d: u32, beta: f64) -> Result<()> {
    if d < 2 || !(beta >= -1.0) || !beta.is_finite() {
        return Err(Error::domain(format!("need d >= 2 and beta >= -1, got d = {d}, beta = {beta}")));
    }
    Ok(())
}

/// `ln n` on the threshold curve: `(d/2 + beta) ln(d / 2x)`.
pub fn threshold_log_n(d: u32, beta: f64, x: f64) -> Result<f64> {
    check_model(d, beta)?;
    let df = f64::from(d);
    if !(x > 0.0) || !(2.0 * x < df) {
        return Err(Error::domain(format!("threshold map requires 0 < 2x < d, got x = {x}, d = {d}")));
    }
    Ok((df / 2.0 + beta) * (df / (2.0 * x)).ln())
}

/// Inverse of [`threshold_log_n`]: `x = (d/2) exp(-2 ln n / (d + 2 beta))`.
pub fn x_of(d: u32, beta: f64, log_n: f64) -> Result<f64> {
    check_model(d, beta)?;
    if !(log_n >= 0.0) || !log_n.is_finite() {
        return Err(Error::domain(format!("x_of requires finite ln n >= 0, got {log_n}")));
    }
    let df = f64::from(d);
    let scale = df + 2.0 * beta;
    if scale <= 0.0 {
        return Err(Error::domain("d + 2 beta = 0: the threshold map is degenerate (d = 2, beta = -1)"));
    }
    Ok(df / 2.0 * (-2.0 * log_n / scale).exp())
}

/// The limiting predictor `exp(-x_of(d, beta, ln n))`.
pub fn predicted_ratio(d: u32, beta: f64, log_n: f64) -> Result<f64> {
    Ok((-x_of(d, beta, log_n)?).exp())
}

/// Concentration window `(a, b)` around which the volume integral lives:
///
/// ```text
/// a = sqrt(1 - (x/D) (1 + ln(D^2 (D + beta)) / (D + beta)))
/// b = sqrt(1 - x/D)
/// ```
///
/// with `D = (d + 1) / 2`.
pub fn window(d: u32, beta: f64, x: f64) -> Result<(f64, f64)> {
    check_model(d, beta)?;
    let big_d = (f64::from(d) + 1.0) / 2.0;
    if !(x > 0.0) || !(big_d > x) {
        return Err(Error::domain(format!("window requires 0 < x < D, got x = {x}, D = {big_d}")));
    }
    let z = big_d + beta;
    let radicand_a = 1.0 - x / big_d * (1.0 + (big_d * big_d * z).ln() / z);
    if radicand_a <= 0.0 {
        return Err(Error::domain(format!(
            "window radicand for a is {radicand_a} <= 0 at x = {x}, d = {d}, beta = {beta}"
        )));
    }
    Ok((radicand_a.sqrt(), (1.0 - x / big_d).sqrt()))
}

/// One point of a phase curve.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhasePoint {
    pub d: u32,
    pub beta: f64,
    pub log_n: f64,
    pub x: f64,
    pub ratio_exact: Option<f64>,
    pub ratio_predicted: f64,
}

impl PhasePoint {
    pub fn from_x(d: u32, beta: f64, x: f64) -> Result<Self> {
        let log_n = threshold_log_n(d, beta, x)?;
        Ok(PhasePoint { d, beta, log_n, x, ratio_exact: None, ratio_predicted: (-x).exp() })
    }

    pub fn from_log_n(d: u32, beta: f64, log_n: f64) -> Result<Self> {
        let x = x_of(d, beta, log_n)?;
        Ok(PhasePoint { d, beta, log_n, x, ratio_exact: None, ratio_predicted: (-x).exp() })
    }
}

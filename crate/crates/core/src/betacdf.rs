//! The one-dimensional marginal distribution function
//! `F_{z-1}(h) = 2 z c_z \int_{-1}^h (1 - s^2)^{z-1} ds`
//! and its upper tail.
//!
//! Substituting `u = s^2` turns the integral into a regularized incomplete
//! beta function:
//!
//! ```text
//! F_{z-1}(h)     = 1/2 + sign(h)/2 * I_{h^2}(1/2, z)
//! 1 - F_{z-1}(h) = 1/2 * I_{1-h^2}(z, 1/2),   h in (0, 1)
//! ```
//!
//! The tail is evaluated in log-domain straight from the continued fraction,
//! so `ln(1 - F)` stays accurate long after `1 - F` underflows.

use std::f64::consts::LN_2;

use crate::logreal::{log_c, log_gamma_ratio, LN_SQRT_PI};
use crate::{Error, Result};

const CF_MAX_ITER: usize = 50_000;
const CF_TINY: f64 = 1e-300;

/// Above this `z` the tail comes from the midpoint of the analytic envelope.
pub const ENVELOPE_Z_CUTOFF: f64 = 1e7;

/// Parameter of `F_{z-1}`; `z = D + beta` in the volume formula.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FParams {
    z: f64,
    log_c: f64,
}

/// Two log-domain bounds on `1 - F_{z-1}(h)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TailEnvelope {
    /// `-inf` when the polynomial correction factor is not positive.
    pub lower: f64,
    pub upper: f64,
}

impl FParams {
    pub fn new(z: f64) -> Result<Self> {
        if !(z > 0.0) || !z.is_finite() {
            return Err(Error::domain(format!("F_(z-1) requires finite z > 0, got {z}")));
        }
        Ok(FParams { z, log_c: log_c(z)? })
    }

    #[inline]
    pub fn z(&self) -> f64 {
        self.z
    }

    /// `ln c_z`
    #[inline]
    pub fn log_c(&self) -> f64 {
        self.log_c
    }

    /// `F_{z-1}(h)` for `h` in `[-1, 1]`.
    pub fn cdf(&self, h: f64) -> Result<f64> {
        check_closed(h)?;
        if h == 1.0 {
            return Ok(1.0);
        }
        if h == -1.0 {
            return Ok(0.0);
        }
        if h == 0.0 {
            return Ok(0.5);
        }
        let tail = self.tail(h.abs())?;
        Ok(if h > 0.0 { tail.cdf() } else { tail.ln_tail().exp() })
    }

    /// `ln F_{z-1}(h)` for `h` in `[-1, 1]`, accurate in both tails.
    pub fn log_cdf(&self, h: f64) -> Result<f64> {
        check_closed(h)?;
        if h == 1.0 {
            return Ok(0.0);
        }
        if h == -1.0 {
            return Ok(f64::NEG_INFINITY);
        }
        if h == 0.0 {
            return Ok(-LN_2);
        }
        let tail = self.tail(h.abs())?;
        Ok(if h > 0.0 { tail.ln_cdf() } else { tail.ln_tail() })
    }

    /// `ln(1 - F_{z-1}(h))` for `h` in `(0, 1)`.
    pub fn log_one_minus_cdf(&self, h: f64) -> Result<f64> {
        check_open_unit(h)?;
        Ok(self.tail(h)?.ln_tail())
    }

    /// `ln(1 - F_{z-1}(h))` as `power + rest`, where `power` is either
    /// `z ln(1 - h^2)` or zero and `rest` is of logarithmic size.
    pub fn log_one_minus_cdf_split(&self, h: f64) -> Result<SplitTail> {
        check_open_unit(h)?;
        let t = self.tail(h)?;
        Ok(SplitTail { power: t.power, rest: t.rest })
    }

    /// `ln` of the density `2 z c_z (1 - h^2)^{z-1}` at `h` in `(-1, 1)`.
    pub fn log_density(&self, h: f64) -> f64 {
        (2.0 * self.z).ln() + self.log_c + (self.z - 1.0) * log_one_minus_sq(h)
    }

    /// Analytic bounds on the upper tail:
    /// `c_z (1-h^2)^z / h * (1 - (1-h^2) / (2 h^2 (z+1))) <= 1 - F(h) <= c_z (1-h^2)^z / h`.
    pub fn envelope_tail(&self, h: f64) -> Result<TailEnvelope> {
        check_open_unit(h)?;
        let upper = self.log_c + self.z * log_one_minus_sq(h) - h.ln();
        let factor = 1.0 - (1.0 - h * h) / (2.0 * h * h * (self.z + 1.0));
        let lower = if factor > 0.0 { upper + factor.ln() } else { f64::NEG_INFINITY };
        Ok(TailEnvelope { lower, upper })
    }

    fn tail(&self, h: f64) -> Result<Tail> {
        debug_assert!(h > 0.0 && h < 1.0);
        let z = self.z;
        let h2 = h * h;
        let x = (1.0 - h) * (1.0 + h);
        let ln_x = log_one_minus_sq(h);
        if z > ENVELOPE_Z_CUTOFF {
            let factor = 1.0 - x / (2.0 * h2 * (z + 1.0));
            if factor > 0.0 {
                // midpoint of the envelope, half-width as the error bar
                let rest = self.log_c - h.ln() + (0.5 * (1.0 + factor)).ln();
                return Ok(Tail { power: z * ln_x, rest, head: None });
            }
        }
        if x < (z + 1.0) / (z + 2.5) {
            // I_x(z, 1/2) directly; converges fast on this side
            let (lead, rest) = log_inc_beta_cf(z, 0.5, x, ln_x, 2.0 * h.ln())?;
            Ok(Tail { power: lead, rest: rest - LN_2, head: None })
        } else {
            // small h: 1 - F = (1 - I_{h^2}(1/2, z)) / 2
            let (lead, rest) = log_inc_beta_cf(0.5, z, h2, 2.0 * h.ln(), ln_x)?;
            let j = (lead + rest).exp();
            Ok(Tail { power: 0.0, rest: (-j).ln_1p() - LN_2, head: Some(0.5 + 0.5 * j) })
        }
    }
}

/// See [`FParams::log_one_minus_cdf_split`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SplitTail {
    pub power: f64,
    pub rest: f64,
}

struct Tail {
    power: f64,
    rest: f64,
    /// `F(h)` when it was computed directly rather than as `1 - tail`.
    head: Option<f64>,
}

impl Tail {
    fn ln_tail(&self) -> f64 {
        self.power + self.rest
    }

    fn cdf(&self) -> f64 {
        self.head.unwrap_or_else(|| -self.ln_tail().exp_m1())
    }

    fn ln_cdf(&self) -> f64 {
        match self.head {
            Some(f) => f.ln(),
            None => (-self.ln_tail().exp()).ln_1p(),
        }
    }
}

/// `ln(1 - h^2)` computed as `ln(1-h) + ln(1+h)`.
#[inline]
pub fn log_one_minus_sq(h: f64) -> f64 {
    (-h).ln_1p() + h.ln_1p()
}

fn check_closed(h: f64) -> Result<()> {
    if !(-1.0..=1.0).contains(&h) {
        return Err(Error::domain(format!("h must lie in [-1, 1], got {h}")));
    }
    Ok(())
}

fn check_open_unit(h: f64) -> Result<()> {
    if !(h > 0.0 && h < 1.0) {
        return Err(Error::domain(format!("h must lie in (0, 1), got {h}")));
    }
    Ok(())
}

/// `ln I_x(a, b)` by the modified Lentz continued fraction, returned as
/// `(a ln x, remainder)`.
///
/// Only accurate for `x < (a + 1) / (a + b + 2)`; callers pick the side.
/// `ln_x` and `ln_1mx` are passed separately so callers can supply them
/// without cancellation. Only `b = 1/2` or `a = 1/2` is needed here, which
/// is what the beta-function normalization below assumes.
fn log_inc_beta_cf(a: f64, b: f64, x: f64, ln_x: f64, ln_1mx: f64) -> Result<(f64, f64)> {
    debug_assert!(a == 0.5 || b == 0.5);
    let other = if a == 0.5 { b } else { a };
    // ln B(1/2, w) = ln Gamma(1/2) - [ln Gamma(w + 1/2) - ln Gamma(w)]
    let ln_beta = LN_SQRT_PI - log_gamma_ratio(other, 0.5, 0.0)?;

    let qab = a + b;
    let qap = a + 1.0;
    let qam = a - 1.0;
    let mut c = 1.0;
    let mut d = 1.0 - qab * x / qap;
    if d.abs() < CF_TINY {
        d = CF_TINY;
    }
    d = 1.0 / d;
    let mut f = d;
    let mut converged = false;
    for m in 1..=CF_MAX_ITER {
        let m = m as f64;
        let m2 = 2.0 * m;
        let aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if d.abs() < CF_TINY {
            d = CF_TINY;
        }
        c = 1.0 + aa / c;
        if c.abs() < CF_TINY {
            c = CF_TINY;
        }
        d = 1.0 / d;
        f *= d * c;
        let aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if d.abs() < CF_TINY {
            d = CF_TINY;
        }
        c = 1.0 + aa / c;
        if c.abs() < CF_TINY {
            c = CF_TINY;
        }
        d = 1.0 / d;
        let delta = d * c;
        f *= delta;
        if (delta - 1.0).abs() < f64::EPSILON {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::Internal(format!(
            "incomplete beta continued fraction did not converge (a = {a}, b = {b}, x = {x})"
        )));
    }
    Ok((a * ln_x, b * ln_1mx - ln_beta - a.ln() + f.ln()))
}

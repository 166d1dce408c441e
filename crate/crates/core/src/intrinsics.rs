//! Intrinsic volumes through dimension reduction.
//!
//! `E V_k(P^beta_{n,d}) / V_k(B^d)` equals the volume ratio of the beta
//! polytope `P^{beta'}_{n,k}` with `beta' = (d - k)/2 + beta` and the same `n`.
//! The limit `e^-x` only applies along diverging `k`; for fixed `k` the
//! returned value is the finite-`d` ratio and nothing more.

use crate::exactvol::{expected_volume_ratio, BetaModel, QuadratureReport, SampleSize};
use crate::logreal::{log_binomial_exact, log_kappa};
use crate::{Error, Result};

/// `ln V_k(B^d) = ln C(d, k) + ln kappa_d - ln kappa_{d-k}`.
pub fn log_vk_ball(d: u32, k: u32) -> Result<f64> {
    if k > d {
        return Err(Error::domain(format!("intrinsic volume index k = {k} exceeds d = {d}")));
    }
    Ok(log_binomial_exact(u64::from(d), u64::from(k))? + log_kappa(d) - log_kappa(d - k))
}

/// `(d, beta) -> (k, (d - k)/2 + beta)`.
pub fn reduce(d: u32, k: u32, beta: f64) -> Result<(u32, f64)> {
    if k == 0 || k > d {
        return Err(Error::domain(format!("need 1 <= k <= d, got k = {k}, d = {d}")));
    }
    Ok((k, f64::from(d - k) / 2.0 + beta))
}

/// `E V_k(P^beta_{n,d}) / V_k(B^d)` with its quadrature report.
pub fn expected_intrinsic_ratio(
    d: u32,
    k: u32,
    beta: f64,
    size: &SampleSize,
    rel_tol: f64,
) -> Result<(f64, QuadratureReport)> {
    BetaModel::new(d, beta)?;
    let (d_red, beta_red) = reduce(d, k, beta)?;
    let reduced = BetaModel::new(d_red, beta_red)?;
    expected_volume_ratio(&reduced, size, rel_tol)
}

//! Exact expected volume ratio of a beta polytope.
//!
//! With `D = (d + 1) / 2`, `N = n - d - 1` and `z = D + beta`,
//!
//! ```text
//! E vol_d(P) / kappa_d = (K / kappa_d) * \int_{-1}^{1} (1 - h^2)^q F_{z-1}(h)^N dh
//! K / kappa_d         = 4 D z C(n, 2D) c_z^{2D}
//! q                   = (d + 1)(beta - 1/2) + d (d + 3) / 2 = 2 D z - 1
//! ```
//!
//! The integrand `exp(g(h))`, `g(h) = q ln(1 - h^2) + N ln F_{z-1}(h)`, is
//! unimodal on `(-1, 1)`. Near the phase transition its mass sits in a
//! window of relative width about `1 / d` close to `h = 1`, and `K` is of
//! order `exp(d^2)`, so both factors are kept in log-domain and the integral
//! is taken over `exp(g - g_max)`.
//!
//! The formula is used at `beta = -1` (points on the sphere) for every
//! `d >= 2` as well.

use std::cell::RefCell;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::asympt;
use crate::betacdf::{log_one_minus_sq, FParams, SplitTail};
use crate::logreal::{log_binomial, log_c, log_gamma_ratio, LN_SQRT_PI};
use crate::quad;
use crate::{Error, Result};

const MAX_BISECTIONS: usize = 200;
const MAX_SEGMENTS: usize = 4000;

/// The model `(d, beta)`: `n` points in the unit `d`-ball with density
/// proportional to `(1 - |x|^2)^beta`, or uniform on the sphere for `beta = -1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BetaModel {
    d: u32,
    beta: f64,
}

impl BetaModel {
    pub fn new(d: u32, beta: f64) -> Result<Self> {
        if d < 2 {
            return Err(Error::domain(format!("dimension must be at least 2, got {d}")));
        }
        if !(beta >= -1.0) || !beta.is_finite() {
            return Err(Error::domain(format!("beta must be a finite real >= -1, got {beta}")));
        }
        Ok(BetaModel { d, beta })
    }

    #[inline]
    pub fn d(&self) -> u32 {
        self.d
    }

    #[inline]
    pub fn beta(&self) -> f64 {
        self.beta
    }

    /// `D = (d + 1) / 2`
    #[inline]
    pub fn big_d(&self) -> f64 {
        (f64::from(self.d) + 1.0) / 2.0
    }

    /// `z = D + beta`
    #[inline]
    pub fn z(&self) -> f64 {
        self.big_d() + self.beta
    }

    pub fn is_sphere(&self) -> bool {
        self.beta == -1.0
    }
}

impl fmt::Display for BetaModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(d = {}, beta = {})", self.d, self.beta)
    }
}

/// Number of points: an exact integer, or `n` known only through `ln n`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SampleSize {
    exact_n: Option<u64>,
    log_n: f64,
}

impl SampleSize {
    pub fn exact(n: u64) -> Result<Self> {
        if n == 0 {
            return Err(Error::domain("sample size must be positive"));
        }
        Ok(SampleSize { exact_n: Some(n), log_n: (n as f64).ln() })
    }

    /// `n = e^log_n`, which need not be an integer or representable.
    pub fn from_log(log_n: f64) -> Result<Self> {
        if !(log_n >= 0.0) || !log_n.is_finite() {
            return Err(Error::domain(format!("ln n must be finite and >= 0, got {log_n}")));
        }
        Ok(SampleSize { exact_n: None, log_n })
    }

    #[inline]
    pub fn exact_n(&self) -> Option<u64> {
        self.exact_n
    }

    #[inline]
    pub fn log_n(&self) -> f64 {
        self.log_n
    }

    /// Checks `n >= d + 1`.
    pub fn check_for(&self, model: &BetaModel) -> Result<()> {
        let d1 = u64::from(model.d()) + 1;
        let ok = match self.exact_n {
            Some(n) => n >= d1,
            None => self.log_n >= (d1 as f64).ln() * (1.0 - 1e-15),
        };
        if !ok {
            return Err(Error::domain(format!(
                "need n >= d + 1 = {d1}, got {}",
                self.exact_n.map_or_else(|| format!("ln n = {}", self.log_n), |n| n.to_string())
            )));
        }
        Ok(())
    }

    /// `N = n - d - 1` when `n` is exact.
    pub fn excess_exact(&self, d: u32) -> Option<u64> {
        self.exact_n.map(|n| n.saturating_sub(u64::from(d) + 1))
    }

    /// `ln N`, `-inf` when `N = 0`.
    pub fn log_excess(&self, d: u32) -> f64 {
        let d1 = f64::from(d) + 1.0;
        match self.exact_n {
            Some(_) => {
                let big_n = self.excess_exact(d).unwrap();
                if big_n == 0 {
                    f64::NEG_INFINITY
                } else {
                    (big_n as f64).ln()
                }
            }
            None => {
                let frac = (d1.ln() - self.log_n).exp();
                if frac >= 1.0 {
                    f64::NEG_INFINITY
                } else {
                    self.log_n + (-frac).ln_1p()
                }
            }
        }
    }
}

impl fmt::Display for SampleSize {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.exact_n {
            Some(n) => write!(f, "n = {n}"),
            None => write!(f, "ln n = {}", self.log_n),
        }
    }
}

/// `ln(K / kappa_d)` and the exponent `q`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NormalizationConstants {
    pub log_k_over_kappa: f64,
    pub q: f64,
}

pub fn constants(model: &BetaModel, size: &SampleSize) -> Result<NormalizationConstants> {
    size.check_for(model)?;
    let big_d = model.big_d();
    let z = model.z();
    let d = f64::from(model.d());
    let two_d = u64::from(model.d()) + 1;
    let log_k_over_kappa = (4.0 * big_d * z).ln() + log_binomial(size, two_d)? + 2.0 * big_d * log_c(z)?;
    let q = (d + 1.0) * (model.beta() - 0.5) + d * (d + 3.0) / 2.0;
    Ok(NormalizationConstants { log_k_over_kappa, q })
}

/// The log-integrand `g(h) = q ln(1 - h^2) + N ln F_{z-1}(h)` with its
/// parameters resolved once.
#[derive(Debug, Clone)]
pub struct VolumeIntegrand {
    model: BetaModel,
    q: f64,
    log_big_n: f64,
    f: FParams,
    failure: RefCell<Option<Error>>,
}

impl VolumeIntegrand {
    pub fn new(model: &BetaModel, size: &SampleSize) -> Result<Self> {
        let c = constants(model, size)?;
        Ok(VolumeIntegrand {
            model: *model,
            q: c.q,
            log_big_n: size.log_excess(model.d()),
            f: FParams::new(model.z())?,
            failure: RefCell::new(None),
        })
    }

    /// `ln N`
    pub fn log_excess(&self) -> f64 {
        self.log_big_n
    }

    pub fn q(&self) -> f64 {
        self.q
    }

    pub fn f_params(&self) -> &FParams {
        &self.f
    }

    /// `g(h)`; `-inf` at `h = +-1`.
    pub fn log_value(&self, h: f64) -> Result<f64> {
        if !(-1.0..=1.0).contains(&h) {
            return Err(Error::domain(format!("h must lie in [-1, 1], got {h}")));
        }
        if h.abs() == 1.0 {
            return Ok(f64::NEG_INFINITY);
        }
        Ok(self.q * log_one_minus_sq(h) + self.n_log_cdf(h)?)
    }

    /// `N ln F(h)`, formed as `-exp(ln N + ln(-ln F))` so that neither a huge
    /// `N` nor a tail below the `f64` range loses the product.
    fn n_log_cdf(&self, h: f64) -> Result<f64> {
        if self.log_big_n == f64::NEG_INFINITY {
            return Ok(0.0);
        }
        let e = self.neg_log_cdf_exponent(h)?;
        Ok(-(self.log_big_n + e.power + e.rest).exp())
    }

    /// `ln(-ln F(h))` split like [`FParams::log_one_minus_cdf_split`].
    fn neg_log_cdf_exponent(&self, h: f64) -> Result<SplitTail> {
        if h > 0.0 {
            let t = self.f.log_one_minus_cdf_split(h)?;
            let ln_tail = t.power + t.rest;
            // ln(-ln(1 - T)) - ln T
            let excess = if ln_tail < -30.0 { 0.5 * ln_tail.exp() } else { (-(-ln_tail.exp()).ln_1p()).ln() - ln_tail };
            Ok(SplitTail { power: t.power, rest: t.rest + excess })
        } else {
            Ok(SplitTail { power: 0.0, rest: (-self.f.log_cdf(h)?).ln() })
        }
    }

    /// `g(h) - g(centre)` without forming the large values separately: the
    /// power terms go through `ln1p((c - h)(c + h) / (1 - c^2))`.
    pub fn log_value_relative(&self, h: f64, centre: &Centre) -> Result<f64> {
        if !(-1.0..=1.0).contains(&h) {
            return Err(Error::domain(format!("h must lie in [-1, 1], got {h}")));
        }
        if h.abs() == 1.0 {
            return Ok(f64::NEG_INFINITY);
        }
        let c = centre.h;
        let log_ratio = ((c - h) * (c + h) / ((1.0 - c) * (1.0 + c))).ln_1p();
        let power = self.q * log_ratio;
        if self.log_big_n == f64::NEG_INFINITY {
            return Ok(power);
        }
        let e = self.neg_log_cdf_exponent(h)?;
        let base = self.log_big_n + centre.exponent.power + centre.exponent.rest;
        if base > 700.0 {
            return Ok(power + (centre.n_log_cdf - (self.log_big_n + e.power + e.rest).exp()));
        }
        let d_power = if e.power != 0.0 && centre.exponent.power != 0.0 {
            self.f.z() * log_ratio
        } else {
            e.power - centre.exponent.power
        };
        let delta = d_power + (e.rest - centre.exponent.rest);
        Ok(power - base.exp() * delta.exp_m1())
    }

    /// Caches what [`VolumeIntegrand::log_value_relative`] needs about `h`.
    pub fn centre(&self, h: f64) -> Result<Centre> {
        if !(h.abs() < 1.0) {
            return Err(Error::domain(format!("centre must lie in (-1, 1), got {h}")));
        }
        let exponent = if self.log_big_n == f64::NEG_INFINITY {
            SplitTail { power: 0.0, rest: f64::NEG_INFINITY }
        } else {
            self.neg_log_cdf_exponent(h)?
        };
        let n_log_cdf = -(self.log_big_n + exponent.power + exponent.rest).exp();
        Ok(Centre { h, n_log_cdf, exponent })
    }

    /// Infallible evaluation for the quadrature loop; the first failure is
    /// stashed and surfaced by [`VolumeIntegrand::take_failure`].
    fn relative_or_record(&self, h: f64, centre: &Centre) -> f64 {
        match self.log_value_relative(h, centre) {
            Ok(v) => v,
            Err(e) => {
                self.failure.borrow_mut().get_or_insert(e);
                f64::NEG_INFINITY
            }
        }
    }

    fn take_failure(&self) -> Result<()> {
        match self.failure.borrow_mut().take() {
            Some(e) => Err(e),
            None => Ok(()),
        }
    }

    /// Sign-carrying log balance of the two terms of `g'(h)` on `(0, 1)`:
    /// `ln(N f(h) / F(h)) - ln(2 q h / (1 - h^2))`. Positive where `g` increases.
    fn slope_balance(&self, h: f64) -> Result<f64> {
        let rising = self.log_big_n + self.f.log_density(h) - self.f.log_cdf(h)?;
        let falling = (2.0 * self.q * h).ln() - log_one_minus_sq(h);
        Ok(rising - falling)
    }

    /// The interior maximizer of `g` on `(0, 1)`; `None` when `N = 0`
    /// (the maximum is then at `h = 0`).
    pub fn find_mode(&self) -> Result<Option<f64>> {
        if self.log_big_n == f64::NEG_INFINITY {
            return Ok(None);
        }
        let (mut lo, mut hi) = (0.0f64, 1.0f64);
        for _ in 0..MAX_BISECTIONS {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                return Ok(Some(mid));
            }
            let s = self.slope_balance(mid)?;
            if s.abs() <= 1e-10 {
                return Ok(Some(mid));
            }
            if s > 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Err(Error::Internal(format!("mode search for {} did not converge in {MAX_BISECTIONS} bisections", self.model)))
    }

    /// Distance from `centre` towards `dir` (+1 or -1) at which `g` has
    /// dropped by one half; capped at the distance to the boundary.
    fn half_drop(&self, centre: &Centre, dir: f64) -> f64 {
        let room = if dir > 0.0 { 1.0 - centre.h } else { 1.0 + centre.h };
        let target = -0.5;
        let mut step = room * 1e-6;
        while step > f64::EPSILON * room && self.relative_or_record(centre.h + dir * step, centre) < target {
            step /= 2.0;
        }
        while step < room {
            if self.relative_or_record(centre.h + dir * step, centre) < target {
                break;
            }
            step *= 2.0;
        }
        if step >= room {
            return room;
        }
        let (mut inside, mut outside) = (step / 2.0, step);
        for _ in 0..30 {
            let mid = 0.5 * (inside + outside);
            if self.relative_or_record(centre.h + dir * mid, centre) < target {
                outside = mid;
            } else {
                inside = mid;
            }
        }
        outside
    }
}

/// Reference point for [`VolumeIntegrand::log_value_relative`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Centre {
    h: f64,
    n_log_cdf: f64,
    exponent: SplitTail,
}

/// `g(h)` for one model and sample size.
pub fn log_integrand(model: &BetaModel, size: &SampleSize, h: f64) -> Result<f64> {
    VolumeIntegrand::new(model, size)?.log_value(h)
}

/// Maximizer of the log-integrand on `(0, 1)`, or `None` when `N = 0`.
pub fn find_mode(model: &BetaModel, size: &SampleSize) -> Result<Option<f64>> {
    VolumeIntegrand::new(model, size)?.find_mode()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum QuadMethod {
    /// Adaptive quadrature over all of `[-1, 1]`.
    Direct,
    /// Adaptive quadrature over a window around the mode, widened until the
    /// tails are provably negligible.
    LaplaceWindow,
}

impl fmt::Display for QuadMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            QuadMethod::Direct => "direct",
            QuadMethod::LaplaceWindow => "laplace_window",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuadratureReport {
    /// `ln \int_{-1}^1 exp(g(h)) dh`
    pub log_integral: f64,
    pub mode_h: Option<f64>,
    pub window: (f64, f64),
    pub nodes_used: usize,
    pub rel_error_estimate: f64,
    pub method: QuadMethod,
}

/// Expected volume ratio `E vol_d(P) / kappa_d` and how it was integrated.
pub fn expected_volume_ratio(model: &BetaModel, size: &SampleSize, rel_tol: f64) -> Result<(f64, QuadratureReport)> {
    if !(rel_tol > 1e-12 && rel_tol < 1e-2) {
        return Err(Error::domain(format!("rel_tol must lie in (1e-12, 1e-2), got {rel_tol}")));
    }
    let consts = constants(model, size)?;
    let integrand = VolumeIntegrand::new(model, size)?;
    let mode = integrand.find_mode()?;
    let centre = mode.unwrap_or(0.0);
    let g_max = integrand.log_value(centre)?;
    let anchor = integrand.centre(centre)?;
    let left = integrand.half_drop(&anchor, -1.0);
    let right = integrand.half_drop(&anchor, 1.0);
    integrand.take_failure()?;

    let seeds = mode.and_then(|_| laplace_seeds(model, size, &integrand));
    let (mass, window, evaluations, quad_rel) = match seeds {
        Some((a, b)) => laplace_window(&integrand, &anchor, (left, right), (a, b), rel_tol),
        None => direct(&integrand, &anchor, (left, right), rel_tol),
    };
    integrand.take_failure()?;
    let method = if seeds.is_some() { QuadMethod::LaplaceWindow } else { QuadMethod::Direct };

    let log_integral = g_max + mass.ln();
    let ratio = (consts.log_k_over_kappa + log_integral).exp();
    if !(quad_rel <= rel_tol) {
        return Err(Error::ToleranceNotReached { estimate: ratio, rel_error: quad_rel, requested: rel_tol });
    }
    let ratio = clamp_ratio(ratio, rel_tol, model, size)?;
    let report = QuadratureReport {
        log_integral,
        mode_h: mode,
        window,
        nodes_used: evaluations,
        rel_error_estimate: quad_rel,
        method,
    };
    Ok((ratio, report))
}

fn clamp_ratio(ratio: f64, rel_tol: f64, model: &BetaModel, size: &SampleSize) -> Result<f64> {
    if (0.0..=1.0).contains(&ratio) {
        Ok(ratio)
    } else if ratio > 1.0 && ratio <= 1.0 + rel_tol {
        Ok(1.0)
    } else {
        Err(Error::InvariantViolation(format!("volume ratio {ratio} outside [0, 1] for {model}, {size}")))
    }
}

/// Window seeds when the mass is concentrated:
/// `N c_z (1 - a^2)^z > 10` with `a, b` from the concentration window at the
/// implied `x`.
fn laplace_seeds(model: &BetaModel, size: &SampleSize, integrand: &VolumeIntegrand) -> Option<(f64, f64)> {
    let d = model.d();
    let x = asympt::x_of(d, model.beta(), size.log_n()).ok()?;
    let x = x.clamp(1e-6, 0.999 * f64::from(d) / 2.0);
    let (a, b) = asympt::window(d, model.beta(), x).ok()?;
    let log_mass = integrand.log_excess() + integrand.f_params().log_c() + model.z() * log_one_minus_sq(a);
    (log_mass > 10f64.ln()).then_some((a, b))
}

/// Breakpoints at `centre -+ k * scale` for `k = 1, 2, 4, ...`, inside `(lo, hi)`.
fn breakpoints(lo: f64, hi: f64, centre: f64, scales: (f64, f64)) -> Vec<f64> {
    let mut pts = vec![lo, hi];
    if centre > lo && centre < hi {
        pts.push(centre);
    }
    let mut k = 1.0;
    while k <= 64.0 {
        let l = centre - k * scales.0;
        let r = centre + k * scales.1;
        if l > lo && l < hi {
            pts.push(l);
        }
        if r > lo && r < hi {
            pts.push(r);
        }
        k *= 2.0;
    }
    pts.sort_by(f64::total_cmp);
    pts.dedup();
    pts
}

fn normalized<'a>(integrand: &'a VolumeIntegrand, centre: &'a Centre) -> impl Fn(f64) -> f64 + 'a {
    move |h| integrand.relative_or_record(h, centre).exp()
}

fn direct(
    integrand: &VolumeIntegrand,
    anchor: &Centre,
    scales: (f64, f64),
    rel_tol: f64,
) -> (f64, (f64, f64), usize, f64) {
    let centre = anchor.h;
    let f = normalized(integrand, anchor);
    let pts = breakpoints(-1.0, 1.0, centre, scales);
    let r = quad::integrate(&f, &pts, 0.0, 0.5 * rel_tol, MAX_SEGMENTS);
    (r.value, (-1.0, 1.0), r.evaluations, r.rel_error())
}

fn laplace_window(
    integrand: &VolumeIntegrand,
    anchor: &Centre,
    scales: (f64, f64),
    seeds: (f64, f64),
    rel_tol: f64,
) -> (f64, (f64, f64), usize, f64) {
    let centre = anchor.h;
    let f = normalized(integrand, anchor);
    let mut lo = seeds.0.min(centre - 4.0 * scales.0).max(-1.0);
    let mut hi = seeds.1.max(centre + 4.0 * scales.1).min(1.0);
    let mut evaluations = 0;
    loop {
        let pts = breakpoints(lo, hi, centre, scales);
        let r = quad::integrate(&f, &pts, 0.0, 0.5 * rel_tol, MAX_SEGMENTS);
        evaluations += r.evaluations;
        let mass = r.value;
        // g is unimodal, so the integrand beyond each edge is below its edge value
        let left_tail = if lo <= -1.0 { 0.0 } else { f(lo) * (lo + 1.0) };
        let right_tail = if hi >= 1.0 { 0.0 } else { f(hi) * (1.0 - hi) };
        evaluations += 2;
        let budget = rel_tol / 10.0 * mass;
        let left_ok = left_tail < budget;
        let right_ok = right_tail < budget;
        if !r.converged || (left_ok && right_ok) {
            let rel = r.rel_error() + (left_tail + right_tail) / mass;
            return (mass, (lo, hi), evaluations, rel);
        }
        if !left_ok {
            lo = (centre - 2.0 * (centre - lo)).max(-1.0);
        }
        if !right_ok {
            hi = (centre + 2.0 * (hi - centre)).min(1.0);
        }
    }
}

/// Closed-form ratio at `n = d + 1`:
/// `(K / kappa_d) sqrt(pi) Gamma(2Dz) / Gamma(2Dz + 1/2)`.
pub fn closed_form_simplex_ratio(model: &BetaModel) -> Result<f64> {
    Ok(log_closed_form_simplex_ratio(model)?.exp())
}

/// Natural log of [`closed_form_simplex_ratio`], finite where the ratio underflows.
pub fn log_closed_form_simplex_ratio(model: &BetaModel) -> Result<f64> {
    let size = SampleSize::exact(u64::from(model.d()) + 1)?;
    let c = constants(model, &size)?;
    let p = 2.0 * model.big_d() * model.z();
    Ok(c.log_k_over_kappa + LN_SQRT_PI + log_gamma_ratio(p, 0.0, 0.5)?)
}

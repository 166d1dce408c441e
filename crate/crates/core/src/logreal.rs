//! Log-domain arithmetic and the special functions built on it.
//!
//! Constants in the volume formula are products of Gamma functions raised to
//! powers of order `d^2`, and the sample sizes of interest are around
//! `10^85` at `d = 100`. Everything here therefore works with natural
//! logarithms, and every Gamma ratio is formed as a difference of logs.

use std::cmp::Ordering;
use std::f64::consts::{LN_2, PI};
use std::fmt;
use std::ops::{Div, Mul};

use crate::exactvol::SampleSize;
use crate::{Error, Result};

/// `ln(sqrt(pi))`
pub const LN_SQRT_PI: f64 = 0.572_364_942_924_700_087_071_713_675_677;
/// `ln(sqrt(2 pi))`
const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_741_780_329_736_406;

/// Below this argument `ln Gamma` is shifted upwards by the recurrence
/// before the Stirling series is applied.
const STIRLING_MIN: f64 = 10.0;

/// `B_{2m} / (2m (2m - 1))` for `m = 1..=8`.
const STIRLING_COEFFS: [f64; 8] = [
    1.0 / 12.0,
    -1.0 / 360.0,
    1.0 / 1260.0,
    -1.0 / 1680.0,
    1.0 / 1188.0,
    -691.0 / 360_360.0,
    1.0 / 156.0,
    -3617.0 / 122_400.0,
];

/// A non-negative real stored as its natural logarithm.
///
/// `-inf` encodes zero. Positive infinity and NaN are never stored.
#[derive(Clone, Copy, PartialEq, PartialOrd)]
pub struct LogReal(f64);

impl LogReal {
    pub const ZERO: LogReal = LogReal(f64::NEG_INFINITY);
    pub const ONE: LogReal = LogReal(0.0);

    /// Wraps a logarithm. Rejects `+inf` and NaN.
    pub fn from_ln(ln: f64) -> Result<Self> {
        if ln.is_nan() || ln == f64::INFINITY {
            return Err(Error::Internal(format!("log value {ln} is not representable")));
        }
        Ok(LogReal(ln))
    }

    /// Converts an ordinary non-negative real.
    pub fn from_f64(x: f64) -> Result<Self> {
        if !(x >= 0.0) || x.is_infinite() {
            return Err(Error::domain(format!("{x} is not a finite non-negative real")));
        }
        Ok(LogReal(x.ln()))
    }

    #[inline]
    pub fn ln(self) -> f64 {
        self.0
    }

    /// The linear-scale value; underflows to 0 and overflows to `+inf` as `f64` does.
    #[inline]
    pub fn to_f64(self) -> f64 {
        self.0.exp()
    }

    #[inline]
    pub fn is_zero(self) -> bool {
        self.0 == f64::NEG_INFINITY
    }

    pub fn powf(self, p: f64) -> Result<Self> {
        if self.is_zero() {
            return match p.partial_cmp(&0.0) {
                Some(Ordering::Greater) => Ok(LogReal::ZERO),
                Some(Ordering::Equal) => Ok(LogReal::ONE),
                _ => Err(Error::domain("zero raised to a non-positive power")),
            };
        }
        LogReal::from_ln(self.0 * p)
    }

    pub fn checked_mul(self, rhs: LogReal) -> Result<Self> {
        LogReal::from_ln(self.0 + rhs.0)
    }
}

impl fmt::Debug for LogReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "LogReal(ln = {})", self.0)
    }
}

impl fmt::Display for LogReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        // mantissa * 10^exponent
        let log10 = self.0 / std::f64::consts::LN_10;
        let exponent = log10.floor();
        let mantissa = 10f64.powf(log10 - exponent);
        write!(f, "{mantissa:.6}e{exponent}")
    }
}

impl Mul for LogReal {
    type Output = LogReal;

    fn mul(self, rhs: LogReal) -> LogReal {
        let out = self.0 + rhs.0;
        debug_assert!(out != f64::INFINITY && !out.is_nan(), "LogReal product overflowed");
        LogReal(out)
    }
}

impl Div for LogReal {
    type Output = LogReal;

    /// Panics on division by zero.
    fn div(self, rhs: LogReal) -> LogReal {
        assert!(!rhs.is_zero(), "LogReal division by zero");
        LogReal(self.0 - rhs.0)
    }
}

/// `ln(e^a + e^b)`, computed without overflow.
pub fn log_add(a: LogReal, b: LogReal) -> LogReal {
    let (hi, lo) = if a.0 >= b.0 { (a.0, b.0) } else { (b.0, a.0) };
    if lo == f64::NEG_INFINITY {
        return LogReal(hi);
    }
    LogReal(hi + (lo - hi).exp().ln_1p())
}

/// Log-sum-exp over an iterator of log-domain values.
pub fn log_sum<I: IntoIterator<Item = LogReal>>(terms: I) -> LogReal {
    let terms: Vec<f64> = terms.into_iter().map(LogReal::ln).collect();
    let max = terms.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return LogReal::ZERO;
    }
    let sum: f64 = terms.iter().map(|&t| (t - max).exp()).sum();
    LogReal(max + sum.ln())
}

fn stirling_tail(y: f64) -> f64 {
    let inv = 1.0 / y;
    let inv2 = inv * inv;
    let mut acc = 0.0;
    for c in STIRLING_COEFFS.iter().rev() {
        acc = acc * inv2 + c;
    }
    acc * inv
}

/// `ln Gamma(z)` for real `z > 0`.
pub fn log_gamma(z: f64) -> Result<f64> {
    if !(z > 0.0) {
        return Err(Error::domain(format!("log_gamma requires z > 0, got {z}")));
    }
    if z == 1.0 || z == 2.0 {
        return Ok(0.0);
    }
    if z.is_infinite() {
        return Ok(f64::INFINITY);
    }
    let (y, shift) = shift_up(z);
    Ok((y - 0.5) * y.ln() - y + LN_SQRT_2PI + stirling_tail(y) - shift)
}

/// Moves `z` into the Stirling range, returning the shifted argument and
/// `ln(z (z+1) ... (z+k-1))`.
fn shift_up(z: f64) -> (f64, f64) {
    if z >= STIRLING_MIN {
        return (z, 0.0);
    }
    let mut y = z;
    let mut prod = 1.0;
    while y < STIRLING_MIN {
        prod *= y;
        y += 1.0;
    }
    (y, prod.ln())
}

/// `ln Gamma(x + a) - ln Gamma(x + b)` without cancellation for large `x`.
///
/// Requires `x + a > 0` and `x + b > 0`.
pub fn log_gamma_ratio(x: f64, a: f64, b: f64) -> Result<f64> {
    if !(x + a > 0.0) || !(x + b > 0.0) {
        return Err(Error::domain(format!(
            "log_gamma_ratio requires positive arguments, got x = {x}, a = {a}, b = {b}"
        )));
    }
    if a == b {
        return Ok(0.0);
    }
    // Re-anchor so both offsets are non-negative, then shift into Stirling range.
    let m = a.min(b);
    let (mut x, a, b) = (x + m, a - m, b - m);
    let mut correction = 0.0;
    while x < STIRLING_MIN {
        correction += ((x + a) / (x + b)).ln();
        x += 1.0;
    }
    let main = (a - b) * x.ln() + (x + a - 0.5) * (a / x).ln_1p() - (x + b - 0.5) * (b / x).ln_1p() - (a - b);
    Ok(main + stirling_tail(x + a) - stirling_tail(x + b) - correction)
}

/// `ln` of the volume of the unit ball in `R^d`; `d = 0` gives 0.
pub fn log_kappa(d: u32) -> f64 {
    let half = f64::from(d) / 2.0;
    half * PI.ln() - log_gamma(1.0 + half).expect("1 + d/2 > 0")
}

/// `ln c_z` with `c_z = Gamma(z + 1/2) / (2 sqrt(pi) Gamma(z + 1))`.
pub fn log_c(z: f64) -> Result<f64> {
    if !(z > 0.0) {
        return Err(Error::domain(format!("c_z requires z > 0, got {z}")));
    }
    Ok(log_gamma_ratio(z, 0.5, 1.0)? - LN_2 - LN_SQRT_PI)
}

/// `ln C(n, k)` for exact integers.
pub fn log_binomial_exact(n: u64, k: u64) -> Result<f64> {
    if k > n {
        return Err(Error::domain(format!("binomial C({n}, {k}) with k > n")));
    }
    let k = k.min(n - k);
    if k == 0 {
        return Ok(0.0);
    }
    let (nf, kf) = (n as f64, k as f64);
    Ok(log_gamma_ratio(nf - kf + 1.0, kf, 0.0)? - log_gamma(kf + 1.0)?)
}

/// `ln C(n, k)` where `n` may be known only through `ln n`.
///
/// When `n` is representable as an `f64` the real-argument Gamma form is
/// used. Beyond that, `k ln n - ln k!` is returned; its relative error is
/// `O(k^2 / n)`, below `1e-290` there.
pub fn log_binomial(n: &SampleSize, k: u64) -> Result<f64> {
    if let Some(exact) = n.exact_n() {
        return log_binomial_exact(exact, k);
    }
    if k == 0 {
        return Ok(0.0);
    }
    let kf = k as f64;
    let log_n = n.log_n();
    if log_n < 700.0 {
        let nf = log_n.exp();
        if nf < kf {
            return Err(Error::domain(format!("binomial with n = {nf} < k = {k}")));
        }
        return log_gamma_ratio(nf - kf + 1.0, kf, 0.0).map(|r| r - log_gamma(kf + 1.0).unwrap());
    }
    Ok(kf * log_n - log_gamma(kf + 1.0)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    // Reference values from 40-digit arithmetic.
    const LGAMMA_REF: [(f64, f64); 14] = [
        (0.001, 6.907178885383853682512345),
        (0.1, 2.252712651734205959869702),
        (0.5, 0.5723649429247000870717137),
        (1.5, -0.1207822376352452223455184),
        (2.5, 0.2846828704729191596324947),
        (3.7, 1.428072326665387921872381),
        (7.25, 7.052185450738539444925749),
        (10.0, 12.80182748008146961120772),
        (12.5, 18.73434751193644570163412),
        (33.3, 82.60372358165495292832303),
        (100.5, 361.4355404677776215552519),
        (1234.567, 7551.027809984276039808549),
        (1e5, 1051287.708973656894900858),
        (1e7, 151180949.3694739139401056),
    ];

    #[test]
    fn log_add_examples() {
        let l = |x: f64| LogReal::from_f64(x).unwrap();
        assert_relative_eq!(log_add(l(1.0), l(1.0)).ln(), 2f64.ln(), epsilon = 1e-15);
        assert_eq!(log_add(LogReal::ZERO, l(5.0)).ln(), 5f64.ln());
        assert_eq!(log_add(l(5.0), LogReal::ZERO).ln(), 5f64.ln());
        assert_relative_eq!(log_add(l(3.0), l(4.0)).ln(), 7f64.ln(), epsilon = 1e-15);
        assert!(log_add(LogReal::ZERO, LogReal::ZERO).is_zero());
        // no overflow far outside f64 range
        let big = LogReal::from_ln(1e6).unwrap();
        assert_relative_eq!(log_add(big, big).ln(), 1e6 + LN_2, epsilon = 1e-12);
    }

    #[test]
    fn log_real_rejects_non_representable() {
        assert!(LogReal::from_ln(f64::INFINITY).is_err());
        assert!(LogReal::from_ln(f64::NAN).is_err());
        assert!(LogReal::from_f64(-1.0).is_err());
        assert!(LogReal::from_f64(0.0).unwrap().is_zero());
        assert_eq!(LogReal::from_f64(0.0).unwrap().to_f64(), 0.0);
    }

    #[test]
    fn log_sum_matches_pairwise() {
        let vals = [0.5, 1e-300, 3.0, 0.0, 2.25];
        let s = log_sum(vals.iter().map(|&v| LogReal::from_f64(v).unwrap()));
        assert_relative_eq!(s.to_f64(), 5.75, max_relative = 1e-15);
        assert!(log_sum(std::iter::empty()).is_zero());
    }

    #[test]
    fn log_gamma_examples() {
        assert_eq!(log_gamma(1.0).unwrap(), 0.0);
        assert_relative_eq!(log_gamma(0.5).unwrap(), PI.sqrt().ln(), max_relative = 1e-14);
        assert_relative_eq!(log_gamma(10.0).unwrap(), 362_880f64.ln(), max_relative = 1e-14);
        assert!(matches!(log_gamma(0.0), Err(Error::Domain(_))));
        assert!(log_gamma(-2.5).is_err());
    }

    #[test]
    fn log_gamma_reference_values() {
        for &(z, want) in &LGAMMA_REF {
            let got = log_gamma(z).unwrap();
            // relative, with an absolute floor where ln Gamma crosses zero
            let tol = 1e-13 * want.abs().max(1.0);
            assert!((got - want).abs() <= tol, "z = {z}: got {got}, want {want}");
        }
    }

    #[test]
    fn log_gamma_matches_factorials() {
        let mut fact = 1.0f64;
        for k in 1..=100u32 {
            let lg = log_gamma(f64::from(k) + 1.0).unwrap();
            fact *= f64::from(k);
            assert_relative_eq!(lg, fact.ln(), max_relative = 1e-13, epsilon = 1e-14);
        }
    }

    #[test]
    fn gamma_ratio_reference_values() {
        let cases = [
            (1e6, -6.907755403982137052048766),
            (1e8, -9.210340373226182736071966),
            (0.001, 0.5709802910973151586060117),
            (3.5, -0.6619771016143872196916651),
        ];
        for (z, want) in cases {
            assert_relative_eq!(log_gamma_ratio(z, 0.5, 1.0).unwrap(), want, max_relative = 1e-14);
        }
        assert!(log_gamma_ratio(-1.0, 0.5, 1.0).is_err());
    }

    #[test]
    fn log_kappa_examples() {
        assert_relative_eq!(log_kappa(2), PI.ln(), max_relative = 1e-15);
        assert_relative_eq!(log_kappa(3), (4.0 * PI / 3.0).ln(), max_relative = 1e-14);
        let independent = 50.0 * PI.ln() - log_gamma(51.0).unwrap();
        assert_relative_eq!(log_kappa(100), independent, max_relative = 1e-14);
        assert_eq!(log_kappa(0), 0.0);
    }

    #[test]
    fn log_c_examples() {
        assert_relative_eq!(log_c(0.5).unwrap(), (1.0 / PI).ln(), max_relative = 1e-14);
        assert_relative_eq!(log_c(1.0).unwrap(), 0.25f64.ln(), max_relative = 1e-14);
        let z = 1e6;
        let lc = log_c(z).unwrap();
        let upper = -(2.0 * (PI * z).sqrt()).ln();
        let lower = -LN_2 - LN_SQRT_PI - 0.5 * (z + 0.5).ln();
        assert!(lower <= lc && lc <= upper);
        assert!(log_c(0.0).is_err());
    }

    #[test]
    fn log_binomial_examples() {
        let five = SampleSize::exact(5).unwrap();
        assert_relative_eq!(log_binomial(&five, 2).unwrap(), 10f64.ln(), max_relative = 1e-14);
        assert_eq!(log_binomial(&five, 0).unwrap(), 0.0);
        assert!(log_binomial(&five, 6).is_err());

        let huge = SampleSize::from_log(200.0).unwrap();
        let approx = 51.0 * 200.0 - log_gamma(52.0).unwrap();
        assert_relative_eq!(log_binomial(&huge, 51).unwrap(), approx, max_relative = 1e-15);

        // at n = e^20 the truncation k ln n - ln k! is off by about -k^2/(2n)
        let mid = SampleSize::from_log(20.0).unwrap();
        let exactish = log_binomial(&mid, 51).unwrap();
        let truncated = 51.0 * 20.0 - log_gamma(52.0).unwrap();
        let predicted_gap = -(51.0 * 50.0 / 2.0) / 20f64.exp();
        assert_relative_eq!(exactish - truncated, predicted_gap, max_relative = 1e-3);
    }

    #[test]
    fn log_binomial_matches_integers() {
        for n in 0u64..=60 {
            let mut c: u128 = 1;
            for k in 0..=n {
                let got = log_binomial_exact(n, k).unwrap();
                assert_relative_eq!(got, (c as f64).ln(), max_relative = 1e-13, epsilon = 1e-13);
                c = c * u128::from(n - k) / u128::from(k + 1);
            }
        }
    }

    #[test]
    fn wendel_envelope_on_log_grid() {
        // 1/sqrt(z + 1/2) <= Gamma(z + 1/2) / Gamma(z + 1) <= 1/sqrt(z)
        let mut violations = Vec::new();
        for i in 0..=220 {
            let z = 10f64.powf(-3.0 + 11.0 * f64::from(i) / 220.0);
            let r = log_gamma_ratio(z, 0.5, 1.0).unwrap();
            let lo = -0.5 * (z + 0.5).ln();
            let hi = -0.5 * z.ln();
            if !(lo <= r && r <= hi) {
                violations.push((z, lo, r, hi));
            }
        }
        assert!(violations.is_empty(), "{violations:?}");
    }

    proptest! {
        #[test]
        fn log_add_commutes_and_associates(a in -50.0f64..50.0, b in -50.0f64..50.0, c in -50.0f64..50.0) {
            let (a, b, c) = (LogReal(a), LogReal(b), LogReal(c));
            prop_assert_eq!(log_add(a, b).ln(), log_add(b, a).ln());
            let l = log_add(log_add(a, b), c).ln();
            let r = log_add(a, log_add(b, c)).ln();
            prop_assert!((l - r).abs() <= 4.0 * f64::EPSILON * l.abs().max(1.0));
        }

        #[test]
        fn exponential_inequality(m in 1.0f64..1e6, frac in -50.0f64..0.999) {
            // exp(-y^2 / (m - y)) <= e^y (1 - y/m)^m <= 1, for y < m
            let y = frac * m;
            let mid = y + m * (-y / m).ln_1p();
            let lower = -y * y / (m - y);
            let slack = 1e-12 * lower.abs().max(1.0);
            prop_assert!(lower <= mid + slack, "lower {} > mid {}", lower, mid);
            prop_assert!(mid <= slack, "mid {} > 0", mid);
        }

        #[test]
        fn round_trip_through_log(x in 1e-300f64..1e300) {
            let r = LogReal::from_f64(x).unwrap().to_f64();
            prop_assert!((r - x).abs() <= 1e-12 * x);
        }
    }
}

//! Expected volumes of high-dimensional beta polytopes.
//!
//! A beta polytope is the convex hull of `n` i.i.d. points in the unit ball of
//! `R^d` drawn with density proportional to `(1 - |x|^2)^beta` (`beta = -1`
//! means uniform on the sphere). This crate evaluates the exact integral
//! representation of the expected normalized volume in log-domain, maps the
//! phase-transition threshold `n ~ (d / 2x)^(d/2 + beta)` to its limit
//! `e^-x`, reduces intrinsic volumes to volumes of a lower-dimensional beta
//! polytope, and cross-checks all of it with a Monte Carlo geometry engine
//! whose hull membership test is a phase-one linear feasibility solve.
//!
//! Module map:
//!
//! - [`logreal`]: extended-range non-negative reals, `ln Gamma`, binomials.
//! - [`betacdf`]: the one-dimensional marginal distribution function and its
//!   upper tail, with the analytic tail envelope.
//! - [`quad`]: adaptive Gauss-Kronrod quadrature.
//! - [`exactvol`]: the exact expected volume ratio.
//! - [`asympt`]: threshold maps and the limiting predictor.
//! - [`intrinsics`]: intrinsic volumes via dimension reduction.
//! - [`mcgeom`]: sampling, hull membership and Monte Carlo estimators.
//! - [`cli`]: the batch front-end used by the `betapoly` binary.

pub mod asympt;
pub mod betacdf;
pub mod cli;
mod error;
pub mod exactvol;
pub mod intrinsics;
pub mod logreal;
pub mod mcgeom;
pub mod quad;

pub use error::{Error, Result};
pub use exactvol::{BetaModel, SampleSize};
pub use logreal::LogReal;

//! Monte Carlo ground truth.
//!
//! Sampling from beta models, convex-hull membership by linear feasibility,
//! and estimators for the volume ratio, the vertex count, and the origin
//! containment probability. Trials are split into chunks of [`CHUNK`]; chunk
//! `c` draws from ChaCha8 stream `c` under the key derived from the seed, and
//! chunk results are combined in index order. Estimates are therefore
//! bit-identical for a fixed seed regardless of the rayon pool size.

mod hull;
pub mod lp;
pub mod sampling;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::logreal::{log_binomial_exact, log_sum};
use crate::{BetaModel, Error, LogReal, Result};

pub use hull::{contains, Hull};
pub use sampling::{sample_beta, PointCloud};

/// Trials per deterministic chunk.
pub const CHUNK: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub value: f64,
    pub std_error: f64,
    pub trials: u64,
    pub seed: u64,
}

impl Estimate {
    /// `(value - reference) / std_error`, or 0 / infinity when `std_error = 0`.
    pub fn z_score(&self, reference: f64) -> f64 {
        let diff = self.value - reference;
        if self.std_error > 0.0 {
            diff / self.std_error
        } else if diff == 0.0 {
            0.0
        } else {
            diff.signum() * f64::INFINITY
        }
    }

    pub fn within_sigmas(&self, reference: f64, k: f64) -> bool {
        (self.value - reference).abs() <= k * self.std_error
    }
}

#[derive(Default, Clone, Copy)]
struct Moments {
    count: u64,
    sum: f64,
    sum_sq: f64,
}

impl Moments {
    fn push(&mut self, x: f64) {
        self.count += 1;
        self.sum += x;
        self.sum_sq += x * x;
    }

    fn merge(self, o: Moments) -> Moments {
        Moments { count: self.count + o.count, sum: self.sum + o.sum, sum_sq: self.sum_sq + o.sum_sq }
    }

    fn mean(&self) -> f64 {
        self.sum / self.count as f64
    }

    /// Standard error of the mean from the sample variance.
    fn std_error(&self) -> f64 {
        if self.count < 2 {
            return 0.0;
        }
        let n = self.count as f64;
        let var = ((self.sum_sq - self.sum * self.sum / n) / (n - 1.0)).max(0.0);
        (var / n).sqrt()
    }
}

/// Runs `trial(rng)` `trials` times in deterministic chunks.
fn run_chunks<F>(trials: u64, seed: u64, label: &str, trial: F) -> Result<Moments>
where
    F: Fn(&mut rand_chacha::ChaCha8Rng) -> Result<f64> + Sync,
{
    if trials == 0 {
        return Err(Error::domain(format!("{label}: trials must be at least 1")));
    }
    let chunks = trials.div_ceil(CHUNK as u64);
    let per_chunk: Vec<std::result::Result<Moments, (Moments, Error)>> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = sampling::chunk_rng(seed, c);
            let len = (trials - c * CHUNK as u64).min(CHUNK as u64);
            let mut m = Moments::default();
            for _ in 0..len {
                match trial(&mut rng) {
                    Ok(x) => m.push(x),
                    Err(e) => return Err((m, e)),
                }
            }
            Ok(m)
        })
        .collect();
    let mut total = Moments::default();
    let mut first_failure = None;
    for (c, r) in per_chunk.into_iter().enumerate() {
        match r {
            Ok(m) => total = total.merge(m),
            Err((m, e)) => {
                total = total.merge(m);
                first_failure.get_or_insert((c, e));
            }
        }
    }
    if let Some((c, e)) = first_failure {
        return Err(Error::SolverFailure(format!(
            "{label}: {e} (first failure in chunk {c}; {} of {trials} trials completed)",
            total.count
        )));
    }
    Ok(total)
}

fn check_n(model: &BetaModel, n: usize, min: usize, label: &str) -> Result<()> {
    if n < min {
        return Err(Error::domain(format!("{label} requires n >= {min} for d = {}, got n = {n}", model.d())));
    }
    Ok(())
}

/// Hit-or-miss estimate of `E vol(P) / kappa_d`: the mean, over
/// `polytope_trials` hulls, of the fraction of `probe_trials` uniform ball
/// probes inside the hull. The standard error is the between-hull one.
pub fn mc_volume_ratio(
    model: &BetaModel,
    n: usize,
    polytope_trials: u64,
    probe_trials: u64,
    seed: u64,
) -> Result<Estimate> {
    let d = model.d() as usize;
    check_n(model, n, d + 1, "mc_volume_ratio")?;
    if probe_trials == 0 {
        return Err(Error::domain("mc_volume_ratio: probe_trials must be at least 1"));
    }
    let sampler = sampling::BetaSampler::new(model)?;
    let m = run_chunks(polytope_trials, seed, "mc_volume_ratio", |rng| {
        let mut points = vec![0.0; n * d];
        sampler.fill(rng, &mut points);
        let mut hull = Hull::new(&points, d)?;
        let mut q = vec![0.0; d];
        let mut hits = 0u64;
        for _ in 0..probe_trials {
            sampling::ball_probe(rng, &mut q);
            hits += u64::from(hull.contains(&q)?);
        }
        Ok(hits as f64 / probe_trials as f64)
    })?;
    let std_error = if polytope_trials == 1 {
        let p = m.mean();
        (p * (1.0 - p) / probe_trials as f64).sqrt()
    } else {
        m.std_error()
    };
    Ok(Estimate { value: m.mean(), std_error, trials: polytope_trials, seed })
}

/// Estimates `E f_0` for the uniform ball model by testing each point
/// against the hull of the others.
pub fn mc_vertex_count(model: &BetaModel, n: usize, trials: u64, seed: u64) -> Result<Estimate> {
    if model.beta() != 0.0 {
        return Err(Error::domain(format!(
            "mc_vertex_count is defined for beta = 0 only, got beta = {}",
            model.beta()
        )));
    }
    let d = model.d() as usize;
    check_n(model, n, d + 1, "mc_vertex_count")?;
    let sampler = sampling::BetaSampler::new(model)?;
    let m = run_chunks(trials, seed, "mc_vertex_count", |rng| {
        let mut points = vec![0.0; n * d];
        sampler.fill(rng, &mut points);
        let mut lp = lp::FeasibilityLp::new();
        let mut others = Vec::with_capacity((n - 1) * d);
        let mut vertices = 0u32;
        for j in 0..n {
            others.clear();
            others.extend_from_slice(&points[..j * d]);
            others.extend_from_slice(&points[(j + 1) * d..]);
            if let lp::Verdict::Outside(_) = lp.solve(&others, d, &points[j * d..(j + 1) * d])? {
                vertices += 1;
            }
        }
        Ok(f64::from(vertices))
    })?;
    Ok(Estimate { value: m.mean(), std_error: m.std_error(), trials, seed })
}

/// Fraction of trials in which the origin lies in the hull of `n` points.
pub fn mc_origin_containment(model: &BetaModel, n: usize, trials: u64, seed: u64) -> Result<Estimate> {
    let d = model.d() as usize;
    check_n(model, n, d + 1, "mc_origin_containment")?;
    let sampler = sampling::BetaSampler::new(model)?;
    let origin = vec![0.0; d];
    let m = run_chunks(trials, seed, "mc_origin_containment", |rng| {
        let mut points = vec![0.0; n * d];
        sampler.fill(rng, &mut points);
        let inside = lp::FeasibilityLp::new().solve(&points, d, &origin)?;
        Ok(f64::from(u8::from(inside == lp::Verdict::Inside)))
    })?;
    let p = m.mean();
    Ok(Estimate { value: p, std_error: (p * (1.0 - p) / trials as f64).sqrt(), trials, seed })
}

fn check_wendel(n: u64, d: u64) -> Result<()> {
    if d < 1 || n <= d {
        return Err(Error::domain(format!("need n > d >= 1, got n = {n}, d = {d}")));
    }
    Ok(())
}

/// `2^-(n-1) sum_{k=d}^{n-1} C(n-1, k)`: the probability that a
/// Binomial(n-1, 1/2) variable is at least `d`.
pub fn wendel_probability(n: u64, d: u64) -> Result<f64> {
    check_wendel(n, d)?;
    let terms = (d..n).map(|k| log_binomial_exact(n - 1, k).and_then(LogReal::from_ln)).collect::<Result<Vec<_>>>()?;
    Ok((log_sum(terms).ln() - (n - 1) as f64 * std::f64::consts::LN_2).exp())
}

/// `1 - 2^-(n-1) sum_{k<d} C(n-1, k)`, the origin-containment probability
/// for symmetric laws; algebraically equal to [`wendel_probability`] but
/// summed over the complementary range.
pub fn wendel_identity(n: u64, d: u64) -> Result<f64> {
    check_wendel(n, d)?;
    let terms = (0..d).map(|k| log_binomial_exact(n - 1, k).and_then(LogReal::from_ln)).collect::<Result<Vec<_>>>()?;
    let lower = (log_sum(terms).ln() - (n - 1) as f64 * std::f64::consts::LN_2).exp();
    Ok(1.0 - lower)
}

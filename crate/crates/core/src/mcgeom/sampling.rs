use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Beta, Distribution, StandardNormal};

use crate::{BetaModel, Error, Result};

/// `n` points of `R^d`, stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct PointCloud {
    pub points: Vec<f64>,
    pub model: BetaModel,
    pub seed: u64,
}

impl PointCloud {
    pub fn d(&self) -> usize {
        self.model.d() as usize
    }

    pub fn len(&self) -> usize {
        self.points.len() / self.d()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn point(&self, i: usize) -> &[f64] {
        let d = self.d();
        &self.points[i * d..(i + 1) * d]
    }

    pub fn iter(&self) -> std::slice::ChunksExact<'_, f64> {
        self.points.chunks_exact(self.d())
    }
}

/// The generator behind every sampler: a ChaCha8 key from `seed`, one
/// stream per chunk.
pub fn chunk_rng(seed: u64, chunk: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(chunk);
    rng
}

/// Draws from the beta law on the ball (or the sphere when `beta = -1`).
#[derive(Debug, Clone)]
pub struct BetaSampler {
    d: usize,
    radius_sq: Option<Beta<f64>>,
}

impl BetaSampler {
    pub fn new(model: &BetaModel) -> Result<Self> {
        let d = model.d() as usize;
        let radius_sq = if model.is_sphere() {
            None
        } else {
            let law = Beta::new(f64::from(model.d()) / 2.0, model.beta() + 1.0)
                .map_err(|e| Error::domain(format!("radial law for {model}: {e}")))?;
            Some(law)
        };
        Ok(BetaSampler { d, radius_sq })
    }

    pub fn fill<R: Rng + ?Sized>(&self, rng: &mut R, out: &mut [f64]) {
        for p in out.chunks_exact_mut(self.d) {
            let norm = unit_direction(rng, p);
            let r = match &self.radius_sq {
                None => 1.0 / norm,
                Some(law) => law.sample(rng).sqrt() / norm,
            };
            p.iter_mut().for_each(|x| *x *= r);
        }
    }
}

/// Fills `out` with a standard Gaussian vector and returns its norm,
/// redrawing in the (practically unreachable) case of a zero vector.
fn unit_direction<R: Rng + ?Sized>(rng: &mut R, out: &mut [f64]) -> f64 {
    loop {
        for x in out.iter_mut() {
            *x = StandardNormal.sample(rng);
        }
        let norm = out.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 0.0 {
            return norm;
        }
    }
}

/// Uniform point in the unit ball: uniform direction, radius `U^(1/d)`.
pub fn ball_probe<R: Rng + ?Sized>(rng: &mut R, out: &mut [f64]) {
    let norm = unit_direction(rng, out);
    let u: f64 = rng.random();
    let r = u.powf(1.0 / out.len() as f64) / norm;
    out.iter_mut().for_each(|x| *x *= r);
}

/// `n` i.i.d. points from the beta model.
pub fn sample_beta(model: &BetaModel, n: usize, seed: u64) -> Result<PointCloud> {
    if n == 0 {
        return Err(Error::domain("sample_beta requires n >= 1"));
    }
    let sampler = BetaSampler::new(model)?;
    let mut points = vec![0.0; n * model.d() as usize];
    sampler.fill(&mut chunk_rng(seed, 0), &mut points);
    Ok(PointCloud { points, model: *model, seed })
}

#[cfg(test)]
mod tests {
    use super::*;
    use statrs::distribution::{Beta as BetaLaw, ContinuousCDF};

    fn sq_norms(cloud: &PointCloud) -> Vec<f64> {
        cloud.iter().map(|p| p.iter().map(|x| x * x).sum()).collect()
    }

    #[test]
    fn sphere_points_have_unit_norm() {
        for d in [2, 3, 7, 40] {
            let cloud = sample_beta(&BetaModel::new(d, -1.0).unwrap(), 500, 11).unwrap();
            assert_eq!(cloud.len(), 500);
            for r2 in sq_norms(&cloud) {
                assert!((r2.sqrt() - 1.0).abs() <= 1e-12);
            }
        }
    }

    #[test]
    fn ball_points_stay_inside() {
        for beta in [-0.5, 0.0, 3.0] {
            let cloud = sample_beta(&BetaModel::new(5, beta).unwrap(), 2000, 5).unwrap();
            assert!(sq_norms(&cloud).iter().all(|&r2| r2 <= 1.0));
        }
    }

    #[test]
    fn uniform_disk_second_moment() {
        // E r^2 = d / (d + 2) = 1/2 with variance 1/12 for the uniform disk
        let n = 1_000_000;
        let cloud = sample_beta(&BetaModel::new(2, 0.0).unwrap(), n, 2024).unwrap();
        let mean = sq_norms(&cloud).iter().sum::<f64>() / n as f64;
        let sigma = (1.0 / 12.0 / n as f64).sqrt();
        assert!((mean - 0.5).abs() < 3.0 * sigma, "mean {mean}");
    }

    // one-sample Kolmogorov-Smirnov against the analytic law of 1 - r^2
    fn ks_statistic(mut xs: Vec<f64>, cdf: impl Fn(f64) -> f64) -> f64 {
        xs.sort_by(f64::total_cmp);
        let n = xs.len() as f64;
        xs.iter()
            .enumerate()
            .map(|(i, &x)| {
                let f = cdf(x);
                (f - i as f64 / n).abs().max(((i + 1) as f64 / n - f).abs())
            })
            .fold(0.0, f64::max)
    }

    #[test]
    fn one_minus_radius_sq_follows_beta_law() {
        let n = 100_000;
        // 1% critical value of the KS statistic
        let critical = 1.628 / (n as f64).sqrt();
        for (d, beta) in [(2, 0.0), (3, 1.0), (6, -0.5), (10, 2.5)] {
            let model = BetaModel::new(d, beta).unwrap();
            let cloud = sample_beta(&model, n, 77).unwrap();
            let law = BetaLaw::new(beta + 1.0, f64::from(d) / 2.0).unwrap();
            let ks = ks_statistic(sq_norms(&cloud).iter().map(|r2| 1.0 - r2).collect(), |x| law.cdf(x));
            assert!(ks < critical, "d = {d}, beta = {beta}: KS = {ks}");
        }
    }

    #[test]
    fn probes_are_uniform_in_the_ball() {
        // |p|^d is uniform on [0, 1]
        let d = 4;
        let mut rng = chunk_rng(3, 9);
        let mut p = [0.0; 4];
        let us: Vec<f64> = (0..50_000)
            .map(|_| {
                ball_probe(&mut rng, &mut p);
                p.iter().map(|x| x * x).sum::<f64>().powf(d as f64 / 2.0)
            })
            .collect();
        assert!(ks_statistic(us, |x| x) < 1.628 / (50_000f64).sqrt());
    }

    #[test]
    fn sampling_is_reproducible() {
        let model = BetaModel::new(3, 0.5).unwrap();
        assert_eq!(sample_beta(&model, 50, 8).unwrap(), sample_beta(&model, 50, 8).unwrap());
        assert_ne!(sample_beta(&model, 50, 8).unwrap(), sample_beta(&model, 50, 9).unwrap());
        assert!(sample_beta(&model, 0, 8).is_err());
    }
}

//! Exact ratios against hit-or-miss Monte Carlo estimates.
//!
//! Run with `cargo run --release --example monte_carlo_compare [hulls] [probes]`.

use betapoly::exactvol::expected_volume_ratio;
use betapoly::mcgeom::mc_volume_ratio;
use betapoly::{BetaModel, SampleSize};

fn main() -> betapoly::Result<()> {
    let mut args = std::env::args().skip(1).map(|a| a.parse::<u64>().expect("integer argument"));
    let hulls = args.next().unwrap_or(2_000);
    let probes = args.next().unwrap_or(500);

    println!("{:>3} {:>5} {:>4} {:>10} {:>10} {:>9} {:>7}", "d", "beta", "n", "exact", "mc", "sigma", "z");
    for d in 2..=5u32 {
        for beta in [-1.0, 0.0, 2.5] {
            for n in [u64::from(d) + 1, 5 * u64::from(d)] {
                let model = BetaModel::new(d, beta)?;
                let (exact, _) = expected_volume_ratio(&model, &SampleSize::exact(n)?, 1e-10)?;
                let est = mc_volume_ratio(&model, n as usize, hulls, probes, 1)?;
                println!(
                    "{d:>3} {beta:>5} {n:>4} {exact:>10.6} {:>10.6} {:>9.2e} {:>7.2}",
                    est.value,
                    est.std_error,
                    est.z_score(exact)
                );
            }
        }
    }
    Ok(())
}

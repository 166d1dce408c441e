//! The phase transition: at `ln n = (d/2 + beta) ln(d / 2x)` the ratio
//! approaches `e^-x` as the dimension grows.
//!
//! Run with `cargo run --release --example phase_curve`.

use betapoly::asympt::{threshold_log_n, window};
use betapoly::exactvol::expected_volume_ratio;
use betapoly::{BetaModel, SampleSize};

fn main() -> betapoly::Result<()> {
    for beta in [-1.0, 0.0, 5.0] {
        println!("beta = {beta}");
        println!("{:>7} {:>6} {:>12} {:>10} {:>10} {:>10}", "d", "x", "ln n", "exact", "e^-x", "|diff|");
        for x in [0.25, 1.0, 4.0] {
            for d in [50u32, 200, 800, 3200, 12_800] {
                let log_n = threshold_log_n(d, beta, x)?;
                let model = BetaModel::new(d, beta)?;
                let (ratio, _) = expected_volume_ratio(&model, &SampleSize::from_log(log_n)?, 1e-9)?;
                let limit = (-x).exp();
                println!("{d:>7} {x:>6} {log_n:>12.2} {ratio:>10.6} {limit:>10.6} {:>10.2e}", (ratio - limit).abs());
            }
        }
        println!();
    }

    let (a, b) = window(2000, 0.0, 1.0)?;
    println!("concentration window at d = 2000, x = 1: a = {a:.8}, b = {b:.8}");
    Ok(())
}

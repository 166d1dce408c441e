//! Wendel's probability that the origin lies in the hull of `n` symmetric
//! points, and the bound it gives on the expected volume ratio.
//!
//! Run with `cargo run --release --example wendel_bound`.

use betapoly::mcgeom::{mc_origin_containment, mc_volume_ratio, wendel_probability};
use betapoly::BetaModel;

fn main() -> betapoly::Result<()> {
    println!("{:>3} {:>3} {:>5} {:>10} {:>10} {:>7} {:>10}", "d", "n", "beta", "wendel", "origin", "z", "volume");
    for d in 2..=4u32 {
        for n in [d + 1, d + 3, 2 * d + 2] {
            let bound = wendel_probability(u64::from(n), u64::from(d))?;
            for beta in [-1.0, 0.0, 2.0] {
                let model = BetaModel::new(d, beta)?;
                let origin = mc_origin_containment(&model, n as usize, 20_000, 3)?;
                let volume = mc_volume_ratio(&model, n as usize, 1_000, 200, 3)?;
                println!(
                    "{d:>3} {n:>3} {beta:>5} {bound:>10.6} {:>10.6} {:>7.2} {:>10.6}",
                    origin.value,
                    origin.z_score(bound),
                    volume.value
                );
            }
        }
    }

    println!("\nfar tail: n = 201, d = 200 gives {:e}", wendel_probability(201, 200)?);
    Ok(())
}

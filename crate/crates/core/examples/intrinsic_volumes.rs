//! Intrinsic volume ratios `E V_k(P) / V_k(B^d)` through the reduction to a
//! lower-dimensional beta polytope.
//!
//! Run with `cargo run --release --example intrinsic_volumes`.

use betapoly::intrinsics::{expected_intrinsic_ratio, log_vk_ball, reduce};
use betapoly::SampleSize;

fn main() -> betapoly::Result<()> {
    let (d, beta) = (8u32, 0.0);
    let size = SampleSize::exact(40)?;
    println!("d = {d}, beta = {beta}, n = 40");
    println!("{:>3} {:>10} {:>12} {:>14}", "k", "beta'", "V_k(B^d)", "ratio");
    for k in 2..=d {
        let (_, beta_red) = reduce(d, k, beta)?;
        let (ratio, _) = expected_intrinsic_ratio(d, k, beta, &size, 1e-10)?;
        println!("{k:>3} {beta_red:>10} {:>12.6} {ratio:>14.10}", log_vk_ball(d, k)?.exp());
    }
    Ok(())
}

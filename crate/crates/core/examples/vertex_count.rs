//! Expected number of vertices of the convex hull of uniform points in the
//! ball, by simulation and through Efron's identity.
//!
//! Run with `cargo run --release --example vertex_count`.

use betapoly::cli::efron_prediction;
use betapoly::mcgeom::mc_vertex_count;
use betapoly::BetaModel;

fn main() -> betapoly::Result<()> {
    println!("{:>3} {:>5} {:>10} {:>9} {:>10} {:>7}", "d", "n", "mc", "sigma", "efron", "z");
    for (d, n) in [(2u32, 10u64), (2, 50), (3, 4), (3, 20), (4, 40), (5, 60)] {
        let model = BetaModel::new(d, 0.0)?;
        let est = mc_vertex_count(&model, n as usize, 4_000, 7)?;
        let efron = efron_prediction(&model, n)?;
        println!("{d:>3} {n:>5} {:>10.4} {:>9.2e} {efron:>10.4} {:>7.2}", est.value, est.std_error, est.z_score(efron));
    }
    Ok(())
}

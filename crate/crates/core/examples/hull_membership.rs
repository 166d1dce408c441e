//! Convex-hull membership by linear feasibility, single queries and a
//! cached oracle for many probes against one hull.
//!
//! Run with `cargo run --release --example hull_membership`.

use betapoly::mcgeom::sampling::{ball_probe, chunk_rng};
use betapoly::mcgeom::{contains, sample_beta, Hull};
use betapoly::BetaModel;

fn main() -> betapoly::Result<()> {
    let cloud = sample_beta(&BetaModel::new(4, 1.0)?, 12, 5)?;
    let centroid: Vec<f64> = (0..4).map(|i| cloud.iter().map(|p| p[i]).sum::<f64>() / 12.0).collect();
    println!("centroid inside: {}", contains(&cloud, &centroid)?);
    println!("first point inside: {}", contains(&cloud, cloud.point(0))?);
    println!("(1, 0, 0, 0) inside: {}", contains(&cloud, &[1.0, 0.0, 0.0, 0.0])?);

    let mut hull = Hull::new(&cloud.points, 4)?;
    let mut rng = chunk_rng(9, 0);
    let mut q = [0.0; 4];
    let probes = 100_000;
    let mut hits = 0;
    for _ in 0..probes {
        ball_probe(&mut rng, &mut q);
        hits += usize::from(hull.contains(&q)?);
    }
    println!(
        "{hits} of {probes} ball probes inside ({:.4}); {} feasibility solves",
        hits as f64 / probes as f64,
        hull.lp_solves
    );
    Ok(())
}

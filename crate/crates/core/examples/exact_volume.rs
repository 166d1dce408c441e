//! Exact expected volume ratios and how the integral was evaluated.
//!
//! Run with `cargo run --release --example exact_volume`.

use betapoly::exactvol::{closed_form_simplex_ratio, expected_volume_ratio};
use betapoly::{BetaModel, Error, SampleSize};

fn main() -> betapoly::Result<()> {
    println!(
        "{:>6} {:>6} {:>12} {:>22} {:>10} {:>16} {:>8}",
        "d", "beta", "ln n", "ratio", "rel err", "method", "nodes"
    );
    let cases: [(u32, f64, SampleSize, f64); 6] = [
        (2, 0.0, SampleSize::exact(3)?, 1e-10),
        (3, -1.0, SampleSize::exact(10)?, 1e-10),
        (10, 2.0, SampleSize::exact(1_000)?, 1e-10),
        (100, 0.0, SampleSize::from_log(150.0)?, 1e-10),
        (2000, 0.0, SampleSize::from_log(6907.755)?, 1e-10),
        (20_000, 5.0, SampleSize::from_log(1e5)?, 1e-8),
    ];
    for (d, beta, size, rel_tol) in cases {
        let model = BetaModel::new(d, beta)?;
        let (ratio, report) = expected_volume_ratio(&model, &size, rel_tol)?;
        println!(
            "{d:>6} {beta:>6} {:>12.4} {ratio:>22.15e} {:>10.2e} {:>16} {:>8}",
            size.log_n(),
            report.rel_error_estimate,
            report.method.to_string(),
            report.nodes_used
        );
    }

    // at very large d the mode is within ~1e-5 of h = 1 and the peak spans
    // only ~1e5 representable points, which caps the attainable accuracy
    let model = BetaModel::new(20_000, 5.0)?;
    match expected_volume_ratio(&model, &SampleSize::from_log(1e5)?, 1e-11) {
        Err(Error::ToleranceNotReached { estimate, rel_error, requested }) => {
            println!("\nd = 20000 at rel_tol {requested:e}: best estimate {estimate:.15e}, error bound {rel_error:.2e}")
        }
        other => println!("\nd = 20000 at rel_tol 1e-11: {other:?}"),
    }

    println!("\nn = d + 1 against the closed form:");
    for d in [2u32, 3, 10, 50] {
        let model = BetaModel::new(d, 0.0)?;
        let (quad, _) = expected_volume_ratio(&model, &SampleSize::exact(u64::from(d) + 1)?, 1e-11)?;
        let closed = closed_form_simplex_ratio(&model)?;
        println!("  d = {d:>3}: quadrature {quad:.15e}, closed form {closed:.15e}");
    }
    Ok(())
}

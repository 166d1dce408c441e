//! The upper tail of the one-dimensional marginal and its two-sided envelope.
//!
//! Run with `cargo run --release --example tail_envelope`.

use betapoly::betacdf::FParams;

fn main() -> betapoly::Result<()> {
    println!("{:>8} {:>6} {:>22} {:>22} {:>22}", "z", "h", "lower", "ln(1 - F)", "upper");
    for z in [0.5, 5.0, 500.0, 5e4, 2e7] {
        let p = FParams::new(z)?;
        for h in [0.05, 0.5, 0.9, 0.999] {
            let env = p.envelope_tail(h)?;
            let t = p.log_one_minus_cdf(h)?;
            println!("{z:>8} {h:>6} {:>22.14e} {t:>22.14e} {:>22.14e}", env.lower, env.upper);
        }
    }
    Ok(())
}

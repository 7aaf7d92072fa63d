//! Wyner-Ziv quantizer designed for one side-information quality and decoded
//! with another, checked against a simulation.
//!
//! ```text
//! cargo run --release --example wyner_ziv_mismatch
//! ```

use jscc::mc::{simulate_wz_mismatch, McConfig};
use jscc::mismatch::{wz_mismatch_distortion, WzMismatchInputs};

fn main() -> jscc::Result<()> {
    let mc = McConfig::new(7, 1_000_000)?;
    println!(
        "{:>7} {:>8} {:>8} {:>10} {:>10} {:>7}",
        "d_star", "d_actual", "d", "closed", "simulated", "z"
    );
    for (d_star, d_actual, d) in [
        (0.5, 0.25, 0.1),
        (0.5, 0.1, 0.1),
        (0.3, 0.2, 0.05),
        (0.8, 0.8, 0.2),
    ] {
        let inp = WzMismatchInputs::new(d_star, d_actual, d)?;
        let closed = wz_mismatch_distortion(&inp);
        let sim = simulate_wz_mismatch(&inp, &mc);
        println!(
            "{d_star:>7.3} {d_actual:>8.3} {d:>8.3} {:>10.6} {:>10.6} {:>7.2}",
            closed.distortion,
            sim.mean,
            sim.z_score(closed.distortion)
        );
    }
    Ok(())
}

//! Best secondary distortion when the primary must do as well as it would
//! alone, in both regimes with a known capacity region.
//!
//! ```text
//! cargo run --release --example coexistence
//! ```

use jscc::cognitive::{coexistence, RegionGrid};
use jscc::model::distortion_db;
use jscc::CognitiveConfig;

fn main() -> jscc::Result<()> {
    let grid = RegionGrid::default();
    println!(
        "{:>12} {:>5} {:>10} {:>10} {:>6} {:>7}",
        "regime", "rho", "outer_db", "ach_db", "gamma", "pa"
    );
    for (name, h) in [("weak", 0.5), ("very-strong", 1.5)] {
        for rho in [0.0, 0.25, 0.5] {
            let cfg = CognitiveConfig::new(1.0, 1.0, h, h, rho)?;
            let co = coexistence(&cfg, &grid)?;
            println!(
                "{name:>12} {rho:>5.2} {:>10.4} {:>10.4} {:>6.3} {:>7.4}",
                distortion_db(co.outer),
                distortion_db(co.achievable),
                co.allocation.gamma,
                co.allocation.pa
            );
        }
    }
    Ok(())
}

//! Inner and outer distortion regions of the cognitive radio channel in the
//! weak interference regime, printed as frontiers.
//!
//! ```text
//! cargo run --release --example cognitive_region -- 0.25
//! ```

use jscc::cognitive::{inner_outer_gap, inner_region, outer_region, RegionGrid};
use jscc::model::distortion_db;
use jscc::CognitiveConfig;

fn main() -> jscc::Result<()> {
    let rho: f64 = std::env::args()
        .nth(1)
        .map_or(0.25, |s| s.parse().expect("rho"));
    let cfg = CognitiveConfig::new(1.0, 1.0, 0.5, 0.5, rho)?;
    let grid = RegionGrid::default();
    let inner = inner_region(&cfg, &grid)?;
    let outer = outer_region(&cfg, &grid)?;

    for frontier in [&outer, &inner] {
        println!(
            "{:?} frontier, {} points",
            frontier.kind,
            frontier.points.len()
        );
        let stride = (frontier.points.len() / 12).max(1);
        for p in frontier.points.iter().step_by(stride) {
            println!(
                "  d1 {:>8.4} dB   d2 {:>8.4} dB",
                distortion_db(p.d1),
                distortion_db(p.d2)
            );
        }
    }
    println!(
        "largest d2 gap: {:.3e}",
        inner_outer_gap(&cfg, &inner, &grid)?
    );
    Ok(())
}

//! Outer bounds on the distortion of `V` sent over `Y = X + S + Z`, swept
//! over the channel SNR at a fixed correlation.
//!
//! ```text
//! cargo run --example outer_bounds
//! ```

use jscc::bounds::{combined_outer, outer_bound_1, outer_bound_2};
use jscc::model::distortion_db;
use jscc::{ChannelSpec, SourceModel};

fn main() -> jscc::Result<()> {
    let model = SourceModel::new(1.0, 1.0, 0.3)?;
    println!(
        "{:>7} {:>10} {:>10} {:>10}",
        "snr_db", "ob1_db", "ob2_db", "ob_db"
    );
    for step in 0..=10 {
        let snr_db = 2.0 * step as f64;
        let ch = ChannelSpec::from_snr_db(1.0, snr_db)?;
        println!(
            "{snr_db:>7.1} {:>10.4} {:>10.4} {:>10.4}",
            distortion_db(outer_bound_1(&model, &ch)),
            distortion_db(outer_bound_2(&model, &ch)),
            distortion_db(combined_outer(&model, &ch)),
        );
    }
    Ok(())
}

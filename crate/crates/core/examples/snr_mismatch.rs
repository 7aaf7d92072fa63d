//! Digital DPC and HDA designed for 10 dB and used at other SNRs. Below the
//! design point both lose the digital layer; above it only HDA improves.
//!
//! ```text
//! cargo run --example snr_mismatch
//! ```

use jscc::mismatch::{design_allocation, mismatch_distortion};
use jscc::model::distortion_db;
use jscc::{Allocation, ChannelSpec, Scheme, SourceModel};

fn main() -> jscc::Result<()> {
    let design = ChannelSpec::from_snr_db(1.0, 10.0)?;
    for rho in [0.1, 0.5] {
        let model = SourceModel::new(1.0, 1.0, rho)?;
        let optimal = design_allocation(&model, &design)?;
        let fixed = Allocation::for_channel(1.0, 0.5, &design)?;
        println!(
            "rho = {rho}: design optimum gamma {:.3}, pa {:.4}",
            optimal.gamma(),
            optimal.pa()
        );
        println!(
            "{:>9} {:>12} {:>12} {:>14}",
            "actual_db", "digital_db", "hda_db", "hda_pa0.5_db"
        );
        for step in 0..=8 {
            let actual = 6.0 + 2.0 * step as f64;
            let ch = design.with_actual_snr_db(actual)?;
            println!(
                "{actual:>9.1} {:>12.4} {:>12.4} {:>14.4}",
                distortion_db(mismatch_distortion(
                    &model,
                    &ch,
                    &optimal,
                    Scheme::DigitalDpc
                )?),
                distortion_db(mismatch_distortion(&model, &ch, &optimal, Scheme::Hda)?),
                distortion_db(mismatch_distortion(&model, &ch, &fixed, Scheme::Hda)?),
            );
        }
        println!();
    }
    Ok(())
}

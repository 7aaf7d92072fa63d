//! Information the received signal adds about `V` beyond the side
//! information, for independent source and interference. The channel was
//! designed for 10 dB and turns out to be at 15 dB; only HDA exploits the
//! extra SNR, and the advantage shrinks as the analog power grows.
//!
//! ```text
//! cargo run --example mutual_information
//! ```

use jscc::mismatch::{mi_refinement_digital, mi_refinement_hda};
use jscc::schemes::digital_dpc_distortion;
use jscc::{Allocation, ChannelSpec, SourceModel};

fn main() -> jscc::Result<()> {
    let model = SourceModel::unit(0.0)?;
    let design = ChannelSpec::from_snr_db(1.0, 10.0)?;
    let ch = design.with_actual_snr_db(15.0)?;
    println!("{:>5} {:>12} {:>12}", "pa", "digital_bits", "hda_bits");
    for step in 0..=10 {
        let pa = step as f64 / 10.0;
        let alloc = Allocation::for_channel(1.0, pa, &design)?;
        let d = digital_dpc_distortion(&model, &design, &alloc)?;
        println!(
            "{pa:>5.2} {:>12.6} {:>12.6}",
            mi_refinement_digital(&model, &ch, &alloc, d)?,
            mi_refinement_hda(&model, &ch, &alloc)?
        );
    }
    Ok(())
}

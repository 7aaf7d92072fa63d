//! Optimized distortion of the four schemes across the correlation, with
//! the outer bound for reference. HDA and digital DPC coincide, and the
//! optimum sits on `γ = 1` except at the ends.
//!
//! ```text
//! cargo run --example scheme_comparison
//! ```

use jscc::bounds::combined_outer;
use jscc::model::distortion_db;
use jscc::schemes::optimize_scheme;
use jscc::{ChannelSpec, Scheme, SourceModel};

fn main() -> jscc::Result<()> {
    let ch = ChannelSpec::new(10.0, 1.0)?;
    print!("{:>5}", "rho");
    for s in Scheme::ALL {
        print!(" {:>12}", s.name());
    }
    println!(" {:>12} {:>6} {:>7}", "outer", "gamma", "pa");

    for step in 0..=10 {
        let rho = step as f64 / 10.0;
        let model = SourceModel::new(1.0, 1.0, rho)?;
        print!("{rho:>5.2}");
        let mut best = None;
        for s in Scheme::ALL {
            let res = optimize_scheme(&model, &ch, s)?;
            print!(" {:>12.4}", distortion_db(res.best.distortion));
            if s == Scheme::Hda {
                best = Some(res.best.allocation);
            }
        }
        let alloc = best.expect("hda is in the list");
        println!(
            " {:>12.4} {:>6.3} {:>7.3}",
            distortion_db(combined_outer(&model, &ch)),
            alloc.gamma(),
            alloc.pa()
        );
    }
    Ok(())
}

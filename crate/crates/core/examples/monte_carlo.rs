//! Seeded simulation of the linear estimator and the idealized schemes,
//! compared with the closed forms in units of standard error.
//!
//! ```text
//! cargo run --release --example monte_carlo -- 42
//! ```

use jscc::estimators::analog_params;
use jscc::mc::{simulate_linear_mmse, simulate_scheme_idealized, McConfig};
use jscc::schemes::scheme_distortion;
use jscc::{Allocation, ChannelSpec, Scheme, SourceModel};

fn main() -> jscc::Result<()> {
    let seed: u64 = std::env::args()
        .nth(1)
        .map_or(42, |s| s.parse().expect("seed"));
    let mc = McConfig::new(seed, 1_000_000)?;
    let ch = ChannelSpec::new(10.0, 1.0)?;
    println!(
        "{:>5} {:>5} {:>12} {:>10} {:>10} {:>7}",
        "rho", "pa", "quantity", "closed", "simulated", "z"
    );
    for (rho, pa) in [(0.0, 2.0), (0.3, 5.0), (-0.6, 8.0)] {
        let model = SourceModel::new(1.0, 2.0, rho)?;
        let alloc = Allocation::for_channel(0.7, pa, &ch)?;
        let d_star = analog_params(&model, &ch, &alloc)?.d_star;
        let sim = simulate_linear_mmse(&model, &ch, &alloc, &mc)?;
        println!(
            "{rho:>5.2} {pa:>5.1} {:>12} {d_star:>10.6} {:>10.6} {:>7.2}",
            "d_star",
            sim.mean,
            sim.z_score(d_star)
        );
        for scheme in [Scheme::DigitalDpc, Scheme::Hda] {
            let closed = scheme_distortion(&model, &ch, &alloc, scheme)?;
            let sim = simulate_scheme_idealized(&model, &ch, &alloc, scheme, &mc)?;
            println!(
                "{rho:>5.2} {pa:>5.1} {:>12} {closed:>10.6} {:>10.6} {:>7.2}",
                scheme.name(),
                sim.mean,
                sim.z_score(closed)
            );
        }
    }
    Ok(())
}

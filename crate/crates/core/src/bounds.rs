//! Genie-aided outer bounds on the point-to-point distortion.

use crate::model::{ChannelSpec, SourceModel};

/// Bound with the interference revealed to the decoder:
/// `σ_V²(1-ρ²) / (1 + P/N)`.
pub fn outer_bound_1(model: &SourceModel, channel: &ChannelSpec) -> f64 {
    let rho = model.rho();
    model.sigma_v2() * (1.0 - rho * rho) / (1.0 + channel.p() / channel.n_design())
}

/// Bound with only the innovation of `S` given `V` revealed:
/// `σ_V² / (1 + (√P + |ρ|σ_S)² / N)`.
///
/// The coherent term is largest when `X` is aligned with `ρV`, so negative
/// correlations give the same bound as positive ones.
pub fn outer_bound_2(model: &SourceModel, channel: &ChannelSpec) -> f64 {
    let coherent = channel.p().sqrt() + model.rho().abs() * model.sigma_s();
    model.sigma_v2() / (1.0 + coherent * coherent / channel.n_design())
}

/// `max` of the two bounds.
pub fn combined_outer(model: &SourceModel, channel: &ChannelSpec) -> f64 {
    outer_bound_1(model, channel).max(outer_bound_2(model, channel))
}

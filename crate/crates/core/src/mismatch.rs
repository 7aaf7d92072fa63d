//! Behavior of the digital-DPC and HDA schemes when the actual channel noise
//! differs from the one they were designed for.
//!
//! Below the design noise both schemes still decode their digital part and
//! improve gracefully; above it neither does, and both fall back to the
//! analog estimate `D*_a`. The mutual-information helpers compare how much
//! the refinement layer of each scheme says about `V` beyond `Y`, and are
//! only defined for independent source and interference.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::estimators::{analog_params, analog_params_at, hda_coefficients, moment_set};
use crate::model::{validate, Allocation, ChannelSpec, Scheme, SourceModel};
use crate::schemes::{digital_dpc_distortion, optimize_scheme};

/// Designed and actual side-information quality of a Wyner-Ziv code.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WzMismatchInputs {
    d_star: f64,
    d_star_actual: f64,
    d_design: f64,
    alpha_sep2: f64,
}

impl WzMismatchInputs {
    pub fn new(d_star: f64, d_star_actual: f64, d_design: f64) -> Result<Self> {
        if !(d_design.is_finite() && d_star.is_finite() && d_design > 0.0 && d_design <= d_star) {
            return Err(Error::invalid(
                "wyner-ziv design",
                format!(
                    "need 0 < d_design <= d_star, got d_design = {d_design}, d_star = {d_star}"
                ),
            ));
        }
        if !(d_star_actual.is_finite() && d_star_actual > 0.0) {
            return Err(Error::invalid(
                "wyner-ziv side information",
                format!("d_star_actual = {d_star_actual} must be > 0"),
            ));
        }
        Ok(WzMismatchInputs {
            d_star,
            d_star_actual,
            d_design,
            alpha_sep2: (d_star - d_design) / d_star,
        })
    }

    pub fn d_star(&self) -> f64 {
        self.d_star
    }

    pub fn d_star_actual(&self) -> f64 {
        self.d_star_actual
    }

    pub fn d_design(&self) -> f64 {
        self.d_design
    }

    /// Quantizer gain `√((D* - D)/D*)` of the test channel `T = α_sep V + B`.
    pub fn alpha_sep(&self) -> f64 {
        self.alpha_sep2.sqrt()
    }

    pub fn alpha_sep2(&self) -> f64 {
        self.alpha_sep2
    }
}

/// Distortion actually achieved with mismatched side information.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WzMismatch {
    pub distortion: f64,
    /// The side information is worse than designed for. The formula is still
    /// evaluated, but nothing guarantees the code decodes in this regime.
    pub worse_than_designed: bool,
}

/// `D_a = D* D*_a / (D* D*_a + (D* - D*_a) D) · D`: the code is fixed by the
/// design, but the decoder's final estimate uses the actual side-information
/// quality.
pub fn wz_mismatch_distortion(inp: &WzMismatchInputs) -> WzMismatch {
    WzMismatch {
        distortion: wz_formula(inp.d_star, inp.d_star_actual, inp.d_design),
        worse_than_designed: inp.d_star_actual > inp.d_star,
    }
}

fn wz_formula(d_star: f64, d_star_actual: f64, d: f64) -> f64 {
    let num = d_star * d_star_actual;
    if num == 0.0 || d == 0.0 {
        return 0.0;
    }
    num / (num + (d_star - d_star_actual) * d) * d
}

fn require_decodable(channel: &ChannelSpec, what: &str) -> Result<()> {
    if channel.n_actual() > channel.n_design() {
        Err(Error::Precondition(format!(
            "{what} needs n_actual <= n_design (got {} > {}); use degraded_distortion",
            channel.n_actual(),
            channel.n_design()
        )))
    } else {
        Ok(())
    }
}

/// Allocation minimizing the matched distortion at the design noise. Both
/// schemes share it since their matched distortions coincide.
pub fn design_allocation(model: &SourceModel, channel: &ChannelSpec) -> Result<Allocation> {
    Ok(
        optimize_scheme(model, &channel.matched(), Scheme::DigitalDpc)?
            .best
            .allocation,
    )
}

/// Digital DPC designed for `n_design`, operated at `n_actual <= n_design`.
pub fn digital_dpc_mismatch(
    model: &SourceModel,
    channel: &ChannelSpec,
    alloc: &Allocation,
) -> Result<f64> {
    require_decodable(channel, "digital_dpc_mismatch")?;
    validate(model, channel, alloc)?;
    let d_star = analog_params(model, channel, alloc)?.d_star;
    let d_sep = digital_dpc_distortion(model, &channel.matched(), alloc)?;
    let d_star_actual = analog_params_at(model, channel.p(), alloc, channel.n_actual())?.d_star;
    Ok(wz_formula(d_star, d_star_actual, d_sep))
}

/// HDA designed for `n_design`, operated at `n_actual <= n_design`. Only
/// `E[Y²]` sees the actual noise.
pub fn hda_mismatch(model: &SourceModel, channel: &ChannelSpec, alloc: &Allocation) -> Result<f64> {
    require_decodable(channel, "hda_mismatch")?;
    validate(model, channel, alloc)?;
    let d_star = analog_params(model, channel, alloc)?.d_star;
    let coeffs = hda_coefficients(channel, alloc, d_star)?;
    let moments = moment_set(model, channel, alloc, &coeffs)?;
    Ok(moments
        .joint_mmse(model.sigma_v2())
        .clamp(0.0, model.sigma_v2()))
}

/// `D*_a`: both schemes lose their refinement layer and keep only the linear
/// estimate from `Y` at the actual noise. Meant for `n_actual > n_design` but
/// evaluated literally for any noise.
pub fn degraded_distortion(
    model: &SourceModel,
    channel: &ChannelSpec,
    alloc: &Allocation,
) -> Result<f64> {
    validate(model, channel, alloc)?;
    Ok(analog_params_at(model, channel.p(), alloc, channel.n_actual())?.d_star)
}

/// Mismatched distortion of `scheme` on either side of the design point.
pub fn mismatch_distortion(
    model: &SourceModel,
    channel: &ChannelSpec,
    alloc: &Allocation,
    scheme: Scheme,
) -> Result<f64> {
    if channel.n_actual() > channel.n_design() {
        return degraded_distortion(model, channel, alloc);
    }
    match scheme {
        Scheme::DigitalDpc => digital_dpc_mismatch(model, channel, alloc),
        Scheme::Hda => hda_mismatch(model, channel, alloc),
        other => Err(Error::invalid(
            "scheme",
            format!("{other} has no mismatch model; use digital-dpc or hda"),
        )),
    }
}

fn require_independent(model: &SourceModel, what: &str) -> Result<()> {
    if model.rho() != 0.0 {
        Err(Error::Precondition(format!(
            "{what} is only defined for rho = 0, got {}",
            model.rho()
        )))
    } else {
        Ok(())
    }
}

/// `I(V;T|Y) = ½ log₂((α_sep² D*_a + D) / D)` in bits.
pub fn mi_digital_closed_form(d_star: f64, d_star_actual: f64, d_design: f64) -> Result<f64> {
    let inp = WzMismatchInputs::new(d_star, d_star_actual, d_design)?;
    Ok(0.5 * ((inp.alpha_sep2 * inp.d_star_actual + d_design) / d_design).log2())
}

/// Information the Wyner-Ziv description carries about `V` beyond `Y`, for a
/// code designed to reach `d_design` at the design noise.
pub fn mi_refinement_digital(
    model: &SourceModel,
    channel: &ChannelSpec,
    alloc: &Allocation,
    d_design: f64,
) -> Result<f64> {
    require_independent(model, "mi_refinement_digital")?;
    validate(model, channel, alloc)?;
    let d_star = analog_params(model, channel, alloc)?.d_star;
    let d_star_actual = analog_params_at(model, channel.p(), alloc, channel.n_actual())?.d_star;
    mi_digital_closed_form(d_star, d_star_actual, d_design)
}

/// `I(V;U|Y) = ½ log₂(Var(U|Y) / ((1-α)² P_h + α² N_a))` in bits. A lower
/// bound under mismatch, exact when matched.
pub fn mi_refinement_hda(
    model: &SourceModel,
    channel: &ChannelSpec,
    alloc: &Allocation,
) -> Result<f64> {
    require_independent(model, "mi_refinement_hda")?;
    validate(model, channel, alloc)?;
    let p_h = alloc.p_h(channel);
    if p_h == 0.0 {
        return Ok(0.0);
    }
    let d_star = analog_params(model, channel, alloc)?.d_star;
    let coeffs = hda_coefficients(channel, alloc, d_star)?;
    let moments = moment_set(model, channel, alloc, &coeffs)?;
    let alpha = coeffs.alpha;
    let floor = (1.0 - alpha).powi(2) * p_h + alpha * alpha * channel.n_actual();
    Ok(0.5 * (moments.u_given_y_variance() / floor).log2())
}

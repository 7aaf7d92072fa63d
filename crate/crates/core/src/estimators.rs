//! Covariance algebra for the analog layer and the HDA auxiliary variable.
//!
//! The transmitted signal is `X = X_d + X_a` with the analog part
//! `X_a = √a (γV + (1-γ)S)` of power `P_a`. The receiver sees
//! `Y = X_d + S' + Z`, where `S' = √a γ V + (1 + √a(1-γ)) S` is the effective
//! interference, and first forms the linear estimate `βY`. Everything here is
//! closed-form; sampling lives in [`crate::mc`].

use crate::error::{Error, Result};
use crate::model::{check_budget, Allocation, ChannelSpec, SourceModel};

/// Threshold separating true degeneracy from round-off.
pub const EPS: f64 = 1e-12;

/// Analog layer seen through the linear estimate from `Y` alone.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnalogParams {
    /// Variance of `γV + (1-γ)S`.
    pub sigma_a2: f64,
    /// Scaling `P_a / σ_a²` (zero without analog power).
    pub a: f64,
    /// `E[VY]`.
    pub e_vy: f64,
    /// `E[Y²]` at the noise level the parameters were computed for.
    pub e_y2: f64,
    /// Linear MMSE coefficient `E[VY] / E[Y²]`.
    pub beta: f64,
    /// MSE of `V - βY`.
    pub d_star: f64,
}

/// Analog parameters at the design noise of `channel`.
pub fn analog_params(
    model: &SourceModel,
    channel: &ChannelSpec,
    alloc: &Allocation,
) -> Result<AnalogParams> {
    analog_params_at(model, channel.p(), alloc, channel.n_design())
}

/// Analog parameters with an explicit noise variance, used for `D*_a`.
pub fn analog_params_at(
    model: &SourceModel,
    p: f64,
    alloc: &Allocation,
    noise: f64,
) -> Result<AnalogParams> {
    check_budget(alloc, p)?;
    let (sigma_a2, a) = analog_scaling(model, alloc)?;
    let sa = a.sqrt();
    let g = alloc.gamma();
    let cov = model.cov_vs();

    let e_vy = sa * (g * model.sigma_v2() + (1.0 - g) * cov) + cov;
    let e_y2 = p + noise + model.sigma_s2() + 2.0 * sa * ((1.0 - g) * model.sigma_s2() + g * cov);
    let beta = e_vy / e_y2;
    // σ_V² - E[VY]²/E[Y²] written as σ_V² Var(Y|V) / E[Y²], which avoids the
    // cancellation when Y is nearly a multiple of V.
    let c = 1.0 + sa * (1.0 - g);
    let rho = model.rho();
    let var_y_given_v = c * c * model.sigma_s2() * (1.0 - rho * rho) + (p - alloc.pa()) + noise;
    let d_star = (model.sigma_v2() * var_y_given_v / e_y2).clamp(0.0, model.sigma_v2());
    Ok(AnalogParams {
        sigma_a2,
        a,
        e_vy,
        e_y2,
        beta,
        d_star,
    })
}

/// `(σ_a², a)` for the analog combination.
pub(crate) fn analog_scaling(model: &SourceModel, alloc: &Allocation) -> Result<(f64, f64)> {
    let g = alloc.gamma();
    let sigma_a2 = g * g * model.sigma_v2()
        + (1.0 - g) * (1.0 - g) * model.sigma_s2()
        + 2.0 * g * (1.0 - g) * model.cov_vs();
    let sigma_a2 = sigma_a2.max(0.0);
    if alloc.pa() == 0.0 {
        return Ok((sigma_a2, 0.0));
    }
    if sigma_a2 <= EPS {
        return Err(Error::DegenerateDirection {
            sigma_a2,
            pa: alloc.pa(),
        });
    }
    Ok((sigma_a2, alloc.pa() / sigma_a2))
}

/// Coefficients of `U = X_h + αS' + κV`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HdaCoefficients {
    pub alpha: f64,
    /// Nonnegative root of `κ² = P_h² / ((P_h + N) D*)`.
    pub kappa: f64,
    pub p_h: f64,
}

/// HDA coefficients designed for the design noise of `channel` and the
/// side-information MSE `d_star`.
pub fn hda_coefficients(
    channel: &ChannelSpec,
    alloc: &Allocation,
    d_star: f64,
) -> Result<HdaCoefficients> {
    check_budget(alloc, channel.p())?;
    let p_h = alloc.p_h(channel);
    hda_coefficients_for(p_h, channel.n_design(), d_star)
}

pub(crate) fn hda_coefficients_for(p_h: f64, noise: f64, d_star: f64) -> Result<HdaCoefficients> {
    if p_h == 0.0 {
        return Ok(HdaCoefficients {
            alpha: 0.0,
            kappa: 0.0,
            p_h,
        });
    }
    if d_star <= EPS {
        return Err(Error::DegenerateSideInformation { d_star, p_h });
    }
    Ok(HdaCoefficients {
        alpha: p_h / (p_h + noise),
        kappa: p_h / ((p_h + noise) * d_star).sqrt(),
        p_h,
    })
}

/// Second moments of `S'`, `U`, `Y` and `V`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MomentSet {
    pub e_sp2: f64,
    pub e_spv: f64,
    pub e_u2: f64,
    pub e_y2: f64,
    pub e_uy: f64,
    pub e_vu: f64,
    pub e_vy: f64,
}

/// Moments for the given coefficients. `E[Y²]` uses the actual noise of
/// `channel`; nothing else depends on the noise.
pub fn moment_set(
    model: &SourceModel,
    channel: &ChannelSpec,
    alloc: &Allocation,
    coeffs: &HdaCoefficients,
) -> Result<MomentSet> {
    check_budget(alloc, channel.p())?;
    let (_, a) = analog_scaling(model, alloc)?;
    let sa = a.sqrt();
    let g = alloc.gamma();
    let c = 1.0 + sa * (1.0 - g);
    let sv2 = model.sigma_v2();
    let cov = model.cov_vs();

    let e_sp2 = a * g * g * sv2 + c * c * model.sigma_s2() + 2.0 * sa * g * c * cov;
    let e_spv = sa * g * sv2 + c * cov;

    let HdaCoefficients { alpha, kappa, p_h } = *coeffs;
    Ok(MomentSet {
        e_sp2,
        e_spv,
        e_u2: p_h + alpha * alpha * e_sp2 + kappa * kappa * sv2 + 2.0 * alpha * kappa * e_spv,
        e_y2: p_h + e_sp2 + channel.n_actual(),
        e_uy: p_h + alpha * e_sp2 + kappa * e_spv,
        e_vu: alpha * e_spv + kappa * sv2,
        e_vy: e_spv,
    })
}

impl MomentSet {
    /// MSE of the linear estimate of `V` from `Y` alone.
    pub fn mmse_from_y(&self, sigma_v2: f64) -> f64 {
        sigma_v2 - self.e_vy * self.e_vy / self.e_y2
    }

    /// `Var(U | Y) = E[U²] - E[UY]² / E[Y²]`.
    pub fn u_given_y_variance(&self) -> f64 {
        self.e_u2 - self.e_uy * self.e_uy / self.e_y2
    }

    /// Weights `Λ_UY⁻¹ Γ` of the joint estimate `w_u U + w_y Y`.
    pub fn joint_weights(&self) -> (f64, f64) {
        let det = self.e_u2 * self.e_y2 - self.e_uy * self.e_uy;
        let w_u = (self.e_y2 * self.e_vu - self.e_uy * self.e_vy) / det;
        let w_y = (self.e_u2 * self.e_vy - self.e_uy * self.e_vu) / det;
        (w_u, w_y)
    }

    /// `σ_V² - Γᵀ Λ_UY⁻¹ Γ` with `Γ = [E[VU], E[VY]]`.
    ///
    /// Evaluated by eliminating `Y` first: the MSE from `Y`, less the part of
    /// `U` that is new given `Y`. This is the same 2×2 solve, arranged to
    /// avoid subtracting two large quadratic forms.
    pub fn joint_mmse(&self, sigma_v2: f64) -> f64 {
        let from_y = self.mmse_from_y(sigma_v2);
        let cross = self.e_vu - self.e_vy * self.e_uy / self.e_y2;
        let innovation = self.u_given_y_variance();
        if innovation <= 0.0 {
            return from_y;
        }
        from_y - cross * cross / innovation
    }

    /// `E[U²] E[Y²] - E[UY]²`.
    pub fn determinant(&self) -> f64 {
        self.e_u2 * self.e_y2 - self.e_uy * self.e_uy
    }
}

//! Achievable distortion of each scheme, at a fixed allocation or optimized
//! over `(γ, P_a)`.

use crate::error::{Error, Result};
use crate::estimators::{analog_params, hda_coefficients, moment_set};
use crate::model::{validate, Allocation, ChannelSpec, DistortionPoint, Scheme, SourceModel};
use crate::optimizer::{grid_refine, GridSpec};

/// Full-power coherent analog transmission: `D*` at `(γ = 1, P_a = P)`.
pub fn uncoded_distortion(model: &SourceModel, channel: &ChannelSpec) -> Result<f64> {
    Ok(analog_params(model, channel, &Allocation::uncoded(channel))?.d_star)
}

/// Quantizer plus dirty paper coding, treating `S` as pure interference.
pub fn naive_dpc_distortion(model: &SourceModel, channel: &ChannelSpec) -> f64 {
    model.sigma_v2() / (1.0 + channel.p() / channel.n_design())
}

/// Analog layer plus Wyner-Ziv refinement: `D* / (1 + (P - P_a)/N)`.
pub fn digital_dpc_distortion(
    model: &SourceModel,
    channel: &ChannelSpec,
    alloc: &Allocation,
) -> Result<f64> {
    validate(model, channel, alloc)?;
    let d_star = analog_params(model, channel, alloc)?.d_star;
    Ok(d_star / (1.0 + alloc.p_h(channel) / channel.n_design()))
}

/// Analog layer plus HDA refinement, estimated jointly from `U` and `Y`.
pub fn hda_distortion(
    model: &SourceModel,
    channel: &ChannelSpec,
    alloc: &Allocation,
) -> Result<f64> {
    if !channel.is_matched() {
        return Err(Error::Precondition(
            "hda_distortion needs a matched channel; use mismatch::hda_mismatch".into(),
        ));
    }
    validate(model, channel, alloc)?;
    let ap = analog_params(model, channel, alloc)?;
    if alloc.p_h(channel) == 0.0 {
        return Ok(ap.d_star);
    }
    let coeffs = hda_coefficients(channel, alloc, ap.d_star)?;
    let moments = moment_set(model, channel, alloc, &coeffs)?;
    Ok(moments
        .joint_mmse(model.sigma_v2())
        .clamp(0.0, model.sigma_v2()))
}

/// Distortion of `scheme`; the allocation is ignored by the two schemes that
/// have none.
pub fn scheme_distortion(
    model: &SourceModel,
    channel: &ChannelSpec,
    alloc: &Allocation,
    scheme: Scheme,
) -> Result<f64> {
    match scheme {
        Scheme::Uncoded => uncoded_distortion(model, channel),
        Scheme::NaiveDpc => Ok(naive_dpc_distortion(model, channel)),
        Scheme::DigitalDpc => digital_dpc_distortion(model, channel, alloc),
        Scheme::Hda => hda_distortion(model, channel, alloc),
    }
}

/// Outcome of [`optimize_scheme`].
#[derive(Debug, Clone, PartialEq)]
pub struct SchemeResult {
    pub scheme: Scheme,
    pub best: DistortionPoint,
    /// Coarse-grid evaluations, when requested.
    pub grid: Option<Vec<DistortionPoint>>,
    /// Best point with `γ` pinned to 1.
    pub best_gamma_one: DistortionPoint,
    /// No `γ < 1` allocation beat the `γ = 1` line by more than the
    /// refinement tolerance.
    pub gamma_one_optimal: bool,
}

/// Search grid over `(P_a, γ)`. The axis order makes the lexicographic
/// tie-break prefer the smallest `P_a`, then the smallest `γ`.
pub fn default_allocation_grid(channel: &ChannelSpec) -> GridSpec {
    GridSpec::new(&[(0.0, channel.p()), (0.0, 1.0)]).expect("valid default grid")
}

/// Minimizes the scheme's distortion over `γ ∈ [0, 1]`, `P_a ∈ [0, P]` with
/// the default grid.
pub fn optimize_scheme(
    model: &SourceModel,
    channel: &ChannelSpec,
    scheme: Scheme,
) -> Result<SchemeResult> {
    optimize_scheme_with(
        model,
        channel,
        scheme,
        &default_allocation_grid(channel),
        false,
    )
}

pub fn optimize_scheme_with(
    model: &SourceModel,
    channel: &ChannelSpec,
    scheme: Scheme,
    spec: &GridSpec,
    keep_grid: bool,
) -> Result<SchemeResult> {
    let channel = channel.matched();
    if !scheme.has_allocation() {
        let alloc = match scheme {
            Scheme::Uncoded => Allocation::uncoded(&channel),
            _ => Allocation::digital_only(),
        };
        let d = scheme_distortion(model, &channel, &alloc, scheme)?;
        let point = DistortionPoint::new(model, alloc, d, scheme)?;
        return Ok(SchemeResult {
            scheme,
            best: point,
            grid: None,
            best_gamma_one: point,
            gamma_one_optimal: true,
        });
    }

    let evaluate = |pa: f64, gamma: f64| -> Result<f64> {
        let alloc = Allocation::for_channel(gamma, pa.min(channel.p()), &channel)?;
        scheme_distortion(model, &channel, &alloc, scheme)
    };
    let objective = |x: &[f64]| evaluate(x[0], x[1]).unwrap_or(f64::NAN);

    let min = grid_refine(objective, spec).map_err(|e| surface(e, &evaluate))?;
    let alloc = Allocation::for_channel(min.argmin[1], min.argmin[0], &channel)?;
    let best = DistortionPoint::new(model, alloc, min.value, scheme)?;

    let line_spec = GridSpec::from_axes(vec![spec.axes[0]])?
        .with_refinement(spec.rounds, spec.shrink)?
        .with_tolerance(spec.tolerance)?;
    let line = grid_refine(|x| evaluate(x[0], 1.0).unwrap_or(f64::NAN), &line_spec)
        .map_err(|e| surface(e, &|pa, _| evaluate(pa, 1.0)))?;
    let line_alloc = Allocation::for_channel(1.0, line.argmin[0], &channel)?;
    let best_gamma_one = DistortionPoint::new(model, line_alloc, line.value, scheme)?;
    let gamma_one_optimal = best.distortion >= best_gamma_one.distortion - spec.tolerance;

    let grid = if keep_grid {
        let pas = spec.axes[0].points();
        let gammas = spec.axes[1].points();
        let mut points = Vec::with_capacity(pas.len() * gammas.len());
        for &pa in &pas {
            for &gamma in &gammas {
                let alloc = Allocation::for_channel(gamma, pa, &channel)?;
                let d = scheme_distortion(model, &channel, &alloc, scheme)?;
                points.push(DistortionPoint::new(model, alloc, d, scheme)?);
            }
        }
        Some(points)
    } else {
        None
    };

    Ok(SchemeResult {
        scheme,
        best,
        grid,
        best_gamma_one,
        gamma_one_optimal,
    })
}

/// Replaces a grid abort caused by a failed evaluation with the underlying
/// error.
fn surface(err: Error, evaluate: &dyn Fn(f64, f64) -> Result<f64>) -> Error {
    if let Error::NonFinite { coords, .. } = &err {
        let gamma = coords.get(1).copied().unwrap_or(1.0);
        if let Err(inner) = evaluate(coords[0], gamma) {
            return inner;
        }
    }
    err
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bounds::{combined_outer, outer_bound_1, outer_bound_2};
    use proptest::prelude::*;

    fn unit(rho: f64) -> SourceModel {
        SourceModel::unit(rho).unwrap()
    }

    fn ch(p: f64, n: f64) -> ChannelSpec {
        ChannelSpec::new(p, n).unwrap()
    }

    fn alloc(g: f64, pa: f64) -> Allocation {
        Allocation::new(g, pa).unwrap()
    }

    const ONE_ELEVENTH: f64 = 1.0 / 11.0;

    fn coherent_limit() -> f64 {
        let s = 10f64.sqrt() + 1.0;
        1.0 / (1.0 + s * s)
    }

    #[test]
    fn uncoded_examples() {
        let d = uncoded_distortion(&unit(1.0), &ch(10.0, 1.0)).unwrap();
        assert!((d - coherent_limit()).abs() < 1e-15);
        assert!((d - outer_bound_2(&unit(1.0), &ch(10.0, 1.0))).abs() < 1e-15);

        // Vanishing interference: the Goblick limit σ_V²/(1 + P/N).
        let weak = SourceModel::new(1.0, 1e-14, 0.0).unwrap();
        let d = uncoded_distortion(&weak, &ch(10.0, 1.0)).unwrap();
        assert!((d - ONE_ELEVENTH).abs() < 1e-12);

        // Independent unit interference: 1 - P/(P + N + σ_S²) = 2/12.
        let d = uncoded_distortion(&unit(0.0), &ch(10.0, 1.0)).unwrap();
        assert!((d - 1.0 / 6.0).abs() < 1e-15);
    }

    #[test]
    fn naive_dpc_examples() {
        assert!((naive_dpc_distortion(&unit(0.0), &ch(10.0, 1.0)) - ONE_ELEVENTH).abs() < 1e-15);
        let m = SourceModel::new(2.0, 1.0, 0.0).unwrap();
        assert_eq!(naive_dpc_distortion(&m, &ch(1.0, 1.0)), 1.0);
        let base = naive_dpc_distortion(&unit(0.0), &ch(10.0, 1.0));
        for rho in [-0.5, 0.2, 0.9, 1.0] {
            assert_eq!(naive_dpc_distortion(&unit(rho), &ch(10.0, 1.0)), base);
        }
    }

    #[test]
    fn digital_dpc_examples() {
        for g in [0.0, 0.5, 1.0] {
            let d = digital_dpc_distortion(&unit(0.0), &ch(10.0, 1.0), &alloc(g, 0.0)).unwrap();
            assert!((d - ONE_ELEVENTH).abs() < 1e-15);
        }
        let model = unit(0.6);
        let channel = ch(10.0, 1.0);
        let full = alloc(0.8, 10.0);
        let d = digital_dpc_distortion(&model, &channel, &full).unwrap();
        assert_eq!(d, analog_params(&model, &channel, &full).unwrap().d_star);

        // Composition of the frozen D* fixture with the refinement factor 1 + 8/1.
        let d = digital_dpc_distortion(&unit(0.3), &channel, &alloc(1.0, 2.0)).unwrap();
        assert!((d - 0.7712945711762254 / 9.0).abs() < 1e-15);
        assert!((d - 0.08569939679735837).abs() < 1e-15);
    }

    #[test]
    fn hda_examples() {
        let d = hda_distortion(&unit(0.0), &ch(10.0, 1.0), &alloc(1.0, 0.0)).unwrap();
        assert!((d - ONE_ELEVENTH).abs() < 1e-14);
        let d = hda_distortion(&unit(0.3), &ch(10.0, 1.0), &alloc(1.0, 2.0)).unwrap();
        // Independent numpy simulation (4e6 samples): 0.085866 ± 0.000061.
        assert!((d - 0.08569939679735837).abs() < 1e-13);
    }

    #[test]
    fn hda_rejects_mismatched_channel() {
        let c = ch(10.0, 1.0).with_actual_noise(0.5).unwrap();
        assert!(matches!(
            hda_distortion(&unit(0.3), &c, &alloc(1.0, 2.0)),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn optimum_at_zero_correlation_is_digital_only() {
        let res = optimize_scheme(&unit(0.0), &ch(10.0, 1.0), Scheme::DigitalDpc).unwrap();
        assert!((res.best.distortion - ONE_ELEVENTH).abs() < 1e-12);
        assert_eq!(res.best.allocation.pa(), 0.0);
        // Tie-break: every γ gives the same value at P_a = 0.
        assert_eq!(res.best.allocation.gamma(), 0.0);
        assert!(res.gamma_one_optimal);
    }

    #[test]
    fn optimum_at_unit_correlation_is_uncoded() {
        for scheme in [Scheme::DigitalDpc, Scheme::Hda] {
            let res = optimize_scheme(&unit(1.0), &ch(10.0, 1.0), scheme).unwrap();
            assert!((res.best.distortion - coherent_limit()).abs() < 1e-12);
            assert_eq!(res.best.allocation.pa(), 10.0);
            // V = S, so every γ spans the same direction; the tie-break takes 0.
            assert!((res.best_gamma_one.distortion - res.best.distortion).abs() < 1e-12);
        }
    }

    #[test]
    fn optimum_beats_both_baselines_at_rho_03() {
        let model = unit(0.3);
        let channel = ch(10.0, 1.0);
        let res = optimize_scheme(&model, &channel, Scheme::DigitalDpc).unwrap();
        let baseline = uncoded_distortion(&model, &channel)
            .unwrap()
            .min(naive_dpc_distortion(&model, &channel));
        assert!(res.best.distortion < baseline - 1e-6);
        assert!(res.best.distortion >= combined_outer(&model, &channel));
        assert!(res.gamma_one_optimal);
    }

    #[test]
    fn keep_grid_records_coarse_points() {
        let channel = ch(10.0, 1.0);
        let spec = default_allocation_grid(&channel).with_count(8).unwrap();
        let res =
            optimize_scheme_with(&unit(0.5), &channel, Scheme::DigitalDpc, &spec, true).unwrap();
        let grid = res.grid.unwrap();
        assert_eq!(grid.len(), 64);
        let coarse_min = grid
            .iter()
            .map(|p| p.distortion)
            .fold(f64::INFINITY, f64::min);
        assert!(res.best.distortion <= coarse_min);
    }

    #[test]
    fn endpoints_tight() {
        let channel = ch(10.0, 1.0);
        let at0 = optimize_scheme(&unit(0.0), &channel, Scheme::Hda).unwrap();
        assert!((at0.best.distortion - outer_bound_1(&unit(0.0), &channel)).abs() < 1e-9);
        let at1 = optimize_scheme(&unit(1.0), &channel, Scheme::Hda).unwrap();
        assert!((at1.best.distortion - outer_bound_2(&unit(1.0), &channel)).abs() < 1e-9);
    }

    #[test]
    fn gamma_one_is_optimal_on_a_correlation_sweep() {
        let channel = ch(10.0, 1.0);
        for i in 0..=10 {
            let rho = i as f64 / 10.0;
            let res = optimize_scheme(&unit(rho), &channel, Scheme::DigitalDpc).unwrap();
            assert!(
                res.gamma_one_optimal,
                "rho {rho}: {:?} vs {:?}",
                res.best, res.best_gamma_one
            );
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(200))]
        #[test]
        fn digital_and_hda_coincide(
            sv2 in 0.1f64..10.0, ss2 in 0.1f64..10.0, rho in -0.99f64..0.99,
            snr in 0.1f64..100.0, g in 0.0f64..=1.0, frac in 0.0f64..=1.0,
        ) {
            let model = SourceModel::new(sv2, ss2, rho).unwrap();
            let channel = ch(snr, 1.0);
            let a = Allocation::for_channel(g, frac * snr, &channel).unwrap();
            let d_sep = digital_dpc_distortion(&model, &channel, &a).unwrap();
            let d_hda = hda_distortion(&model, &channel, &a).unwrap();
            prop_assert!((d_sep - d_hda).abs() <= 1e-9 * d_sep.max(1e-12));
            prop_assert!(d_sep > 0.0 && d_sep <= sv2);
        }
    }
}

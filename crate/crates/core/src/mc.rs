//! Seeded Monte-Carlo re-derivation of the closed forms.
//!
//! Every simulation splits its samples over 64 fixed shards. Shard `j` draws
//! from a ChaCha8 generator seeded with the configured seed and stream
//! `tag << 32 | j`, where the tag identifies the simulation, so results are
//! bit-identical regardless of thread count. Shard sums are compensated and
//! combined in shard order.
//!
//! The digital refinement is modeled by its Gaussian test channel
//! `T = α_sep V + B` rather than an actual code; the HDA auxiliary is built
//! at the encoder as `U = X_h + αS' + κV`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::estimators::{
    analog_params, analog_params_at, analog_scaling, hda_coefficients, moment_set,
};
use crate::mismatch::WzMismatchInputs;
use crate::model::{validate, Allocation, ChannelSpec, Scheme, SourceModel};
use crate::schemes::{digital_dpc_distortion, naive_dpc_distortion};

const SHARDS: u64 = 64;

/// Smallest accepted sample count.
pub const MIN_SAMPLES: usize = 10_000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct McConfig {
    pub seed: u64,
    pub samples: usize,
    /// Multiplier on the standard error used by [`Estimate::agrees`].
    pub confidence_k: f64,
}

impl McConfig {
    pub fn new(seed: u64, samples: usize) -> Result<Self> {
        if samples < MIN_SAMPLES {
            return Err(Error::invalid(
                "samples",
                format!("{samples} < {MIN_SAMPLES}"),
            ));
        }
        Ok(McConfig {
            seed,
            samples,
            confidence_k: 3.0,
        })
    }

    pub fn with_confidence(self, k: f64) -> Result<Self> {
        if !(k > 0.0 && k.is_finite()) {
            return Err(Error::invalid("confidence_k", format!("{k} must be > 0")));
        }
        Ok(McConfig {
            confidence_k: k,
            ..self
        })
    }

    pub fn with_seed(self, seed: u64) -> Self {
        McConfig { seed, ..self }
    }
}

impl Default for McConfig {
    fn default() -> Self {
        McConfig {
            seed: 0,
            samples: 1_000_000,
            confidence_k: 3.0,
        }
    }
}

/// Sample mean with its standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Estimate {
    pub mean: f64,
    pub std_error: f64,
}

impl Estimate {
    /// Distance from `truth` in standard errors.
    pub fn z_score(&self, truth: f64) -> f64 {
        let diff = (self.mean - truth).abs();
        if diff == 0.0 {
            0.0
        } else {
            diff / self.std_error
        }
    }

    pub fn agrees(&self, truth: f64, k: f64) -> bool {
        self.z_score(truth) <= k
    }
}

/// Neumaier-compensated running sum.
#[derive(Debug, Clone, Copy, Default)]
struct Compensated {
    sum: f64,
    carry: f64,
}

impl Compensated {
    fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.carry += (self.sum - t) + x;
        } else {
            self.carry += (x - t) + self.sum;
        }
        self.sum = t;
    }

    fn value(&self) -> f64 {
        self.sum + self.carry
    }
}

mod tag {
    pub const SOURCES: u64 = 1;
    pub const LINEAR: u64 = 2;
    pub const SCHEME: u64 = 3;
    pub const MISMATCH: u64 = 4;
    pub const WZ: u64 = 5;
    pub const MOMENTS: u64 = 6;
    pub const STATS: u64 = 7;
}

fn shard_rng(seed: u64, tag: u64, shard: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(tag << 32 | shard);
    rng
}

fn shard_len(samples: usize, shard: u64) -> usize {
    let base = samples / SHARDS as usize;
    base + usize::from((shard as usize) < samples % SHARDS as usize)
}

fn normal(rng: &mut ChaCha8Rng) -> f64 {
    rng.sample(StandardNormal)
}

/// Means and standard errors of `K` per-sample statistics.
fn simulate<const K: usize, F>(mc: &McConfig, tag: u64, draw: F) -> [Estimate; K]
where
    F: Fn(&mut ChaCha8Rng) -> [f64; K] + Sync,
{
    let shards: Vec<[(f64, f64); K]> = (0..SHARDS)
        .into_par_iter()
        .map(|shard| {
            let mut rng = shard_rng(mc.seed, tag, shard);
            let mut sums = [Compensated::default(); K];
            let mut squares = [Compensated::default(); K];
            for _ in 0..shard_len(mc.samples, shard) {
                let x = draw(&mut rng);
                for k in 0..K {
                    sums[k].add(x[k]);
                    squares[k].add(x[k] * x[k]);
                }
            }
            std::array::from_fn(|k| (sums[k].value(), squares[k].value()))
        })
        .collect();

    let n = mc.samples as f64;
    std::array::from_fn(|k| {
        let mut sum = Compensated::default();
        let mut sq = Compensated::default();
        for shard in &shards {
            sum.add(shard[k].0);
            sq.add(shard[k].1);
        }
        let mean = sum.value() / n;
        let var = ((sq.value() - n * mean * mean) / (n - 1.0)).max(0.0);
        Estimate {
            mean,
            std_error: (var / n).sqrt(),
        }
    })
}

/// Draws `(v, s)` via `S = ρ(σ_S/σ_V)V + N_ρ`.
fn draw_sources(model: &SourceModel, rng: &mut ChaCha8Rng) -> (f64, f64) {
    let v = model.sigma_v() * normal(rng);
    let innovation = (1.0 - model.rho() * model.rho()).sqrt() * model.sigma_s() * normal(rng);
    let s = model.rho() * (model.sigma_s() / model.sigma_v()) * v + innovation;
    (v, s)
}

/// The i.i.d. `(v, s)` pairs of `mc.samples` draws, shard by shard.
pub fn sample_sources(model: &SourceModel, mc: &McConfig) -> impl Iterator<Item = (f64, f64)> {
    let model = *model;
    let mc = *mc;
    (0..SHARDS).flat_map(move |shard| {
        let mut rng = shard_rng(mc.seed, tag::SOURCES, shard);
        (0..shard_len(mc.samples, shard)).map(move |_| draw_sources(&model, &mut rng))
    })
}

/// Empirical second-order statistics of the sources.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SourceStatistics {
    pub var_v: Estimate,
    pub var_s: Estimate,
    pub cov_vs: Estimate,
    pub rho: f64,
}

pub fn source_statistics(model: &SourceModel, mc: &McConfig) -> SourceStatistics {
    let [var_v, var_s, cov_vs] = simulate(mc, tag::STATS, |rng| {
        let (v, s) = draw_sources(model, rng);
        [v * v, s * s, v * s]
    });
    SourceStatistics {
        var_v,
        var_s,
        cov_vs,
        rho: cov_vs.mean / (var_v.mean * var_s.mean).sqrt(),
    }
}

/// One draw of the analog path: `(v, s', x_h)` with `s' = √a γ v + c s`.
struct AnalogPath {
    sa: f64,
    gamma: f64,
    c: f64,
    sd_h: f64,
}

impl AnalogPath {
    fn new(model: &SourceModel, channel: &ChannelSpec, alloc: &Allocation) -> Result<Self> {
        let (_, a) = analog_scaling(model, alloc)?;
        let sa = a.sqrt();
        Ok(AnalogPath {
            sa,
            gamma: alloc.gamma(),
            c: 1.0 + sa * (1.0 - alloc.gamma()),
            sd_h: alloc.p_h(channel).sqrt(),
        })
    }

    fn draw(&self, model: &SourceModel, rng: &mut ChaCha8Rng) -> (f64, f64, f64) {
        let (v, s) = draw_sources(model, rng);
        let s_eff = self.sa * self.gamma * v + self.c * s;
        (v, s_eff, self.sd_h * normal(rng))
    }
}

/// MSE of `v - βy` with `Y = X_d + S' + Z` at the actual noise of `channel`,
/// and `β` the closed-form coefficient for that noise.
pub fn simulate_linear_mmse(
    model: &SourceModel,
    channel: &ChannelSpec,
    alloc: &Allocation,
    mc: &McConfig,
) -> Result<Estimate> {
    validate(model, channel, alloc)?;
    let beta = analog_params_at(model, channel.p(), alloc, channel.n_actual())?.beta;
    let path = AnalogPath::new(model, channel, alloc)?;
    let sd_z = channel.n_actual().sqrt();
    let [mse] = simulate(mc, tag::LINEAR, |rng| {
        let (v, s_eff, x_d) = path.draw(model, rng);
        let y = x_d + s_eff + sd_z * normal(rng);
        let e = v - beta * y;
        [e * e]
    });
    Ok(mse)
}

/// Weight on the innovation `t - α v'` in the MMSE estimate from `(t, v')`
/// when `v'` has error variance `d_side`.
fn wz_gain(alpha: f64, d_side: f64, d_design: f64) -> f64 {
    alpha * d_side / (alpha * alpha * d_side + d_design)
}

/// Wyner-Ziv refinement of side information with error variance
/// `d_star_actual`, through a test channel designed for `(d_star, d_design)`.
/// The decoder knows the actual side-information quality. The side
/// information cancels from the error, so only the error process and the
/// test-channel noise are drawn.
fn wz_error(inp: &WzMismatchInputs, rng: &mut ChaCha8Rng) -> f64 {
    let alpha = inp.alpha_sep();
    let w = inp.d_star_actual().sqrt() * normal(rng);
    let b = inp.d_design().sqrt() * normal(rng);
    let k = wz_gain(alpha, inp.d_star_actual(), inp.d_design());
    // v̂ - v = -w + k(αw + b)
    -w + k * (alpha * w + b)
}

/// Simulated Wyner-Ziv distortion with mismatched side information.
pub fn simulate_wz_mismatch(inp: &WzMismatchInputs, mc: &McConfig) -> Estimate {
    let [mse] = simulate(mc, tag::WZ, |rng| {
        let e = wz_error(inp, rng);
        [e * e]
    });
    mse
}

/// Simulated distortion of `scheme` on a matched channel.
pub fn simulate_scheme_idealized(
    model: &SourceModel,
    channel: &ChannelSpec,
    alloc: &Allocation,
    scheme: Scheme,
    mc: &McConfig,
) -> Result<Estimate> {
    if !channel.is_matched() {
        return Err(Error::Precondition(
            "simulate_scheme_idealized needs a matched channel; use simulate_mismatch".into(),
        ));
    }
    match scheme {
        Scheme::Uncoded => simulate_linear_mmse(model, channel, &Allocation::uncoded(channel), mc),
        Scheme::NaiveDpc => {
            // No side information: the test channel acts on V itself.
            let d = naive_dpc_distortion(model, channel);
            let inp = WzMismatchInputs::new(model.sigma_v2(), model.sigma_v2(), d)?;
            let [mse] = simulate(mc, tag::SCHEME, |rng| {
                let e = wz_error(&inp, rng);
                [e * e]
            });
            Ok(mse)
        }
        Scheme::DigitalDpc | Scheme::Hda => {
            simulate_refined(model, channel, alloc, scheme, mc, tag::SCHEME)
        }
    }
}

/// Simulated distortion of a scheme designed for `n_design` and run at
/// `n_actual`. Above the design noise only the analog estimate remains.
pub fn simulate_mismatch(
    model: &SourceModel,
    channel: &ChannelSpec,
    alloc: &Allocation,
    scheme: Scheme,
    mc: &McConfig,
) -> Result<Estimate> {
    if !matches!(scheme, Scheme::DigitalDpc | Scheme::Hda) {
        return Err(Error::invalid(
            "scheme",
            format!("{scheme} has no mismatch model; use digital-dpc or hda"),
        ));
    }
    if channel.n_actual() > channel.n_design() {
        return simulate_linear_mmse(model, channel, alloc, mc);
    }
    simulate_refined(model, channel, alloc, scheme, mc, tag::MISMATCH)
}

fn simulate_refined(
    model: &SourceModel,
    channel: &ChannelSpec,
    alloc: &Allocation,
    scheme: Scheme,
    mc: &McConfig,
    stream: u64,
) -> Result<Estimate> {
    validate(model, channel, alloc)?;
    let path = AnalogPath::new(model, channel, alloc)?;
    let sd_z = channel.n_actual().sqrt();
    let design = analog_params(model, channel, alloc)?;
    let actual = analog_params_at(model, channel.p(), alloc, channel.n_actual())?;

    let [mse] = if scheme == Scheme::DigitalDpc {
        let d_sep = digital_dpc_distortion(model, &channel.matched(), alloc)?;
        if d_sep == 0.0 {
            return Ok(Estimate {
                mean: 0.0,
                std_error: 0.0,
            });
        }
        let alpha = ((design.d_star - d_sep) / design.d_star).sqrt();
        let k = wz_gain(alpha, actual.d_star, d_sep);
        let sd_b = d_sep.sqrt();
        let beta = actual.beta;
        simulate(mc, stream, |rng| {
            let (v, s_eff, x_d) = path.draw(model, rng);
            let y = x_d + s_eff + sd_z * normal(rng);
            let side = beta * y;
            let t = alpha * v + sd_b * normal(rng);
            let e = side + k * (t - alpha * side) - v;
            [e * e]
        })
    } else {
        let coeffs = hda_coefficients(channel, alloc, design.d_star)?;
        let moments = moment_set(model, channel, alloc, &coeffs)?;
        let (w_u, w_y) = if coeffs.p_h == 0.0 {
            (0.0, moments.e_vy / moments.e_y2)
        } else {
            moments.joint_weights()
        };
        simulate(mc, stream, |rng| {
            let (v, s_eff, x_h) = path.draw(model, rng);
            let u = x_h + coeffs.alpha * s_eff + coeffs.kappa * v;
            let y = x_h + s_eff + sd_z * normal(rng);
            let e = w_u * u + w_y * y - v;
            [e * e]
        })
    };
    Ok(mse)
}

/// Sample counterparts of the closed-form moment set.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MomentEstimates {
    pub e_sp2: Estimate,
    pub e_spv: Estimate,
    pub e_u2: Estimate,
    pub e_y2: Estimate,
    pub e_uy: Estimate,
    pub e_vu: Estimate,
    pub e_vy: Estimate,
}

pub fn sample_moments(
    model: &SourceModel,
    channel: &ChannelSpec,
    alloc: &Allocation,
    mc: &McConfig,
) -> Result<MomentEstimates> {
    validate(model, channel, alloc)?;
    let path = AnalogPath::new(model, channel, alloc)?;
    let d_star = analog_params(model, channel, alloc)?.d_star;
    let coeffs = hda_coefficients(channel, alloc, d_star)?;
    let sd_z = channel.n_actual().sqrt();
    let [e_sp2, e_spv, e_u2, e_y2, e_uy, e_vu, e_vy] = simulate(mc, tag::MOMENTS, |rng| {
        let (v, s_eff, x_h) = path.draw(model, rng);
        let u = x_h + coeffs.alpha * s_eff + coeffs.kappa * v;
        let y = x_h + s_eff + sd_z * normal(rng);
        [s_eff * s_eff, s_eff * v, u * u, y * y, u * y, v * u, v * y]
    });
    Ok(MomentEstimates {
        e_sp2,
        e_spv,
        e_u2,
        e_y2,
        e_uy,
        e_vu,
        e_vy,
    })
}

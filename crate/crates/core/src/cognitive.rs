//! Distortion region of the cognitive radio channel with correlated sources.
//!
//! The primary user sends its source uncoded; the secondary user, which knows
//! `X_1`, runs the HDA scheme against the interference `S = h_1 X_1`. The
//! primary receiver treats everything from the secondary as noise. Outer
//! bounds come from the capacity region in the two regimes where it is
//! known, mapped to distortions through `D = σ² 2^(-2R)`.
//!
//! Capacity expressions assume unit receiver noise, so configurations with
//! other noise levels are rescaled before they are evaluated.

use std::sync::Mutex;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::estimators::analog_scaling;
use crate::model::{check_budget, Allocation, ChannelSpec, CognitiveConfig, SourceModel};
use crate::optimizer::{grid_refine, linspace, pareto_filter, Axis, GridSpec, ParetoPoint};
use crate::schemes::hda_distortion;

/// Capacity regime of the channel.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum RegimeTag {
    Weak,
    VeryStrong,
    Other,
}

impl RegimeTag {
    pub fn name(&self) -> &'static str {
        match self {
            RegimeTag::Weak => "weak",
            RegimeTag::VeryStrong => "very-strong",
            RegimeTag::Other => "other",
        }
    }
}

/// Powers and gains rescaled to unit receiver noise.
#[derive(Debug, Clone, Copy)]
struct Normalized {
    p1: f64,
    p2: f64,
    h1: f64,
    h2: f64,
}

fn normalized(cfg: &CognitiveConfig) -> Normalized {
    Normalized {
        p1: cfg.p1() / cfg.n1(),
        p2: cfg.p2() / cfg.n2(),
        h1: cfg.h1() * (cfg.n1() / cfg.n2()).sqrt(),
        h2: cfg.h2() * (cfg.n2() / cfg.n1()).sqrt(),
    }
}

/// Weak when `|h_2| <= 1`; very strong when `|h_2| >= 1` and
/// `|h_1 √(P_1/P_2) ± 1| >= |√(P_1/P_2) ± h_2|` for both signs.
pub fn classify_regime(cfg: &CognitiveConfig) -> RegimeTag {
    let n = normalized(cfg);
    if n.h2.abs() <= 1.0 {
        return RegimeTag::Weak;
    }
    let r = (n.p1 / n.p2).sqrt();
    let plus = (n.h1 * r + 1.0).abs() >= (r + n.h2).abs();
    let minus = (n.h1 * r - 1.0).abs() >= (r - n.h2).abs();
    if plus && minus {
        RegimeTag::VeryStrong
    } else {
        RegimeTag::Other
    }
}

fn require_regime(cfg: &CognitiveConfig, expected: RegimeTag) -> Result<()> {
    let found = classify_regime(cfg);
    if found == expected {
        Ok(())
    } else {
        Err(Error::Regime {
            expected: expected.name(),
            found: found.name(),
        })
    }
}

fn require_rho_x(rho_x: f64) -> Result<()> {
    if (0.0..=1.0).contains(&rho_x) {
        Ok(())
    } else {
        Err(Error::invalid(
            "rho_x out of range",
            format!("{rho_x} not in [0, 1]"),
        ))
    }
}

/// The secondary link seen as the point-to-point problem: source `V_2`,
/// interference `h_1 X_1` with variance `h_1² P_1`.
pub fn secondary_model(cfg: &CognitiveConfig) -> Result<SourceModel> {
    if cfg.h1() == 0.0 {
        return Err(Error::invalid(
            "h1 must be nonzero",
            "the secondary link needs interference h1 X1 with positive variance",
        ));
    }
    SourceModel::new(
        cfg.sigma_v2_2(),
        cfg.h1() * cfg.h1() * cfg.p1(),
        cfg.rho() * cfg.h1().signum(),
    )
}

pub fn secondary_channel(cfg: &CognitiveConfig) -> Result<ChannelSpec> {
    ChannelSpec::new(cfg.p2(), cfg.n2())
}

/// `D_1` of the linear estimate `β_1 Y_1` at the primary receiver.
pub fn primary_distortion(cfg: &CognitiveConfig, alloc: &Allocation) -> Result<f64> {
    primary_with(cfg, &secondary_model(cfg)?, alloc)
}

fn primary_with(cfg: &CognitiveConfig, model2: &SourceModel, alloc: &Allocation) -> Result<f64> {
    check_budget(alloc, cfg.p2())?;
    let (_, a) = analog_scaling(model2, alloc)?;
    let sa = a.sqrt();
    let g = alloc.gamma();
    let (h1, h2, rho) = (cfg.h1(), cfg.h2(), cfg.rho());
    let sv1 = cfg.sigma_v1_2().sqrt();
    let sv2 = cfg.sigma_v2_2().sqrt();
    let sp1 = cfg.p1().sqrt();
    let p_h = (cfg.p2() - alloc.pa()).max(0.0);

    let c = 1.0 + (1.0 - g) * sa * h1 * h2;
    let e_vy = c * sp1 * sv1 + h2 * sa * g * rho * sv1 * sv2;
    let e_y2 = c * c * cfg.p1()
        + a * h2 * h2 * g * g * cfg.sigma_v2_2()
        + h2 * h2 * p_h
        + 2.0 * sa * h2 * g * rho * sp1 * sv2 * c
        + cfg.n1();
    Ok((cfg.sigma_v1_2() - e_vy * e_vy / e_y2).clamp(0.0, cfg.sigma_v1_2()))
}

/// `D_2` of the HDA scheme on the secondary link.
pub fn secondary_distortion(cfg: &CognitiveConfig, alloc: &Allocation) -> Result<f64> {
    hda_distortion(&secondary_model(cfg)?, &secondary_channel(cfg)?, alloc)
}

/// Rate bounds `(R_1, R_2)` in bits of the weak regime; the region is a
/// rectangle for each `ρ_x`.
pub fn weak_capacity_bound(cfg: &CognitiveConfig, rho_x: f64) -> Result<(f64, f64)> {
    require_regime(cfg, RegimeTag::Weak)?;
    require_rho_x(rho_x)?;
    Ok(weak_rates(&normalized(cfg), rho_x))
}

fn weak_rates(n: &Normalized, rho_x: f64) -> (f64, f64) {
    let private = 1.0 - rho_x * rho_x;
    let coherent = 1.0 + n.h2 * rho_x * (n.p2 / n.p1).sqrt();
    let r1 = 0.5 * (1.0 + n.p1 * coherent * coherent / (1.0 + private * n.h2 * n.h2 * n.p2)).log2();
    let r2 = 0.5 * (1.0 + private * n.p2).log2();
    (r1, r2)
}

/// Rate bounds `(R_2, R_1 + R_2)` in bits of the very-strong regime.
pub fn very_strong_capacity_bound(cfg: &CognitiveConfig, rho_x: f64) -> Result<(f64, f64)> {
    require_regime(cfg, RegimeTag::VeryStrong)?;
    require_rho_x(rho_x)?;
    Ok(very_strong_rates(&normalized(cfg), rho_x))
}

fn very_strong_rates(n: &Normalized, rho_x: f64) -> (f64, f64) {
    let r2 = 0.5 * (1.0 + (1.0 - rho_x * rho_x) * n.p2).log2();
    let sum =
        0.5 * (1.0 + n.p1 + n.h2 * n.h2 * n.p2 + 2.0 * rho_x * n.h2 * (n.p1 * n.p2).sqrt()).log2();
    (r2, sum)
}

fn d_ob1(cfg: &CognitiveConfig, r1: f64) -> f64 {
    cfg.sigma_v1_2() * (-2.0 * r1).exp2()
}

fn d_ob2(cfg: &CognitiveConfig, r2: f64) -> f64 {
    cfg.sigma_v2_2() * (1.0 - cfg.rho() * cfg.rho()) * (-2.0 * r2).exp2()
}

/// Which bound a frontier represents.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum FrontierKind {
    Inner,
    Outer,
}

/// One Pareto-minimal `(D_1, D_2)` pair with the parameters producing it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RegionPoint {
    pub d1: f64,
    pub d2: f64,
    pub gamma: Option<f64>,
    pub pa: Option<f64>,
    pub rho_x: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RegionFrontier {
    pub kind: FrontierKind,
    /// Pareto-minimal, ordered by `d1` ascending.
    pub points: Vec<RegionPoint>,
}

impl RegionFrontier {
    fn from_points(kind: FrontierKind, points: Vec<RegionPoint>) -> Self {
        let filtered = pareto_filter(
            points
                .into_iter()
                .map(|p| ParetoPoint {
                    d1: p.d1,
                    d2: p.d2,
                    payload: p,
                })
                .collect(),
        );
        RegionFrontier {
            kind,
            points: filtered.into_iter().map(|p| p.payload).collect(),
        }
    }
}

/// Resolution of the region computations.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegionGrid {
    /// `γ` search interval and number of coarse points.
    pub gamma: (f64, f64),
    pub gamma_points: usize,
    /// `P_a` interval as fractions of `P_2`, and number of coarse points.
    pub pa_fraction: (f64, f64),
    pub pa_points: usize,
    /// `D_1` levels at which the inner frontier is solved exactly.
    pub levels: usize,
    /// `P_a` scan used by each constrained line search.
    pub line_points: usize,
    /// `ρ_x` values swept by the outer bound.
    pub rho_x_points: usize,
    /// `(R_1, R_2)` splits per `ρ_x` in the very-strong outer bound.
    pub splits: usize,
}

impl Default for RegionGrid {
    fn default() -> Self {
        RegionGrid {
            gamma: (0.0, 1.0),
            gamma_points: 64,
            pa_fraction: (0.0, 1.0),
            pa_points: 64,
            levels: 64,
            line_points: 256,
            rho_x_points: 1024,
            splits: 256,
        }
    }
}

impl RegionGrid {
    /// A grid of exactly one allocation.
    pub fn single(gamma: f64, pa_fraction: f64) -> Self {
        RegionGrid {
            gamma: (gamma, gamma),
            gamma_points: 1,
            pa_fraction: (pa_fraction, pa_fraction),
            pa_points: 1,
            ..Default::default()
        }
    }

    fn validate(&self) -> Result<()> {
        let (g0, g1) = self.gamma;
        let (f0, f1) = self.pa_fraction;
        if !(0.0 <= g0 && g0 <= g1 && g1 <= 1.0) {
            return Err(Error::invalid(
                "gamma out of range",
                format!("[{g0}, {g1}] not within [0, 1]"),
            ));
        }
        if !(0.0 <= f0 && f0 <= f1 && f1 <= 1.0) {
            return Err(Error::invalid(
                "pa out of range",
                format!("fractions [{f0}, {f1}] not within [0, 1]"),
            ));
        }
        if self.gamma_points == 0 || self.pa_points == 0 {
            return Err(Error::invalid(
                "grid size",
                "need at least one point per axis",
            ));
        }
        if self.rho_x_points < 2 || self.splits < 2 || self.line_points < 2 {
            return Err(Error::invalid(
                "grid size",
                "sweeps need at least two points",
            ));
        }
        Ok(())
    }

    fn points(range: (f64, f64), count: usize) -> Vec<f64> {
        if count == 1 || range.0 == range.1 {
            vec![range.0]
        } else {
            linspace(range.0, range.1, count)
        }
    }
}

/// Outer bound on the distortion region.
pub fn outer_region(cfg: &CognitiveConfig, grid: &RegionGrid) -> Result<RegionFrontier> {
    grid.validate()?;
    let n = normalized(cfg);
    let rho_xs = linspace(0.0, 1.0, grid.rho_x_points);
    let points: Vec<RegionPoint> = match classify_regime(cfg) {
        RegimeTag::Weak => rho_xs
            .iter()
            .map(|&rho_x| {
                let (r1, r2) = weak_rates(&n, rho_x);
                RegionPoint {
                    d1: d_ob1(cfg, r1),
                    d2: d_ob2(cfg, r2),
                    gamma: None,
                    pa: None,
                    rho_x: Some(rho_x),
                }
            })
            .collect(),
        RegimeTag::VeryStrong => rho_xs
            .iter()
            .flat_map(|&rho_x| {
                let (c2, sum) = very_strong_rates(&n, rho_x);
                linspace(0.0, c2.min(sum), grid.splits)
                    .into_iter()
                    .map(move |r2| RegionPoint {
                        d1: d_ob1(cfg, sum - r2),
                        d2: d_ob2(cfg, r2),
                        gamma: None,
                        pa: None,
                        rho_x: Some(rho_x),
                    })
            })
            .collect(),
        RegimeTag::Other => {
            return Err(Error::Regime {
                expected: "weak or very-strong",
                found: RegimeTag::Other.name(),
            })
        }
    };
    Ok(RegionFrontier::from_points(FrontierKind::Outer, points))
}

/// Smallest outer-bound `D_2` compatible with `D_1 <= d1_max`, with the `ρ_x`
/// attaining it.
pub fn outer_d2_given_d1(
    cfg: &CognitiveConfig,
    d1_max: f64,
    grid: &RegionGrid,
) -> Result<(f64, f64)> {
    grid.validate()?;
    let n = normalized(cfg);
    let rho_xs = linspace(0.0, 1.0, grid.rho_x_points);
    match classify_regime(cfg) {
        RegimeTag::Weak => {
            // R_2 falls with ρ_x, so the smallest feasible ρ_x is optimal.
            let feasible = |rho_x: f64| d_ob1(cfg, weak_rates(&n, rho_x).0) <= d1_max;
            let first = rho_xs.iter().position(|&r| feasible(r)).ok_or_else(|| {
                Error::Infeasible(format!(
                    "no rho_x reaches d1 <= {d1_max} in the weak outer bound"
                ))
            })?;
            let rho_x = if first == 0 {
                0.0
            } else {
                let (mut bad, mut good) = (rho_xs[first - 1], rho_xs[first]);
                for _ in 0..200 {
                    let mid = 0.5 * (bad + good);
                    if mid == bad || mid == good {
                        break;
                    }
                    if feasible(mid) {
                        good = mid;
                    } else {
                        bad = mid;
                    }
                }
                good
            };
            Ok((d_ob2(cfg, weak_rates(&n, rho_x).1), rho_x))
        }
        RegimeTag::VeryStrong => {
            let r1 = (0.5 * (cfg.sigma_v1_2() / d1_max).log2()).max(0.0);
            let r2_of = |rho_x: f64| {
                let (c2, sum) = very_strong_rates(&n, rho_x);
                c2.min(sum - r1)
            };
            let (rho_x, r2) = maximize_on_grid(&rho_xs, r2_of);
            if r2 < 0.0 {
                return Err(Error::Infeasible(format!(
                    "no rate split reaches d1 <= {d1_max} in the very-strong outer bound"
                )));
            }
            Ok((d_ob2(cfg, r2), rho_x))
        }
        RegimeTag::Other => Err(Error::Regime {
            expected: "weak or very-strong",
            found: RegimeTag::Other.name(),
        }),
    }
}

const INV_PHI: f64 = 0.618_033_988_749_894_9;

/// Best grid point of `f`, then golden-section search between its
/// neighbors. Assumes `f` is unimodal near the grid maximum.
fn maximize_on_grid(xs: &[f64], f: impl Fn(f64) -> f64) -> (f64, f64) {
    let values: Vec<f64> = xs.iter().map(|&x| f(x)).collect();
    let mut i = 0;
    for (k, &v) in values.iter().enumerate() {
        if v > values[i] {
            i = k;
        }
    }
    let (lo, hi) = (xs[i.saturating_sub(1)], xs[(i + 1).min(xs.len() - 1)]);
    let (x, v) = golden_max(lo, hi, &f);
    if v > values[i] {
        (x, v)
    } else {
        (xs[i], values[i])
    }
}

fn golden_max(mut lo: f64, mut hi: f64, f: &impl Fn(f64) -> f64) -> (f64, f64) {
    let mut x1 = hi - INV_PHI * (hi - lo);
    let mut x2 = lo + INV_PHI * (hi - lo);
    let (mut f1, mut f2) = (f(x1), f(x2));
    for _ in 0..100 {
        if f1 >= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - INV_PHI * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + INV_PHI * (hi - lo);
            f2 = f(x2);
        }
        if hi - lo <= f64::EPSILON * hi.abs().max(1.0) {
            break;
        }
    }
    if f1 >= f2 {
        (x1, f1)
    } else {
        (x2, f2)
    }
}

/// Evaluates `(D_1, D_2)` at an allocation.
struct Evaluator<'a> {
    cfg: &'a CognitiveConfig,
    model2: SourceModel,
    channel2: ChannelSpec,
}

impl<'a> Evaluator<'a> {
    fn new(cfg: &'a CognitiveConfig) -> Result<Self> {
        Ok(Evaluator {
            cfg,
            model2: secondary_model(cfg)?,
            channel2: secondary_channel(cfg)?,
        })
    }

    fn eval(&self, gamma: f64, pa: f64) -> Result<(f64, f64)> {
        let alloc = Allocation::for_channel(gamma, pa.clamp(0.0, self.cfg.p2()), &self.channel2)?;
        Ok((
            primary_with(self.cfg, &self.model2, &alloc)?,
            hda_distortion(&self.model2, &self.channel2, &alloc)?,
        ))
    }
}

/// Feasible allocation found by the constrained search.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConstrainedPoint {
    pub gamma: f64,
    pub pa: f64,
    pub d1: f64,
    pub d2: f64,
}

impl ConstrainedPoint {
    fn region_point(&self) -> RegionPoint {
        RegionPoint {
            d1: self.d1,
            d2: self.d2,
            gamma: Some(self.gamma),
            pa: Some(self.pa),
            rho_x: None,
        }
    }
}

enum Line {
    Feasible(ConstrainedPoint),
    /// Smallest constraint violation seen on the line.
    Infeasible(f64),
}

fn keep_better(best: &mut Option<ConstrainedPoint>, p: ConstrainedPoint) {
    let replace = match best {
        None => true,
        Some(b) => p.d2 < b.d2 || (p.d2 == b.d2 && p.pa < b.pa),
    };
    if replace {
        *best = Some(p);
    }
}

/// Minimum `D_2` over `P_a` at fixed `γ` subject to `D_1 <= d1_max`.
fn solve_line(ev: &Evaluator, gamma: f64, d1_max: f64, pas: &[f64]) -> Result<Line> {
    let vals = pas
        .iter()
        .map(|&pa| ev.eval(gamma, pa))
        .collect::<Result<Vec<_>>>()?;
    let at = |pa: f64, (d1, d2): (f64, f64)| ConstrainedPoint { gamma, pa, d1, d2 };
    let mut best = None;
    for (&pa, &v) in pas.iter().zip(&vals) {
        if v.0 <= d1_max {
            keep_better(&mut best, at(pa, v));
        }
    }
    // Walk each feasibility boundary down to round-off.
    for i in 1..pas.len() {
        let (a_ok, b_ok) = (vals[i - 1].0 <= d1_max, vals[i].0 <= d1_max);
        if a_ok == b_ok {
            continue;
        }
        let (mut good, mut bad, mut good_val) = if a_ok {
            (pas[i - 1], pas[i], vals[i - 1])
        } else {
            (pas[i], pas[i - 1], vals[i])
        };
        for _ in 0..80 {
            let mid = 0.5 * (good + bad);
            if mid == good || mid == bad {
                break;
            }
            let v = ev.eval(gamma, mid)?;
            if v.0 <= d1_max {
                good = mid;
                good_val = v;
            } else {
                bad = mid;
            }
        }
        keep_better(&mut best, at(good, good_val));
    }

    let Some(found) = best else {
        let excess = vals
            .iter()
            .map(|v| v.0 - d1_max)
            .fold(f64::INFINITY, f64::min);
        return Ok(Line::Infeasible(excess));
    };

    // Polish an interior minimum between its grid neighbors.
    if let Some(i) = pas.iter().position(|&pa| pa == found.pa) {
        if pas.len() > 1 {
            let lo = pas[i.saturating_sub(1)];
            let hi = pas[(i + 1).min(pas.len() - 1)];
            let failure = Mutex::new(None);
            let neg_d2 = |pa: f64| match ev.eval(gamma, pa) {
                Ok((d1, d2)) if d1 <= d1_max => -d2,
                Ok(_) => f64::NEG_INFINITY,
                Err(e) => {
                    failure.lock().unwrap().get_or_insert(e);
                    f64::NEG_INFINITY
                }
            };
            let (pa, v) = golden_max(lo, hi, &neg_d2);
            if let Some(e) = failure.into_inner().unwrap() {
                return Err(e);
            }
            if v.is_finite() && -v < found.d2 {
                let polished = at(pa, ev.eval(gamma, pa)?);
                let mut best = Some(found);
                keep_better(&mut best, polished);
                return Ok(Line::Feasible(best.unwrap()));
            }
        }
    }
    Ok(Line::Feasible(found))
}

/// Minimum `D_2` over the grid's `(γ, P_a)` box subject to `D_1 <= d1_max`,
/// or `None` when nothing in the box is feasible.
pub fn min_d2_subject_to(
    cfg: &CognitiveConfig,
    d1_max: f64,
    grid: &RegionGrid,
) -> Result<Option<ConstrainedPoint>> {
    grid.validate()?;
    let ev = Evaluator::new(cfg)?;
    constrained(&ev, d1_max, grid)
}

fn constrained(ev: &Evaluator, d1_max: f64, grid: &RegionGrid) -> Result<Option<ConstrainedPoint>> {
    let p2 = ev.cfg.p2();
    let pa_range = (grid.pa_fraction.0 * p2, grid.pa_fraction.1 * p2);
    let pas = RegionGrid::points(
        pa_range,
        if pa_range.0 == pa_range.1 {
            1
        } else {
            grid.line_points
        },
    );

    let gamma = if grid.gamma_points == 1 || grid.gamma.0 == grid.gamma.1 {
        grid.gamma.0
    } else {
        let penalty_base = 2.0 * ev.cfg.sigma_v2_2();
        let failure = Mutex::new(None);
        let objective = |x: &[f64]| match solve_line(ev, x[0], d1_max, &pas) {
            Ok(Line::Feasible(p)) => p.d2,
            Ok(Line::Infeasible(excess)) => penalty_base + excess,
            Err(e) => {
                failure.lock().unwrap().get_or_insert(e);
                penalty_base
            }
        };
        let spec = GridSpec::from_axes(vec![Axis::new(
            grid.gamma.0,
            grid.gamma.1,
            grid.gamma_points,
        )?])?;
        let min = grid_refine(objective, &spec)?;
        if let Some(e) = failure.into_inner().unwrap() {
            return Err(e);
        }
        min.argmin[0]
    };
    match solve_line(ev, gamma, d1_max, &pas)? {
        Line::Feasible(p) => Ok(Some(p)),
        Line::Infeasible(_) => Ok(None),
    }
}

/// Achievable region of uncoded primary plus HDA secondary.
///
/// The coarse `(γ, P_a)` grid fixes the range of `D_1`; the frontier is then
/// solved exactly at evenly spaced `D_1` levels across that range. A grid
/// with a single allocation, or zero levels, returns the Pareto set of the
/// raw grid instead.
pub fn inner_region(cfg: &CognitiveConfig, grid: &RegionGrid) -> Result<RegionFrontier> {
    grid.validate()?;
    let ev = Evaluator::new(cfg)?;
    let p2 = cfg.p2();
    let gammas = RegionGrid::points(grid.gamma, grid.gamma_points);
    let pas = RegionGrid::points(
        (grid.pa_fraction.0 * p2, grid.pa_fraction.1 * p2),
        grid.pa_points,
    );

    let raw = gammas
        .par_iter()
        .flat_map_iter(|&gamma| pas.iter().map(move |&pa| (gamma, pa)))
        .map(|(gamma, pa)| {
            ev.eval(gamma, pa).map(|(d1, d2)| RegionPoint {
                d1,
                d2,
                gamma: Some(gamma),
                pa: Some(pa),
                rho_x: None,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    if raw.len() == 1 || grid.levels == 0 {
        return Ok(RegionFrontier::from_points(FrontierKind::Inner, raw));
    }

    let d1_lo = raw.iter().map(|p| p.d1).fold(f64::INFINITY, f64::min);
    let d1_hi = raw.iter().map(|p| p.d1).fold(f64::NEG_INFINITY, f64::max);
    let levels = RegionGrid::points((d1_lo, d1_hi), grid.levels);
    let solved = levels
        .par_iter()
        .map(|&level| constrained(&ev, level, grid))
        .collect::<Result<Vec<_>>>()?;
    let points = solved
        .into_iter()
        .flatten()
        .map(|p| p.region_point())
        .collect();
    Ok(RegionFrontier::from_points(FrontierKind::Inner, points))
}

/// Largest excess of an inner frontier over the outer bound, measured in
/// `D_2` at equal `D_1`.
pub fn inner_outer_gap(
    cfg: &CognitiveConfig,
    inner: &RegionFrontier,
    grid: &RegionGrid,
) -> Result<f64> {
    let mut gap = f64::NEG_INFINITY;
    for p in &inner.points {
        let (outer, _) = outer_d2_given_d1(cfg, p.d1, grid)?;
        gap = gap.max(p.d2 - outer);
    }
    Ok(gap)
}

/// Secondary distortion when the primary must do at least as well as it
/// would without any interference.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Coexistence {
    /// `σ_V1² / (1 + P_1/N_1)`.
    pub threshold: f64,
    pub outer: f64,
    pub achievable: f64,
    pub allocation: ConstrainedPoint,
}

pub fn coexistence_threshold(cfg: &CognitiveConfig) -> f64 {
    cfg.sigma_v1_2() / (1.0 + cfg.p1() / cfg.n1())
}

pub fn coexistence(cfg: &CognitiveConfig, grid: &RegionGrid) -> Result<Coexistence> {
    let threshold = coexistence_threshold(cfg);
    let (outer, _) = outer_d2_given_d1(cfg, threshold, grid)?;
    let point = min_d2_subject_to(cfg, threshold, grid)?.ok_or_else(|| {
        Error::Infeasible(format!(
            "no allocation keeps the primary distortion below {threshold}"
        ))
    })?;
    Ok(Coexistence {
        threshold,
        outer,
        achievable: point.d2,
        allocation: point,
    })
}

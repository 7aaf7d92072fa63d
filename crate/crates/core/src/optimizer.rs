//! Low-dimensional grid minimization and Pareto filtering.
//!
//! [`grid_refine`] evaluates a coarse tensor grid, then repeatedly re-grids a
//! shrinking box around the incumbent. Ties are broken toward the
//! lexicographically smallest coordinates, which keeps results deterministic
//! regardless of evaluation order.

use std::cmp::Ordering;

use rayon::prelude::*;

use crate::error::{Error, Result};

/// One search axis: `count` evenly spaced points on `[lower, upper]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Axis {
    pub lower: f64,
    pub upper: f64,
    pub count: usize,
}

impl Axis {
    pub fn new(lower: f64, upper: f64, count: usize) -> Result<Self> {
        if !(lower.is_finite() && upper.is_finite()) || lower > upper {
            return Err(Error::invalid(
                "axis bounds",
                format!("[{lower}, {upper}] is not a finite interval"),
            ));
        }
        if count < 2 {
            return Err(Error::invalid("axis count", format!("{count} < 2")));
        }
        Ok(Axis {
            lower,
            upper,
            count,
        })
    }

    /// The grid coordinates; the last one is exactly `upper`.
    pub fn points(&self) -> Vec<f64> {
        linspace(self.lower, self.upper, self.count)
    }
}

/// `count` evenly spaced values from `lower` to `upper` inclusive.
///
/// A single point yields `[lower]`.
pub fn linspace(lower: f64, upper: f64, count: usize) -> Vec<f64> {
    match count {
        0 => Vec::new(),
        1 => vec![lower],
        _ => {
            let last = count - 1;
            (0..count)
                .map(|i| {
                    if i == last {
                        upper
                    } else {
                        lower + (upper - lower) * (i as f64 / last as f64)
                    }
                })
                .collect()
        }
    }
}

/// Coarse grid plus refinement schedule.
#[derive(Debug, Clone, PartialEq)]
pub struct GridSpec {
    pub axes: Vec<Axis>,
    pub rounds: usize,
    /// Factor applied to the box width each round.
    pub shrink: f64,
    /// Refinement stops once a round improves the objective by less than this
    /// (a round with no improvement at all just shrinks the box further).
    pub tolerance: f64,
}

impl GridSpec {
    pub const DEFAULT_COUNT: usize = 64;
    pub const DEFAULT_ROUNDS: usize = 6;
    pub const DEFAULT_SHRINK: f64 = 0.2;
    pub const DEFAULT_TOLERANCE: f64 = 1e-10;

    /// Default schedule (64 points per axis, 6 rounds, shrink 0.2, tolerance 1e-10).
    pub fn new(bounds: &[(f64, f64)]) -> Result<Self> {
        let axes = bounds
            .iter()
            .map(|&(lo, hi)| Axis::new(lo, hi, Self::DEFAULT_COUNT))
            .collect::<Result<Vec<_>>>()?;
        Self::from_axes(axes)
    }

    pub fn from_axes(axes: Vec<Axis>) -> Result<Self> {
        if axes.is_empty() || axes.len() > 3 {
            return Err(Error::invalid(
                "grid dimension",
                format!("{} axes, expected 1 to 3", axes.len()),
            ));
        }
        Ok(GridSpec {
            axes,
            rounds: Self::DEFAULT_ROUNDS,
            shrink: Self::DEFAULT_SHRINK,
            tolerance: Self::DEFAULT_TOLERANCE,
        })
    }

    pub fn with_refinement(mut self, rounds: usize, shrink: f64) -> Result<Self> {
        if !(shrink > 0.0 && shrink < 1.0) {
            return Err(Error::invalid(
                "shrink factor",
                format!("{shrink} not in (0, 1)"),
            ));
        }
        self.rounds = rounds;
        self.shrink = shrink;
        Ok(self)
    }

    pub fn with_tolerance(mut self, tolerance: f64) -> Result<Self> {
        if tolerance.is_nan() || tolerance <= 0.0 {
            return Err(Error::invalid(
                "tolerance",
                format!("{tolerance} must be > 0"),
            ));
        }
        self.tolerance = tolerance;
        Ok(self)
    }

    pub fn with_count(mut self, count: usize) -> Result<Self> {
        for axis in &mut self.axes {
            *axis = Axis::new(axis.lower, axis.upper, count)?;
        }
        Ok(self)
    }
}

/// Result of [`grid_refine`].
#[derive(Debug, Clone, PartialEq)]
pub struct Minimum {
    pub argmin: Vec<f64>,
    pub value: f64,
    /// Best value on the coarse grid, before refinement.
    pub coarse_value: f64,
    pub evaluations: usize,
    pub rounds_used: usize,
}

#[derive(Debug, Clone)]
struct Candidate {
    coords: Vec<f64>,
    value: f64,
}

fn lex_cmp(a: &[f64], b: &[f64]) -> Ordering {
    a.iter()
        .zip(b)
        .map(|(x, y)| x.total_cmp(y))
        .find(|o| o.is_ne())
        .unwrap_or(Ordering::Equal)
}

fn better(a: &Candidate, b: &Candidate) -> bool {
    match a.value.total_cmp(&b.value) {
        Ordering::Less => true,
        Ordering::Equal => lex_cmp(&a.coords, &b.coords).is_lt(),
        Ordering::Greater => false,
    }
}

/// Evaluates `objective` on every point of the tensor grid and returns the
/// best point, or the first non-finite evaluation in grid order.
fn evaluate_grid<F>(objective: &F, axes: &[Vec<f64>]) -> Result<(Candidate, usize)>
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    let total: usize = axes.iter().map(Vec::len).product();
    let evaluated: Vec<Candidate> = (0..total)
        .into_par_iter()
        .map(|flat| {
            let mut rem = flat;
            let mut coords = vec![0.0; axes.len()];
            for (k, axis) in axes.iter().enumerate().rev() {
                coords[k] = axis[rem % axis.len()];
                rem /= axis.len();
            }
            let value = objective(&coords);
            Candidate { coords, value }
        })
        .collect();

    if let Some(bad) = evaluated.iter().find(|c| !c.value.is_finite()) {
        return Err(Error::NonFinite {
            coords: bad.coords.clone(),
            value: bad.value,
        });
    }
    let best = evaluated
        .into_iter()
        .reduce(|a, b| if better(&b, &a) { b } else { a })
        .expect("grid has at least one point");
    Ok((best, total))
}

/// Minimizes `objective` over the box described by `spec`.
///
/// The objective must be pure and finite on the box; a non-finite value
/// aborts with the offending coordinates.
pub fn grid_refine<F>(objective: F, spec: &GridSpec) -> Result<Minimum>
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    let coarse: Vec<Vec<f64>> = spec.axes.iter().map(Axis::points).collect();
    let (mut best, mut evaluations) = evaluate_grid(&objective, &coarse)?;
    let coarse_value = best.value;

    let mut rounds_used = 0;
    let mut width_scale = 1.0;
    for _ in 0..spec.rounds {
        width_scale *= spec.shrink;
        let local: Vec<Vec<f64>> = spec
            .axes
            .iter()
            .zip(&best.coords)
            .map(|(axis, &center)| {
                let half = 0.5 * (axis.upper - axis.lower) * width_scale;
                let lo = (center - half).max(axis.lower);
                let hi = (center + half).min(axis.upper);
                linspace(lo, hi, axis.count)
            })
            .collect();
        let (candidate, n) = evaluate_grid(&objective, &local)?;
        evaluations += n;
        rounds_used += 1;

        // A round that finds nothing better keeps zooming on the incumbent;
        // only a small but real improvement ends the search.
        if better(&candidate, &best) {
            let improvement = best.value - candidate.value;
            best = candidate;
            if improvement < spec.tolerance {
                break;
            }
        }
    }

    Ok(Minimum {
        argmin: best.coords,
        value: best.value,
        coarse_value,
        evaluations,
        rounds_used,
    })
}

/// A point in the `(d1, d2)` plane with an attached payload.
#[derive(Debug, Clone, PartialEq)]
pub struct ParetoPoint<T> {
    pub d1: f64,
    pub d2: f64,
    pub payload: T,
}

/// `a` dominates `b`: no worse in both coordinates and better in one.
pub fn dominates<T, U>(a: &ParetoPoint<T>, b: &ParetoPoint<U>) -> bool {
    a.d1 <= b.d1 && a.d2 <= b.d2 && (a.d1 < b.d1 || a.d2 < b.d2)
}

/// Keeps exactly the points not dominated by any other, ordered by `d1`
/// ascending. Points with identical coordinates are all kept, in input order.
pub fn pareto_filter<T>(points: Vec<ParetoPoint<T>>) -> Vec<ParetoPoint<T>> {
    let mut sorted = points;
    // Stable: equal (d1, d2) keep their input order.
    sorted.sort_by(|a, b| a.d1.total_cmp(&b.d1).then(a.d2.total_cmp(&b.d2)));

    let mut kept = Vec::new();
    let mut best_d2_before = f64::INFINITY;
    let mut iter = sorted.into_iter().peekable();
    while let Some(first) = iter.next() {
        // All points sharing this d1; the first has the smallest d2.
        let d1 = first.d1;
        let group_min = first.d2;
        let survives = group_min < best_d2_before;
        if survives {
            kept.push(first);
        }
        while let Some(next) = iter.next_if(|p| p.d1 == d1) {
            if survives && next.d2 == group_min {
                kept.push(next);
            }
        }
        best_d2_before = best_d2_before.min(group_min);
    }
    kept
}

//! Finite-time scaling of `dG_av/dB`.
//!
//! Curves of the field derivative of the time-averaged correlator at
//! different times cross at the dynamical critical point, and collapse onto
//! one master curve when plotted against `x = (B - B_c) t`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::free_fermion::dgdb_exact;
use crate::model::{HamiltonianSpec, QuenchConfig};
use crate::numeric::{fit_line, interpolate, mean, std_dev};
use crate::statevector::{MemoryBudget, Quench};

pub const MIN_GRID_POINTS: usize = 5;
/// Default central-difference half-step for sampled sweeps.
pub const DEFAULT_DELTA_B: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CurveSource {
    Exact,
    Statevector,
}

/// `dG_av/dB` on a field grid, one curve per time.
#[derive(Debug, Clone, PartialEq)]
pub struct DerivativeCurveSet {
    pub times: Vec<f64>,
    pub b_grid: Vec<f64>,
    /// `values[k][i]` is the derivative at `times[k]`, `b_grid[i]`.
    pub values: Vec<Vec<f64>>,
    pub source: CurveSource,
}

impl DerivativeCurveSet {
    pub fn new(times: Vec<f64>, b_grid: Vec<f64>, values: Vec<Vec<f64>>, source: CurveSource) -> Result<Self> {
        check_grid(&b_grid)?;
        if times.len() < 2 {
            return Err(Error::InvalidConfig(format!(
                "need at least two times, got {}",
                times.len()
            )));
        }
        if values.len() != times.len() {
            return Err(Error::LengthMismatch {
                expected: times.len(),
                found: values.len(),
            });
        }
        if let Some(bad) = values.iter().find(|v| v.len() != b_grid.len()) {
            return Err(Error::LengthMismatch {
                expected: b_grid.len(),
                found: bad.len(),
            });
        }
        Ok(Self {
            times,
            b_grid,
            values,
            source,
        })
    }

    /// Same curves with every field value moved by `offset`.
    pub fn shifted(&self, offset: f64) -> Self {
        Self {
            b_grid: self.b_grid.iter().map(|b| b + offset).collect(),
            ..self.clone()
        }
    }

    fn labelled(&self) -> Vec<(f64, &[f64])> {
        self.times
            .iter()
            .copied()
            .zip(self.values.iter().map(Vec::as_slice))
            .collect()
    }
}

fn check_grid(b_grid: &[f64]) -> Result<()> {
    if b_grid.len() < MIN_GRID_POINTS {
        return Err(Error::GridTooCoarse {
            points: b_grid.len(),
            required: MIN_GRID_POINTS,
        });
    }
    if b_grid.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::InvalidConfig("field grid must be strictly increasing".into()));
    }
    Ok(())
}

/// Derivative curves from the analytic nearest-neighbour result.
pub fn derivative_curves_exact(sites: usize, times: &[f64], b_grid: &[f64]) -> Result<DerivativeCurveSet> {
    check_grid(b_grid)?;
    let values = times
        .iter()
        .map(|&t| {
            b_grid
                .iter()
                .map(|&b| dgdb_exact(b, 1.0, sites, t))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    DerivativeCurveSet::new(times.to_vec(), b_grid.to_vec(), values, CurveSource::Exact)
}

/// `G_av` sampled at `B +- delta_b` for every grid field.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldSweep {
    pub times: Vec<f64>,
    pub b_grid: Vec<f64>,
    pub delta_b: f64,
    /// `plus[i][k]` is `G_av(times[k])` at `b_grid[i] + delta_b`.
    pub plus: Vec<Vec<f64>>,
    pub minus: Vec<Vec<f64>>,
}

/// Central differences `(G_av(B+d) - G_av(B-d)) / 2d`.
pub fn derivative_curves(sweep: &FieldSweep) -> Result<DerivativeCurveSet> {
    check_grid(&sweep.b_grid)?;
    if !(sweep.delta_b > 0.0) {
        return Err(Error::InvalidConfig("delta_b must be positive".into()));
    }
    let n = sweep.b_grid.len();
    if sweep.plus.len() != n || sweep.minus.len() != n {
        return Err(Error::LengthMismatch {
            expected: n,
            found: sweep.plus.len().min(sweep.minus.len()),
        });
    }
    let values = (0..sweep.times.len())
        .map(|k| {
            (0..n)
                .map(|i| (sweep.plus[i][k] - sweep.minus[i][k]) / (2.0 * sweep.delta_b))
                .collect()
        })
        .collect();
    DerivativeCurveSet::new(
        sweep.times.clone(),
        sweep.b_grid.clone(),
        values,
        CurveSource::Statevector,
    )
}

/// Run one state-vector quench per grid field and sign of `delta_b`. Grid
/// points are independent and run on the rayon pool; results are assembled
/// in grid order. Every requested time must lie on the sample grid of
/// `config`.
pub fn statevector_sweep(
    template: &HamiltonianSpec,
    config: &QuenchConfig,
    times: &[f64],
    b_grid: &[f64],
    delta_b: f64,
    budget: MemoryBudget,
) -> Result<FieldSweep> {
    check_grid(b_grid)?;
    if !(delta_b > 0.0) {
        return Err(Error::InvalidConfig("delta_b must be positive".into()));
    }
    if let Some(t) = times.iter().find(|&&t| !(t >= 0.0 && t <= config.t_max + 1e-9)) {
        return Err(Error::InvalidConfig(format!(
            "time {t} outside [0, t_max = {}]",
            config.t_max
        )));
    }
    budget.check(template.sites)?;
    config.steps()?;
    let dt = config.dt * config.sample_stride as f64;
    if let Some(t) = times.iter().find(|&&t| ((t / dt) - (t / dt).round()).abs() > 1e-6) {
        return Err(Error::InvalidConfig(format!(
            "time {t} is not on the sample grid (spacing {dt})"
        )));
    }
    let jobs: Vec<f64> = b_grid.iter().flat_map(|&b| [b + delta_b, b - delta_b]).collect();
    let rows = jobs
        .par_iter()
        .map(|&b| {
            let series = Quench::new(&template.with_field(b), config)?
                .with_budget(budget)
                .run()?
                .series;
            times
                .iter()
                .map(|&t| {
                    series.g_av_at(t).ok_or_else(|| {
                        Error::InvalidConfig(format!("time {t} is not on the sample grid (spacing {dt})"))
                    })
                })
                .collect::<Result<Vec<f64>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    let (plus, minus) = rows.chunks_exact(2).map(|p| (p[0].clone(), p[1].clone())).unzip();
    Ok(FieldSweep {
        times: times.to_vec(),
        b_grid: b_grid.to_vec(),
        delta_b,
        plus,
        minus,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum EstimateMethod {
    PairwiseCrossing,
    CollapseFit,
    BinderCrossing,
    MeanField,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CriticalPointEstimate {
    pub b_c: f64,
    pub uncertainty: f64,
    pub method: EstimateMethod,
    pub residual: f64,
}

/// Expected sign change of `curve(larger label) - curve(smaller label)`
/// with increasing field.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CrossingDirection {
    /// Negative below the crossing, positive above (derivative curves
    /// sharpen with time).
    Rising,
    /// Positive below, negative above (Binder curves sharpen with size).
    Falling,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PairCrossing {
    pub first: f64,
    pub second: f64,
    pub b: f64,
    /// Curve value at the crossing.
    pub value: f64,
}

/// Crossing of every pair of curves. When the difference changes sign more
/// than once in the expected direction, the steepest sign change wins.
pub fn pairwise_crossings(
    b_grid: &[f64],
    curves: &[(f64, &[f64])],
    direction: CrossingDirection,
) -> Result<Vec<PairCrossing>> {
    let mut sorted: Vec<(f64, &[f64])> = curves.to_vec();
    sorted.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut out = Vec::new();
    for i in 0..sorted.len() {
        for j in i + 1..sorted.len() {
            let (la, a) = sorted[i];
            let (lb, b) = sorted[j];
            let diff: Vec<f64> = b.iter().zip(a).map(|(y, x)| y - x).collect();
            let oriented = |d: f64| match direction {
                CrossingDirection::Rising => d,
                CrossingDirection::Falling => -d,
            };
            let best = (0..b_grid.len() - 1)
                .filter(|&k| {
                    let (lo, hi) = (oriented(diff[k]), oriented(diff[k + 1]));
                    (lo < 0.0 && hi >= 0.0) || (lo <= 0.0 && hi > 0.0)
                })
                .max_by(|&k, &m| {
                    let slope = |k: usize| (oriented(diff[k + 1]) - oriented(diff[k])) / (b_grid[k + 1] - b_grid[k]);
                    slope(k).total_cmp(&slope(m))
                })
                .ok_or(Error::NoCrossing { first: la, second: lb })?;
            let root = bisect_linear(b_grid[best], b_grid[best + 1], diff[best], diff[best + 1]);
            let value = interpolate(b_grid, a, root).expect("root inside grid");
            out.push(PairCrossing {
                first: la,
                second: lb,
                b: root,
                value,
            });
        }
    }
    Ok(out)
}

/// Root of the linear interpolant through `(x0, f0)` and `(x1, f1)`.
fn bisect_linear(x0: f64, x1: f64, f0: f64, f1: f64) -> f64 {
    if f0 == 0.0 {
        return x0;
    }
    if f1 == 0.0 {
        return x1;
    }
    let f = |x: f64| f0 + (f1 - f0) * (x - x0) / (x1 - x0);
    let (mut lo, mut hi) = (x0, x1);
    let sign_lo = f0.signum();
    for _ in 0..100 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if f(mid).signum() == sign_lo {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Mean and spread of pairwise crossings; the residual is the spread of the
/// curve values at the crossings.
pub fn aggregate_crossings(pairs: &[PairCrossing], method: EstimateMethod) -> CriticalPointEstimate {
    let bs: Vec<f64> = pairs.iter().map(|p| p.b).collect();
    let values: Vec<f64> = pairs.iter().map(|p| p.value).collect();
    CriticalPointEstimate {
        b_c: mean(&bs),
        uncertainty: std_dev(&bs),
        method,
        residual: std_dev(&values),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CrossingAnalysis {
    pub estimate: CriticalPointEstimate,
    pub pairs: Vec<PairCrossing>,
}

impl CrossingAnalysis {
    /// Mean curve value at the crossings.
    pub fn crossing_value(&self) -> f64 {
        mean(&self.pairs.iter().map(|p| p.value).collect::<Vec<_>>())
    }
}

pub fn crossing_analysis(curves: &DerivativeCurveSet) -> Result<CrossingAnalysis> {
    let pairs = pairwise_crossings(&curves.b_grid, &curves.labelled(), CrossingDirection::Rising)?;
    Ok(CrossingAnalysis {
        estimate: aggregate_crossings(&pairs, EstimateMethod::PairwiseCrossing),
        pairs,
    })
}

/// Dynamical critical field from the common crossing of the curves.
pub fn find_crossing(curves: &DerivativeCurveSet) -> Result<CriticalPointEstimate> {
    Ok(crossing_analysis(curves)?.estimate)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CollapseOptions {
    /// Half-width of the rescaled window `|x| <= window`.
    pub window: f64,
    /// Points sampled across the common window.
    pub samples: usize,
    /// Candidates per refinement level.
    pub candidates: usize,
    pub levels: usize,
}

impl Default for CollapseOptions {
    fn default() -> Self {
        Self {
            window: 1.0,
            samples: 101,
            candidates: 81,
            levels: 4,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CollapseFit {
    pub estimate: CriticalPointEstimate,
    /// Pointwise mean of the rescaled curves at the optimum.
    pub master_x: Vec<f64>,
    pub master_y: Vec<f64>,
    /// Every evaluated `(b_c, residual)`, sorted by `b_c`.
    pub profile: Vec<(f64, f64)>,
}

impl CollapseFit {
    /// Least-squares line through the master curve for `|x| <= half_width`.
    pub fn master_line(&self, half_width: f64) -> (f64, f64) {
        let (xs, ys): (Vec<f64>, Vec<f64>) = self
            .master_x
            .iter()
            .zip(&self.master_y)
            .filter(|(x, _)| x.abs() <= half_width)
            .map(|(x, y)| (*x, *y))
            .unzip();
        fit_line(&xs, &ys)
    }
}

struct Collapsed {
    residual: f64,
    xs: Vec<f64>,
    mean: Vec<f64>,
}

fn collapse_at(curves: &DerivativeCurveSet, b_c: f64, opts: &CollapseOptions) -> Result<Collapsed> {
    let rescaled: Vec<Vec<f64>> = curves
        .times
        .iter()
        .map(|&t| curves.b_grid.iter().map(|&b| (b - b_c) * t).collect())
        .collect();
    let lo = rescaled.iter().map(|x| x[0]).fold(-opts.window, f64::max);
    let hi = rescaled.iter().map(|x| x[x.len() - 1]).fold(opts.window, f64::min);
    if !(hi > lo) {
        return Err(Error::EmptyOverlap { b_c });
    }
    let m = opts.samples.max(2);
    let xs: Vec<f64> = (0..m)
        .map(|k| (lo + (hi - lo) * k as f64 / (m - 1) as f64).clamp(lo, hi))
        .collect();
    let mut residual = 0.0;
    let mut means = Vec::with_capacity(m);
    for &x in &xs {
        let ys: Vec<f64> = rescaled
            .iter()
            .zip(&curves.values)
            .map(|(rx, v)| interpolate(rx, v, x).expect("x inside common window"))
            .collect();
        let mu = mean(&ys);
        residual += ys.iter().map(|y| (y - mu).powi(2)).sum::<f64>();
        means.push(mu);
    }
    Ok(Collapsed {
        residual: residual / (m * curves.times.len()) as f64,
        xs,
        mean: means,
    })
}

pub fn collapse_fit(curves: &DerivativeCurveSet, interval: (f64, f64)) -> Result<CriticalPointEstimate> {
    Ok(collapse_fit_with(curves, interval, &CollapseOptions::default())?.estimate)
}

/// Scaling collapse: choose `b_c` minimising the spread of the curves
/// against `(B - b_c) t`, by successive grid refinement over `interval`.
/// The uncertainty is the half-width of the region where the residual stays
/// within twice its minimum, and never less than the finest grid step.
pub fn collapse_fit_with(
    curves: &DerivativeCurveSet,
    interval: (f64, f64),
    opts: &CollapseOptions,
) -> Result<CollapseFit> {
    if curves.times.len() < 3 {
        return Err(Error::InvalidConfig(format!(
            "scaling collapse needs at least three times, got {}",
            curves.times.len()
        )));
    }
    let (mut lo, mut hi) = interval;
    if !(hi > lo) {
        return Err(Error::InvalidConfig(format!("empty search interval [{lo}, {hi}]")));
    }
    let n = opts.candidates.max(3);
    let mut profile: Vec<(f64, f64)> = Vec::new();
    let mut step = 0.0;
    for _ in 0..opts.levels.max(1) {
        step = (hi - lo) / (n - 1) as f64;
        let level: Vec<(f64, f64)> = (0..n)
            .into_par_iter()
            .map(|k| {
                let b = lo + k as f64 * step;
                let r = collapse_at(curves, b, opts)
                    .map(|c| c.residual)
                    .unwrap_or(f64::INFINITY);
                (b, r)
            })
            .collect();
        profile.extend(level.iter().filter(|p| p.1.is_finite()));
        let best = level
            .iter()
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .copied()
            .expect("non-empty level");
        if !best.1.is_finite() {
            return Err(Error::EmptyOverlap { b_c: best.0 });
        }
        lo = (best.0 - step).max(interval.0);
        hi = (best.0 + step).min(interval.1);
    }
    profile.sort_by(|a, b| a.0.total_cmp(&b.0));
    profile.dedup_by(|a, b| a.0 == b.0);
    let (k_best, &(b_best, r_best)) = profile
        .iter()
        .enumerate()
        .min_by(|a, b| a.1 .1.total_cmp(&b.1 .1))
        .expect("non-empty profile");
    let threshold = 2.0 * r_best;
    let mut left = k_best;
    while left > 0 && profile[left - 1].1 <= threshold {
        left -= 1;
    }
    let mut right = k_best;
    while right + 1 < profile.len() && profile[right + 1].1 <= threshold {
        right += 1;
    }
    let half_width = 0.5 * (profile[right].0 - profile[left].0);
    let best = collapse_at(curves, b_best, opts)?;
    Ok(CollapseFit {
        estimate: CriticalPointEstimate {
            b_c: b_best,
            uncertainty: half_width.max(step),
            method: EstimateMethod::CollapseFit,
            residual: r_best,
        },
        master_x: best.xs,
        master_y: best.mean,
        profile,
    })
}

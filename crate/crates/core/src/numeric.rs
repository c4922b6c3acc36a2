//! Small numerical helpers shared across modules.

use crate::error::{Error, Result};

const LEAF: usize = 64;

/// Sum with a fixed binary-tree topology, so the result depends only on the
/// input order and never on how the caller partitioned the work.
pub fn pairwise_sum(values: &[f64]) -> f64 {
    if values.len() <= LEAF {
        return values.iter().sum();
    }
    let mid = values.len() / 2;
    pairwise_sum(&values[..mid]) + pairwise_sum(&values[mid..])
}

/// Evenly spaced grid `start, start + step, ...` up to and including `stop`
/// (within a relative tolerance of the step).
pub fn grid(start: f64, stop: f64, step: f64) -> Result<Vec<f64>> {
    if !(step > 0.0) || !(stop >= start) || !start.is_finite() || !stop.is_finite() {
        return Err(Error::InvalidConfig(format!(
            "invalid range [{start}, {stop}] with step {step}"
        )));
    }
    let n = ((stop - start) / step + 1e-9).floor() as usize;
    Ok((0..=n).map(|k| start + k as f64 * step).collect())
}

/// Piecewise-linear interpolation on a strictly increasing abscissa.
/// Returns `None` outside `[xs[0], xs[last]]`.
pub fn interpolate(xs: &[f64], ys: &[f64], x: f64) -> Option<f64> {
    let n = xs.len();
    if n == 0 || x < xs[0] || x > xs[n - 1] {
        return None;
    }
    if n == 1 {
        return Some(ys[0]);
    }
    let k = xs.partition_point(|&v| v <= x).clamp(1, n - 1);
    let (x0, x1) = (xs[k - 1], xs[k]);
    let w = (x - x0) / (x1 - x0);
    Some(ys[k - 1] + w * (ys[k] - ys[k - 1]))
}

pub fn mean(values: &[f64]) -> f64 {
    values.iter().sum::<f64>() / values.len() as f64
}

/// Population standard deviation.
pub fn std_dev(values: &[f64]) -> f64 {
    let m = mean(values);
    (values.iter().map(|v| (v - m).powi(2)).sum::<f64>() / values.len() as f64).sqrt()
}

/// Least-squares line `y = slope * x + intercept`.
pub fn fit_line(xs: &[f64], ys: &[f64]) -> (f64, f64) {
    let mx = mean(xs);
    let my = mean(ys);
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let slope = sxy / sxx;
    (slope, my - slope * mx)
}

/// Running averages `(1/t_k) * integral_0^{t_k} f` on a uniform grid of
/// spacing `h`, accurate to fourth order: composite Simpson, closed with a
/// 3/8 panel for odd interval counts.
pub fn running_time_average(samples: &[f64], h: f64) -> Vec<f64> {
    let n = samples.len();
    let mut out = Vec::with_capacity(n);
    if n == 0 {
        return out;
    }
    out.push(samples[0]);
    if n == 1 {
        return out;
    }
    // Simpson partial sums over the first 2m intervals.
    let mut even = vec![0.0; n];
    for k in (2..n).step_by(2) {
        even[k] = even[k - 2] + h / 3.0 * (samples[k - 2] + 4.0 * samples[k - 1] + samples[k]);
    }
    let f = samples;
    for k in 1..n {
        let integral = if k % 2 == 0 {
            even[k]
        } else if k >= 3 {
            even[k - 3] + 3.0 * h / 8.0 * (f[k - 3] + 3.0 * f[k - 2] + 3.0 * f[k - 1] + f[k])
        } else if n >= 4 {
            // First interval from the cubic through f0..f3.
            h / 24.0 * (9.0 * f[0] + 19.0 * f[1] - 5.0 * f[2] + f[3])
        } else if n == 3 {
            h / 12.0 * (5.0 * f[0] + 8.0 * f[1] - f[2])
        } else {
            0.5 * h * (f[0] + f[1])
        };
        out.push(integral / (k as f64 * h));
    }
    out
}

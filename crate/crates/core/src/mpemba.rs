//! Distance to equilibrium, late-time decay rates and Mpemba crossings.

use std::cmp::Ordering;

use crate::dynamics::Trajectory;
use crate::error::{Error, Result};
use crate::model::PhotonDistribution;

/// Minimum number of samples in the decay-fit window.
pub const MIN_FIT_SAMPLES: usize = 8;
/// Upper edge of the fit window relative to `D(0)`.
pub const FIT_UPPER: f64 = 1e-1;
/// Lower edge of the fit window relative to `D(0)`.
pub const FIT_LOWER: f64 = 1e-4;
/// Absolute lower edge of the fit window.
pub const FIT_FLOOR: f64 = 1e-9;
/// Samples where both distances are below this carry no ordering.
pub const NOISE_FLOOR: f64 = 1e-12;

/// Distance between two photon distributions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum DistanceMeasure {
    /// `sqrt(sum (p - q)^2)`.
    #[default]
    HilbertSchmidt,
    /// `sum |p - q| / 2`.
    Trace,
    /// `sum p log(p / q)`; infinite when `p` has mass where `q` vanishes.
    KullbackLeibler,
}

impl DistanceMeasure {
    pub fn eval(self, p: &PhotonDistribution, q: &PhotonDistribution) -> Result<f64> {
        if p.len() != q.len() {
            return Err(Error::DimensionMismatch { expected: q.len(), got: p.len() });
        }
        let pairs = p.probs().iter().zip(q.probs());
        Ok(match self {
            DistanceMeasure::HilbertSchmidt => pairs.map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt(),
            DistanceMeasure::Trace => 0.5 * pairs.map(|(a, b)| (a - b).abs()).sum::<f64>(),
            DistanceMeasure::KullbackLeibler => pairs
                .filter(|(a, _)| **a > 0.0)
                .map(|(a, b)| if *b > 0.0 { a * (a / b).ln() } else { f64::INFINITY })
                .sum(),
        })
    }
}

/// Hilbert-Schmidt distance `sqrt(sum_n (p_n - ps_n)^2)`.
pub fn distance(p: &PhotonDistribution, ps: &PhotonDistribution) -> Result<f64> {
    DistanceMeasure::HilbertSchmidt.eval(p, ps)
}

/// Exponential fit `D ~ exp(-rate t)` over samples `window.0..window.1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateFit {
    pub rate: f64,
    pub window: (usize, usize),
}

/// Distances to equilibrium along a trajectory.
#[derive(Debug, Clone, PartialEq)]
pub struct DistanceTrajectory {
    times: Vec<f64>,
    distances: Vec<f64>,
    fit: Option<RateFit>,
}

impl DistanceTrajectory {
    /// Distances under `measure` with a best-effort decay fit.
    pub fn new(traj: &Trajectory, ps: &PhotonDistribution, measure: DistanceMeasure) -> Result<Self> {
        if traj.is_empty() {
            return Err(Error::InvalidParams("empty trajectory".into()));
        }
        let distances = traj.states().iter().map(|s| measure.eval(s, ps)).collect::<Result<Vec<_>>>()?;
        let times = traj.times().to_vec();
        let fit = fit_decay(&times, &distances).ok();
        Ok(Self { times, distances, fit })
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn distances(&self) -> &[f64] {
        &self.distances
    }

    pub fn fit(&self) -> Option<RateFit> {
        self.fit
    }

    pub fn fitted_rate(&self) -> Option<f64> {
        self.fit.map(|f| f.rate)
    }
}

/// Hilbert-Schmidt distance trajectory; fails if the decay cannot be fitted.
pub fn distance_trajectory(traj: &Trajectory, ps: &PhotonDistribution) -> Result<DistanceTrajectory> {
    let dt = DistanceTrajectory::new(traj, ps, DistanceMeasure::HilbertSchmidt)?;
    match dt.fit {
        Some(_) => Ok(dt),
        None => fit_decay(&dt.times, &dt.distances).map(|_| dt),
    }
}

/// Least-squares slope of `log D` against `t` on the contiguous run of samples
/// with `D` in `[max(FIT_FLOOR, FIT_LOWER D(0)), FIT_UPPER D(0)]`.
///
/// The run starts after the last sample above the upper edge and stops at the
/// first sample below the lower edge.
pub fn fit_decay(times: &[f64], distances: &[f64]) -> Result<RateFit> {
    let empty = |found| Error::FitWindowEmpty { found, needed: MIN_FIT_SAMPLES };
    let d0 = match distances.first() {
        Some(d) if *d > 0.0 => *d,
        _ => return Err(empty(0)),
    };
    let upper = FIT_UPPER * d0;
    let lower = FIT_FLOOR.max(FIT_LOWER * d0);
    let start = distances.iter().rposition(|d| *d > upper).map_or(0, |i| i + 1);
    let end = distances[start..].iter().position(|d| *d < lower).map_or(distances.len(), |i| start + i);
    let found = end - start;
    if found < MIN_FIT_SAMPLES || lower > upper {
        return Err(empty(found));
    }
    let n = found as f64;
    let ts = &times[start..end];
    let ys: Vec<f64> = distances[start..end].iter().map(|d| d.ln()).collect();
    let t_mean = ts.iter().sum::<f64>() / n;
    let y_mean = ys.iter().sum::<f64>() / n;
    let sxy: f64 = ts.iter().zip(&ys).map(|(t, y)| (t - t_mean) * (y - y_mean)).sum();
    let sxx: f64 = ts.iter().map(|t| (t - t_mean).powi(2)).sum();
    Ok(RateFit { rate: -sxy / sxx, window: (start, end) })
}

/// Outcome of comparing state I (`a`) with state II (`b`).
#[derive(Debug, Clone, PartialEq)]
pub struct MpembaVerdict {
    /// Ordering of `D_II(0)` relative to `D_I(0)`.
    pub initial_order: Ordering,
    /// Times where `D_I - D_II` changes sign, linearly interpolated.
    pub crossing_times: Vec<f64>,
    /// `D_II(0) > D_I(0)` and `D_II < D_I` at every sample after the last
    /// crossing.
    pub mpemba_detected: bool,
    /// Fitted decay rates of I and II.
    pub rates: (Option<f64>, Option<f64>),
}

/// Crossing analysis of two distance trajectories on the same grid.
///
/// Samples where both distances are below [`NOISE_FLOOR`] are skipped, as
/// are exact ties.
pub fn compare(a: &DistanceTrajectory, b: &DistanceTrajectory) -> Result<MpembaVerdict> {
    if a.times != b.times {
        return Err(Error::GridMismatch);
    }
    let (da, db) = (&a.distances, &b.distances);
    let initial_order = db[0].partial_cmp(&da[0]).unwrap_or(Ordering::Equal);

    let mut crossing_times = Vec::new();
    let mut last: Option<(usize, f64)> = None;
    for k in 0..da.len() {
        if da[k] < NOISE_FLOOR && db[k] < NOISE_FLOOR {
            continue;
        }
        let diff = da[k] - db[k];
        if diff == 0.0 {
            continue;
        }
        if let Some((j, prev)) = last {
            if prev.signum() != diff.signum() {
                let (t0, t1) = (a.times[j], a.times[k]);
                crossing_times.push(t0 + (t1 - t0) * prev / (prev - diff));
            }
        }
        last = Some((k, diff));
    }
    // The last signed sample decides the late-time order; all samples after
    // the last crossing share its sign.
    let ends_below = matches!(last, Some((_, d)) if d > 0.0);
    let mpemba_detected = initial_order == Ordering::Greater && ends_below && !crossing_times.is_empty();
    Ok(MpembaVerdict { initial_order, crossing_times, mpemba_detected, rates: (a.fitted_rate(), b.fitted_rate()) })
}

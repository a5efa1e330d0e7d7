//! Time integration of `dP/dt = M P` with an adaptive Dormand-Prince 5(4)
//! pair.
//!
//! The step is capped at `0.5 / max_n |M[n][n]|` so the explicit scheme stays
//! inside its stability region for the whole spectrum of `M`.

use crate::error::{Error, Result};
use crate::generator::Generator;
use crate::model::PhotonDistribution;

/// Smallest step before the integrator gives up.
pub const MIN_STEP: f64 = 1e-14;

/// Sampled evolution of a photon distribution.
///
/// Besides the read-out snapshots, each sample keeps the raw state's
/// deviation of `sum(P_n)` from one and its smallest entry, taken before
/// renormalization and clipping.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    times: Vec<f64>,
    states: Vec<PhotonDistribution>,
    mass_drift: Vec<f64>,
    min_entry: Vec<f64>,
}

impl Trajectory {
    pub(crate) fn with_capacity(n: usize) -> Self {
        Self {
            times: Vec::with_capacity(n),
            states: Vec::with_capacity(n),
            mass_drift: Vec::with_capacity(n),
            min_entry: Vec::with_capacity(n),
        }
    }

    pub(crate) fn push_exact(&mut self, t: f64, state: PhotonDistribution) {
        let sum: f64 = state.probs().iter().sum();
        let min = state.probs().iter().cloned().fold(f64::INFINITY, f64::min);
        self.times.push(t);
        self.mass_drift.push(sum - 1.0);
        self.min_entry.push(min);
        self.states.push(state);
    }

    pub(crate) fn push_raw(&mut self, t: f64, raw: &[f64]) -> Result<()> {
        if raw.iter().any(|x| !x.is_finite()) {
            return Err(Error::NonFiniteState { t });
        }
        let sum: f64 = raw.iter().sum();
        let min = raw.iter().cloned().fold(f64::INFINITY, f64::min);
        let state = PhotonDistribution::read_out(raw)?;
        self.times.push(t);
        self.mass_drift.push(sum - 1.0);
        self.min_entry.push(min);
        self.states.push(state);
        Ok(())
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn states(&self) -> &[PhotonDistribution] {
        &self.states
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn last(&self) -> Option<&PhotonDistribution> {
        self.states.last()
    }

    /// `sum(P_n) - 1` of the raw state at each sample.
    pub fn mass_drift(&self) -> &[f64] {
        &self.mass_drift
    }

    /// Smallest raw entry at each sample.
    pub fn min_entry(&self) -> &[f64] {
        &self.min_entry
    }

    pub fn max_mass_drift(&self) -> f64 {
        self.mass_drift.iter().fold(0.0, |m, d| m.max(d.abs()))
    }

    pub fn min_raw_entry(&self) -> f64 {
        self.min_entry.iter().cloned().fold(f64::INFINITY, f64::min)
    }
}

/// Output sampling and local error control.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegratorConfig {
    pub t_end: f64,
    pub n_samples: usize,
    pub rel_tol: f64,
    pub abs_tol: f64,
}

impl IntegratorConfig {
    pub const DEFAULT_REL_TOL: f64 = 1e-8;
    pub const DEFAULT_ABS_TOL: f64 = 1e-12;

    pub fn new(t_end: f64, n_samples: usize) -> Self {
        Self { t_end, n_samples, rel_tol: Self::DEFAULT_REL_TOL, abs_tol: Self::DEFAULT_ABS_TOL }
    }

    pub fn with_tolerances(mut self, rel_tol: f64, abs_tol: f64) -> Self {
        self.rel_tol = rel_tol;
        self.abs_tol = abs_tol;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.t_end.is_finite() && self.t_end > 0.0) {
            return Err(Error::InvalidParams(format!("t_end must be positive, got {}", self.t_end)));
        }
        if self.n_samples < 2 {
            return Err(Error::InvalidParams("n_samples must be at least 2".into()));
        }
        if !(self.rel_tol > 0.0 && self.abs_tol > 0.0) {
            return Err(Error::InvalidParams("tolerances must be positive".into()));
        }
        Ok(())
    }

    /// Uniform sample times `0, ..., t_end`.
    pub fn sample_times(&self) -> Vec<f64> {
        let last = (self.n_samples - 1) as f64;
        (0..self.n_samples)
            .map(|k| if k + 1 == self.n_samples { self.t_end } else { self.t_end * k as f64 / last })
            .collect()
    }
}

// Dormand-Prince 5(4) tableau; the last row holds the fifth-order weights.
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
// Fifth-order minus embedded fourth-order weights.
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

struct Stepper<'a> {
    gen: &'a Generator,
    k: [Vec<f64>; 7],
    stage: Vec<f64>,
    y_new: Vec<f64>,
    rel_tol: f64,
    abs_tol: f64,
}

impl<'a> Stepper<'a> {
    fn new(gen: &'a Generator, y0: &[f64], cfg: &IntegratorConfig) -> Self {
        let n = gen.dim();
        let k: [Vec<f64>; 7] = std::array::from_fn(|_| vec![0.0; n]);
        let mut s = Self {
            gen,
            k,
            stage: vec![0.0; n],
            y_new: vec![0.0; n],
            rel_tol: cfg.rel_tol,
            abs_tol: cfg.abs_tol,
        };
        gen.apply_into(y0, &mut s.k[0]);
        s
    }

    /// Attempt one step of size `h`; returns the scaled RMS error estimate.
    /// The candidate state is left in `y_new`.
    fn attempt(&mut self, y: &[f64], h: f64) -> f64 {
        for s in 1..7 {
            self.stage.copy_from_slice(y);
            for (j, a) in A[s][..s].iter().enumerate() {
                if *a != 0.0 {
                    let ha = h * a;
                    self.stage.iter_mut().zip(&self.k[j]).for_each(|(x, kj)| *x += ha * kj);
                }
            }
            self.gen.apply_into(&self.stage, &mut self.k[s]);
        }
        // Stage 7 is evaluated at the fifth-order solution (FSAL).
        self.y_new.copy_from_slice(&self.stage);
        let err = &mut self.stage;
        err.iter_mut().for_each(|e| *e = 0.0);
        for (s, w) in E.iter().enumerate() {
            if *w != 0.0 {
                let hw = h * w;
                err.iter_mut().zip(&self.k[s]).for_each(|(e, ks)| *e += hw * ks);
            }
        }
        let err_sq: f64 = err
            .iter()
            .zip(y)
            .zip(&self.y_new)
            .map(|((e, y0), y1)| {
                let r = e / (self.abs_tol + self.rel_tol * y0.abs().max(y1.abs()));
                r * r
            })
            .sum();
        (err_sq / y.len() as f64).sqrt()
    }

    fn accept(&mut self, y: &mut [f64]) {
        y.copy_from_slice(&self.y_new);
        self.k.swap(0, 6);
    }
}

/// Integrate from `p0` and sample uniformly on `[0, t_end]`.
pub fn evolve(gen: &Generator, p0: &PhotonDistribution, cfg: &IntegratorConfig) -> Result<Trajectory> {
    cfg.validate()?;
    if p0.len() != gen.dim() {
        return Err(Error::DimensionMismatch { expected: gen.dim(), got: p0.len() });
    }
    let times = cfg.sample_times();
    let max_outflow = gen.max_outflow();
    let h_max = if max_outflow > 0.0 { 0.5 / max_outflow } else { cfg.t_end };

    let mut traj = Trajectory::with_capacity(times.len());
    traj.push_exact(0.0, p0.clone());

    let mut y = p0.probs().to_vec();
    let mut stepper = Stepper::new(gen, &y, cfg);
    let mut t = 0.0;
    let mut h = h_max;
    for &target in &times[1..] {
        while t < target {
            let remaining = target - t;
            let landing = remaining <= h * (1.0 + 1e-12);
            let h_try = if landing { remaining } else { h };
            let err = stepper.attempt(&y, h_try);
            // An infinite estimate with a finite candidate only means the
            // tolerance is tiny; the step is rejected below.
            if err.is_nan() || !stepper.y_new.iter().all(|x| x.is_finite()) {
                return Err(Error::NonFiniteState { t });
            }
            if err <= 1.0 {
                stepper.accept(&mut y);
                t = if landing { target } else { t + h_try };
                let factor = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
                // A short landing step says nothing about the proposal.
                if !landing || factor < 1.0 {
                    h = (h_try * factor).min(h_max);
                }
            } else {
                h = h_try * (0.9 * err.powf(-0.2)).clamp(0.2, 1.0);
            }
            if h < MIN_STEP {
                return Err(Error::ToleranceFailure { t, h });
            }
        }
        traj.push_raw(target, &y)?;
    }
    Ok(traj)
}

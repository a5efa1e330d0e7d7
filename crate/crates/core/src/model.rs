//! Physical parameters, gain/loss rates and the exact stationary photon
//! distribution of the single-mode laser.
//!
//! Photon numbers are Fock indices `n = 0..=n_max`. Rates follow the
//! saturated-gain form
//!
//! ```text
//! G_n = n G / (1 + n / n_s)        (stimulated emission, birth)
//! L_n = n kappa                    (cavity loss, death)
//! ```
//!
//! and the stationary state is fixed by detailed balance,
//! `L_n P_n = G_n P_{n-1}`.

use crate::error::{Error, Result};

/// Entries above `-NEG_TOLERANCE` are accepted as non-negative.
pub const NEG_TOLERANCE: f64 = 1e-12;
/// Allowed deviation of `sum(P_n)` from one.
pub const NORM_TOLERANCE: f64 = 1e-10;
/// Maximum allowed `P[n_max] / max P` for the stationary state.
pub const TRUNCATION_LIMIT: f64 = 1e-12;

/// Round half-up to the nearest integer.
pub fn round_half_up(x: f64) -> i64 {
    (x + 0.5).floor() as i64
}

/// Laser parameters plus the Fock-space truncation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LaserParams {
    gain: f64,
    kappa: f64,
    n_sat: f64,
    n_max: usize,
}

impl LaserParams {
    /// Parameters with the truncation sized automatically (see
    /// [`LaserParams::auto_n_max`]).
    pub fn new(gain: f64, kappa: f64, n_sat: f64) -> Result<Self> {
        check_positive("gain", gain)?;
        check_positive("kappa", kappa)?;
        check_positive("n_sat", n_sat)?;
        let n_max = Self::auto_n_max(gain, kappa, n_sat);
        Self::with_all(gain, kappa, n_sat, n_max)
    }

    /// Parameters with an explicit truncation index.
    pub fn with_all(gain: f64, kappa: f64, n_sat: f64, n_max: usize) -> Result<Self> {
        check_positive("gain", gain)?;
        check_positive("kappa", kappa)?;
        check_positive("n_sat", n_sat)?;
        if n_max < 2 {
            return Err(Error::InvalidParams(format!("n_max must be at least 2, got {n_max}")));
        }
        Ok(Self { gain, kappa, n_sat, n_max })
    }

    /// Same physics, different truncation.
    pub fn with_n_max(self, n_max: usize) -> Result<Self> {
        Self::with_all(self.gain, self.kappa, self.n_sat, n_max)
    }

    /// Default truncation: `n_p + 10 sqrt(n_p + n_s)` at or above threshold,
    /// `50 G / (kappa - G)` below it.
    pub fn auto_n_max(gain: f64, kappa: f64, n_sat: f64) -> usize {
        let n = if gain >= kappa {
            let n_p = n_sat * (gain / kappa - 1.0);
            n_p + 10.0 * (n_p + n_sat).sqrt()
        } else {
            50.0 * gain / (kappa - gain)
        };
        (n.ceil() as usize).max(2)
    }

    pub fn gain(&self) -> f64 {
        self.gain
    }

    pub fn kappa(&self) -> f64 {
        self.kappa
    }

    pub fn n_sat(&self) -> f64 {
        self.n_sat
    }

    pub fn n_max(&self) -> usize {
        self.n_max
    }

    /// Number of retained Fock states, `n_max + 1`.
    pub fn dim(&self) -> usize {
        self.n_max + 1
    }

    pub fn above_threshold(&self) -> bool {
        self.gain > self.kappa
    }

    /// Gain (birth) rate `G_n`.
    pub fn gain_rate(&self, n: usize) -> f64 {
        let n = n as f64;
        n * self.gain / (1.0 + n / self.n_sat)
    }

    /// Loss (death) rate `L_n`.
    pub fn loss_rate(&self, n: usize) -> f64 {
        n as f64 * self.kappa
    }

    pub fn derived(&self) -> DerivedScalars {
        derived_scalars(self)
    }
}

fn check_positive(name: &str, value: f64) -> Result<()> {
    if value.is_finite() && value > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidParams(format!("{name} must be positive and finite, got {value}")))
    }
}

/// Free-function form of [`LaserParams::gain_rate`].
pub fn gain_rate(params: &LaserParams, n: usize) -> f64 {
    params.gain_rate(n)
}

/// Free-function form of [`LaserParams::loss_rate`].
pub fn loss_rate(params: &LaserParams, n: usize) -> f64 {
    params.loss_rate(n)
}

/// Closed-form scalars of the large-`n_s` theory.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DerivedScalars {
    /// Mean photon number above threshold, `n_s (G/kappa - 1)`.
    pub n_bar: f64,
    /// Peak of the stationary distribution, where `G_n = L_n`.
    pub n_peak: f64,
    /// Differential gain at the peak, `kappa^2 / G` (equal to `G` below threshold).
    pub diff_gain: f64,
    /// Slowest relaxation rate `kappa - diff_gain`.
    pub gap: f64,
    /// Stationary variance estimate: `n_bar + n_s` at or above threshold,
    /// `m (1 + m)` with `m = G / (kappa - G)` below.
    pub sigma2: f64,
}

pub fn derived_scalars(params: &LaserParams) -> DerivedScalars {
    let (g, k, ns) = (params.gain, params.kappa, params.n_sat);
    if g >= k {
        let n_bar = ns * (g / k - 1.0);
        let diff_gain = k * k / g;
        DerivedScalars { n_bar, n_peak: n_bar, diff_gain, gap: k - diff_gain, sigma2: n_bar + ns }
    } else {
        let m = g / (k - g);
        DerivedScalars { n_bar: 0.0, n_peak: 0.0, diff_gain: g, gap: k - g, sigma2: m * (1.0 + m) }
    }
}

/// Probability vector over Fock states `0..=n_max`.
#[derive(Debug, Clone, PartialEq)]
pub struct PhotonDistribution {
    probs: Vec<f64>,
}

impl PhotonDistribution {
    /// Validates finiteness, non-negativity (to [`NEG_TOLERANCE`]) and
    /// normalization (to [`NORM_TOLERANCE`]).
    pub fn new(probs: Vec<f64>) -> Result<Self> {
        if probs.is_empty() {
            return Err(Error::InvalidDistribution("empty probability vector".into()));
        }
        let mut sum = 0.0;
        for (n, &p) in probs.iter().enumerate() {
            if !p.is_finite() {
                return Err(Error::InvalidDistribution(format!("non-finite entry at n = {n}")));
            }
            if p < -NEG_TOLERANCE {
                return Err(Error::InvalidDistribution(format!("negative entry {p:e} at n = {n}")));
            }
            sum += p;
        }
        if (sum - 1.0).abs() > NORM_TOLERANCE {
            return Err(Error::InvalidDistribution(format!("sum is {sum}, not 1")));
        }
        Ok(Self { probs })
    }

    /// Normalizes non-negative weights.
    pub fn from_weights(mut weights: Vec<f64>) -> Result<Self> {
        if weights.iter().any(|w| !w.is_finite() || *w < 0.0) {
            return Err(Error::InvalidDistribution("weights must be finite and non-negative".into()));
        }
        let total: f64 = weights.iter().sum();
        if total <= 0.0 {
            return Err(Error::InvalidDistribution("weights sum to zero".into()));
        }
        weights.iter_mut().for_each(|w| *w /= total);
        Self::new(weights)
    }

    /// Read-out of a raw integrator state: divide by the sum, then clip
    /// negative excursions to zero.
    pub(crate) fn read_out(raw: &[f64]) -> Result<Self> {
        let sum: f64 = raw.iter().sum();
        if !sum.is_finite() || sum <= 0.0 {
            return Err(Error::InvalidDistribution(format!("state sum is {sum}")));
        }
        let mut probs: Vec<f64> = raw.iter().map(|p| (p / sum).max(0.0)).collect();
        let clipped: f64 = probs.iter().sum();
        probs.iter_mut().for_each(|p| *p /= clipped);
        Ok(Self { probs })
    }

    /// Point mass at `n`.
    pub fn fock(n: usize, n_max: usize) -> Result<Self> {
        if n > n_max {
            return Err(Error::IndexOutOfRange { index: n as i64, n_max });
        }
        let mut probs = vec![0.0; n_max + 1];
        probs[n] = 1.0;
        Ok(Self { probs })
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn into_probs(self) -> Vec<f64> {
        self.probs
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    pub fn n_max(&self) -> usize {
        self.probs.len() - 1
    }

    pub fn mean(&self) -> f64 {
        self.probs.iter().enumerate().map(|(n, p)| n as f64 * p).sum()
    }

    pub fn variance(&self) -> f64 {
        let mean = self.mean();
        self.probs
            .iter()
            .enumerate()
            .map(|(n, p)| {
                let d = n as f64 - mean;
                d * d * p
            })
            .sum()
    }

    /// Index of the largest probability (first one on ties).
    pub fn mode(&self) -> usize {
        let mut best = 0;
        for (n, &p) in self.probs.iter().enumerate() {
            if p > self.probs[best] {
                best = n;
            }
        }
        best
    }
}

/// Normalized `log P_n` of the truncated stationary state, from the
/// cumulative sum of `log(G_l / L_l)`.
pub fn stationary_log_probs(params: &LaserParams) -> Vec<f64> {
    let mut log_w = Vec::with_capacity(params.dim());
    let mut acc = 0.0;
    log_w.push(0.0);
    for l in 1..=params.n_max {
        acc += (params.gain_rate(l) / params.loss_rate(l)).ln();
        log_w.push(acc);
    }
    normalize_log(&mut log_w);
    log_w
}

/// Shift `log_w` so that `sum(exp(log_w)) = 1`.
pub(crate) fn normalize_log(log_w: &mut [f64]) {
    let max = log_w.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let total: f64 = log_w.iter().map(|l| (l - max).exp()).sum();
    let shift = max + total.ln();
    log_w.iter_mut().for_each(|l| *l -= shift);
}

/// Exact stationary state of the truncated (reflecting) chain, without the
/// tail-mass check. Useful for deliberately tiny truncations.
pub fn truncated_stationary(params: &LaserParams) -> PhotonDistribution {
    let log_p = stationary_log_probs(params);
    let mut probs: Vec<f64> = log_p.iter().map(|l| l.exp()).collect();
    let sum: f64 = probs.iter().sum();
    probs.iter_mut().for_each(|p| *p /= sum);
    PhotonDistribution { probs }
}

/// Stationary photon distribution (displaced Poisson above threshold,
/// near-thermal below).
///
/// Fails with [`Error::Truncation`] when `P[n_max] / max P` exceeds
/// [`TRUNCATION_LIMIT`].
pub fn stationary_distribution(params: &LaserParams) -> Result<PhotonDistribution> {
    let log_p = stationary_log_probs(params);
    let max = log_p.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let ratio = (log_p[params.n_max] - max).exp();
    if ratio > TRUNCATION_LIMIT {
        return Err(Error::Truncation { ratio, limit: TRUNCATION_LIMIT });
    }
    Ok(truncated_stationary(params))
}

//! Initial photon distributions.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{round_half_up, LaserParams, PhotonDistribution};

/// Largest tail mass that truncation at `n_max` may discard.
pub const TAIL_MASS_LIMIT: f64 = 1e-8;

/// Recipe for an initial distribution.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum InitialStateSpec {
    Vacuum,
    /// Point mass at `round(n)`.
    Fock { n: f64 },
    Poisson { mean: f64 },
    /// Bose-Einstein `P_n ~ (m / (1 + m))^n`.
    Thermal { mean: f64 },
    /// Equal masses at `round(mean - sqrt(variance))` and
    /// `round(mean + sqrt(variance))`.
    TwoFock { mean: f64, variance: f64 },
    /// Uniform over the integers in `[low, high]`.
    UniformWindow { low: f64, high: f64 },
    /// Two-column `n p` text file.
    Custom { path: PathBuf },
}

fn non_negative(name: &str, x: f64) -> Result<()> {
    if x.is_finite() && x >= 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidParams(format!("{name} must be finite and non-negative, got {x}")))
    }
}

fn site(x: f64, n_max: usize) -> Result<usize> {
    let index = round_half_up(x);
    if index < 0 || index as usize > n_max {
        return Err(Error::IndexOutOfRange { index, n_max });
    }
    Ok(index as usize)
}

fn truncated(mut probs: Vec<f64>) -> Result<PhotonDistribution> {
    let kept: f64 = probs.iter().sum();
    let mass = (1.0 - kept).max(0.0);
    if mass >= TAIL_MASS_LIMIT {
        return Err(Error::TailMass { mass, limit: TAIL_MASS_LIMIT });
    }
    probs.iter_mut().for_each(|p| *p /= kept);
    PhotonDistribution::new(probs)
}

/// Poisson weights up to `n_max`, built in log-space.
fn poisson(mean: f64, n_max: usize) -> Result<PhotonDistribution> {
    if mean == 0.0 {
        return PhotonDistribution::fock(0, n_max);
    }
    let ln_mean = mean.ln();
    let mut log_p = -mean;
    let mut probs = Vec::with_capacity(n_max + 1);
    for n in 0..=n_max {
        if n > 0 {
            log_p += ln_mean - (n as f64).ln();
        }
        probs.push(log_p.exp());
    }
    truncated(probs)
}

fn thermal(mean: f64, n_max: usize) -> Result<PhotonDistribution> {
    let r = mean / (1.0 + mean);
    let probs = (0..=n_max).map(|n| (1.0 - r) * r.powi(n as i32)).collect();
    truncated(probs)
}

/// Parse `n p` rows; blank lines and `#` comments are skipped and missing
/// indices are zero.
pub fn parse_custom(text: &str, n_max: usize) -> std::result::Result<PhotonDistribution, String> {
    let mut weights = vec![0.0; n_max + 1];
    for (line_no, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        let [n, p] = fields[..] else {
            return Err(format!("line {}: expected two columns `n p`", line_no + 1));
        };
        let n: usize = n.parse().map_err(|_| format!("line {}: bad index `{n}`", line_no + 1))?;
        let p: f64 = p.parse().map_err(|_| format!("line {}: bad probability `{p}`", line_no + 1))?;
        if n > n_max {
            return Err(format!("line {}: index {n} beyond n_max = {n_max}", line_no + 1));
        }
        if !(p.is_finite() && p >= 0.0) {
            return Err(format!("line {}: probability must be finite and non-negative", line_no + 1));
        }
        weights[n] += p;
    }
    PhotonDistribution::from_weights(weights).map_err(|e| e.to_string())
}

fn custom(path: &Path, n_max: usize) -> Result<PhotonDistribution> {
    let fail = |message: String| Error::CustomState { path: path.to_path_buf(), message };
    let text = std::fs::read_to_string(path).map_err(|e| fail(e.to_string()))?;
    parse_custom(&text, n_max).map_err(fail)
}

/// Build the distribution for `spec` on `0..=n_max`.
pub fn make(spec: &InitialStateSpec, n_max: usize) -> Result<PhotonDistribution> {
    match spec {
        InitialStateSpec::Vacuum => PhotonDistribution::fock(0, n_max),
        InitialStateSpec::Fock { n } => {
            non_negative("fock n", *n)?;
            PhotonDistribution::fock(site(*n, n_max)?, n_max)
        }
        InitialStateSpec::Poisson { mean } => {
            non_negative("poisson mean", *mean)?;
            poisson(*mean, n_max)
        }
        InitialStateSpec::Thermal { mean } => {
            non_negative("thermal mean", *mean)?;
            thermal(*mean, n_max)
        }
        InitialStateSpec::TwoFock { mean, variance } => {
            non_negative("two_fock mean", *mean)?;
            non_negative("two_fock variance", *variance)?;
            let sigma = variance.sqrt();
            let lo = site(mean - sigma, n_max)?;
            let hi = site(mean + sigma, n_max)?;
            let mut probs = vec![0.0; n_max + 1];
            probs[lo] += 0.5;
            probs[hi] += 0.5;
            PhotonDistribution::new(probs)
        }
        InitialStateSpec::UniformWindow { low, high } => {
            non_negative("window low", *low)?;
            if high.is_nan() || high < low || *high > n_max as f64 {
                return Err(Error::InvalidParams(format!("window [{low}, {high}] must satisfy low <= high <= {n_max}")));
            }
            let (a, b) = (low.ceil() as usize, high.floor() as usize);
            if a > b {
                return Err(Error::InvalidDistribution(format!("window [{low}, {high}] holds no integer")));
            }
            let mut probs = vec![0.0; n_max + 1];
            probs[a..=b].iter_mut().for_each(|p| *p = 1.0);
            PhotonDistribution::from_weights(probs)
        }
        InitialStateSpec::Custom { path } => custom(path, n_max),
    }
}

/// Labelled states of the relaxation study: vacuum, Fock and Poisson
/// (mean `0.9 n_bar`) starts and the two-Fock mixture with the stationary
/// mean and variance. The mixture is left out when its lower site would be
/// negative, as below threshold.
pub fn canonical_states(params: &LaserParams) -> Vec<(String, InitialStateSpec)> {
    let d = params.derived();
    let mut states = vec![
        ("vacuum".into(), InitialStateSpec::Vacuum),
        ("fock".into(), InitialStateSpec::Fock { n: d.n_bar }),
        ("poisson".into(), InitialStateSpec::Poisson { mean: 0.9 * d.n_bar }),
    ];
    let variance = d.n_bar + params.n_sat();
    if round_half_up(d.n_bar - variance.sqrt()) >= 0 {
        states.push(("two_fock".into(), InitialStateSpec::TwoFock { mean: d.n_bar, variance }));
    }
    states
}

//! Exact spectral analysis of the truncated generator and the large-`n_s`
//! Hermite asymptotics.
//!
//! The generator `M` satisfies detailed balance, so `S = D^{-1/2} M D^{1/2}`
//! is symmetric tridiagonal. With `S v = lambda v` and unit `v`, the right
//! and left eigenfunctions of `M` are
//!
//! ```text
//! psi_n = sqrt(P_s[n]) v_n        phi_n = v_n / sqrt(P_s[n])
//! ```
//!
//! which are biorthonormal, with `psi^(0) = P_s` and `phi^(0) = 1`. Both are
//! formed in log-space because `P_s` underflows in the tails.

pub mod hermite;
pub mod tridiag;

use crate::dynamics::Trajectory;
use crate::error::{Error, Result};
use crate::generator::SymmetrizedGenerator;
use crate::model::{round_half_up, LaserParams, PhotonDistribution};

pub use hermite::hermite;
use tridiag::SymTridiagonal;

/// Default number of modes exposed by [`decompose`] callers.
pub const DEFAULT_MODES: usize = 64;
/// `l1` reconstruction error at `t = 0` tolerated by [`spectral_propagate`].
pub const RECONSTRUCTION_TOLERANCE: f64 = 1e-6;
/// Back-transform is refused where `|log sqrt(P_s)|` exceeds this.
pub const HALF_LOG_LIMIT: f64 = 600.0;
/// Entries of a unit eigenvector below this fraction of its peak are only
/// known to absolute accuracy; `phi` is continued there by recurrence.
const TAIL_FRACTION: f64 = 1e-4;

fn sym_matrix(sym: &SymmetrizedGenerator) -> SymTridiagonal<'_> {
    SymTridiagonal { diag: sym.diag(), off: sym.off() }
}

/// All eigenvalues of the generator, descending (`lambda_0 ~ 0` first).
pub fn spectrum(sym: &SymmetrizedGenerator) -> Result<Vec<f64>> {
    tridiag::eigenvalues(sym_matrix(sym))
}

/// Eigenvalues plus the first `k` biorthonormal eigenfunction pairs.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralDecomposition {
    eigenvalues: Vec<f64>,
    right: Vec<Vec<f64>>,
    left: Vec<Vec<f64>>,
}

impl SpectralDecomposition {
    /// All `n_max + 1` eigenvalues, descending, `lambda_0 = 0`.
    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    /// Number of eigenfunction pairs held.
    pub fn modes(&self) -> usize {
        self.right.len()
    }

    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    /// Right eigenfunction `psi^(alpha)`.
    pub fn right(&self, alpha: usize) -> &[f64] {
        &self.right[alpha]
    }

    /// Left eigenfunction `phi^(alpha)`.
    pub fn left(&self, alpha: usize) -> &[f64] {
        &self.left[alpha]
    }

    /// `G[a][b] = sum_n phi^(a)_n psi^(b)_n`.
    pub fn gram_matrix(&self) -> Vec<Vec<f64>> {
        self.left
            .iter()
            .map(|phi| self.right.iter().map(|psi| phi.iter().zip(psi).map(|(a, b)| a * b).sum()).collect())
            .collect()
    }

    /// Largest `|G[a][b] - delta_ab|`.
    pub fn biorthonormality_error(&self) -> f64 {
        let mut worst = 0.0f64;
        for (a, row) in self.gram_matrix().iter().enumerate() {
            for (b, g) in row.iter().enumerate() {
                let expected = if a == b { 1.0 } else { 0.0 };
                worst = worst.max((g - expected).abs());
            }
        }
        worst
    }
}

/// Upper edge of the stationary bulk window `mean + 3 std`, and its lower edge.
fn bulk_window(half_log_ps: &[f64]) -> (usize, usize) {
    let probs: Vec<f64> = half_log_ps.iter().map(|h| (2.0 * h).exp()).collect();
    let mean: f64 = probs.iter().enumerate().map(|(n, p)| n as f64 * p).sum();
    let var: f64 = probs.iter().enumerate().map(|(n, p)| (n as f64 - mean).powi(2) * p).sum();
    let n_max = half_log_ps.len() - 1;
    let lo = round_half_up(mean - 3.0 * var.sqrt()).clamp(0, n_max as i64) as usize;
    let hi = round_half_up(mean + 3.0 * var.sqrt()).clamp(0, n_max as i64) as usize;
    (lo, hi)
}

/// Left recurrence `L_n phi_{n-1} + G_{n+1} phi_{n+1} - (L_n + G_{n+1}) phi_n
/// = lambda phi_n`, with rates recovered from the symmetric bands:
/// `G_{i+1} = off_i e^{h_{i+1} - h_i}` and `L_{i+1} = off_i e^{h_i - h_{i+1}}`.
fn rates(sym: &SymmetrizedGenerator, i: usize) -> (f64, f64) {
    let h = sym.half_log_ps();
    let d = h[i + 1] - h[i];
    (sym.off()[i] * d.exp(), sym.off()[i] * (-d).exp())
}

/// `phi = v e^{-h}` and `psi = v e^{h}` where `|v|` is resolved; below and
/// above that range `phi` follows the left recurrence from the boundary
/// rows, which is stable towards the stationary peak, and `psi = P_s phi`.
fn back_transform(sym: &SymmetrizedGenerator, lambda: f64, v: &[f64], alpha: usize) -> Result<(Vec<f64>, Vec<f64>)> {
    let n = v.len();
    let h = sym.half_log_ps();
    let peak = v.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    let lo = v.iter().position(|x| x.abs() >= TAIL_FRACTION * peak).expect("unit vector");
    let hi = v.iter().rposition(|x| x.abs() >= TAIL_FRACTION * peak).expect("unit vector");
    let overflow = |i: usize| Error::BackTransformOverflow { mode: alpha, n: i, half_log: h[i].abs() };

    let mut phi = vec![0.0; n];
    let mut psi = vec![0.0; n];
    for i in lo..=hi {
        if v[i] == 0.0 {
            continue;
        }
        if h[i].abs() > HALF_LOG_LIMIT {
            return Err(overflow(i));
        }
        let log_mag = v[i].abs().ln();
        phi[i] = (log_mag - h[i]).exp().copysign(v[i]);
        psi[i] = (log_mag + h[i]).exp().copysign(v[i]);
    }

    if lo > 0 {
        let mut r = vec![1.0; lo + 1];
        r[1] = 1.0 + lambda / rates(sym, 0).0;
        for m in 1..lo {
            let (g_up, _) = rates(sym, m);
            let (_, l_down) = rates(sym, m - 1);
            r[m + 1] = r[m] + (lambda * r[m] - l_down * (r[m - 1] - r[m])) / g_up;
        }
        let c = phi[lo] / r[lo];
        for m in 0..lo {
            phi[m] = c * r[m];
        }
    }
    if hi + 1 < n {
        let top = n - 1;
        let mut r = vec![1.0; n];
        r[top - 1] = 1.0 + lambda / rates(sym, top - 1).1;
        for m in (hi + 1..top).rev() {
            let (g_up, _) = rates(sym, m);
            let (_, l_down) = rates(sym, m - 1);
            r[m - 1] = r[m] + (lambda * r[m] - g_up * (r[m + 1] - r[m])) / l_down;
        }
        let c = phi[hi] / r[hi];
        for m in hi + 1..n {
            phi[m] = c * r[m];
        }
    }
    for i in (0..lo).chain(hi + 1..n) {
        if !phi[i].is_finite() {
            return Err(overflow(i));
        }
        psi[i] = phi[i] * (2.0 * h[i]).exp();
    }
    Ok((phi, psi))
}

/// Eigen-decomposition with the first `k` modes (`1 <= k <= n_max + 1`).
///
/// Each pair is scaled so that `sum_n phi psi = 1` and the sign makes
/// `phi^(alpha)` positive at the largest index of the stationary bulk window
/// (`mean + 3 std`) where the mode is not negligible.
pub fn decompose(sym: &SymmetrizedGenerator, k: usize) -> Result<SpectralDecomposition> {
    let n = sym.dim();
    if k == 0 || k > n {
        return Err(Error::InvalidParams(format!("mode count must be in 1..={n}, got {k}")));
    }
    let t = sym_matrix(sym);
    let mut eigenvalues = tridiag::eigenvalues(t)?;
    // The null mode is known in closed form.
    eigenvalues[0] = 0.0;
    let h = sym.half_log_ps();
    let null: Vec<f64> = h.iter().map(|x| x.exp()).collect();
    let vectors = tridiag::eigenvectors(t, &eigenvalues, k, Some(&null))?;

    let (lo, hi) = bulk_window(h);
    let mut right = Vec::with_capacity(k);
    let mut left = Vec::with_capacity(k);
    for (alpha, mut v) in vectors.into_iter().enumerate() {
        if alpha == 0 {
            // phi^(0) = 1 and psi^(0) = P_s exactly.
            left.push(vec![1.0; n]);
            right.push(h.iter().map(|x| (2.0 * x).exp()).collect());
            continue;
        }
        let window_peak = v[lo..=hi].iter().fold(0.0f64, |m, x| m.max(x.abs()));
        if let Some(anchor) = (lo..=hi).rev().find(|&i| v[i].abs() >= 1e-3 * window_peak) {
            if v[anchor] < 0.0 {
                v.iter_mut().for_each(|x| *x = -*x);
            }
        }
        let norm: f64 = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        v.iter_mut().for_each(|x| *x /= norm);
        let (phi, psi) = back_transform(sym, eigenvalues[alpha], &v, alpha)?;
        left.push(phi);
        right.push(psi);
    }
    Ok(SpectralDecomposition { eigenvalues, right, left })
}

/// Spectral amplitudes `C_alpha = sum_n p0[n] phi^(alpha)_n`.
pub fn amplitudes(dec: &SpectralDecomposition, p0: &PhotonDistribution) -> Result<Vec<f64>> {
    if p0.len() != dec.dim() {
        return Err(Error::DimensionMismatch { expected: dec.dim(), got: p0.len() });
    }
    let p = p0.probs();
    Ok(dec
        .left
        .iter()
        .map(|phi| p.iter().zip(phi).filter(|(pi, _)| **pi != 0.0).map(|(pi, f)| pi * f).sum())
        .collect())
}

fn series_at(dec: &SpectralDecomposition, amps: &[f64], t: f64, out: &mut [f64]) {
    out.iter_mut().for_each(|x| *x = 0.0);
    for (alpha, (c, psi)) in amps.iter().zip(&dec.right).enumerate() {
        let w = c * (dec.eigenvalues[alpha] * t).exp();
        if w == 0.0 {
            continue;
        }
        out.iter_mut().zip(psi).for_each(|(o, p)| *o += w * p);
    }
}

/// `l1` error of the truncated series for `p0` at `t = 0`.
pub fn reconstruction_error(dec: &SpectralDecomposition, p0: &PhotonDistribution) -> Result<f64> {
    let amps = amplitudes(dec, p0)?;
    let mut raw = vec![0.0; dec.dim()];
    series_at(dec, &amps, 0.0, &mut raw);
    Ok(raw.iter().zip(p0.probs()).map(|(a, b)| (a - b).abs()).sum())
}

/// Evolve `p0` by summing `sum_alpha C_alpha psi^(alpha) exp(lambda_alpha t)`.
///
/// Fails with [`Error::InsufficientModes`] when the series does not
/// reproduce `p0` to [`RECONSTRUCTION_TOLERANCE`] in `l1` at `t = 0`.
pub fn spectral_propagate(
    dec: &SpectralDecomposition,
    p0: &PhotonDistribution,
    times: &[f64],
) -> Result<Trajectory> {
    let amps = amplitudes(dec, p0)?;
    let mut raw = vec![0.0; dec.dim()];
    series_at(dec, &amps, 0.0, &mut raw);
    let error: f64 = raw.iter().zip(p0.probs()).map(|(a, b)| (a - b).abs()).sum();
    if error.is_nan() || error >= RECONSTRUCTION_TOLERANCE {
        return Err(Error::InsufficientModes { modes: dec.modes(), error });
    }
    let mut traj = Trajectory::with_capacity(times.len());
    for &t in times {
        if t == 0.0 {
            traj.push_exact(0.0, p0.clone());
            continue;
        }
        series_at(dec, &amps, t, &mut raw);
        traj.push_raw(t, &raw)?;
    }
    Ok(traj)
}

/// Low-order mode of the large-`n_s` theory.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AsymptoticMode {
    pub order: usize,
    /// `-order (kappa - g)`.
    pub eigenvalue: f64,
    /// `sqrt(2 (n_p + n_s))`, the Hermite argument scale.
    pub argument_scale: f64,
}

impl AsymptoticMode {
    pub fn new(order: usize, params: &LaserParams) -> Self {
        let d = params.derived();
        Self {
            order,
            eigenvalue: -(order as f64) * d.gap,
            argument_scale: (2.0 * (d.n_peak + params.n_sat())).sqrt(),
        }
    }

    fn argument(&self, params: &LaserParams, n: usize) -> f64 {
        (n as f64 - params.derived().n_peak) / self.argument_scale
    }
}

/// Asymptotic left eigenfunction `H_a(x) / (a! 2^a)`,
/// `x = (n - n_p) / sqrt(2 (n_p + n_s))`.
pub fn asymptotic_left(mode: &AsymptoticMode, params: &LaserParams, n: usize) -> f64 {
    hermite(mode.order, mode.argument(params, n)) / hermite::hermite_norm(mode.order)
}

/// Asymptotic right eigenfunction `P_s[n] H_a(x)`.
pub fn asymptotic_right(mode: &AsymptoticMode, params: &LaserParams, ps: &PhotonDistribution, n: usize) -> f64 {
    ps.probs()[n] * hermite(mode.order, mode.argument(params, n))
}

/// Indices with `|n - n_p| <= 3 sqrt(n_p + n_s)`.
pub fn asymptotic_window(params: &LaserParams) -> std::ops::RangeInclusive<usize> {
    let d = params.derived();
    let half = 3.0 * (d.n_peak + params.n_sat()).sqrt();
    let lo = (d.n_peak - half).ceil().max(0.0) as usize;
    let hi = ((d.n_peak + half).floor() as usize).min(params.n_max());
    lo..=hi
}

/// Least-squares factor `s` minimizing `|s phi_exact - phi_asymptotic|` over
/// the bulk window.
pub fn asymptotic_scale(dec: &SpectralDecomposition, params: &LaserParams, alpha: usize) -> Result<f64> {
    let (exact, asym) = window_pair(dec, params, alpha)?;
    let ee: f64 = exact.iter().map(|e| e * e).sum();
    let ea: f64 = exact.iter().zip(&asym).map(|(e, a)| e * a).sum();
    Ok(ea / ee)
}

fn window_pair(dec: &SpectralDecomposition, params: &LaserParams, alpha: usize) -> Result<(Vec<f64>, Vec<f64>)> {
    if alpha >= dec.modes() {
        return Err(Error::ModeNotComputed { alpha, available: dec.modes() });
    }
    if dec.dim() != params.dim() {
        return Err(Error::DimensionMismatch { expected: params.dim(), got: dec.dim() });
    }
    let mode = AsymptoticMode::new(alpha, params);
    let window = asymptotic_window(params);
    let exact = window.clone().map(|n| dec.left(alpha)[n]).collect();
    let asym = window.map(|n| asymptotic_left(&mode, params, n)).collect();
    Ok((exact, asym))
}

/// Relative `l2` discrepancy between the scale-matched exact left
/// eigenfunction and its Hermite form on the bulk window.
pub fn compare_asymptotics(dec: &SpectralDecomposition, params: &LaserParams, alpha: usize) -> Result<f64> {
    let (exact, asym) = window_pair(dec, params, alpha)?;
    let ee: f64 = exact.iter().map(|e| e * e).sum();
    let ea: f64 = exact.iter().zip(&asym).map(|(e, a)| e * a).sum();
    let s = ea / ee;
    let diff: f64 = exact.iter().zip(&asym).map(|(e, a)| (s * e - a).powi(2)).sum();
    let aa: f64 = asym.iter().map(|a| a * a).sum();
    Ok((diff / aa).sqrt())
}

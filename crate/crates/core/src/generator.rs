//! Tridiagonal Markov generator of the photon-number master equation
//!
//! ```text
//! dP_n/dt = G_n P_{n-1} + L_{n+1} P_{n+1} - (L_n + G_{n+1}) P_n
//! ```
//!
//! truncated at `n_max` with a reflecting boundary (`G_{n_max+1} := 0`), so
//! every column of the matrix sums to zero.

use crate::error::{Error, Result};
use crate::model::{normalize_log, LaserParams, PhotonDistribution};

/// Relative detailed-balance residual accepted by [`symmetrize`].
pub const STATIONARY_TOLERANCE: f64 = 1e-8;

/// Banded generator `M`. Band vectors have length `n_max` (off-diagonals)
/// and `n_max + 1` (diagonal):
///
/// * `sub[i] = M[i+1][i] = G_{i+1}` (gain inflow into `i+1`)
/// * `sup[i] = M[i][i+1] = L_{i+1}` (loss inflow into `i`)
/// * `diag[n] = -(L_n + G_{n+1})`
#[derive(Debug, Clone, PartialEq)]
pub struct Generator {
    sub: Vec<f64>,
    diag: Vec<f64>,
    sup: Vec<f64>,
}

impl Generator {
    /// Generator of the laser rates in `params`.
    pub fn build(params: &LaserParams) -> Self {
        let gains: Vec<f64> = (1..=params.n_max()).map(|n| params.gain_rate(n)).collect();
        let losses: Vec<f64> = (1..=params.n_max()).map(|n| params.loss_rate(n)).collect();
        Self::from_rates(&gains, &losses).expect("laser rates are finite and non-negative")
    }

    /// General birth-death generator from `gains[i] = G_{i+1}` and
    /// `losses[i] = L_{i+1}`, `i = 0..n_max`.
    pub fn from_rates(gains: &[f64], losses: &[f64]) -> Result<Self> {
        if gains.len() != losses.len() {
            return Err(Error::DimensionMismatch { expected: gains.len(), got: losses.len() });
        }
        if gains.is_empty() {
            return Err(Error::InvalidParams("generator needs at least two states".into()));
        }
        if gains.iter().chain(losses).any(|r| !r.is_finite() || *r < 0.0) {
            return Err(Error::InvalidParams("rates must be finite and non-negative".into()));
        }
        let n_max = gains.len();
        let diag = (0..=n_max)
            .map(|n| {
                let loss = if n == 0 { 0.0 } else { losses[n - 1] };
                let gain_out = if n == n_max { 0.0 } else { gains[n] };
                -(loss + gain_out)
            })
            .collect();
        Ok(Self { sub: gains.to_vec(), diag, sup: losses.to_vec() })
    }

    pub fn dim(&self) -> usize {
        self.diag.len()
    }

    pub fn n_max(&self) -> usize {
        self.diag.len() - 1
    }

    pub fn sub(&self) -> &[f64] {
        &self.sub
    }

    pub fn diag(&self) -> &[f64] {
        &self.diag
    }

    pub fn sup(&self) -> &[f64] {
        &self.sup
    }

    /// Matrix element `M[row][col]`.
    pub fn entry(&self, row: usize, col: usize) -> f64 {
        if row == col {
            self.diag[row]
        } else if row == col + 1 {
            self.sub[col]
        } else if col == row + 1 {
            self.sup[row]
        } else {
            0.0
        }
    }

    /// Largest total outflow rate, `max_n |M[n][n]|`.
    pub fn max_outflow(&self) -> f64 {
        self.diag.iter().fold(0.0, |m, d| m.max(d.abs()))
    }

    /// `out = M p` without allocation. Panics on length mismatch.
    pub fn apply_into(&self, p: &[f64], out: &mut [f64]) {
        let n = self.diag.len();
        assert!(p.len() == n && out.len() == n, "generator dimension mismatch");
        for i in 0..n {
            let mut acc = self.diag[i] * p[i];
            if i > 0 {
                acc += self.sub[i - 1] * p[i - 1];
            }
            if i + 1 < n {
                acc += self.sup[i] * p[i + 1];
            }
            out[i] = acc;
        }
    }

    /// `dP/dt = M p`.
    pub fn apply(&self, p: &PhotonDistribution) -> Result<Vec<f64>> {
        self.apply_slice(p.probs())
    }

    pub fn apply_slice(&self, p: &[f64]) -> Result<Vec<f64>> {
        if p.len() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), got: p.len() });
        }
        let mut out = vec![0.0; p.len()];
        self.apply_into(p, &mut out);
        Ok(out)
    }
}

/// Free-function form of [`Generator::build`].
pub fn build(params: &LaserParams) -> Generator {
    Generator::build(params)
}

/// Free-function form of [`Generator::apply`].
pub fn apply(gen: &Generator, p: &PhotonDistribution) -> Result<Vec<f64>> {
    gen.apply(p)
}

/// Symmetric form `S = D^{-1/2} M D^{1/2}`, `D = diag(P_s)`, of a
/// detailed-balance generator.
///
/// `half_log_ps[n] = log(P_s[n]) / 2` is kept in log-space because the
/// stationary tails underflow.
#[derive(Debug, Clone, PartialEq)]
pub struct SymmetrizedGenerator {
    diag: Vec<f64>,
    off: Vec<f64>,
    half_log_ps: Vec<f64>,
}

impl SymmetrizedGenerator {
    pub fn dim(&self) -> usize {
        self.diag.len()
    }

    pub fn diag(&self) -> &[f64] {
        &self.diag
    }

    /// `off[i] = S[i][i+1] = S[i+1][i] = sqrt(G_{i+1} L_{i+1})`; there is no
    /// coupling below `n = 0`.
    pub fn off(&self) -> &[f64] {
        &self.off
    }

    pub fn half_log_ps(&self) -> &[f64] {
        &self.half_log_ps
    }

    /// Coupling between `n - 1` and `n`, if any.
    pub fn coupling(&self, n: usize) -> Option<f64> {
        n.checked_sub(1).and_then(|i| self.off.get(i).copied())
    }
}

/// Symmetrize `gen` around its stationary state `ps`.
///
/// `ps` is checked against detailed balance wherever the neighbouring flows
/// are representable; the log-weights themselves are rebuilt from the bands so
/// that underflowed tail entries of `ps` do not matter.
pub fn symmetrize(gen: &Generator, ps: &PhotonDistribution) -> Result<SymmetrizedGenerator> {
    if ps.len() != gen.dim() {
        return Err(Error::DimensionMismatch { expected: gen.dim(), got: ps.len() });
    }
    if gen.sub.iter().chain(&gen.sup).any(|r| *r <= 0.0) {
        return Err(Error::InvalidParams(
            "symmetrization needs strictly positive birth and death rates".into(),
        ));
    }
    let p = ps.probs();
    for n in 1..gen.dim() {
        let down = gen.sup[n - 1] * p[n];
        let up = gen.sub[n - 1] * p[n - 1];
        let scale = down.max(up);
        if scale < 1e-280 {
            continue;
        }
        let residual = (down - up).abs() / scale;
        if residual > STATIONARY_TOLERANCE {
            return Err(Error::InvalidStationary { residual, n });
        }
    }

    let mut log_p = Vec::with_capacity(gen.dim());
    let mut acc = 0.0;
    log_p.push(0.0);
    for i in 0..gen.n_max() {
        acc += (gen.sub[i] / gen.sup[i]).ln();
        log_p.push(acc);
    }
    normalize_log(&mut log_p);
    let half_log_ps = log_p.into_iter().map(|l| 0.5 * l).collect();
    let off = gen.sub.iter().zip(&gen.sup).map(|(g, l)| (g * l).sqrt()).collect();
    Ok(SymmetrizedGenerator { diag: gen.diag.clone(), off, half_log_ps })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{stationary_distribution, truncated_stationary};

    fn canonical() -> LaserParams {
        LaserParams::new(1.2, 1.0, 1600.0).unwrap()
    }

    #[test]
    fn boundary_rows() {
        let p = canonical();
        let gen = Generator::build(&p);
        assert_eq!(gen.diag()[0], -p.gain_rate(1));
        assert_eq!(gen.entry(0, 1), p.loss_rate(1));
        let last = p.n_max();
        assert_eq!(gen.diag()[last], -p.loss_rate(last));
        assert_eq!(gen.entry(2, 0), 0.0);
    }

    #[test]
    fn rates_cross_at_peak() {
        let gen = Generator::build(&canonical());
        assert!((gen.entry(320, 319) - 320.0).abs() < 1e-12);
        assert_eq!(gen.entry(319, 320), 320.0);
    }

    #[test]
    fn column_sums_vanish() {
        let gen = Generator::build(&canonical());
        for col in 0..gen.dim() {
            let lo = col.saturating_sub(1);
            let hi = (col + 1).min(gen.n_max());
            let sum: f64 = (lo..=hi).map(|row| gen.entry(row, col)).sum();
            assert!(sum.abs() < 1e-12 * gen.diag()[col].abs().max(1.0), "column {col}: {sum}");
        }
    }

    #[test]
    fn vacuum_column() {
        let p = canonical();
        let gen = Generator::build(&p);
        let vac = PhotonDistribution::fock(0, p.n_max()).unwrap();
        let d = gen.apply(&vac).unwrap();
        assert_eq!(d[0], -p.gain_rate(1));
        assert_eq!(d[1], p.gain_rate(1));
        assert!(d[2..].iter().all(|x| *x == 0.0));
    }

    #[test]
    fn stationary_is_null_vector() {
        let p = canonical();
        let gen = Generator::build(&p);
        let ps = stationary_distribution(&p).unwrap();
        let d = gen.apply(&ps).unwrap();
        let worst = d.iter().fold(0.0f64, |m, x| m.max(x.abs()));
        assert!(worst / gen.max_outflow() < 1e-10);
    }

    #[test]
    fn apply_rejects_wrong_length() {
        let gen = Generator::build(&canonical());
        let p = PhotonDistribution::fock(0, 10).unwrap();
        assert!(matches!(gen.apply(&p), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn symmetric_coupling_identity() {
        let p = canonical();
        let gen = Generator::build(&p);
        let ps = stationary_distribution(&p).unwrap();
        let sym = symmetrize(&gen, &ps).unwrap();
        assert_eq!(sym.coupling(0), None);
        let probs = ps.probs();
        for n in 1..=p.n_max() {
            if probs[n] < 1e-200 {
                continue;
            }
            let via_similarity = p.gain_rate(n) * (probs[n - 1] / probs[n]).sqrt();
            let direct = sym.coupling(n).unwrap();
            assert!((via_similarity - direct).abs() <= 1e-10 * direct, "n = {n}");
        }
        for (h, p) in sym.half_log_ps().iter().zip(probs) {
            if *p > 1e-250 {
                assert!((h - 0.5 * p.ln()).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn symmetrize_rejects_non_stationary() {
        let p = LaserParams::with_all(1.2, 1.0, 5.0, 6).unwrap();
        let gen = Generator::build(&p);
        let uniform = PhotonDistribution::from_weights(vec![1.0; 7]).unwrap();
        assert!(matches!(symmetrize(&gen, &uniform), Err(Error::InvalidStationary { .. })));
        assert!(symmetrize(&gen, &truncated_stationary(&p)).is_ok());
    }

    #[test]
    fn from_rates_validates() {
        assert!(Generator::from_rates(&[1.0], &[1.0, 2.0]).is_err());
        assert!(Generator::from_rates(&[], &[]).is_err());
        assert!(Generator::from_rates(&[-1.0], &[1.0]).is_err());
    }
}

use std::path::PathBuf;

/// Errors raised by the numerical core.
#[derive(thiserror::Error, Debug, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParams(String),

    #[error("truncation window too small: P[n_max]/max P = {ratio:.3e} exceeds {limit:.0e}")]
    Truncation { ratio: f64, limit: f64 },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid probability distribution: {0}")]
    InvalidDistribution(String),

    #[error("distribution is not stationary: detailed-balance residual {residual:.3e} at n = {n}")]
    InvalidStationary { residual: f64, n: usize },

    #[error("integrator step size underflow at t = {t}: h = {h:.3e}")]
    ToleranceFailure { t: f64, h: f64 },

    #[error("non-finite state entry at t = {t}")]
    NonFiniteState { t: f64 },

    #[error("tridiagonal eigensolver failed to converge for eigenvalue {index}")]
    ConvergenceFailure { index: usize },

    #[error("mode {mode} has support at n = {n} where |log sqrt(P_s)| = {half_log:.1} exceeds 600; reduce modes or n_max")]
    BackTransformOverflow { mode: usize, n: usize, half_log: f64 },

    #[error("spectral series with {modes} modes reconstructs the initial state with l1 error {error:.3e}")]
    InsufficientModes { modes: usize, error: f64 },

    #[error("mode {alpha} was not computed (decomposition holds {available} modes)")]
    ModeNotComputed { alpha: usize, available: usize },

    #[error("only {found} samples in the decay-fit window (need at least {needed})")]
    FitWindowEmpty { found: usize, needed: usize },

    #[error("distance trajectories are sampled on different time grids")]
    GridMismatch,

    #[error("truncating at n_max loses tail mass {mass:.3e} (limit {limit:.0e})")]
    TailMass { mass: f64, limit: f64 },

    #[error("Fock index {index} beyond n_max = {n_max}")]
    IndexOutOfRange { index: i64, n_max: usize },

    #[error("custom state file {path}: {message}")]
    CustomState { path: PathBuf, message: String },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

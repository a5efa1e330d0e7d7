//! Photon-number relaxation of a laser above threshold.
//!
//! The diagonal of the laser density matrix follows a birth-death master
//! equation with saturated gain `G_n = n G / (1 + n / n_s)` and linear loss
//! `L_n = n kappa`. This crate builds the truncated generator, its exact
//! stationary state and spectrum, propagates initial distributions by
//! spectral series or adaptive integration, and detects Mpemba crossings of
//! the Hilbert-Schmidt distance to equilibrium.
//!
//! ```
//! use laser_mpemba::{model::LaserParams, model::stationary_distribution};
//!
//! let params = LaserParams::new(1.2, 1.0, 1600.0).unwrap();
//! let ps = stationary_distribution(&params).unwrap();
//! assert!((ps.mean() - 320.0).abs() < 1.0);
//! ```

pub mod cli;
pub mod dynamics;
pub mod error;
pub mod generator;
pub mod model;
pub mod mpemba;
pub mod propagate;
pub mod spectral;
pub mod states;

pub use error::{Error, Result};

//! Method selection for time evolution: spectral series, ODE integration, or
//! spectral with automatic fallback to the ODE.

use std::fmt;
use std::str::FromStr;

use crate::dynamics::{evolve, IntegratorConfig, Trajectory};
use crate::error::{Error, Result};
use crate::generator::{symmetrize, Generator};
use crate::model::{stationary_distribution, LaserParams, PhotonDistribution};
use crate::spectral::{decompose, spectral_propagate, SpectralDecomposition};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    Spectral,
    Ode,
    /// Spectral when the modes reproduce the initial state, ODE otherwise.
    Auto,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::Spectral => "spectral",
            Method::Ode => "ode",
            Method::Auto => "auto",
        })
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "spectral" => Ok(Method::Spectral),
            "ode" => Ok(Method::Ode),
            "auto" => Ok(Method::Auto),
            other => Err(Error::InvalidParams(format!("unknown method `{other}` (spectral|ode|auto)"))),
        }
    }
}

/// Trajectory plus the method that produced it and, after a fallback, why.
#[derive(Debug, Clone)]
pub struct Propagation {
    pub trajectory: Trajectory,
    pub method: Method,
    pub fallback: Option<Error>,
}

/// Generator, stationary state and (unless `Ode`) decomposition for one
/// parameter set; shared across initial states.
#[derive(Debug, Clone)]
pub struct Propagator {
    generator: Generator,
    stationary: PhotonDistribution,
    decomposition: Option<SpectralDecomposition>,
    decompose_error: Option<Error>,
    method: Method,
}

impl Propagator {
    /// With `Auto`, a failed decomposition is remembered and every run uses
    /// the ODE. With `Spectral` it is returned.
    pub fn new(params: &LaserParams, modes: usize, method: Method) -> Result<Self> {
        let generator = Generator::build(params);
        let stationary = stationary_distribution(params)?;
        let (decomposition, decompose_error) = match method {
            Method::Ode => (None, None),
            _ => {
                let k = modes.clamp(1, params.dim());
                match symmetrize(&generator, &stationary).and_then(|sym| decompose(&sym, k)) {
                    Ok(dec) => (Some(dec), None),
                    Err(e) if method == Method::Auto => (None, Some(e)),
                    Err(e) => return Err(e),
                }
            }
        };
        Ok(Self { generator, stationary, decomposition, decompose_error, method })
    }

    pub fn generator(&self) -> &Generator {
        &self.generator
    }

    pub fn stationary(&self) -> &PhotonDistribution {
        &self.stationary
    }

    pub fn decomposition(&self) -> Option<&SpectralDecomposition> {
        self.decomposition.as_ref()
    }

    pub fn method(&self) -> Method {
        self.method
    }

    pub fn run(&self, p0: &PhotonDistribution, cfg: &IntegratorConfig) -> Result<Propagation> {
        cfg.validate()?;
        let ode = |fallback| {
            evolve(&self.generator, p0, cfg).map(|trajectory| Propagation { trajectory, method: Method::Ode, fallback })
        };
        match (self.method, &self.decomposition) {
            (Method::Ode, _) => ode(None),
            (_, None) => ode(self.decompose_error.clone()),
            (method, Some(dec)) => match spectral_propagate(dec, p0, &cfg.sample_times()) {
                Ok(trajectory) => Ok(Propagation { trajectory, method: Method::Spectral, fallback: None }),
                Err(e @ Error::InsufficientModes { .. }) if method == Method::Auto => ode(Some(e)),
                Err(e) => Err(e),
            },
        }
    }
}

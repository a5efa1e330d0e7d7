//! Scenario configuration: a TOML file, then command-line overrides.
//!
//! ```toml
//! [params]
//! gain = 1.2
//! kappa = 1.0
//! n_sat = 1600.0
//! # n_max = 800
//!
//! [integrator]
//! t_end = 60.0
//! samples = 601
//!
//! [spectral]
//! modes = 64
//! method = "auto"
//! alphas = [0, 1, 2, 3, 4]
//!
//! [output]
//! dir = "out"
//!
//! [[states]]
//! label = "fock"
//! kind = "fock"
//! n = 320
//! ```
//!
//! Without `[[states]]` the canonical vacuum, Fock, Poisson and two-Fock
//! starts are used. Relative custom-state paths resolve against the config
//! file's directory.

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};

use serde::Deserialize;

use crate::dynamics::IntegratorConfig;
use crate::model::LaserParams;
use crate::propagate::Method;
use crate::states::{canonical_states, make, InitialStateSpec};

use super::CliError;

pub const DEFAULT_GAIN: f64 = 1.2;
pub const DEFAULT_KAPPA: f64 = 1.0;
pub const DEFAULT_N_SAT: f64 = 1600.0;
pub const DEFAULT_T_END: f64 = 60.0;
pub const DEFAULT_SAMPLES: usize = 601;
pub const DEFAULT_MODES: usize = 64;
pub const DEFAULT_SCAN: [f64; 3] = [1.2, 1.5, 2.0];

#[derive(Debug, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct RawConfig {
    params: RawParams,
    integrator: RawIntegrator,
    spectral: RawSpectral,
    output: RawOutput,
    mpemba: RawMpemba,
    scan: RawScan,
    states: Vec<toml::Table>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct RawParams {
    gain: Option<f64>,
    kappa: Option<f64>,
    n_sat: Option<f64>,
    n_max: Option<usize>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct RawIntegrator {
    t_end: Option<f64>,
    samples: Option<usize>,
    rel_tol: Option<f64>,
    abs_tol: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct RawSpectral {
    modes: Option<usize>,
    method: Option<String>,
    alphas: Option<Vec<usize>>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct RawOutput {
    dir: Option<PathBuf>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct RawMpemba {
    pairs: Option<Vec<[String; 2]>>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct RawScan {
    g_over_kappa: Option<Vec<f64>>,
}

/// Command-line overrides; each flag replaces the config key of the same
/// name.
#[derive(Debug, Clone, Default, clap::Args)]
pub struct Overrides {
    /// Scenario file (TOML).
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub gain: Option<f64>,
    #[arg(long)]
    pub kappa: Option<f64>,
    #[arg(long)]
    pub n_sat: Option<f64>,
    #[arg(long)]
    pub n_max: Option<usize>,
    #[arg(long)]
    pub t_end: Option<f64>,
    #[arg(long)]
    pub samples: Option<usize>,
    #[arg(long)]
    pub modes: Option<usize>,
    /// spectral | ode | auto
    #[arg(long)]
    pub method: Option<Method>,
    /// Output directory.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Fully resolved scenario.
#[derive(Debug, Clone)]
pub struct ScenarioConfig {
    pub params: LaserParams,
    /// Labelled initial states, in file order; labels are unique.
    pub states: Vec<(String, InitialStateSpec)>,
    pub integrator: IntegratorConfig,
    pub modes: usize,
    pub method: Method,
    /// Eigenfunction orders written by `spectrum`.
    pub alphas: Vec<usize>,
    /// Explicit `(I, II)` label pairs for `mpemba`; `None` compares all pairs.
    pub pairs: Option<Vec<(String, String)>>,
    /// `G / kappa` grid for `scan`.
    pub scan_grid: Vec<f64>,
    pub output_dir: PathBuf,
    /// `n_max` fixed by the file or a flag; scans size each point
    /// automatically instead.
    pub n_max_override: Option<usize>,
}

fn config_error(msg: impl Into<String>) -> CliError {
    CliError::Config(msg.into())
}

impl ScenarioConfig {
    /// Canonical scenario with default settings.
    pub fn canonical() -> Result<Self, CliError> {
        Self::resolve(RawConfig::default(), None, &Overrides::default())
    }

    /// Parse TOML text; `base` anchors relative custom-state paths.
    pub fn from_toml_str(text: &str, base: Option<&Path>, overrides: &Overrides) -> Result<Self, CliError> {
        let raw: RawConfig = toml::from_str(text).map_err(|e| config_error(e.to_string()))?;
        Self::resolve(raw, base, overrides)
    }

    /// Config file named in `overrides` (or defaults), then flag overrides.
    pub fn load(overrides: &Overrides) -> Result<Self, CliError> {
        match &overrides.config {
            Some(path) => {
                let text = std::fs::read_to_string(path)
                    .map_err(|e| config_error(format!("{}: {e}", path.display())))?;
                Self::from_toml_str(&text, path.parent(), overrides)
            }
            None => Self::resolve(RawConfig::default(), None, overrides),
        }
    }

    fn resolve(raw: RawConfig, base: Option<&Path>, o: &Overrides) -> Result<Self, CliError> {
        let gain = o.gain.or(raw.params.gain).unwrap_or(DEFAULT_GAIN);
        let kappa = o.kappa.or(raw.params.kappa).unwrap_or(DEFAULT_KAPPA);
        let n_sat = o.n_sat.or(raw.params.n_sat).unwrap_or(DEFAULT_N_SAT);
        let n_max_override = o.n_max.or(raw.params.n_max);
        let params = match n_max_override {
            Some(n) => LaserParams::with_all(gain, kappa, n_sat, n),
            None => LaserParams::new(gain, kappa, n_sat),
        }
        .map_err(|e| config_error(e.to_string()))?;

        let mut integrator = IntegratorConfig::new(
            o.t_end.or(raw.integrator.t_end).unwrap_or(DEFAULT_T_END),
            o.samples.or(raw.integrator.samples).unwrap_or(DEFAULT_SAMPLES),
        );
        integrator.rel_tol = raw.integrator.rel_tol.unwrap_or(integrator.rel_tol);
        integrator.abs_tol = raw.integrator.abs_tol.unwrap_or(integrator.abs_tol);
        integrator.validate().map_err(|e| config_error(e.to_string()))?;

        let modes = o.modes.or(raw.spectral.modes).unwrap_or(DEFAULT_MODES);
        if modes == 0 {
            return Err(config_error("modes must be at least 1"));
        }
        let method = match (o.method, raw.spectral.method) {
            (Some(m), _) => m,
            (None, Some(s)) => s.parse().map_err(|e: crate::error::Error| config_error(e.to_string()))?,
            (None, None) => Method::Auto,
        };
        let alphas = raw.spectral.alphas.unwrap_or_else(|| (0..5).collect());

        let states = if raw.states.is_empty() {
            canonical_states(&params)
        } else {
            raw.states.into_iter().map(|t| parse_state(t, base)).collect::<Result<Vec<_>, _>>()?
        };
        let mut seen = BTreeSet::new();
        for (label, spec) in &states {
            if !seen.insert(label.as_str()) {
                return Err(config_error(format!("duplicate state label `{label}`")));
            }
            make(spec, params.n_max()).map_err(|e| config_error(format!("state `{label}`: {e}")))?;
        }
        let pairs = raw
            .mpemba
            .pairs
            .map(|ps| {
                ps.into_iter()
                    .map(|[a, b]| {
                        for l in [&a, &b] {
                            if !seen.contains(l.as_str()) {
                                return Err(config_error(format!("mpemba pair names unknown state `{l}`")));
                            }
                        }
                        Ok((a, b))
                    })
                    .collect::<Result<Vec<_>, _>>()
            })
            .transpose()?;

        let scan_grid = raw.scan.g_over_kappa.unwrap_or_else(|| DEFAULT_SCAN.to_vec());
        if scan_grid.is_empty() || scan_grid.iter().any(|r| !(r.is_finite() && *r > 0.0)) {
            return Err(config_error("scan grid must hold positive ratios"));
        }
        let output_dir = o.out.clone().or(raw.output.dir).unwrap_or_else(|| PathBuf::from("out"));
        Ok(Self { params, states, integrator, modes, method, alphas, pairs, scan_grid, output_dir, n_max_override })
    }
}

fn parse_state(mut table: toml::Table, base: Option<&Path>) -> Result<(String, InitialStateSpec), CliError> {
    let label = match table.remove("label") {
        Some(toml::Value::String(s)) => s,
        _ => return Err(config_error("every [[states]] entry needs a string `label`")),
    };
    if label.is_empty() || !label.chars().all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-') {
        return Err(config_error(format!("state label `{label}` must be non-empty [A-Za-z0-9_-]")));
    }
    let mut spec: InitialStateSpec = toml::Value::Table(table)
        .try_into()
        .map_err(|e: toml::de::Error| config_error(format!("state `{label}`: {}", e.message())))?;
    if let (InitialStateSpec::Custom { path }, Some(base)) = (&mut spec, base) {
        if path.is_relative() {
            *path = base.join(&*path);
        }
    }
    Ok((label, spec))
}

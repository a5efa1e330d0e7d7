//! Command-line front end. Each command writes CSV files with a header row
//! and a `run_meta.txt` sidecar into the output directory.
//!
//! Exit codes: 0 success, 1 configuration or output error, 2 numerical
//! failure.

mod commands;
mod config;

use std::ffi::OsString;
use std::fmt::Write as _;

use clap::{Parser, ValueEnum};

pub use commands::{
    cmd_evolve, cmd_mpemba, cmd_scan, cmd_spectrum, cmd_stationary, fmt_f64, EvolveSummary, MpembaSummary,
    ScanRow, ScanSummary, SpectrumSummary, StationarySummary,
};
pub use config::{Overrides, ScenarioConfig};

use crate::error::Error;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("cannot write output: {0}")]
    Output(String),
    #[error("numerical failure: {0}")]
    Numerical(#[from] Error),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) | CliError::Output(_) => 1,
            CliError::Numerical(_) => 2,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Command {
    /// Stationary distribution with a Poisson reference.
    Stationary,
    /// Exact and asymptotic eigenvalues and left eigenfunctions.
    Spectrum,
    /// Photon-distribution snapshots per initial state.
    Evolve,
    /// Distances to equilibrium, decay rates and crossing verdicts.
    Mpemba,
    /// Moments, gaps and the Poisson-vs-Fock verdict over a G/kappa grid.
    Scan,
}

#[derive(Debug, Parser)]
#[command(name = "laser-mpemba", version, about = "Photon-number relaxation and Mpemba crossings of a laser")]
pub struct Cli {
    #[arg(value_enum)]
    pub command: Command,
    #[command(flatten)]
    pub overrides: Overrides,
}

/// Run a parsed command; returns the text for standard output.
pub fn run(cli: &Cli) -> Result<String, CliError> {
    let cfg = ScenarioConfig::load(&cli.overrides)?;
    let mut out = String::new();
    match cli.command {
        Command::Stationary => {
            let s = cmd_stationary(&cfg)?;
            let _ = writeln!(out, "n_max    = {}", s.n_max);
            let _ = writeln!(out, "mean     = {}", fmt_f64(s.mean));
            let _ = writeln!(out, "variance = {}", fmt_f64(s.variance));
            let _ = writeln!(out, "n_p      = {}", fmt_f64(s.n_peak));
            let _ = writeln!(out, "gap      = {}", fmt_f64(s.gap));
        }
        Command::Spectrum => {
            let s = cmd_spectrum(&cfg)?;
            let _ = writeln!(out, "gap exact      = {}", fmt_f64(-s.eigenvalues.get(1).copied().unwrap_or(f64::NAN)));
            let _ = writeln!(out, "gap asymptotic = {}", fmt_f64(s.gap_asymptotic));
            for (a, d) in &s.discrepancies {
                let _ = writeln!(out, "alpha {a}: eigenfunction discrepancy {}", fmt_f64(*d));
            }
        }
        Command::Evolve => {
            let s = cmd_evolve(&cfg)?;
            for (label, run) in s.labels.iter().zip(&s.runs) {
                let last = run.trajectory.last().expect("at least two samples");
                let d = crate::mpemba::distance(last, &s.stationary)?;
                let _ = writeln!(out, "{label}: method {}, final distance {}", run.method, fmt_f64(d));
            }
        }
        Command::Mpemba => {
            let s = cmd_mpemba(&cfg)?;
            for (a, b, v) in &s.verdicts {
                let _ = writeln!(
                    out,
                    "{a} vs {b}: {} crossing(s), mpemba_detected = {}",
                    v.crossing_times.len(),
                    v.mpemba_detected
                );
            }
        }
        Command::Scan => {
            let s = cmd_scan(&cfg)?;
            for (ratio, e) in &s.failures {
                eprintln!("warning: scan point G/kappa = {ratio} failed: {e}");
            }
            for r in &s.rows {
                let detected = r.mpemba_detected.map_or("n/a".to_string(), |b| b.to_string());
                let _ = writeln!(out, "G/kappa = {}: fano {}, mpemba_detected = {detected}", r.g_over_kappa, fmt_f64(r.fano));
            }
        }
    }
    let _ = writeln!(out, "wrote {}", cfg.output_dir.display());
    Ok(out)
}

/// Parse `args`, run, print, and return the process exit code.
pub fn main_with_args<I, T>(args: I) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match run(&cli) {
        Ok(text) => {
            print!("{text}");
            0
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

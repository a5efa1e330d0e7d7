use std::cmp::Ordering;
use std::fmt::Write as _;
use std::path::Path;

use rayon::prelude::*;

use crate::error::Error;
use crate::generator::{symmetrize, Generator};
use crate::model::{normalize_log, stationary_distribution, LaserParams, PhotonDistribution};
use crate::mpemba::{compare, DistanceMeasure, DistanceTrajectory, MpembaVerdict};
use crate::propagate::{Method, Propagation, Propagator};
use crate::spectral::{
    asymptotic_left, asymptotic_scale, compare_asymptotics, decompose, spectrum, AsymptoticMode,
};
use crate::states::{make, InitialStateSpec};

use super::{CliError, ScenarioConfig};

/// Fixed 12-significant-digit float format.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.11e}")
}

fn write_file(dir: &Path, name: &str, contents: &str) -> Result<(), CliError> {
    std::fs::create_dir_all(dir).map_err(|e| CliError::Output(format!("{}: {e}", dir.display())))?;
    let path = dir.join(name);
    std::fs::write(&path, contents).map_err(|e| CliError::Output(format!("{}: {e}", path.display())))
}

fn meta_header(command: &str, cfg: &ScenarioConfig) -> String {
    let p = &cfg.params;
    let mut s = String::new();
    let _ = writeln!(s, "command = {command}");
    let _ = writeln!(s, "gain = {}", fmt_f64(p.gain()));
    let _ = writeln!(s, "kappa = {}", fmt_f64(p.kappa()));
    let _ = writeln!(s, "n_sat = {}", fmt_f64(p.n_sat()));
    let _ = writeln!(s, "n_max = {}", p.n_max());
    let _ = writeln!(s, "t_end = {}", fmt_f64(cfg.integrator.t_end));
    let _ = writeln!(s, "samples = {}", cfg.integrator.n_samples);
    let _ = writeln!(s, "modes = {}", cfg.modes);
    let _ = writeln!(s, "method = {}", cfg.method);
    s
}

fn method_note(p: &Propagation) -> String {
    match &p.fallback {
        Some(e) => format!("{} (fallback: {e})", p.method),
        None => p.method.to_string(),
    }
}

/// Poisson weights with the given mean on `0..=n_max`, renormalized.
fn poisson_reference(mean: f64, n_max: usize) -> Vec<f64> {
    let mut log_w = Vec::with_capacity(n_max + 1);
    let mut acc = 0.0;
    for n in 0..=n_max {
        if n > 0 {
            acc += mean.ln() - (n as f64).ln();
        }
        log_w.push(acc);
    }
    normalize_log(&mut log_w);
    log_w.into_iter().map(f64::exp).collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct StationarySummary {
    pub mean: f64,
    pub variance: f64,
    pub n_peak: f64,
    pub gap: f64,
    pub n_max: usize,
}

/// `stationary.csv`: `n, p_stationary, p_poisson_reference`.
pub fn cmd_stationary(cfg: &ScenarioConfig) -> Result<StationarySummary, CliError> {
    let p = &cfg.params;
    let ps = stationary_distribution(p)?;
    let reference = poisson_reference(ps.mean(), p.n_max());
    let mut csv = String::from("n,p_stationary,p_poisson_reference\n");
    for (n, (a, b)) in ps.probs().iter().zip(&reference).enumerate() {
        let _ = writeln!(csv, "{n},{},{}", fmt_f64(*a), fmt_f64(*b));
    }
    write_file(&cfg.output_dir, "stationary.csv", &csv)?;
    write_file(&cfg.output_dir, "run_meta.txt", &meta_header("stationary", cfg))?;
    let d = p.derived();
    Ok(StationarySummary { mean: ps.mean(), variance: ps.variance(), n_peak: d.n_peak, gap: d.gap, n_max: p.n_max() })
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumSummary {
    /// First `k` exact eigenvalues.
    pub eigenvalues: Vec<f64>,
    pub gap_asymptotic: f64,
    /// `(alpha, bulk-window discrepancy)` for each requested order.
    pub discrepancies: Vec<(usize, f64)>,
}

/// `eigenvalues.csv` and `eigenfunctions.csv`.
pub fn cmd_spectrum(cfg: &ScenarioConfig) -> Result<SpectrumSummary, CliError> {
    let p = &cfg.params;
    if let Some(&bad) = cfg.alphas.iter().find(|&&a| a >= p.dim()) {
        return Err(CliError::Config(format!("alpha {bad} exceeds the {} available modes", p.dim())));
    }
    let k = cfg.alphas.iter().map(|a| a + 1).chain([cfg.modes]).max().unwrap_or(1).min(p.dim());
    let ps = stationary_distribution(p)?;
    let sym = symmetrize(&Generator::build(p), &ps)?;
    let dec = decompose(&sym, k)?;
    let lambdas = &dec.eigenvalues()[..k];
    let lambda1 = lambdas.get(1).copied().unwrap_or(f64::NAN);

    let mut csv = String::from("alpha,lambda_exact,lambda_asymptotic,rel_error,ratio_to_lambda1\n");
    for (alpha, &exact) in lambdas.iter().enumerate() {
        let asym = AsymptoticMode::new(alpha, p).eigenvalue;
        let rel = if asym == 0.0 { exact.abs() } else { ((exact - asym) / asym).abs() };
        let _ = writeln!(csv, "{alpha},{},{},{},{}", fmt_f64(exact), fmt_f64(asym), fmt_f64(rel), fmt_f64(exact / lambda1));
    }
    write_file(&cfg.output_dir, "eigenvalues.csv", &csv)?;

    let scales = cfg.alphas.iter().map(|&a| asymptotic_scale(&dec, p, a)).collect::<Result<Vec<_>, _>>()?;
    let modes: Vec<AsymptoticMode> = cfg.alphas.iter().map(|&a| AsymptoticMode::new(a, p)).collect();
    let mut csv = String::from("n");
    for a in &cfg.alphas {
        let _ = write!(csv, ",phi_exact_{a},phi_matched_{a},phi_asymptotic_{a}");
    }
    csv.push('\n');
    for n in 0..p.dim() {
        let _ = write!(csv, "{n}");
        for ((&a, s), mode) in cfg.alphas.iter().zip(&scales).zip(&modes) {
            let exact = dec.left(a)[n];
            let asym = asymptotic_left(mode, p, n);
            let _ = write!(csv, ",{},{},{}", fmt_f64(exact), fmt_f64(s * exact), fmt_f64(asym));
        }
        csv.push('\n');
    }
    write_file(&cfg.output_dir, "eigenfunctions.csv", &csv)?;
    write_file(&cfg.output_dir, "run_meta.txt", &meta_header("spectrum", cfg))?;

    let discrepancies =
        cfg.alphas.iter().map(|&a| compare_asymptotics(&dec, p, a).map(|d| (a, d))).collect::<Result<Vec<_>, _>>()?;
    Ok(SpectrumSummary { eigenvalues: lambdas.to_vec(), gap_asymptotic: p.derived().gap, discrepancies })
}

/// Propagate every configured state, in parallel, preserving order.
fn propagate_all(
    cfg: &ScenarioConfig,
    params: &LaserParams,
    states: &[(String, InitialStateSpec)],
) -> Result<(Propagator, Vec<Propagation>), CliError> {
    let prop = Propagator::new(params, cfg.modes, cfg.method)?;
    let runs = states
        .par_iter()
        .map(|(_, spec)| {
            let p0 = make(spec, params.n_max())?;
            prop.run(&p0, &cfg.integrator)
        })
        .collect::<Result<Vec<_>, Error>>()?;
    Ok((prop, runs))
}

#[derive(Debug, Clone)]
pub struct EvolveSummary {
    pub labels: Vec<String>,
    pub runs: Vec<Propagation>,
    pub stationary: PhotonDistribution,
}

/// `evolve_<label>.csv`: one row per `n`, one column per sample time.
pub fn cmd_evolve(cfg: &ScenarioConfig) -> Result<EvolveSummary, CliError> {
    if cfg.states.is_empty() {
        return Err(CliError::Config("evolve needs at least one initial state".into()));
    }
    let (prop, runs) = propagate_all(cfg, &cfg.params, &cfg.states)?;
    let mut meta = meta_header("evolve", cfg);
    for ((label, _), run) in cfg.states.iter().zip(&runs) {
        let traj = &run.trajectory;
        let mut csv = String::from("n");
        for t in traj.times() {
            let _ = write!(csv, ",t={}", fmt_f64(*t));
        }
        csv.push('\n');
        for n in 0..cfg.params.dim() {
            let _ = write!(csv, "{n}");
            for s in traj.states() {
                let _ = write!(csv, ",{}", fmt_f64(s.probs()[n]));
            }
            csv.push('\n');
        }
        write_file(&cfg.output_dir, &format!("evolve_{label}.csv"), &csv)?;
        let _ = writeln!(meta, "state.{label} = {}", method_note(run));
    }
    write_file(&cfg.output_dir, "run_meta.txt", &meta)?;
    Ok(EvolveSummary {
        labels: cfg.states.iter().map(|(l, _)| l.clone()).collect(),
        runs,
        stationary: prop.stationary().clone(),
    })
}

#[derive(Debug, Clone)]
pub struct MpembaSummary {
    pub labels: Vec<String>,
    pub distances: Vec<DistanceTrajectory>,
    /// `(I, II, verdict)`.
    pub verdicts: Vec<(String, String, MpembaVerdict)>,
    pub methods: Vec<Method>,
    pub gap: f64,
}

impl MpembaSummary {
    pub fn distances_of(&self, label: &str) -> Option<&DistanceTrajectory> {
        self.labels.iter().position(|l| l == label).map(|i| &self.distances[i])
    }

    pub fn verdict(&self, first: &str, second: &str) -> Option<&MpembaVerdict> {
        self.verdicts.iter().find(|(a, b, _)| a == first && b == second).map(|(_, _, v)| v)
    }
}

fn opt(x: Option<f64>) -> String {
    fmt_f64(x.unwrap_or(f64::NAN))
}

/// `distance.csv`, `rates.csv` and `verdicts.csv`.
///
/// Without explicit pairs every two states are compared, with the one
/// initially farther from equilibrium as II.
pub fn cmd_mpemba(cfg: &ScenarioConfig) -> Result<MpembaSummary, CliError> {
    if cfg.states.is_empty() {
        return Err(CliError::Config("mpemba needs at least one initial state".into()));
    }
    let (prop, runs) = propagate_all(cfg, &cfg.params, &cfg.states)?;
    let ps = prop.stationary();
    let distances = runs
        .iter()
        .map(|r| DistanceTrajectory::new(&r.trajectory, ps, DistanceMeasure::HilbertSchmidt))
        .collect::<Result<Vec<_>, _>>()?;
    let labels: Vec<String> = cfg.states.iter().map(|(l, _)| l.clone()).collect();
    let index = |l: &str| labels.iter().position(|x| x == l).expect("labels validated at load");

    let pairs: Vec<(usize, usize)> = match &cfg.pairs {
        Some(ps) => ps.iter().map(|(a, b)| (index(a), index(b))).collect(),
        None => {
            let mut v = Vec::new();
            for i in 0..labels.len() {
                for j in i + 1..labels.len() {
                    let d0 = |k: usize| distances[k].distances()[0];
                    v.push(if d0(j) >= d0(i) { (i, j) } else { (j, i) });
                }
            }
            v
        }
    };
    let verdicts = pairs
        .iter()
        .map(|&(i, j)| compare(&distances[i], &distances[j]).map(|v| (labels[i].clone(), labels[j].clone(), v)))
        .collect::<Result<Vec<_>, _>>()?;

    let mut csv = String::from("t");
    for l in &labels {
        let _ = write!(csv, ",D_{l}");
    }
    csv.push('\n');
    for (k, t) in distances[0].times().iter().enumerate() {
        let _ = write!(csv, "{}", fmt_f64(*t));
        for d in &distances {
            let _ = write!(csv, ",{}", fmt_f64(d.distances()[k]));
        }
        csv.push('\n');
    }
    write_file(&cfg.output_dir, "distance.csv", &csv)?;

    let gap = cfg.params.derived().gap;
    let n_bar = ps.mean();
    let mut csv = String::from("label,d0,d_final,fitted_rate,rate_over_gap,first_moment_offset,method\n");
    for (((label, _), d), run) in cfg.states.iter().zip(&distances).zip(&runs) {
        let p0 = &run.trajectory.states()[0];
        let _ = writeln!(
            csv,
            "{label},{},{},{},{},{},{}",
            fmt_f64(d.distances()[0]),
            fmt_f64(*d.distances().last().expect("non-empty")),
            opt(d.fitted_rate()),
            opt(d.fitted_rate().map(|r| r / gap)),
            fmt_f64(p0.mean() - n_bar),
            run.method
        );
    }
    write_file(&cfg.output_dir, "rates.csv", &csv)?;

    let mut csv =
        String::from("state_i,state_ii,d0_i,d0_ii,initial_order,crossings,crossing_times,rate_i,rate_ii,mpemba_detected\n");
    for ((a, b, v), &(i, j)) in verdicts.iter().zip(&pairs) {
        let order = match v.initial_order {
            Ordering::Less => -1,
            Ordering::Equal => 0,
            Ordering::Greater => 1,
        };
        let times: Vec<String> = v.crossing_times.iter().map(|t| fmt_f64(*t)).collect();
        let _ = writeln!(
            csv,
            "{a},{b},{},{},{order},{},{},{},{},{}",
            fmt_f64(distances[i].distances()[0]),
            fmt_f64(distances[j].distances()[0]),
            v.crossing_times.len(),
            times.join(";"),
            opt(v.rates.0),
            opt(v.rates.1),
            v.mpemba_detected
        );
    }
    write_file(&cfg.output_dir, "verdicts.csv", &csv)?;

    let mut meta = meta_header("mpemba", cfg);
    for (label, run) in labels.iter().zip(&runs) {
        let _ = writeln!(meta, "state.{label} = {}", method_note(run));
    }
    write_file(&cfg.output_dir, "run_meta.txt", &meta)?;
    let methods = runs.iter().map(|r| r.method).collect();
    Ok(MpembaSummary { labels, distances, verdicts, methods, gap })
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScanRow {
    pub g_over_kappa: f64,
    pub mean: f64,
    pub variance: f64,
    pub fano: f64,
    pub gap_exact: f64,
    pub gap_asymptotic: f64,
    /// Poisson(0.9 n_bar) as I against Fock(n_bar) as II; `None` on failure.
    pub mpemba_detected: Option<bool>,
}

#[derive(Debug, Clone)]
pub struct ScanSummary {
    pub rows: Vec<ScanRow>,
    /// `(g_over_kappa, error)` for points written as NaN rows.
    pub failures: Vec<(f64, Error)>,
}

fn scan_point(cfg: &ScenarioConfig, ratio: f64) -> Result<ScanRow, Error> {
    let kappa = cfg.params.kappa();
    let params = LaserParams::new(ratio * kappa, kappa, cfg.params.n_sat())?;
    let ps = stationary_distribution(&params)?;
    let lambdas = spectrum(&symmetrize(&Generator::build(&params), &ps)?)?;
    let d = params.derived();
    let states = [
        ("I".to_string(), InitialStateSpec::Poisson { mean: 0.9 * d.n_bar }),
        ("II".to_string(), InitialStateSpec::Fock { n: d.n_bar }),
    ];
    let (prop, runs) = propagate_all(cfg, &params, &states).map_err(|e| match e {
        CliError::Numerical(e) => e,
        other => Error::InvalidParams(other.to_string()),
    })?;
    let dist = runs
        .iter()
        .map(|r| DistanceTrajectory::new(&r.trajectory, prop.stationary(), DistanceMeasure::HilbertSchmidt))
        .collect::<Result<Vec<_>, _>>()?;
    let verdict = compare(&dist[0], &dist[1])?;
    Ok(ScanRow {
        g_over_kappa: ratio,
        mean: ps.mean(),
        variance: ps.variance(),
        fano: ps.variance() / ps.mean(),
        gap_exact: -lambdas[1],
        gap_asymptotic: d.gap,
        mpemba_detected: Some(verdict.mpemba_detected),
    })
}

/// `scan.csv` over the configured `G / kappa` grid. Each point uses the
/// automatic truncation; failed points become NaN rows.
pub fn cmd_scan(cfg: &ScenarioConfig) -> Result<ScanSummary, CliError> {
    let results: Vec<Result<ScanRow, Error>> = cfg.scan_grid.par_iter().map(|&r| scan_point(cfg, r)).collect();
    if let Some(Err(e)) = results.iter().find(|_| results.iter().all(Result::is_err)) {
        return Err(CliError::Numerical(e.clone()));
    }
    let mut rows = Vec::with_capacity(results.len());
    let mut failures = Vec::new();
    for (&ratio, result) in cfg.scan_grid.iter().zip(results) {
        match result {
            Ok(row) => rows.push(row),
            Err(e) => {
                failures.push((ratio, e));
                rows.push(ScanRow {
                    g_over_kappa: ratio,
                    mean: f64::NAN,
                    variance: f64::NAN,
                    fano: f64::NAN,
                    gap_exact: f64::NAN,
                    gap_asymptotic: f64::NAN,
                    mpemba_detected: None,
                });
            }
        }
    }
    let mut csv = String::from("g_over_kappa,mean,variance,fano,gap_exact,gap_asymptotic,mpemba_detected\n");
    for r in &rows {
        let detected = r.mpemba_detected.map_or("NaN".to_string(), |b| b.to_string());
        let _ = writeln!(
            csv,
            "{},{},{},{},{},{},{detected}",
            fmt_f64(r.g_over_kappa),
            fmt_f64(r.mean),
            fmt_f64(r.variance),
            fmt_f64(r.fano),
            fmt_f64(r.gap_exact),
            fmt_f64(r.gap_asymptotic)
        );
    }
    write_file(&cfg.output_dir, "scan.csv", &csv)?;
    let mut meta = meta_header("scan", cfg);
    for (ratio, e) in &failures {
        let _ = writeln!(meta, "failed.{} = {e}", fmt_f64(*ratio));
    }
    write_file(&cfg.output_dir, "run_meta.txt", &meta)?;
    Ok(ScanSummary { rows, failures })
}

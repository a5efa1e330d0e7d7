//! Acceptance criteria. Each test reports one `criterion N: PASS|FAIL` line
//! on stderr (written directly, so it survives output capture) and then
//! asserts every sub-check.

mod common;

use std::io::Write as _;
use std::path::Path;
use std::process::Command;
use std::sync::OnceLock;

use laser_mpemba::cli::{cmd_mpemba, cmd_scan, MpembaSummary, Overrides, ScenarioConfig};
use laser_mpemba::dynamics::{evolve, IntegratorConfig};
use laser_mpemba::generator::{symmetrize, Generator};
use laser_mpemba::model::{stationary_distribution, truncated_stationary, LaserParams};
use laser_mpemba::propagate::{Method, Propagator};
use laser_mpemba::spectral::{compare_asymptotics, decompose, spectral_propagate, spectrum};
use laser_mpemba::states::{make, InitialStateSpec};
use laser_mpemba::Error;
use nalgebra::DVector;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Modes used wherever the spectral series must reproduce a smooth start.
const ACCEPTANCE_MODES: usize = 128;

struct Checks {
    criterion: u32,
    items: Vec<(String, bool)>,
}

impl Checks {
    fn new(criterion: u32) -> Self {
        Self { criterion, items: Vec::new() }
    }

    fn check(&mut self, ok: bool, detail: String) {
        self.items.push((detail, ok));
    }

    /// Print the verdict line and fail the test if any check failed.
    fn finish(self) {
        let passed = self.items.iter().all(|(_, ok)| *ok);
        let mut line = format!("criterion {}: {}", self.criterion, if passed { "PASS" } else { "FAIL" });
        for (detail, ok) in &self.items {
            line.push_str(&format!(" | [{}] {detail}", if *ok { "ok" } else { "FAIL" }));
        }
        let _ = writeln!(std::io::stderr(), "{line}");
        assert!(passed, "criterion {} failed", self.criterion);
    }
}

fn within(x: f64, target: f64, rel: f64) -> bool {
    ((x - target) / target).abs() <= rel
}

fn params(g: f64) -> LaserParams {
    LaserParams::new(g, 1.0, 1600.0).unwrap()
}

/// Canonical four-state relaxation study, computed once.
fn canonical_study() -> &'static MpembaSummary {
    static STUDY: OnceLock<MpembaSummary> = OnceLock::new();
    STUDY.get_or_init(|| {
        let dir = tempfile::tempdir().unwrap();
        let o = Overrides { out: Some(dir.path().to_path_buf()), modes: Some(ACCEPTANCE_MODES), ..Default::default() };
        let cfg = ScenarioConfig::load(&o).unwrap();
        cmd_mpemba(&cfg).unwrap()
    })
}

fn rate(study: &MpembaSummary, label: &str) -> f64 {
    study.distances_of(label).and_then(|d| d.fitted_rate()).unwrap_or(f64::NAN)
}

#[test]
fn criterion_1_stationary_moments() {
    let mut c = Checks::new(1);
    let p = params(1.2);
    let ps = stationary_distribution(&p).unwrap();
    c.check(within(ps.mean(), 320.0, 0.01), format!("G=1.2 mean {:.4} vs 320 (1%)", ps.mean()));
    c.check(within(ps.variance(), 1920.0, 0.02), format!("G=1.2 variance {:.2} vs 1920 (2%)", ps.variance()));
    let high = stationary_distribution(&params(2.0)).unwrap();
    c.check(within(high.mean(), 1600.0, 0.01), format!("G=2 mean {:.3} vs 1600 (1%)", high.mean()));
    let low = stationary_distribution(&params(0.98)).unwrap();
    c.check(within(low.mean(), 49.0, 0.05), format!("G=0.98 mean {:.4} vs 49 (5%)", low.mean()));

    let mut worst = 0.0f64;
    for (g, dist) in [(1.2, &ps), (2.0, &high), (0.98, &low)] {
        let q = dist.probs();
        for n in 0..q.len() - 1 {
            let up = common::gain(g, 1600.0, n + 1) * q[n];
            let down = common::loss(1.0, n + 1) * q[n + 1];
            if up.max(down) > 1e-300 {
                worst = worst.max((up - down).abs() / up.max(down));
            }
        }
    }
    c.check(worst < 1e-10, format!("detailed-balance residual {worst:.2e} (relative, pointwise) < 1e-10"));
    c.finish();
}

#[test]
fn criterion_2_spectrum() {
    let mut c = Checks::new(2);
    for g in [1.2, 2.0] {
        let p = params(g);
        let ps = stationary_distribution(&p).unwrap();
        let ev = spectrum(&symmetrize(&Generator::build(&p), &ps).unwrap()).unwrap();
        let want = -(1.0 - 1.0 / g);
        c.check(within(ev[1], want, 0.05), format!("G={g} lambda_1 {:.5} vs {want:.5} (5%)", ev[1]));
        if g == 1.2 {
            for a in 2..=4 {
                let ratio = ev[a] / ev[1];
                c.check(within(ratio, a as f64, 0.03), format!("G=1.2 lambda_{a}/lambda_1 {ratio:.4} vs {a} (3%)"));
            }
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut worst = 0.0f64;
    for _ in 0..20 {
        let (g, k, ns, n_max) = (rng.gen_range(0.3..3.0), rng.gen_range(0.3..2.0), rng.gen_range(1.0..50.0), rng.gen_range(2..=10));
        let p = LaserParams::with_all(g, k, ns, n_max).unwrap();
        let ours = spectrum(&symmetrize(&Generator::build(&p), &truncated_stationary(&p)).unwrap()).unwrap();
        let dense = common::dense_eigenvalues(&common::dense_generator(g, k, ns, n_max));
        worst = worst.max(common::linf(&ours, &dense));
    }
    c.check(worst < 1e-10, format!("tiny-instance eigenvalues vs dense oracle {worst:.2e} < 1e-10"));
    c.finish();
}

#[test]
fn criterion_3_eigenfunction_asymptotics() {
    let mut c = Checks::new(3);
    for (g, limit) in [(2.0, 0.05), (1.2, 0.15)] {
        let p = params(g);
        let ps = stationary_distribution(&p).unwrap();
        let dec = decompose(&symmetrize(&Generator::build(&p), &ps).unwrap(), 2).unwrap();
        let d = compare_asymptotics(&dec, &p, 1).unwrap();
        c.check(d < limit, format!("G={g} alpha=1 discrepancy {d:.4} < {limit}"));
    }
    c.finish();
}

#[test]
fn criterion_4_propagator_equivalence() {
    let mut c = Checks::new(4);
    let p = params(1.2);
    let ps = stationary_distribution(&p).unwrap();
    let dec = decompose(&symmetrize(&Generator::build(&p), &ps).unwrap(), ACCEPTANCE_MODES).unwrap();
    let p0 = make(&InitialStateSpec::Poisson { mean: 288.0 }, p.n_max()).unwrap();
    let cfg = IntegratorConfig::new(60.0, 601);
    let ode = evolve(&Generator::build(&p), &p0, &cfg).unwrap();
    let series = spectral_propagate(&dec, &p0, &cfg.sample_times()).unwrap();
    let worst = ode.states().iter().zip(series.states()).map(|(a, b)| common::linf(a.probs(), b.probs())).fold(0.0, f64::max);
    c.check(worst < 1e-6, format!("Poisson(288) spectral vs ODE over 601 samples, l_inf {worst:.2e} < 1e-6"));

    let (g, ns, n_max) = (1.5, 20.0, 40);
    let small = LaserParams::with_all(g, 1.0, ns, n_max).unwrap();
    let q0 = make(&InitialStateSpec::Poisson { mean: 8.0 }, n_max).unwrap();
    let small_dec = decompose(&symmetrize(&Generator::build(&small), &truncated_stationary(&small)).unwrap(), n_max + 1).unwrap();
    let cfg = IntegratorConfig::new(3.0, 7);
    let ode = evolve(&Generator::build(&small), &q0, &cfg).unwrap();
    let series = spectral_propagate(&small_dec, &q0, &cfg.sample_times()).unwrap();
    let m = common::dense_generator(g, 1.0, ns, n_max);
    let (mut worst_ode, mut worst_series) = (0.0f64, 0.0f64);
    for (k, t) in cfg.sample_times().iter().enumerate() {
        let exact = common::expm(&m, *t) * DVector::from_column_slice(q0.probs());
        worst_ode = worst_ode.max(common::linf(ode.states()[k].probs(), exact.as_slice()));
        worst_series = worst_series.max(common::linf(series.states()[k].probs(), exact.as_slice()));
    }
    c.check(worst_ode < 1e-7, format!("N_max=40 ODE vs dense expm {worst_ode:.2e} < 1e-7"));
    c.check(worst_series < 1e-7, format!("N_max=40 spectral vs dense expm {worst_series:.2e} < 1e-7"));
    c.finish();
}

#[test]
fn criterion_5_relaxation_endpoint() {
    let mut c = Checks::new(5);
    let study = canonical_study();
    for label in ["vacuum", "fock", "poisson"] {
        let d = *study.distances_of(label).unwrap().distances().last().unwrap();
        c.check(d < 1e-3, format!("{label} l2 distance at t=60 {d:.3e} < 1e-3"));
    }
    c.finish();
}

#[test]
fn criterion_6_mpemba_crossing() {
    let mut c = Checks::new(6);
    let study = canonical_study();
    let first = study.distances_of("poisson").unwrap().distances()[0];
    let second = study.distances_of("fock").unwrap().distances()[0];
    c.check(second > first, format!("D_fock(0) {second:.4} > D_poisson(0) {first:.4}"));
    let v = study.verdict("poisson", "fock").unwrap();
    c.check(v.crossing_times.len() == 1, format!("crossings {:?} (exactly one)", v.crossing_times));
    c.check(v.mpemba_detected, format!("mpemba_detected = {}", v.mpemba_detected));
    let gap = study.gap;
    let vac = rate(study, "vacuum");
    let fock = rate(study, "fock");
    c.check(within(vac, gap, 0.10), format!("vacuum rate {vac:.4} = {:.3} gap (1 +- 10%)", vac / gap));
    c.check(within(fock, 2.0 * gap, 0.10), format!("Fock(320) rate {fock:.4} = {:.3} gap (2 +- 10%)", fock / gap));
    c.finish();
}

#[test]
fn criterion_7_super_acceleration() {
    let mut c = Checks::new(7);
    let p = params(1.2);
    let two = make(&InitialStateSpec::TwoFock { mean: 320.0, variance: 1920.0 }, p.n_max()).unwrap();
    let sites: Vec<usize> = (0..p.dim()).filter(|&n| two.probs()[n] > 0.0).collect();
    c.check(sites == [276, 364], format!("two-Fock sites {sites:?}"));
    let study = canonical_study();
    let (vac, fock, two) = (rate(study, "vacuum"), rate(study, "fock"), rate(study, "two_fock"));
    c.check(two > fock, format!("two-Fock rate {two:.4} > Fock rate {fock:.4}"));
    c.check(within(fock / vac, 2.0, 0.15), format!("Fock/vacuum rate ratio {:.3} vs 2 (15%)", fock / vac));
    c.check(within(two / vac, 3.0, 0.15), format!("two-Fock/vacuum rate ratio {:.3} vs 3 (15%)", two / vac));
    c.finish();
}

#[test]
fn criterion_8_threshold_ratios() {
    let mut c = Checks::new(8);
    let dir = tempfile::tempdir().unwrap();
    let o = Overrides { out: Some(dir.path().to_path_buf()), modes: Some(ACCEPTANCE_MODES), ..Default::default() };
    let cfg = ScenarioConfig::from_toml_str("[scan]\ng_over_kappa = [1.2, 1.5, 2.0]\n", None, &o).unwrap();
    let summary = cmd_scan(&cfg).unwrap();
    c.check(summary.failures.is_empty(), format!("failed points {:?}", summary.failures));
    for row in &summary.rows {
        c.check(row.mpemba_detected == Some(true), format!("G/kappa={} mpemba_detected {:?}", row.g_over_kappa, row.mpemba_detected));
    }
    c.finish();
}

#[test]
fn criterion_9_conservation_positivity_biorthonormality() {
    let mut c = Checks::new(9);
    let cfg = IntegratorConfig::new(2.0, 5);
    let (mut drift, mut min_entry, mut bio) = (0.0f64, f64::INFINITY, 0.0f64);
    let mut reduced = Vec::new();
    for seed in 0..10u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = rng.gen_range(1.1..2.5);
        let ns = rng.gen_range(200.0..3200.0);
        let p = LaserParams::new(g, 1.0, ns).unwrap();
        let prop = Propagator::new(&p, 1, Method::Ode).unwrap();
        for spec in [InitialStateSpec::Vacuum, InitialStateSpec::Fock { n: p.derived().n_bar }] {
            let traj = prop.run(&make(&spec, p.n_max()).unwrap(), &cfg).unwrap().trajectory;
            drift = drift.max(traj.max_mass_drift());
            min_entry = min_entry.min(traj.min_raw_entry());
        }
        // Modes localized where P_s underflows cannot be back-transformed;
        // the decomposition is then retried with fewer modes.
        let sym = symmetrize(prop.generator(), prop.stationary()).unwrap();
        let mut k = 16;
        let dec = loop {
            match decompose(&sym, k) {
                Err(Error::BackTransformOverflow { mode, .. }) if mode >= 2 && mode < k => k = mode,
                other => break other.unwrap(),
            }
        };
        if k < 16 {
            reduced.push(format!("seed {seed} (G={g:.3}, n_s={ns:.0}) k={k}"));
        }
        bio = bio.max(dec.biorthonormality_error());
    }
    c.check(drift < 1e-8, format!("10 seeds x 2 starts: max mass drift {drift:.1e} < 1e-8"));
    c.check(min_entry >= -1e-10, format!("min entry {min_entry:.1e} >= -1e-10"));
    c.check(bio < 1e-8, format!("max Gram error {bio:.1e} < 1e-8 (16 modes; reduced: {reduced:?})"));
    c.finish();
}

fn run_bin(command: &str, out: &Path, extra: &[&str]) -> bool {
    let mut args = vec![command, "--out", out.to_str().unwrap()];
    args.extend_from_slice(extra);
    Command::new(env!("CARGO_BIN_EXE_laser-mpemba")).args(&args).output().unwrap().status.success()
}

#[test]
fn criterion_10_determinism() {
    let mut c = Checks::new(10);
    let dir = tempfile::tempdir().unwrap();
    let short: &[&str] = &["--t-end", "10", "--samples", "101"];
    for (command, extra) in [("stationary", &[][..]), ("spectrum", &[][..]), ("evolve", short), ("mpemba", short), ("scan", short)] {
        let (a, b) = (dir.path().join(format!("{command}-a")), dir.path().join(format!("{command}-b")));
        let ran = run_bin(command, &a, extra) && run_bin(command, &b, extra);
        let mut names: Vec<_> = if ran {
            std::fs::read_dir(&a).unwrap().map(|e| e.unwrap().file_name()).collect()
        } else {
            Vec::new()
        };
        names.sort();
        let same = ran && names.iter().all(|n| std::fs::read(a.join(n)).unwrap() == std::fs::read(b.join(n)).unwrap());
        c.check(same, format!("{command}: {} files byte-identical", names.len()));
    }
    c.finish();
}

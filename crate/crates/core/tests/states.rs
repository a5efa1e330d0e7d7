use std::io::Write as _;

use laser_mpemba::model::LaserParams;
use laser_mpemba::states::{canonical_states, make, InitialStateSpec};
use laser_mpemba::Error;
use proptest::prelude::*;

const N_MAX: usize = 759;

#[test]
fn canonical_two_fock_sites() {
    let p = LaserParams::new(1.2, 1.0, 1600.0).unwrap();
    let states = canonical_states(&p);
    let two = make(&states[3].1, p.n_max()).unwrap();
    let sites: Vec<usize> = (0..=p.n_max()).filter(|&n| two.probs()[n] > 0.0).collect();
    assert_eq!(sites, [276, 364]);
    assert!((two.mean() / 320.0 - 1.0).abs() < 0.025);
    assert!((two.variance() / 1920.0 - 1.0).abs() < 0.025);
}

#[test]
fn custom_state_from_file() {
    let mut file = tempfile::NamedTempFile::new().unwrap();
    writeln!(file, "# two peaks\n10 2\n20 1\n").unwrap();
    let spec = InitialStateSpec::Custom { path: file.path().to_path_buf() };
    let p = make(&spec, 30).unwrap();
    assert!((p.probs()[10] - 2.0 / 3.0).abs() < 1e-15);
    assert!((p.probs()[20] - 1.0 / 3.0).abs() < 1e-15);
    assert!(matches!(make(&spec, 15), Err(Error::CustomState { .. })));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn poisson_moments(mu in 1.0f64..450.0) {
        let p = make(&InitialStateSpec::Poisson { mean: mu }, N_MAX).unwrap();
        prop_assert!((p.mean() / mu - 1.0).abs() < 1e-6);
        prop_assert!((p.variance() / mu - 1.0).abs() < 1e-4);
        prop_assert!((p.probs().iter().sum::<f64>() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn two_fock_moments(mu in 50.0f64..600.0, var in 0.0f64..2500.0) {
        prop_assume!(mu - var.sqrt() >= 0.0 && mu + var.sqrt() <= N_MAX as f64);
        let p = make(&InitialStateSpec::TwoFock { mean: mu, variance: var }, N_MAX).unwrap();
        let sites: Vec<usize> = (0..=N_MAX).filter(|&n| p.probs()[n] > 0.0).collect();
        let (lo, hi) = (sites[0] as f64, *sites.last().unwrap() as f64);
        prop_assert_eq!(p.mean(), (lo + hi) / 2.0);
        let half = (hi - lo) / 2.0;
        prop_assert!((p.variance() - half * half).abs() <= 1e-9 * half.max(1.0).powi(2));
        prop_assert!((p.mean() - mu).abs() <= 0.5 + 1e-9);
    }

    #[test]
    fn uniform_window_is_flat(low in 0.0f64..300.0, width in 0.0f64..300.0) {
        let high = low + width;
        prop_assume!(high.floor() >= low.ceil());
        let p = make(&InitialStateSpec::UniformWindow { low, high }, N_MAX).unwrap();
        let count = (high.floor() - low.ceil()) as usize + 1;
        for (n, &x) in p.probs().iter().enumerate() {
            let inside = (n as f64) >= low && (n as f64) <= high;
            let want = if inside { 1.0 / count as f64 } else { 0.0 };
            prop_assert!((x - want).abs() < 1e-15);
        }
    }
}

// Relax a user-supplied photon histogram read from a two-column file.

use laser_mpemba::dynamics::IntegratorConfig;
use laser_mpemba::model::LaserParams;
use laser_mpemba::mpemba::distance;
use laser_mpemba::propagate::{Method, Propagator};
use laser_mpemba::states::{make, InitialStateSpec};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/examples/data/custom_state.txt");
    let params = LaserParams::new(1.2, 1.0, 1600.0)?;
    let p0 = make(&InitialStateSpec::Custom { path: path.into() }, params.n_max())?;
    let prop = Propagator::new(&params, 128, Method::Auto)?;
    let run = prop.run(&p0, &IntegratorConfig::new(20.0, 5))?;
    println!("propagated by {}", run.method);
    if let Some(reason) = &run.fallback {
        println!("  (spectral series declined: {reason})");
    }
    for (t, p) in run.trajectory.times().iter().zip(run.trajectory.states()) {
        println!("t = {t:>4}: mean {:>7.2}, variance {:>8.1}, D = {:.3e}", p.mean(), p.variance(), distance(p, prop.stationary())?);
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}

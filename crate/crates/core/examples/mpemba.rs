// A Fock state at the stationary mean starts farther from equilibrium than
// a nearby Poisson state, yet overtakes it.

use laser_mpemba::dynamics::IntegratorConfig;
use laser_mpemba::model::LaserParams;
use laser_mpemba::mpemba::{compare, DistanceMeasure, DistanceTrajectory};
use laser_mpemba::propagate::{Method, Propagator};
use laser_mpemba::states::{make, InitialStateSpec};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let params = LaserParams::new(1.2, 1.0, 1600.0)?;
    let prop = Propagator::new(&params, 128, Method::Auto)?;
    let cfg = IntegratorConfig::new(20.0, 201);
    let mut curves = Vec::new();
    for spec in [InitialStateSpec::Poisson { mean: 288.0 }, InitialStateSpec::Fock { n: 320.0 }] {
        let run = prop.run(&make(&spec, params.n_max())?, &cfg)?;
        println!("{spec:?} propagated by {}", run.method);
        curves.push(DistanceTrajectory::new(&run.trajectory, prop.stationary(), DistanceMeasure::HilbertSchmidt)?);
    }
    let verdict = compare(&curves[0], &curves[1])?;
    for k in [0, 2, 5, 10, 50, 100, 200] {
        let t = curves[0].times()[k];
        println!("t = {t:>5.1}: D_poisson = {:.3e}, D_fock = {:.3e}", curves[0].distances()[k], curves[1].distances()[k]);
    }
    println!("crossings at {:?}; mpemba_detected = {}", verdict.crossing_times, verdict.mpemba_detected);
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}

// Relaxation of a Poisson start, by spectral series and by integration.

use laser_mpemba::dynamics::{evolve, IntegratorConfig};
use laser_mpemba::model::LaserParams;
use laser_mpemba::mpemba::distance;
use laser_mpemba::propagate::{Method, Propagator};
use laser_mpemba::states::{make, InitialStateSpec};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let params = LaserParams::new(1.2, 1.0, 1600.0)?;
    let prop = Propagator::new(&params, 128, Method::Spectral)?;
    let p0 = make(&InitialStateSpec::Poisson { mean: 288.0 }, params.n_max())?;
    let cfg = IntegratorConfig::new(30.0, 7);
    let series = prop.run(&p0, &cfg)?.trajectory;
    let ode = evolve(prop.generator(), &p0, &cfg)?;
    println!("{:>6} {:>10} {:>10} {:>12} {:>12}", "t", "mean", "variance", "D_P(t)", "|ode-series|");
    for ((t, a), b) in series.times().iter().zip(series.states()).zip(ode.states()) {
        let diff = a.probs().iter().zip(b.probs()).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
        let d = distance(a, prop.stationary())?;
        println!("{t:>6.1} {:>10.3} {:>10.2} {d:>12.3e} {diff:>12.1e}", a.mean(), a.variance());
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}

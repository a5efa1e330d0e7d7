// Matching the stationary mean removes most of the slowest mode; matching
// the variance as well (two Fock sites) removes the next one too.

use laser_mpemba::dynamics::IntegratorConfig;
use laser_mpemba::generator::symmetrize;
use laser_mpemba::model::LaserParams;
use laser_mpemba::mpemba::distance;
use laser_mpemba::propagate::{Method, Propagator};
use laser_mpemba::spectral::{amplitudes, decompose};
use laser_mpemba::states::{make, InitialStateSpec};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let params = LaserParams::new(1.2, 1.0, 1600.0)?;
    let prop = Propagator::new(&params, 1, Method::Ode)?;
    let dec = decompose(&symmetrize(prop.generator(), prop.stationary())?, 4)?;
    let d = params.derived();
    let starts = [
        ("vacuum", InitialStateSpec::Vacuum),
        ("fock", InitialStateSpec::Fock { n: d.n_bar }),
        ("two_fock", InitialStateSpec::TwoFock { mean: d.n_bar, variance: d.n_bar + params.n_sat() }),
    ];
    let cfg = IntegratorConfig::new(10.0, 2);
    for (label, spec) in starts {
        let p0 = make(&spec, params.n_max())?;
        let c = amplitudes(&dec, &p0)?;
        let traj = prop.run(&p0, &cfg)?.trajectory;
        let (d0, d10) = (distance(&p0, prop.stationary())?, distance(traj.last().unwrap(), prop.stationary())?);
        println!(
            "{label:>9}: mean {:>6.1}, variance {:>7.1}, C1 {:>10.3e}, C2 {:>10.3e}, D(10)/D(0) = {:.2e}",
            p0.mean(),
            p0.variance(),
            c[1],
            c[2],
            d10 / d0
        );
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}

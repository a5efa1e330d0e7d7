// Photon statistics and the spectral gap across the lasing threshold.

use laser_mpemba::generator::{symmetrize, Generator};
use laser_mpemba::model::{stationary_distribution, LaserParams};
use laser_mpemba::spectral::spectrum;

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let n_sat = 400.0;
    println!("{:>8} {:>10} {:>8} {:>10} {:>10}", "G/kappa", "mean", "fano", "gap", "gap_asym");
    for ratio in [0.8, 0.95, 1.05, 1.2, 1.5, 2.0, 3.0] {
        let params = LaserParams::new(ratio, 1.0, n_sat)?;
        let ps = stationary_distribution(&params)?;
        let lambdas = spectrum(&symmetrize(&Generator::build(&params), &ps)?)?;
        println!(
            "{ratio:>8} {:>10.3} {:>8.3} {:>10.5} {:>10.5}",
            ps.mean(),
            ps.variance() / ps.mean(),
            -lambdas[1],
            params.derived().gap
        );
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}

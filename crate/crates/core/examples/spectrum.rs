// Exact relaxation spectrum against the equispaced Hermite ladder.

use laser_mpemba::generator::{symmetrize, Generator};
use laser_mpemba::model::{stationary_distribution, LaserParams};
use laser_mpemba::spectral::{compare_asymptotics, decompose, AsymptoticMode};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    for gain in [1.2, 2.0] {
        let params = LaserParams::new(gain, 1.0, 1600.0)?;
        let ps = stationary_distribution(&params)?;
        let sym = symmetrize(&Generator::build(&params), &ps)?;
        let dec = decompose(&sym, 6)?;
        let gap = params.derived().gap;
        println!("G = {gain}: gap kappa - kappa^2/G = {gap:.5}");
        for alpha in 1..6 {
            let exact = dec.eigenvalues()[alpha];
            let asym = AsymptoticMode::new(alpha, &params).eigenvalue;
            let shape = compare_asymptotics(&dec, &params, alpha)?;
            println!("  alpha {alpha}: lambda {exact:>9.5}  ({:.3} gap, ladder {asym:>8.4}), eigenfunction discrepancy {shape:.3}", exact / -gap);
        }
        println!("  biorthonormality error {:.1e}", dec.biorthonormality_error());
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}

// Stationary photon statistics below, near and well above threshold.

use laser_mpemba::model::{stationary_distribution, LaserParams};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    println!("{:>6} {:>6} {:>12} {:>12} {:>8} {:>6}", "G", "N_max", "mean", "variance", "fano", "mode");
    for gain in [0.98, 1.2, 2.0] {
        let params = LaserParams::new(gain, 1.0, 1600.0)?;
        let ps = stationary_distribution(&params)?;
        let fano = ps.variance() / ps.mean();
        println!(
            "{gain:>6} {:>6} {:>12.4} {:>12.2} {fano:>8.3} {:>6}",
            params.n_max(),
            ps.mean(),
            ps.variance(),
            ps.mode()
        );
    }
    let d = LaserParams::new(1.2, 1.0, 1600.0)?.derived();
    println!("large-n_s theory at G = 1.2: n_bar = {}, variance = {}", d.n_bar, d.sigma2);
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}

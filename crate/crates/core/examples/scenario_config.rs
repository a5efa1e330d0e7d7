// Drive the command layer from a TOML scenario, as the binary does.

use laser_mpemba::cli::{cmd_stationary, Overrides, ScenarioConfig};

const SCENARIO: &str = r#"
[params]
gain = 2.0
kappa = 1.0
n_sat = 1600.0

[[states]]
label = "coherent"
kind = "poisson"
mean = 1500.0
"#;

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let out = std::env::temp_dir().join(format!("laser-mpemba-example-{}", std::process::id()));
    let flags = Overrides { out: Some(out.clone()), ..Default::default() };
    let cfg = ScenarioConfig::from_toml_str(SCENARIO, None, &flags)?;
    let summary = cmd_stationary(&cfg)?;
    println!("{summary:?}");
    for entry in std::fs::read_dir(&out)? {
        println!("wrote {}", entry?.path().display());
    }
    std::fs::remove_dir_all(&out)?;
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}

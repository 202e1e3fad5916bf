//! Load a run configuration from TOML and show what each variant resolves to.
//!
//! cargo run --example config_file -- [run.toml]

use std::path::Path;

use basket_subgroup::io::{parse_config, parse_config_str, Variant};

const SAMPLE: &str = r#"
seed = 17
total_iters = 6000
burn_in = 3000
threshold_prior = "inverse-gamma"
ig_shape = 2.0
ig_scale = 1.0
lrv = [0.1, 0.15, 0.1]
tv = 0.3
w1 = 0.3
"#;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let config = match std::env::args().nth(1) {
        Some(path) => parse_config(path)?,
        None => parse_config_str(SAMPLE, Path::new("sample.toml"))?,
    };
    config.validate()?;
    for v in [Variant::Simba, Variant::Nb] {
        let (priors, decision) = config.for_variant(v);
        println!("{}: threshold prior {:?}, lambda {}", v.as_str(), priors.threshold, decision.lambda);
    }
    println!("\neffective configuration:\n{}", config.to_toml()?);
    Ok(())
}

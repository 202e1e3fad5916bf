//! Sensitivity of P(M2 | data) to the prior on the threshold spread.
//!
//! cargo run --release --example prior_sensitivity

use basket_subgroup::model::{Indication, PriorConfig, ThresholdPrior, TrialData};
use basket_subgroup::sampler::{run_chain, SamplerConfig};
use basket_subgroup::trial::{select_scenarios, simulate_patients};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let scenario = select_scenarios("spread-3")?.remove(0);
    let mut rng = ChaCha8Rng::seed_from_u64(30);
    let data = TrialData::new(
        scenario
            .indications
            .iter()
            .enumerate()
            .map(|(i, t)| Indication::observed(t.label.clone(), simulate_patients(&scenario, i, t.n_max, &mut rng)))
            .collect(),
    )?;

    let mut priors: Vec<(String, ThresholdPrior)> = [0.5, 1.0, 2.5, 5.0]
        .iter()
        .map(|&gamma| (format!("half-Cauchy({gamma})"), ThresholdPrior::HalfCauchy { gamma }))
        .collect();
    priors.push(("inverse-gamma(2, 1)".into(), ThresholdPrior::InverseGamma { shape: 2.0, scale: 1.0 }));
    priors.push(("fixed N(0, 3^2)".into(), PriorConfig::no_borrow().threshold));

    println!("scenario {}; true thresholds {:?}", scenario.label, scenario.indications.iter().map(|t| t.x).collect::<Vec<_>>());
    for (name, threshold) in priors {
        let config = PriorConfig { threshold, ..PriorConfig::default() };
        let s = run_chain(&data, &config, &SamplerConfig::default())?;
        let probs: Vec<String> = (0..data.len()).map(|i| format!("{:.3}", s.prob_m2(i))).collect();
        println!("{name:<22} P(M2): {}", probs.join("  "));
    }
    Ok(())
}

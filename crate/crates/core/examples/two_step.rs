//! One-step versus two-step analysis of the same dataset.
//!
//! The two-step variant estimates each threshold from a first chain, then
//! reruns the sampler with those thresholds held fixed.
//!
//! cargo run --release --example two_step

use basket_subgroup::decision::DecisionConfig;
use basket_subgroup::model::{Indication, PriorConfig, TrialData};
use basket_subgroup::sampler::SamplerConfig;
use basket_subgroup::trial::{analyze, select_scenarios, simulate_patients, two_step_analysis};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let scenario = select_scenarios("base-4")?.remove(0);
    let mut rng = ChaCha8Rng::seed_from_u64(44);
    let data = TrialData::new(
        scenario
            .indications
            .iter()
            .enumerate()
            .map(|(i, t)| Indication::observed(t.label.clone(), simulate_patients(&scenario, i, t.n_max, &mut rng)))
            .collect(),
    )?;
    let (priors, sampler, decision) = (PriorConfig::default(), SamplerConfig::default(), DecisionConfig::default());
    let one = analyze(&data, &priors, &sampler, &decision)?;
    let two = two_step_analysis(&data, &priors, &sampler, &decision)?;

    println!("{:<10} {:>6} {:>8} {:>8} | {:>6} {:>8} {:>6}", "indication", "true x", "1-step", "t_hat", "2-step", "P(M2)", "fixed");
    for ((a, b), truth) in one.indications.iter().zip(&two.indications).zip(&scenario.indications) {
        let t = |r: &basket_subgroup::trial::IndicationReport| r.threshold.map_or("none".into(), |t| format!("{:.3}", t.t_hat));
        println!(
            "{:<10} {:>6.2} {:>8} {:>8} | {:>6} {:>8.3} {:>6}",
            a.label,
            truth.x,
            a.final_action,
            t(a),
            b.final_action,
            b.prob_m2,
            b.threshold_fixed
        );
    }
    Ok(())
}

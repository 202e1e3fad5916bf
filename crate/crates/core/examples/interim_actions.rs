//! Interim analysis: stop, continue with all-comers, or enrich.
//!
//! cargo run --release --example interim_actions

use basket_subgroup::decision::DecisionConfig;
use basket_subgroup::model::{Indication, Patient, PriorConfig, TrialData};
use basket_subgroup::sampler::SamplerConfig;
use basket_subgroup::trial::interim_analysis;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    // (label, cutoff, rate at or below, rate above)
    let arms = [("uniform", 0.0, 0.45, 0.45), ("enriched", 0.3, 0.03, 0.7), ("futile", 0.0, 0.03, 0.03)];
    let mut indications = Vec::new();
    for (label, cut, lo, hi) in arms {
        let patients = (0..30)
            .map(|_| {
                let x: f64 = rng.sample(StandardNormal);
                Patient::new(x, rng.random::<f64>() < if x > cut { hi } else { lo })
            })
            .collect::<Result<Vec<_>, _>>()?;
        indications.push(Indication::observed(label, patients));
    }
    let data = TrialData::new(indications)?;
    let report = interim_analysis(&data, &PriorConfig::default(), &SamplerConfig::default(), &DecisionConfig::default())?;
    for d in &report.indications {
        println!(
            "{:<9} {} of {} responded -> {:<2}  (a, a+, a-) = ({}, {}, {})  P(M2) {:.3}  t_hat {}",
            d.label,
            d.n_responders,
            d.n_enrolled,
            d.action,
            d.intervals.a,
            d.intervals.a_plus,
            d.intervals.a_minus,
            d.prob_m2,
            d.threshold.map_or("none".into(), |t| format!("{:.3}", t.t_hat))
        );
    }
    Ok(())
}

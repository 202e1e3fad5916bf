//! Final analysis of a patient dataset.
//!
//! cargo run --release --example analyze_dataset -- [patients.csv]
//!
//! Without an argument, a dataset is drawn from the builtin scenario base-3.

use basket_subgroup::decision::DecisionConfig;
use basket_subgroup::io::parse_dataset;
use basket_subgroup::model::{Indication, PriorConfig, TrialData};
use basket_subgroup::sampler::SamplerConfig;
use basket_subgroup::trial::{analyze, select_scenarios, simulate_patients};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let data = match std::env::args().nth(1) {
        Some(path) => parse_dataset(path)?,
        None => {
            let scenario = select_scenarios("base-3")?.remove(0);
            let mut rng = ChaCha8Rng::seed_from_u64(3);
            let arms = (0..scenario.indications.len())
                .map(|i| {
                    let truth = &scenario.indications[i];
                    Indication::observed(truth.label.clone(), simulate_patients(&scenario, i, truth.n_max, &mut rng))
                })
                .collect();
            TrialData::new(arms)?
        }
    };

    let report = analyze(&data, &PriorConfig::default(), &SamplerConfig::default(), &DecisionConfig::default())?;
    println!("{:<14} {:>4} {:>4} {:>6} {:>12} {:>7} {:>8} {:>5}", "indication", "n", "resp", "action", "(a, a+, a-)", "P(M2)", "t_hat", "flag");
    for r in &report.indications {
        let c = &r.intervals;
        println!(
            "{:<14} {:>4} {:>4} {:>6} {:>12} {:>7.3} {:>8} {:>5}",
            r.label,
            r.n_enrolled,
            r.n_responders,
            r.final_action,
            format!("({}, {}, {})", c.a, c.a_plus, c.a_minus),
            r.prob_m2,
            r.threshold.map_or("none".into(), |t| format!("{:.3}", t.t_hat)),
            r.subgroup_flag
        );
    }
    let acc = &report.acceptance;
    println!(
        "acceptance: theta {:.2}  theta- {:.2}  log delta {:.2}  x {:.2}",
        acc.theta.rate().unwrap_or(f64::NAN),
        acc.theta_minus.rate().unwrap_or(f64::NAN),
        acc.log_delta.rate().unwrap_or(f64::NAN),
        acc.x.rate().unwrap_or(f64::NAN)
    );
    Ok(())
}

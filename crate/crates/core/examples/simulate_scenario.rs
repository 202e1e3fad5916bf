//! Operating characteristics of one builtin scenario under the hierarchical
//! and the no-borrowing threshold priors.
//!
//! cargo run --release --example simulate_scenario -- base-3 50

use basket_subgroup::decision::{DecisionConfig, FinalAction};
use basket_subgroup::model::PriorConfig;
use basket_subgroup::sampler::SamplerConfig;
use basket_subgroup::trial::{operating_characteristics, select_scenarios, AnalysisMethod, SimulationSettings};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let selector = args.next().unwrap_or_else(|| "base-3".into());
    let reps: usize = args.next().map(|s| s.parse()).transpose()?.unwrap_or(20);

    for scenario in select_scenarios(&selector)? {
        for (name, priors, lambda) in [("SIMBA", PriorConfig::default(), 0.98), ("nb-SIMBA", PriorConfig::no_borrow(), 0.97)] {
            let settings = SimulationSettings {
                priors,
                sampler: SamplerConfig::default(),
                decision: DecisionConfig { lambda, ..DecisionConfig::default() },
                method: AnalysisMethod::OneStep,
            };
            let start = std::time::Instant::now();
            let oc = operating_characteristics(&scenario, reps, &settings, 2024, None)?;
            println!("{} {name} ({reps} trials, {:.1?})", scenario.label, start.elapsed());
            for ((ind, best), truth) in oc.indications.iter().zip(&oc.optimal_actions).zip(&scenario.indications) {
                let pcts: Vec<String> = FinalAction::ALL
                    .iter()
                    .map(|&a| format!("{}={:5.1}%{}", a, ind.final_actions.get(a), if a == *best { "*" } else { " " }))
                    .collect();
                let t = ind.defined_t_hat();
                let mut dev: Vec<f64> = t.iter().map(|v| (v - truth.x).abs()).collect();
                dev.sort_by(f64::total_cmp);
                let median_dev = dev.get(dev.len() / 2).map_or("n/a".to_string(), |d| format!("{d:.3}"));
                println!(
                    "  {:<12} {}  flag={:5.1}%  t_hat defined {}/{}  median |t_hat - x|={median_dev}",
                    ind.label,
                    pcts.join(" "),
                    ind.subgroup_flag_rate,
                    t.len(),
                    reps
                );
            }
        }
    }
    Ok(())
}

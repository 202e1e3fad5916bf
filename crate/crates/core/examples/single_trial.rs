//! One simulated trial end to end: interim look, enrollment, final analysis.
//!
//! cargo run --release --example single_trial -- [scenario] [replicate]

use basket_subgroup::decision::DecisionConfig;
use basket_subgroup::model::PriorConfig;
use basket_subgroup::sampler::SamplerConfig;
use basket_subgroup::trial::{replicate_rng, run_trial, select_scenarios, AnalysisMethod, SimulationSettings};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let scenario = select_scenarios(&args.next().unwrap_or_else(|| "base-4".into()))?.remove(0);
    let rep: usize = args.next().map(|s| s.parse()).transpose()?.unwrap_or(0);
    let settings = SimulationSettings {
        priors: PriorConfig::default(),
        sampler: SamplerConfig::default(),
        decision: DecisionConfig::default(),
        method: AnalysisMethod::OneStep,
    };
    let optimal = scenario.optimal_actions(&settings.decision)?;
    let report = run_trial(&scenario, &settings, &mut replicate_rng(7, rep))?;

    println!("{} replicate {rep}", scenario.label);
    for ((r, truth), best) in report.indications.iter().zip(&scenario.indications).zip(&optimal) {
        let interim = r.interim.as_ref().map_or("-".to_string(), |d| d.action.to_string());
        println!(
            "{:<8} x={:>5.2} p-={:.2} p+={:.2} | interim {:<2} cutoff {:>6} | n={:>2} final {:<3} (best {:<3}) t_hat {}",
            r.label,
            truth.x,
            truth.p_minus,
            truth.p_plus,
            interim,
            r.enrichment_cutoff.map_or("-".into(), |c| format!("{c:.2}")),
            r.n_enrolled,
            r.final_action,
            best,
            r.threshold.map_or("none".into(), |t| format!("{:.3}", t.t_hat))
        );
    }
    Ok(())
}

//! Threshold estimation: posterior of the cutoff and the expected-loss curve.
//!
//! cargo run --release --example threshold_estimation

use basket_subgroup::decision::{candidate_grid, estimate_threshold, threshold_expected_loss, DecisionConfig};
use basket_subgroup::model::{Indication, Patient, PriorConfig, TrialData};
use basket_subgroup::sampler::{run_chain, SamplerConfig};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    // Patients above 0.5 respond at 60%, the rest at 5%.
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let patients = (0..60)
        .map(|_| {
            let x: f64 = rng.sample(StandardNormal);
            let p = if x > 0.5 { 0.6 } else { 0.05 };
            Patient::new(x, rng.random::<f64>() < p)
        })
        .collect::<Result<Vec<_>, _>>()?;
    let data = TrialData::new(vec![Indication::observed("arm", patients)])?;
    let samples = run_chain(&data, &PriorConfig::default(), &SamplerConfig::default())?;

    let mut xs = samples.subgroup_thresholds(0);
    xs.sort_by(f64::total_cmp);
    let q = |f: f64| xs[((xs.len() - 1) as f64 * f) as usize];
    println!("P(M2 | data) = {:.3}", samples.prob_m2(0));
    println!("x | M2: 5% {:.3}  median {:.3}  95% {:.3}  ({} draws)", q(0.05), q(0.5), q(0.95), xs.len());

    let patients = &data.indications[0].patients;
    println!("\nexpected loss on every fifth grid point (w1 0.2, w2 0.5, TV 0.3)");
    for t in candidate_grid(patients).into_iter().step_by(5) {
        let loss = threshold_expected_loss(t, &xs, patients, 0.2, 0.5, 0.3);
        println!("  t = {t:>7.3}  loss {loss:.4}");
    }

    println!("\neffect of the subgroup-size weight");
    for w1 in [0.0, 0.2, 0.5, 1.0] {
        let config = DecisionConfig { w1, ..DecisionConfig::default() };
        let est = estimate_threshold(&samples, 0, &data, &config)?;
        println!("  w1 = {w1:.1}: t_hat {:.3}, {} patients above", est.t_hat, est.obs_size);
    }
    Ok(())
}

//! Simulation-based calibration of the sampler on small prior-predictive
//! datasets. Prints the rank histogram of p_M; a well-calibrated sampler
//! gives a flat histogram.
//!
//! cargo run --release --example calibration -- [replications]

use basket_subgroup::model::{Indication, Patient, PriorConfig, TrialData};
use basket_subgroup::sampler::{run_chain, SamplerConfig};
use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Beta, Cauchy, Gamma, Normal, StandardNormal};

const DRAWS: usize = 99;
const BINS: usize = 10;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let reps: usize = std::env::args().nth(1).map(|s| s.parse()).transpose()?.unwrap_or(100);
    let pr = PriorConfig::default();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut hist = [0usize; BINS];
    for _ in 0..reps {
        let p_m: f64 = rng.sample(Beta::new(pr.a, pr.b)?);
        let mu_x: f64 = rng.sample(Normal::new(0.0, pr.sigma)?);
        let sigma_x = rng.sample::<f64, _>(Cauchy::new(0.0, 2.5)?).abs();
        let mut arms = Vec::new();
        for i in 0..2 {
            let m1 = rng.random::<f64>() < p_m;
            let theta: f64 = rng.sample(Normal::new(pr.mu_theta, pr.sigma_theta)?);
            let theta_minus: f64 = rng.sample(Normal::new(pr.mu_theta_minus, pr.sigma_theta_minus)?);
            let delta: f64 = rng.sample(Gamma::new(pr.a_delta, 1.0 / pr.b_delta)?);
            let x = mu_x + sigma_x * rng.sample::<f64, _>(StandardNormal);
            let patients = (0..20)
                .map(|_| {
                    let b: f64 = rng.sample(StandardNormal);
                    let eta = if m1 { theta } else if b <= x { theta_minus } else { theta_minus + delta };
                    Patient::new(b, rng.random::<f64>() < 1.0 / (1.0 + (-eta).exp()))
                })
                .collect::<Result<Vec<_>, _>>()?;
            arms.push(Indication::observed(format!("arm{i}"), patients));
        }
        let config = SamplerConfig {
            total_iters: 1_000 + DRAWS * 50,
            burn_in: 1_000,
            thin: 50,
            seed: rng.next_u64(),
            ..SamplerConfig::default()
        };
        let s = run_chain(&TrialData::new(arms)?, &pr, &config)?;
        let rank = s.draws.iter().filter(|d| d.p_m < p_m).count();
        hist[rank * BINS / (DRAWS + 1)] += 1;
    }
    let expected = reps as f64 / BINS as f64;
    for (b, &c) in hist.iter().enumerate() {
        println!("rank bin {b}: {c:>4} {}", "#".repeat((40.0 * c as f64 / (2.0 * expected)).round() as usize));
    }
    Ok(())
}

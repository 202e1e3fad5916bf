//! Long-chain comparisons against quadrature values for a six-patient instance.
//!
//! Reference values were produced by nested adaptive quadrature: a 1-D
//! integral over `theta` for `M1`, and for `M2` a sum over the seven biomarker
//! regions of the prior mass of `x` times a 2-D integral over
//! `(theta_minus, delta)`.

use basket_subgroup::model::{Indication, Patient, PriorConfig, ThresholdPrior, TrialData};
use basket_subgroup::sampler::{run_chain, SamplerConfig};

const FIXED_P_M2: f64 = 0.7710684727402972;
const FIXED_X_MEAN_GIVEN_M2: f64 = -0.6506106413390897;
const HALF_CAUCHY_P_M2: f64 = 0.7659362863676118;
const INVERSE_GAMMA_P_M2: f64 = 0.7772706442721073;

fn six_patients() -> TrialData {
    let rows = [(-1.3, false), (-0.4, true), (0.0, true), (0.2, false), (0.9, true), (1.6, true)];
    let patients = rows.iter().map(|&(x, y)| Patient::new(x, y).unwrap()).collect();
    TrialData::new(vec![Indication::observed("tiny", patients)]).unwrap()
}

fn long_chain(seed: u64) -> SamplerConfig {
    SamplerConfig {
        total_iters: 202_000,
        burn_in: 2_000,
        seed,
        ..SamplerConfig::default()
    }
}

fn mean(v: &[f64]) -> f64 {
    v.iter().sum::<f64>() / v.len() as f64
}

#[test]
fn fixed_prior_matches_quadrature() {
    let s = run_chain(&six_patients(), &PriorConfig::no_borrow(), &long_chain(11)).unwrap();
    let p = s.prob_m2(0);
    let x = mean(&s.subgroup_thresholds(0));
    println!("fixed: P(M2) {p:.4} vs {FIXED_P_M2:.4}; E[x|M2] {x:.4} vs {FIXED_X_MEAN_GIVEN_M2:.4}");
    assert!((p - FIXED_P_M2).abs() < 0.03);
    assert!((x - FIXED_X_MEAN_GIVEN_M2).abs() < 0.05);
}

#[test]
fn half_cauchy_model_probability_matches_quadrature() {
    let s = run_chain(&six_patients(), &PriorConfig::default(), &long_chain(12)).unwrap();
    let p = s.prob_m2(0);
    println!("half-Cauchy: P(M2) {p:.4} vs {HALF_CAUCHY_P_M2:.4}");
    assert!((p - HALF_CAUCHY_P_M2).abs() < 0.03);
}

#[test]
fn inverse_gamma_model_probability_matches_quadrature() {
    let priors = PriorConfig {
        threshold: ThresholdPrior::InverseGamma { shape: 1.0, scale: 1.0 },
        ..PriorConfig::default()
    };
    let s = run_chain(&six_patients(), &priors, &long_chain(13)).unwrap();
    let p = s.prob_m2(0);
    println!("inverse-gamma: P(M2) {p:.4} vs {INVERSE_GAMMA_P_M2:.4}");
    assert!((p - INVERSE_GAMMA_P_M2).abs() < 0.03);
}

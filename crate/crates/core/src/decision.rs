//! Bayes decisions on posterior draws.
//!
//! Response rates are discretized into intervals; the optimal interval
//! indices (the joint posterior mode over model and intervals) are mapped to
//! final or interim trial actions. Biomarker thresholds are chosen by
//! minimizing a posterior expected loss over a grid of candidate cutoffs.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{invlogit, Patient, PriorConfig, SubModel, TrialData};
use crate::sampler::PosteriorSamples;

const CUT_TOLERANCE: f64 = 1e-12;
const GRID_MARGIN: f64 = 0.01;

/// Cutpoints `0 = c_0 < c_1 < ... < c_K = 1`; interval `k` is `(c_{k-1}, c_k]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IntervalPartition {
    pub cutpoints: Vec<f64>,
    pub k1: usize,
    pub k2: usize,
    pub epsilon: f64,
}

/// Position of an interval index relative to `k1` and `k2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Zone {
    /// `k <= k1`
    Low,
    /// `k1 < k <= k2`
    Mid,
    /// `k > k2`
    High,
}

impl IntervalPartition {
    pub fn n_intervals(&self) -> usize {
        self.cutpoints.len() - 1
    }

    /// 1-based index of the interval containing `p`.
    pub fn interval_of(&self, p: f64) -> usize {
        let k = self.cutpoints.partition_point(|&c| c + CUT_TOLERANCE < p);
        k.clamp(1, self.n_intervals())
    }

    pub fn zone(&self, k: usize) -> Zone {
        if k <= self.k1 {
            Zone::Low
        } else if k <= self.k2 {
            Zone::Mid
        } else {
            Zone::High
        }
    }
}

fn hundredths(name: &str, v: f64) -> Result<u64> {
    let scaled = v * 100.0;
    let r = scaled.round();
    if (scaled - r).abs() > 1e-9 || r < 0.0 {
        return Err(Error::Config(format!(
            "{name} = {v} is not a multiple of 0.01; give an explicit epsilon"
        )));
    }
    Ok(r as u64)
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Equal-length partition of (0, 1) with `lrv` and `tv` as exact cutpoints.
///
/// Without an override the grain is the greatest common divisor, in
/// hundredths, of `lrv`, `tv - lrv` and `1 - tv`. When `1` is not a multiple
/// of the grain the last interval is shorter.
pub fn build_partition(lrv: f64, tv: f64, epsilon: Option<f64>) -> Result<IntervalPartition> {
    if !(lrv > 0.0 && lrv < tv && tv < 1.0) {
        return Err(Error::Config(format!("need 0 < LRV < TV < 1, got LRV = {lrv}, TV = {tv}")));
    }
    let eps = match epsilon {
        Some(e) => {
            if !(e > 0.0 && e < 1.0) {
                return Err(Error::Config(format!("epsilon must lie in (0, 1), got {e}")));
            }
            for (name, v) in [("LRV", lrv), ("TV - LRV", tv - lrv)] {
                let q = v / e;
                if (q - q.round()).abs() > 1e-9 {
                    return Err(Error::Config(format!("epsilon {e} does not divide {name} = {v}")));
                }
            }
            e
        }
        None => {
            let l = hundredths("LRV", lrv)?;
            let t = hundredths("TV", tv)?;
            gcd(gcd(l, t - l), 100 - t) as f64 / 100.0
        }
    };
    let k1 = (lrv / eps).round() as usize;
    let k2 = (tv / eps).round() as usize;
    let mut cutpoints: Vec<f64> = (0..).map(|k| k as f64 * eps).take_while(|&c| c < 1.0 - 1e-9).collect();
    cutpoints.push(1.0);
    cutpoints[k1] = lrv;
    cutpoints[k2] = tv;
    Ok(IntervalPartition {
        cutpoints,
        k1,
        k2,
        epsilon: eps,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum FinalAction {
    /// Stop.
    S,
    /// Inconclusive.
    #[serde(rename = "INC")]
    Inc,
    /// Recommend for all-comers.
    RA,
    /// Recommend for the biomarker-positive subgroup.
    RP,
}

impl FinalAction {
    pub const ALL: [FinalAction; 4] = [FinalAction::S, FinalAction::Inc, FinalAction::RA, FinalAction::RP];

    pub fn as_str(self) -> &'static str {
        match self {
            FinalAction::S => "S",
            FinalAction::Inc => "INC",
            FinalAction::RA => "RA",
            FinalAction::RP => "RP",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum InterimAction {
    /// Stop enrollment.
    S,
    /// Enroll all-comers.
    EA,
    /// Enroll the biomarker-positive subgroup only.
    EP,
}

impl InterimAction {
    pub const ALL: [InterimAction; 3] = [InterimAction::S, InterimAction::EA, InterimAction::EP];

    pub fn as_str(self) -> &'static str {
        match self {
            InterimAction::S => "S",
            InterimAction::EA => "EA",
            InterimAction::EP => "EP",
        }
    }
}

impl std::fmt::Display for FinalAction {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.pad(self.as_str())
    }
}

impl std::fmt::Display for InterimAction {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.pad(self.as_str())
    }
}

fn check_indices(a: usize, a_plus: usize, a_minus: usize, partition: &IntervalPartition) -> Result<()> {
    let k = partition.n_intervals();
    let in_range = |v: usize| (1..=k).contains(&v);
    if !(in_range(a) && in_range(a_plus) && in_range(a_minus)) || a_plus < a_minus {
        return Err(Error::InfeasibleIndices { a, a_plus, a_minus });
    }
    Ok(())
}

/// Final action for interval indices `(a, a_plus, a_minus)`.
pub fn map_final(a: usize, a_plus: usize, a_minus: usize, partition: &IntervalPartition) -> Result<FinalAction> {
    use Zone::*;
    check_indices(a, a_plus, a_minus, partition)?;
    let z = |k| partition.zone(k);
    let action = match (z(a_plus), z(a_minus), z(a)) {
        (Low, Low, _) => Some(FinalAction::S),
        (Low, _, _) => None,
        (Mid, Low, Low) => Some(FinalAction::S),
        (Mid, Low, _) | (Mid, Mid, _) => Some(FinalAction::Inc),
        (Mid, High, _) => None,
        (High, High, _) | (High, _, High) => Some(FinalAction::RA),
        (High, _, _) => Some(FinalAction::RP),
    };
    action.ok_or(Error::InfeasibleIndices { a, a_plus, a_minus })
}

/// Interim action for interval indices `(a, a_plus, a_minus)`.
pub fn map_interim(a: usize, a_plus: usize, a_minus: usize, partition: &IntervalPartition) -> Result<InterimAction> {
    check_indices(a, a_plus, a_minus, partition)?;
    let k1 = partition.k1;
    match (a_plus > k1, a_minus > k1, a > k1) {
        (true, true, _) => Ok(InterimAction::EA),
        (true, false, true) => Ok(InterimAction::EP),
        (true, false, false) | (false, false, _) => Ok(InterimAction::S),
        (false, true, _) => Err(Error::InfeasibleIndices { a, a_plus, a_minus }),
    }
}

/// Optimal interval indices for one indication.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IntervalChoice {
    pub a: usize,
    pub a_plus: usize,
    pub a_minus: usize,
    /// Model of the overall posterior mode.
    pub model: SubModel,
    /// Posterior probability of the modal `(model, intervals)` cell.
    pub mode_probability: f64,
    /// `a` was taken from the prior centre because no draw was under `M1`.
    pub m1_from_prior: bool,
    /// `a_plus`/`a_minus` were taken from the prior centre because no draw was under `M2`.
    pub m2_from_prior: bool,
}

/// Histogram mode over `{(M1, k)} ∪ {(M2, k+, k-)}`.
///
/// The model that does not attain the mode still reports its own conditional
/// argmax, so all three indices are always available to the action tables.
/// Ties go to the lower index, and to `M1` between models.
pub fn optimal_intervals(
    samples: &PosteriorSamples,
    i: usize,
    partition: &IntervalPartition,
    priors: &PriorConfig,
) -> Result<IntervalChoice> {
    if samples.is_empty() {
        return Err(Error::Numerical("no posterior draws".into()));
    }
    if i >= samples.n_indications() {
        return Err(Error::Config(format!("indication index {i} out of range")));
    }
    let k = partition.n_intervals();
    let mut q1 = vec![0u64; k];
    let mut q2 = vec![0u64; k * k];
    for s in samples.indication(i) {
        match s.model {
            SubModel::M1 => q1[partition.interval_of(s.p_all()) - 1] += 1,
            SubModel::M2 => {
                let kp = partition.interval_of(s.p_plus()) - 1;
                let km = partition.interval_of(s.p_minus()) - 1;
                q2[kp * k + km] += 1;
            }
        }
    }

    let (best1, count1) = argmax_first(&q1);
    let (best2, count2) = argmax_first(&q2);
    let m1_from_prior = count1 == 0;
    let m2_from_prior = count2 == 0;

    let a = if m1_from_prior {
        partition.interval_of(invlogit(priors.mu_theta))
    } else {
        best1 + 1
    };
    let (a_plus, a_minus) = if m2_from_prior {
        let delta = priors.a_delta / priors.b_delta;
        (
            partition.interval_of(invlogit(priors.mu_theta_minus + delta)),
            partition.interval_of(invlogit(priors.mu_theta_minus)),
        )
    } else {
        (best2 / k + 1, best2 % k + 1)
    };
    let (model, count) = if count2 > count1 {
        (SubModel::M2, count2)
    } else {
        (SubModel::M1, count1)
    };
    Ok(IntervalChoice {
        a,
        a_plus,
        a_minus,
        model,
        mode_probability: count as f64 / samples.len() as f64,
        m1_from_prior,
        m2_from_prior,
    })
}

fn argmax_first(counts: &[u64]) -> (usize, u64) {
    let mut best = (0, counts[0]);
    for (idx, &c) in counts.iter().enumerate().skip(1) {
        if c > best.1 {
            best = (idx, c);
        }
    }
    best
}

/// Response-rate cutoffs for one indication.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RateThresholds {
    pub lrv: f64,
    pub tv: f64,
    /// Interval grain; derived from `lrv` and `tv` when absent.
    pub epsilon: Option<f64>,
}

impl Default for RateThresholds {
    fn default() -> Self {
        RateThresholds {
            lrv: 0.1,
            tv: 0.3,
            epsilon: None,
        }
    }
}

impl RateThresholds {
    pub fn partition(&self) -> Result<IntervalPartition> {
        build_partition(self.lrv, self.tv, self.epsilon)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecisionConfig {
    /// One entry per indication, or a single entry shared by all.
    pub rates: Vec<RateThresholds>,
    /// Weight of the negative-subgroup size penalty.
    pub w1: f64,
    /// Weight of the positive-subgroup response shortfall penalty.
    pub w2: f64,
    /// Subgroup flag cutoff on `P(M2 | data)`.
    pub lambda: f64,
}

impl Default for DecisionConfig {
    fn default() -> Self {
        DecisionConfig {
            rates: vec![RateThresholds::default()],
            w1: 0.2,
            w2: 0.5,
            lambda: 0.98,
        }
    }
}

impl DecisionConfig {
    pub fn rates_for(&self, i: usize) -> Result<RateThresholds> {
        match self.rates.as_slice() {
            [single] => Ok(*single),
            all => all.get(i).copied().ok_or_else(|| {
                Error::Config(format!(
                    "decision thresholds given for {} indications, indication {} has none",
                    all.len(),
                    i + 1
                ))
            }),
        }
    }

    pub fn validate(&self, n_indications: usize) -> Result<()> {
        if self.rates.is_empty() {
            return Err(Error::Config("at least one LRV/TV pair is required".into()));
        }
        if self.rates.len() != 1 && self.rates.len() != n_indications {
            return Err(Error::Config(format!(
                "{} LRV/TV entries for {} indications",
                self.rates.len(),
                n_indications
            )));
        }
        for r in &self.rates {
            r.partition()?;
        }
        for (name, w) in [("w1", self.w1), ("w2", self.w2)] {
            if !(w.is_finite() && w >= 0.0) {
                return Err(Error::Config(format!("`{name}` must be nonnegative, got {w}")));
            }
        }
        if !(0.0..=1.0).contains(&self.lambda) {
            return Err(Error::Config(format!("`lambda` must lie in [0, 1], got {}", self.lambda)));
        }
        Ok(())
    }
}

/// Responder fraction among patients with biomarker above `t`; 0 when none are.
fn positive_response_rate(patients: &[Patient], t: f64) -> f64 {
    let (n, s) = patients
        .iter()
        .filter(|p| p.biomarker > t)
        .fold((0usize, 0usize), |(n, s), p| (n + 1, s + p.response as usize));
    if n == 0 {
        0.0
    } else {
        s as f64 / n as f64
    }
}

/// Posterior expected loss of reporting threshold `t`:
/// mean of `1 - exp(-|t - x|)` over `x_draws`, plus `w1` times the fraction
/// of patients at or below `t`, plus `w2 (1 - p/TV)` when the responder
/// fraction `p` above `t` falls short of `tv`.
pub fn threshold_expected_loss(t: f64, x_draws: &[f64], patients: &[Patient], w1: f64, w2: f64, tv: f64) -> f64 {
    let l1 = if x_draws.is_empty() {
        0.0
    } else {
        x_draws.iter().map(|x| -(-(t - x).abs()).exp_m1()).sum::<f64>() / x_draws.len() as f64
    };
    let l2 = if patients.is_empty() {
        0.0
    } else {
        patients.iter().filter(|p| p.biomarker <= t).count() as f64 / patients.len() as f64
    };
    let p = positive_response_rate(patients, t);
    let l3 = if p < tv { 1.0 - p / tv } else { 0.0 };
    l1 + w1 * l2 + w2 * l3
}

/// Midpoints between consecutive distinct biomarker values, plus one point
/// just below the minimum and one just above the maximum.
pub fn candidate_grid(patients: &[Patient]) -> Vec<f64> {
    let mut xs: Vec<f64> = patients.iter().map(|p| p.biomarker).collect();
    xs.sort_by(f64::total_cmp);
    xs.dedup();
    let (Some(&lo), Some(&hi)) = (xs.first(), xs.last()) else {
        return Vec::new();
    };
    let mut grid = Vec::with_capacity(xs.len() + 1);
    grid.push(lo - GRID_MARGIN);
    grid.extend(xs.windows(2).map(|w| 0.5 * (w[0] + w[1])));
    grid.push(hi + GRID_MARGIN);
    grid
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThresholdEstimate {
    pub t_hat: f64,
    pub expected_loss: f64,
    /// Size of the optimal biomarker subgroup `{j : X_j > t_hat}`.
    pub obs_size: usize,
}

/// Grid minimizer of [`threshold_expected_loss`] over the `M2` draws of `x_i`;
/// the smallest minimizing `t` wins ties.
pub fn minimize_threshold_loss(
    x_draws: &[f64],
    patients: &[Patient],
    w1: f64,
    w2: f64,
    tv: f64,
) -> Option<ThresholdEstimate> {
    let mut best: Option<(f64, f64)> = None;
    for t in candidate_grid(patients) {
        let loss = threshold_expected_loss(t, x_draws, patients, w1, w2, tv);
        if best.is_none_or(|(_, l)| loss < l) {
            best = Some((t, loss));
        }
    }
    best.map(|(t_hat, expected_loss)| ThresholdEstimate {
        t_hat,
        expected_loss,
        obs_size: patients.iter().filter(|p| p.biomarker > t_hat).count(),
    })
}

/// Threshold estimate for indication `i`.
///
/// Fails with [`Error::NoSubgroup`] when no retained draw is under `M2`, and
/// with [`Error::Data`] when the indication has no patients.
pub fn estimate_threshold(
    samples: &PosteriorSamples,
    i: usize,
    data: &TrialData,
    config: &DecisionConfig,
) -> Result<ThresholdEstimate> {
    let patients = &data
        .indications
        .get(i)
        .ok_or_else(|| Error::Config(format!("indication index {i} out of range")))?
        .patients;
    let draws = samples.subgroup_thresholds(i);
    if draws.is_empty() {
        return Err(Error::NoSubgroup(i));
    }
    let tv = config.rates_for(i)?.tv;
    minimize_threshold_loss(&draws, patients, config.w1, config.w2, tv)
        .ok_or_else(|| Error::Data(format!("indication {} has no patients", data.indications[i].label)))
}

/// `P(M_i = M2 | data) > lambda`.
pub fn identify_subgroup(samples: &PosteriorSamples, i: usize, lambda: f64) -> bool {
    samples.prob_m2(i) > lambda
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{logit, IndicationState, ModelState};
    use crate::sampler::{AcceptanceRates, SamplerConfig};
    use proptest::prelude::*;

    fn draws(states: Vec<IndicationState>) -> PosteriorSamples {
        PosteriorSamples {
            draws: states
                .into_iter()
                .map(|s| ModelState {
                    p_m: 0.5,
                    indications: vec![s],
                    mu_x: 0.0,
                    sigma_x: 1.0,
                })
                .collect(),
            acceptance: AcceptanceRates::default(),
            seed: 0,
            config: SamplerConfig::default(),
            fixed_thresholds: vec![None],
        }
    }

    fn m1(p: f64) -> IndicationState {
        IndicationState {
            model: SubModel::M1,
            theta: logit(p),
            theta_minus: -2.0,
            delta: 1.0,
            x: 0.0,
        }
    }

    fn m2(p_minus: f64, p_plus: f64, x: f64) -> IndicationState {
        IndicationState {
            model: SubModel::M2,
            theta: 0.0,
            theta_minus: logit(p_minus),
            delta: logit(p_plus) - logit(p_minus),
            x,
        }
    }

    fn six() -> Vec<Patient> {
        [(-1.3, 0), (-0.4, 1), (0.0, 1), (0.2, 0), (0.9, 1), (1.6, 1)]
            .iter()
            .map(|&(x, y)| Patient::new(x, y == 1).unwrap())
            .collect()
    }

    #[test]
    fn default_partition() {
        let p = build_partition(0.1, 0.3, None).unwrap();
        assert!((p.epsilon - 0.1).abs() < 1e-15);
        assert_eq!((p.n_intervals(), p.k1, p.k2), (10, 1, 3));
        assert_eq!(p.cutpoints[3], 0.3);
    }

    #[test]
    fn overridden_partitions() {
        let p = build_partition(0.15, 0.25, Some(0.05)).unwrap();
        assert_eq!((p.n_intervals(), p.k1, p.k2), (20, 3, 5));
        let p = build_partition(0.03, 0.06, Some(0.03)).unwrap();
        assert_eq!((p.k1, p.k2, p.n_intervals()), (1, 2, 34));
        let last = p.cutpoints[33];
        assert!((last - 0.99).abs() < 1e-12 && p.cutpoints[34] == 1.0);
        // the decimal rule alone would give 0.01
        assert!((build_partition(0.03, 0.06, None).unwrap().epsilon - 0.01).abs() < 1e-15);
    }

    #[test]
    fn partition_errors() {
        assert!(build_partition(0.3, 0.1, None).is_err());
        assert!(build_partition(0.1, 0.3, Some(0.04)).is_err());
        assert!(build_partition(0.125, 0.3, None).is_err());
        assert!(build_partition(0.1, 1.0, None).is_err());
    }

    #[test]
    fn interval_lookup_is_right_closed() {
        let p = build_partition(0.1, 0.3, None).unwrap();
        assert_eq!(p.interval_of(0.1), 1);
        assert_eq!(p.interval_of(0.1000001), 2);
        assert_eq!(p.interval_of(0.3), 3);
        assert_eq!(p.interval_of(0.0), 1);
        assert_eq!(p.interval_of(1.0), 10);
        // floating-point noise at a cutpoint stays in the lower interval
        assert_eq!(p.interval_of(invlogit(logit(0.4))), 4);
    }

    #[test]
    fn worked_example_maps_to_rp() {
        let p = build_partition(0.1, 0.3, None).unwrap();
        let s = draws(vec![m1(0.26), m2(0.1, 0.4, 0.0), m2(0.1, 0.4, 0.0)]);
        let c = optimal_intervals(&s, 0, &p, &PriorConfig::default()).unwrap();
        assert_eq!((c.a, c.a_plus, c.a_minus), (3, 4, 1));
        assert_eq!(c.model, SubModel::M2);
        assert_eq!(map_final(c.a, c.a_plus, c.a_minus, &p).unwrap(), FinalAction::RP);
    }

    #[test]
    fn point_mass_m1() {
        let p = build_partition(0.1, 0.3, None).unwrap();
        let c = optimal_intervals(&draws(vec![m1(0.25); 5]), 0, &p, &PriorConfig::default()).unwrap();
        assert_eq!(c.a, 3);
        assert!(c.m2_from_prior && !c.m1_from_prior);
        // invlogit(-2.3) = 0.091 and invlogit(-2.3 + 30/21.5) = 0.288
        assert_eq!((c.a_plus, c.a_minus), (3, 1));
    }

    #[test]
    fn model_tie_goes_to_m1() {
        let p = build_partition(0.1, 0.3, None).unwrap();
        let c = optimal_intervals(&draws(vec![m1(0.25), m2(0.05, 0.5, 0.0)]), 0, &p, &PriorConfig::default()).unwrap();
        assert_eq!(c.model, SubModel::M1);
        assert_eq!((c.a, c.a_plus, c.a_minus), (3, 5, 1));
    }

    #[test]
    fn argmax_matches_enumeration() {
        let p = build_partition(0.1, 0.3, None).unwrap();
        let mut states = Vec::new();
        let mut seed = 17u64;
        let mut next = || {
            seed = seed.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            ((seed >> 11) as f64) / (1u64 << 53) as f64
        };
        for _ in 0..300 {
            let u = next();
            if next() < 0.4 {
                states.push(m1(0.02 + 0.9 * u));
            } else {
                let lo = 0.02 + 0.5 * u;
                states.push(m2(lo, lo + (0.97 - lo) * next().max(0.01), 0.0));
            }
        }
        let s = draws(states.clone());
        let c = optimal_intervals(&s, 0, &p, &PriorConfig::default()).unwrap();

        // exhaustive scan over every (model, indices) cell, lexicographic ties
        let k = p.n_intervals();
        let count1 = |a: usize| states.iter().filter(|s| s.model == SubModel::M1 && p.interval_of(s.p_all()) == a).count();
        let count2 = |ap: usize, am: usize| {
            states
                .iter()
                .filter(|s| s.model == SubModel::M2 && p.interval_of(s.p_plus()) == ap && p.interval_of(s.p_minus()) == am)
                .count()
        };
        let best_a = (1..=k).fold(1, |b, a| if count1(a) > count1(b) { a } else { b });
        let mut best_pm = (1, 1);
        for ap in 1..=k {
            for am in 1..=k {
                if count2(ap, am) > count2(best_pm.0, best_pm.1) {
                    best_pm = (ap, am);
                }
            }
        }
        assert_eq!((c.a, c.a_plus, c.a_minus), (best_a, best_pm.0, best_pm.1));
        let expected_model = if count2(best_pm.0, best_pm.1) > count1(best_a) { SubModel::M2 } else { SubModel::M1 };
        assert_eq!(c.model, expected_model);
        assert!(c.a_plus >= c.a_minus);
    }

    #[test]
    fn mapping_spot_checks() {
        let p = build_partition(0.1, 0.3, None).unwrap();
        assert_eq!(map_final(1, 1, 1, &p).unwrap(), FinalAction::S);
        assert_eq!(map_final(5, 5, 1, &p).unwrap(), FinalAction::RA);
        assert_eq!(map_final(1, 5, 1, &p).unwrap(), FinalAction::RP);
        assert_eq!(map_final(2, 3, 2, &p).unwrap(), FinalAction::Inc);
        assert!(map_final(1, 1, 2, &p).is_err());
        assert!(map_final(1, 3, 5, &p).is_err());
        assert!(map_final(0, 3, 1, &p).is_err());
        assert_eq!(map_interim(1, 2, 2, &p).unwrap(), InterimAction::EA);
        assert_eq!(map_interim(2, 2, 1, &p).unwrap(), InterimAction::EP);
        assert_eq!(map_interim(1, 2, 1, &p).unwrap(), InterimAction::S);
        assert_eq!(map_interim(5, 1, 1, &p).unwrap(), InterimAction::S);
    }

    #[test]
    fn threshold_loss_reference_values() {
        let x = [-0.5, 0.1, 0.4];
        let patients = six();
        for (t, expected) in [
            (0.1, 0.3367900477414186),
            (-0.2, 0.3898506408475126),
            (1.25, 0.860724785073925),
            (-1.31, 0.7100442860021666),
        ] {
            let got = threshold_expected_loss(t, &x, &patients, 0.2, 0.5, 0.3);
            assert!((got - expected).abs() < 1e-12, "t = {t}: {got} vs {expected}");
        }
    }

    #[test]
    fn threshold_loss_trivial_cases() {
        let patients = six();
        assert_eq!(threshold_expected_loss(0.3, &[0.3], &patients, 0.0, 0.0, 0.3), 0.0);
        let responders: Vec<Patient> = patients.iter().map(|p| Patient::new(p.biomarker, true).unwrap()).collect();
        let t = -2.0;
        let l1 = -(-(t - 0.5f64).abs()).exp_m1();
        assert!((threshold_expected_loss(t, &[0.5], &responders, 0.2, 0.5, 0.3) - l1).abs() < 1e-15);
        // no patients above t gives the full response penalty
        let above = threshold_expected_loss(5.0, &[5.0], &patients, 0.0, 1.0, 0.3);
        assert!((above - 1.0).abs() < 1e-15);
    }

    #[test]
    fn grid_layout() {
        let mut patients = six();
        patients.push(Patient::new(0.2, true).unwrap());
        let g = candidate_grid(&patients);
        assert_eq!(g.len(), 7);
        assert!((g[0] - -1.31).abs() < 1e-12 && (g[6] - 1.61).abs() < 1e-12);
        assert!((g[3] - 0.1).abs() < 1e-12);
        assert!(candidate_grid(&[]).is_empty());
    }

    #[test]
    fn point_mass_threshold_is_recovered() {
        let patients = six();
        let e = minimize_threshold_loss(&[0.1; 10], &patients, 0.0, 0.0, 0.3).unwrap();
        assert!((e.t_hat - 0.1).abs() < 1e-12);
        assert_eq!(e.obs_size, 3);
    }

    #[test]
    fn threshold_requires_m2_draws() {
        let data = TrialData::new(vec![crate::model::Indication::observed("a", six())]).unwrap();
        let s = draws(vec![m1(0.3); 4]);
        assert!(matches!(estimate_threshold(&s, 0, &data, &DecisionConfig::default()), Err(Error::NoSubgroup(0))));
        let s = draws(vec![m2(0.1, 0.5, 0.1); 4]);
        let e = estimate_threshold(&s, 0, &data, &DecisionConfig::default()).unwrap();
        assert!(e.t_hat.is_finite());
    }

    #[test]
    fn subgroup_flag_is_strict() {
        let mut states = vec![m2(0.1, 0.5, 0.0); 49];
        states.push(m1(0.2));
        let s = draws(states);
        assert!(!identify_subgroup(&s, 0, 0.98));
        assert!(identify_subgroup(&s, 0, 0.97));
        assert!(identify_subgroup(&draws(vec![m2(0.1, 0.5, 0.0); 3]), 0, 0.98));
    }

    #[test]
    fn decision_config_broadcasts_single_entry() {
        let c = DecisionConfig::default();
        assert_eq!(c.rates_for(2).unwrap().lrv, 0.1);
        c.validate(3).unwrap();
        let two = DecisionConfig {
            rates: vec![RateThresholds::default(); 2],
            ..c
        };
        assert!(two.validate(3).is_err());
        assert!(two.rates_for(2).is_err());
    }

    fn cohort_strategy() -> impl Strategy<Value = Vec<Patient>> {
        prop::collection::vec((-3.0f64..3.0, any::<bool>()), 1..30)
            .prop_map(|v| v.into_iter().map(|(x, y)| Patient::new(x, y).unwrap()).collect())
    }

    proptest! {
        #[test]
        fn loss_is_bounded(
            patients in cohort_strategy(),
            draws in prop::collection::vec(-5.0f64..5.0, 1..20),
            t in -4.0f64..4.0,
            w1 in 0.0f64..2.0,
            w2 in 0.0f64..2.0,
        ) {
            let l = threshold_expected_loss(t, &draws, &patients, w1, w2, 0.3);
            prop_assert!(l >= 0.0 && l <= 1.0 + w1 + w2 + 1e-12);
        }

        #[test]
        fn raising_w1_never_raises_threshold(
            patients in cohort_strategy(),
            draws in prop::collection::vec(-3.0f64..3.0, 1..20),
            w1 in 0.0f64..1.0,
            bump in 0.0f64..1.0,
        ) {
            let lo = minimize_threshold_loss(&draws, &patients, w1, 0.5, 0.3).unwrap();
            let hi = minimize_threshold_loss(&draws, &patients, w1 + bump, 0.5, 0.3).unwrap();
            prop_assert!(hi.t_hat <= lo.t_hat);
        }

        #[test]
        fn decisions_ignore_draw_order(seed in 0u64..1000) {
            let p = build_partition(0.1, 0.3, None).unwrap();
            let mut states: Vec<IndicationState> = (0..40)
                .map(|k| {
                    let u = ((k as u64 * 7919 + seed) % 97) as f64 / 97.0;
                    if k % 3 == 0 { m1(0.05 + 0.8 * u) } else { m2(0.05 + 0.3 * u, 0.4 + 0.5 * u, u) }
                })
                .collect();
            let a = optimal_intervals(&draws(states.clone()), 0, &p, &PriorConfig::default()).unwrap();
            states.reverse();
            states.rotate_left((seed % 40) as usize);
            let b = optimal_intervals(&draws(states), 0, &p, &PriorConfig::default()).unwrap();
            prop_assert_eq!(a, b);
        }

        #[test]
        fn partitions_cover_unit_interval(l in 1u32..60, gap in 1u32..39) {
            let lrv = l as f64 / 100.0;
            let tv = (l + gap) as f64 / 100.0;
            let p = build_partition(lrv, tv, None).unwrap();
            prop_assert_eq!(p.cutpoints[p.k1], lrv);
            prop_assert_eq!(p.cutpoints[p.k2], tv);
            prop_assert_eq!(*p.cutpoints.last().unwrap(), 1.0);
            prop_assert!(p.cutpoints.windows(2).all(|w| w[1] > w[0]));
            let total: f64 = p.cutpoints.windows(2).map(|w| w[1] - w[0]).sum();
            prop_assert!((total - 1.0).abs() < 1e-12);
        }
    }
}

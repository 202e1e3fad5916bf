//! Analyses of trial data and the simulated three-step basket trial.
//!
//! A trial enrolls `n_interim` patients per indication, runs an interim
//! analysis (stop, enroll all-comers, or enroll biomarker-positive patients
//! only), tops up the continuing indications to `n_max`, and runs a final
//! analysis on all accrued data. Indications stopped at interim keep their
//! data in the final joint fit.

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::decision::{
    estimate_threshold, identify_subgroup, map_final, map_interim, optimal_intervals, DecisionConfig, FinalAction,
    IntervalChoice, InterimAction, ThresholdEstimate,
};
use crate::error::{Error, Result};
use crate::model::{overall_rate, standard_normal_cdf, Indication, Patient, PriorConfig, TrialData};
use crate::sampler::{run_chain, run_chain_with_fixed_thresholds, AcceptanceRates, PosteriorSamples, SamplerConfig};

/// Version tag written into every serialized report.
pub const FORMAT_VERSION: u32 = 1;

const MAX_REJECTION_TRIES: u64 = 50_000_000;

/// Normal biomarker distribution shared by all indications of a scenario.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BiomarkerDistribution {
    pub mean: f64,
    pub sd: f64,
}

impl Default for BiomarkerDistribution {
    fn default() -> Self {
        BiomarkerDistribution { mean: 0.0, sd: 1.0 }
    }
}

impl BiomarkerDistribution {
    pub fn cdf(&self, x: f64) -> f64 {
        standard_normal_cdf((x - self.mean) / self.sd)
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let z: f64 = rng.sample(StandardNormal);
        self.mean + self.sd * z
    }
}

/// True parameters of one indication.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IndicationTruth {
    pub label: String,
    pub x: f64,
    pub p_minus: f64,
    pub p_plus: f64,
    pub n_interim: usize,
    pub n_max: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    pub label: String,
    pub indications: Vec<IndicationTruth>,
    pub biomarker: BiomarkerDistribution,
}

impl Scenario {
    pub fn validate(&self) -> Result<()> {
        if self.indications.is_empty() {
            return Err(Error::Config(format!("scenario {} has no indications", self.label)));
        }
        if !(self.biomarker.sd > 0.0 && self.biomarker.sd.is_finite() && self.biomarker.mean.is_finite()) {
            return Err(Error::Config(format!("scenario {}: invalid biomarker distribution", self.label)));
        }
        for ind in &self.indications {
            let ok = (0.0..=1.0).contains(&ind.p_minus)
                && (0.0..=1.0).contains(&ind.p_plus)
                && ind.p_minus <= ind.p_plus
                && !ind.x.is_nan()
                && ind.n_interim > 0
                && ind.n_interim <= ind.n_max;
            if !ok {
                return Err(Error::Config(format!(
                    "scenario {}, indication {}: need 0 <= p_minus <= p_plus <= 1 and 0 < n_interim <= n_max",
                    self.label, ind.label
                )));
            }
        }
        Ok(())
    }

    /// Response rate among all-comers for each indication.
    pub fn overall_rates(&self) -> Vec<f64> {
        self.indications
            .iter()
            .map(|t| overall_rate(t.p_minus, t.p_plus, t.x, |x| self.biomarker.cdf(x)))
            .collect()
    }

    /// Final action implied by the true rates.
    pub fn optimal_actions(&self, decision: &DecisionConfig) -> Result<Vec<FinalAction>> {
        self.overall_rates()
            .into_iter()
            .zip(&self.indications)
            .enumerate()
            .map(|(i, (p, t))| {
                let partition = decision.rates_for(i)?.partition()?;
                map_final(
                    partition.interval_of(p),
                    partition.interval_of(t.p_plus),
                    partition.interval_of(t.p_minus),
                    &partition,
                )
            })
            .collect()
    }
}

const THRESHOLD_SETS: [(&str, [f64; 3]); 3] = [
    ("base", [-0.1, 0.0, 0.1]),
    ("zero", [0.0, 0.0, 0.0]),
    ("spread", [-0.5, 0.0, 0.5]),
];

/// `(p_minus, p_plus)` per indication for scenarios 1..=6.
fn scenario_rates(set: &str, scenario: usize) -> [(f64, f64); 3] {
    let flat = |p: f64| (p, p);
    let split = (0.1, 0.4);
    // the second indication of scenario 4 differs between threshold sets
    let s4_second = if set == "base" { split } else { (0.1, 0.5) };
    match scenario {
        1 => [flat(0.05); 3],
        2 => [flat(0.2); 3],
        3 => [split; 3],
        4 => [split, s4_second, (0.1, 0.3)],
        5 => [flat(0.4), flat(0.4), split],
        6 => [flat(0.2), split, split],
        _ => unreachable!("scenarios are numbered 1 to 6"),
    }
}

/// The 18 simulation scenarios: six rate configurations for each of the
/// threshold sets `base` (-0.1, 0, 0.1), `zero` (0, 0, 0) and
/// `spread` (-0.5, 0, 0.5). Labels are `<set>-<number>`.
pub fn builtin_scenarios() -> Vec<Scenario> {
    let mut out = Vec::with_capacity(18);
    for (set, xs) in THRESHOLD_SETS {
        for s in 1..=6 {
            let rates = scenario_rates(set, s);
            out.push(Scenario {
                label: format!("{set}-{s}"),
                indications: (0..3)
                    .map(|i| IndicationTruth {
                        label: format!("indication{}", i + 1),
                        x: xs[i],
                        p_minus: rates[i].0,
                        p_plus: rates[i].1,
                        n_interim: 40,
                        n_max: 50,
                    })
                    .collect(),
                biomarker: BiomarkerDistribution::default(),
            });
        }
    }
    out
}

/// Resolve a scenario selector: `all`, a threshold-set name, a full label
/// such as `spread-3`, or a bare number (shorthand for `base-<n>`).
pub fn select_scenarios(selector: &str) -> Result<Vec<Scenario>> {
    let all = builtin_scenarios();
    let sel = selector.trim();
    if sel.eq_ignore_ascii_case("all") {
        return Ok(all);
    }
    let label = if sel.parse::<usize>().is_ok() { format!("base-{sel}") } else { sel.to_string() };
    let picked: Vec<Scenario> = all
        .into_iter()
        .filter(|s| s.label == label || s.label.split('-').next() == Some(label.as_str()))
        .collect();
    if picked.is_empty() {
        return Err(Error::Config(format!(
            "unknown scenario `{selector}`; use all, base, zero, spread, <set>-<1..6> or <1..6>"
        )));
    }
    Ok(picked)
}

/// Simulate `count` patients for indication `i`.
pub fn simulate_patients<R: Rng + ?Sized>(scenario: &Scenario, i: usize, count: usize, rng: &mut R) -> Vec<Patient> {
    (0..count)
        .map(|_| {
            let x = scenario.biomarker.sample(rng);
            respond(&scenario.indications[i], x, rng)
        })
        .collect()
}

/// Simulate `count` patients for indication `i` whose biomarker exceeds
/// `cutoff`, by rejection sampling from the biomarker distribution.
pub fn simulate_patients_above<R: Rng + ?Sized>(
    scenario: &Scenario,
    i: usize,
    count: usize,
    cutoff: f64,
    rng: &mut R,
) -> Result<Vec<Patient>> {
    let mut out = Vec::with_capacity(count);
    let mut tries = 0u64;
    while out.len() < count {
        tries += 1;
        if tries > MAX_REJECTION_TRIES {
            return Err(Error::Numerical(format!(
                "could not draw biomarker values above {cutoff} by rejection sampling"
            )));
        }
        let x = scenario.biomarker.sample(rng);
        if x > cutoff {
            out.push(respond(&scenario.indications[i], x, rng));
        }
    }
    Ok(out)
}

fn respond<R: Rng + ?Sized>(truth: &IndicationTruth, x: f64, rng: &mut R) -> Patient {
    let p = if x > truth.x { truth.p_plus } else { truth.p_minus };
    Patient {
        biomarker: x,
        response: rng.random::<f64>() < p,
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AnalysisMethod {
    /// Thresholds sampled jointly with all other parameters.
    #[default]
    OneStep,
    /// Thresholds estimated from a first chain, then held fixed in a second chain.
    TwoStep,
}

/// Interim analysis outcome for one indication.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InterimDecision {
    pub label: String,
    pub n_enrolled: usize,
    pub n_responders: usize,
    pub action: InterimAction,
    pub intervals: IntervalChoice,
    pub prob_m2: f64,
    /// `None` when no draw was under the subgroup model.
    pub threshold: Option<ThresholdEstimate>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InterimReport {
    pub format_version: u32,
    pub seed: u64,
    pub indications: Vec<InterimDecision>,
    pub acceptance: AcceptanceRates,
}

/// Final analysis outcome for one indication.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IndicationReport {
    pub label: String,
    pub n_enrolled: usize,
    pub n_responders: usize,
    pub final_action: FinalAction,
    pub intervals: IntervalChoice,
    pub prob_m2: f64,
    pub subgroup_flag: bool,
    /// `None` when no draw was under the subgroup model.
    pub threshold: Option<ThresholdEstimate>,
    /// The threshold was held at `threshold.t_hat` in a second chain.
    pub threshold_fixed: bool,
    /// Present for simulated trials.
    pub interim: Option<InterimDecision>,
    /// Biomarker cutoff applied to enrollment after the interim analysis.
    pub enrichment_cutoff: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialReport {
    pub format_version: u32,
    pub method: AnalysisMethod,
    pub seed: u64,
    pub indications: Vec<IndicationReport>,
    pub acceptance: AcceptanceRates,
}

fn validate_inputs(data: &TrialData, priors: &PriorConfig, decision: &DecisionConfig) -> Result<()> {
    data.validate()?;
    priors.validate()?;
    decision.validate(data.len())
}

fn threshold_or_none(samples: &PosteriorSamples, i: usize, data: &TrialData, decision: &DecisionConfig) -> Result<Option<ThresholdEstimate>> {
    if data.indications[i].patients.is_empty() {
        return Ok(None);
    }
    match estimate_threshold(samples, i, data, decision) {
        Ok(t) => Ok(Some(t)),
        Err(Error::NoSubgroup(_)) => Ok(None),
        Err(e) => Err(e),
    }
}

fn final_reports(
    samples: &PosteriorSamples,
    data: &TrialData,
    priors: &PriorConfig,
    decision: &DecisionConfig,
    thresholds: Vec<Option<ThresholdEstimate>>,
    fixed: &[bool],
) -> Result<Vec<IndicationReport>> {
    data.indications
        .iter()
        .zip(thresholds)
        .enumerate()
        .map(|(i, (ind, threshold))| {
            let partition = decision.rates_for(i)?.partition()?;
            let intervals = optimal_intervals(samples, i, &partition, priors)?;
            Ok(IndicationReport {
                label: ind.label.clone(),
                n_enrolled: ind.patients.len(),
                n_responders: ind.responders(),
                final_action: map_final(intervals.a, intervals.a_plus, intervals.a_minus, &partition)?,
                intervals,
                prob_m2: samples.prob_m2(i),
                subgroup_flag: identify_subgroup(samples, i, decision.lambda),
                threshold,
                threshold_fixed: fixed[i],
                interim: None,
                enrichment_cutoff: None,
            })
        })
        .collect()
}

/// Final analysis of observed data with the threshold sampled jointly.
pub fn analyze(data: &TrialData, priors: &PriorConfig, sampler: &SamplerConfig, decision: &DecisionConfig) -> Result<TrialReport> {
    validate_inputs(data, priors, decision)?;
    let samples = run_chain(data, priors, sampler)?;
    let thresholds = (0..data.len())
        .map(|i| threshold_or_none(&samples, i, data, decision))
        .collect::<Result<Vec<_>>>()?;
    Ok(TrialReport {
        format_version: FORMAT_VERSION,
        method: AnalysisMethod::OneStep,
        seed: sampler.seed,
        indications: final_reports(&samples, data, priors, decision, thresholds, &vec![false; data.len()])?,
        acceptance: samples.acceptance,
    })
}

/// Final analysis in two passes: estimate each threshold, then rerun the
/// chain with the estimated thresholds held fixed and decide from the second
/// run. Indications without a threshold estimate keep a free threshold.
pub fn two_step_analysis(
    data: &TrialData,
    priors: &PriorConfig,
    sampler: &SamplerConfig,
    decision: &DecisionConfig,
) -> Result<TrialReport> {
    validate_inputs(data, priors, decision)?;
    let first = run_chain(data, priors, sampler)?;
    let thresholds = (0..data.len())
        .map(|i| threshold_or_none(&first, i, data, decision))
        .collect::<Result<Vec<_>>>()?;
    let fixed: Vec<Option<f64>> = thresholds.iter().map(|t| t.map(|t| t.t_hat)).collect();
    let second_config = SamplerConfig {
        seed: second_pass_seed(sampler.seed),
        ..*sampler
    };
    let second = run_chain_with_fixed_thresholds(data, priors, &second_config, &fixed)?;
    let is_fixed: Vec<bool> = fixed.iter().map(Option::is_some).collect();
    Ok(TrialReport {
        format_version: FORMAT_VERSION,
        method: AnalysisMethod::TwoStep,
        seed: sampler.seed,
        indications: final_reports(&second, data, priors, decision, thresholds, &is_fixed)?,
        acceptance: second.acceptance,
    })
}

fn second_pass_seed(seed: u64) -> u64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(1);
    rng.next_u64()
}

/// Run the final analysis with the chosen method.
pub fn analyze_with(
    method: AnalysisMethod,
    data: &TrialData,
    priors: &PriorConfig,
    sampler: &SamplerConfig,
    decision: &DecisionConfig,
) -> Result<TrialReport> {
    match method {
        AnalysisMethod::OneStep => analyze(data, priors, sampler, decision),
        AnalysisMethod::TwoStep => two_step_analysis(data, priors, sampler, decision),
    }
}

/// Interim analysis: interval indices mapped to stop / enroll all-comers /
/// enroll biomarker-positive.
pub fn interim_analysis(
    data: &TrialData,
    priors: &PriorConfig,
    sampler: &SamplerConfig,
    decision: &DecisionConfig,
) -> Result<InterimReport> {
    validate_inputs(data, priors, decision)?;
    let samples = run_chain(data, priors, sampler)?;
    let indications = data
        .indications
        .iter()
        .enumerate()
        .map(|(i, ind)| {
            let partition = decision.rates_for(i)?.partition()?;
            let intervals = optimal_intervals(&samples, i, &partition, priors)?;
            Ok(InterimDecision {
                label: ind.label.clone(),
                n_enrolled: ind.patients.len(),
                n_responders: ind.responders(),
                action: map_interim(intervals.a, intervals.a_plus, intervals.a_minus, &partition)?,
                intervals,
                prob_m2: samples.prob_m2(i),
                threshold: threshold_or_none(&samples, i, data, decision)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(InterimReport {
        format_version: FORMAT_VERSION,
        seed: sampler.seed,
        indications,
        acceptance: samples.acceptance,
    })
}

/// Everything except the scenario and seed needed to simulate a trial.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulationSettings {
    pub priors: PriorConfig,
    pub sampler: SamplerConfig,
    pub decision: DecisionConfig,
    pub method: AnalysisMethod,
}

/// Simulate one trial. Patient data and both chain seeds are drawn from `rng`.
///
/// After the interim analysis, stopped indications enroll nobody, `EA`
/// indications enroll all-comers and `EP` indications enroll only patients
/// above the interim threshold estimate (all-comers if there is none).
pub fn run_trial<R: Rng + ?Sized>(scenario: &Scenario, settings: &SimulationSettings, rng: &mut R) -> Result<TrialReport> {
    scenario.validate()?;
    let mut data = TrialData {
        indications: scenario
            .indications
            .iter()
            .enumerate()
            .map(|(i, t)| Indication {
                label: t.label.clone(),
                patients: simulate_patients(scenario, i, t.n_interim, rng),
                n_interim: t.n_interim,
                n_max: t.n_max,
            })
            .collect(),
    };

    let interim_sampler = SamplerConfig {
        seed: rng.next_u64(),
        ..settings.sampler
    };
    let interim = interim_analysis(&data, &settings.priors, &interim_sampler, &settings.decision)?;

    let mut cutoffs = Vec::with_capacity(data.len());
    for (i, d) in interim.indications.iter().enumerate() {
        let truth = &scenario.indications[i];
        let extra = truth.n_max - truth.n_interim;
        let cutoff = match d.action {
            InterimAction::S => None,
            InterimAction::EA => None,
            InterimAction::EP => d.threshold.map(|t| t.t_hat),
        };
        let new = match (d.action, cutoff) {
            (InterimAction::S, _) => Vec::new(),
            (_, Some(c)) => simulate_patients_above(scenario, i, extra, c, rng)?,
            (_, None) => simulate_patients(scenario, i, extra, rng),
        };
        data.indications[i].patients.extend(new);
        cutoffs.push(cutoff);
    }

    let final_sampler = SamplerConfig {
        seed: rng.next_u64(),
        ..settings.sampler
    };
    let mut report = analyze_with(settings.method, &data, &settings.priors, &final_sampler, &settings.decision)?;
    for ((r, d), c) in report.indications.iter_mut().zip(interim.indications).zip(cutoffs) {
        r.interim = Some(d);
        r.enrichment_cutoff = c;
    }
    Ok(report)
}

/// Generator for replicate `rep`: the base seed selects the key and the
/// replicate index selects the stream.
pub fn replicate_rng(base_seed: u64, rep: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(base_seed);
    rng.set_stream(rep as u64);
    rng
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct FinalPercentages {
    #[serde(rename = "S")]
    pub s: f64,
    #[serde(rename = "INC")]
    pub inc: f64,
    #[serde(rename = "RA")]
    pub ra: f64,
    #[serde(rename = "RP")]
    pub rp: f64,
}

impl FinalPercentages {
    pub fn get(&self, a: FinalAction) -> f64 {
        match a {
            FinalAction::S => self.s,
            FinalAction::Inc => self.inc,
            FinalAction::RA => self.ra,
            FinalAction::RP => self.rp,
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct InterimPercentages {
    #[serde(rename = "S")]
    pub s: f64,
    #[serde(rename = "EA")]
    pub ea: f64,
    #[serde(rename = "EP")]
    pub ep: f64,
}

impl InterimPercentages {
    pub fn get(&self, a: InterimAction) -> f64 {
        match a {
            InterimAction::S => self.s,
            InterimAction::EA => self.ea,
            InterimAction::EP => self.ep,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IndicationOc {
    pub label: String,
    pub final_actions: FinalPercentages,
    pub interim_actions: InterimPercentages,
    /// Percentage of replicates with `P(M2 | data) > lambda`.
    pub subgroup_flag_rate: f64,
    pub mean_sample_size: f64,
    /// Final threshold estimate per replicate; `None` where no subgroup draw existed.
    pub t_hat: Vec<Option<f64>>,
}

impl IndicationOc {
    pub fn defined_t_hat(&self) -> Vec<f64> {
        self.t_hat.iter().flatten().copied().collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OperatingCharacteristics {
    pub format_version: u32,
    pub scenario: Scenario,
    pub optimal_actions: Vec<FinalAction>,
    pub n_reps: usize,
    pub base_seed: u64,
    pub settings: SimulationSettings,
    pub indications: Vec<IndicationOc>,
}

/// Simulate `n_reps` trials and aggregate their decisions.
///
/// Replicate `r` uses [`replicate_rng`]`(base_seed, r)`, so results do not
/// depend on `threads` (`None` uses the global rayon pool).
pub fn operating_characteristics(
    scenario: &Scenario,
    n_reps: usize,
    settings: &SimulationSettings,
    base_seed: u64,
    threads: Option<usize>,
) -> Result<OperatingCharacteristics> {
    if n_reps == 0 {
        return Err(Error::Config("n_reps must be at least 1".into()));
    }
    scenario.validate()?;
    settings.decision.validate(scenario.indications.len())?;
    let simulate = || {
        (0..n_reps)
            .into_par_iter()
            .map(|r| run_trial(scenario, settings, &mut replicate_rng(base_seed, r)))
            .collect::<Result<Vec<_>>>()
    };
    let reports = match threads {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| Error::Config(format!("thread pool: {e}")))?
            .install(simulate)?,
        None => simulate()?,
    };
    Ok(OperatingCharacteristics {
        format_version: FORMAT_VERSION,
        scenario: scenario.clone(),
        optimal_actions: scenario.optimal_actions(&settings.decision)?,
        n_reps,
        base_seed,
        settings: settings.clone(),
        indications: aggregate(scenario, &reports),
    })
}

fn aggregate(scenario: &Scenario, reports: &[TrialReport]) -> Vec<IndicationOc> {
    let n = reports.len() as f64;
    let pct = |count: usize| 100.0 * count as f64 / n;
    scenario
        .indications
        .iter()
        .enumerate()
        .map(|(i, truth)| {
            let rows: Vec<&IndicationReport> = reports.iter().map(|r| &r.indications[i]).collect();
            let final_count = |a: FinalAction| rows.iter().filter(|r| r.final_action == a).count();
            let interim_count = |a: InterimAction| rows.iter().filter(|r| r.interim.as_ref().is_some_and(|d| d.action == a)).count();
            IndicationOc {
                label: truth.label.clone(),
                final_actions: FinalPercentages {
                    s: pct(final_count(FinalAction::S)),
                    inc: pct(final_count(FinalAction::Inc)),
                    ra: pct(final_count(FinalAction::RA)),
                    rp: pct(final_count(FinalAction::RP)),
                },
                interim_actions: InterimPercentages {
                    s: pct(interim_count(InterimAction::S)),
                    ea: pct(interim_count(InterimAction::EA)),
                    ep: pct(interim_count(InterimAction::EP)),
                },
                subgroup_flag_rate: pct(rows.iter().filter(|r| r.subgroup_flag).count()),
                mean_sample_size: rows.iter().map(|r| r.n_enrolled as f64).sum::<f64>() / n,
                t_hat: rows.iter().map(|r| r.threshold.map(|t| t.t_hat)).collect(),
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn quick() -> SimulationSettings {
        SimulationSettings {
            priors: PriorConfig::default(),
            sampler: SamplerConfig {
                total_iters: 400,
                burn_in: 200,
                ..SamplerConfig::default()
            },
            decision: DecisionConfig::default(),
            method: AnalysisMethod::OneStep,
        }
    }

    fn scenario(label: &str) -> Scenario {
        select_scenarios(label).unwrap().remove(0)
    }

    #[test]
    fn eighteen_builtin_scenarios() {
        let all = builtin_scenarios();
        assert_eq!(all.len(), 18);
        assert!(all.iter().all(|s| s.validate().is_ok()));
        assert!(all.iter().all(|s| s.indications.iter().all(|t| t.n_max == 50 && t.n_interim == 40)));
        assert_eq!(select_scenarios("all").unwrap().len(), 18);
        assert_eq!(select_scenarios("zero").unwrap().len(), 6);
        assert_eq!(select_scenarios("3").unwrap()[0].label, "base-3");
        assert!(select_scenarios("7").is_err());
        assert!(select_scenarios("bogus").is_err());
    }

    #[test]
    fn scenario_rows() {
        for s in select_scenarios("all").unwrap().iter().filter(|s| s.label.ends_with("-1")) {
            assert!(s.indications.iter().all(|t| t.p_minus == 0.05 && t.p_plus == 0.05));
        }
        let s5 = scenario("base-5");
        assert_eq!((s5.indications[0].p_minus, s5.indications[0].p_plus), (0.4, 0.4));
        assert_eq!((s5.indications[2].p_minus, s5.indications[2].p_plus), (0.1, 0.4));
        let r = scenario("spread-3").overall_rates();
        assert!((r[0] - 0.31).abs() < 0.005, "{}", r[0]);
    }

    #[test]
    fn optimal_actions_match_tables() {
        use FinalAction::*;
        let expected: [(&str, [FinalAction; 3]); 18] = [
            ("base-1", [S, S, S]),
            ("base-2", [Inc, Inc, Inc]),
            ("base-3", [RP, RP, RP]),
            ("base-4", [RP, RP, Inc]),
            ("base-5", [RA, RA, RP]),
            ("base-6", [Inc, RP, RP]),
            ("zero-1", [S, S, S]),
            ("zero-2", [Inc, Inc, Inc]),
            ("zero-3", [RP, RP, RP]),
            ("zero-4", [RP, RP, Inc]),
            ("zero-5", [RA, RA, RP]),
            ("zero-6", [Inc, RP, RP]),
            ("spread-1", [S, S, S]),
            ("spread-2", [Inc, Inc, Inc]),
            ("spread-3", [RA, RP, RP]),
            ("spread-4", [RA, RP, Inc]),
            ("spread-5", [RA, RA, RP]),
            ("spread-6", [Inc, RP, RP]),
        ];
        let d = DecisionConfig::default();
        for (label, actions) in expected {
            assert_eq!(scenario(label).optimal_actions(&d).unwrap(), actions, "{label}");
        }
    }

    #[test]
    fn overall_response_fraction() {
        let s = scenario("base-3");
        let mut rng = replicate_rng(5, 0);
        let patients = simulate_patients(&s, 0, 100_000, &mut rng);
        let frac = patients.iter().filter(|p| p.response).count() as f64 / patients.len() as f64;
        assert!((frac - 0.26).abs() < 0.01, "{frac}");
    }

    #[test]
    fn flat_rates_and_infinite_threshold() {
        let mut s = scenario("base-2");
        let mut rng = replicate_rng(6, 0);
        let n = 10_000;
        let frac = simulate_patients(&s, 0, n, &mut rng).iter().filter(|p| p.response).count() as f64 / n as f64;
        assert!((frac - 0.2).abs() < 3.0 * (0.2f64 * 0.8 / n as f64).sqrt() + 1e-3);
        s.indications[0] = IndicationTruth {
            x: f64::NEG_INFINITY,
            p_minus: 0.0,
            p_plus: 1.0,
            ..s.indications[0].clone()
        };
        assert!(simulate_patients(&s, 0, 200, &mut rng).iter().all(|p| p.response));
    }

    #[test]
    fn rejection_sampling_respects_cutoff() {
        let s = scenario("base-3");
        let mut rng = replicate_rng(7, 0);
        let ps = simulate_patients_above(&s, 1, 500, 1.5, &mut rng).unwrap();
        assert_eq!(ps.len(), 500);
        assert!(ps.iter().all(|p| p.biomarker > 1.5));
    }

    #[test]
    fn trial_replay_and_enrollment_accounting() {
        let s = scenario("base-5");
        let settings = quick();
        let a = run_trial(&s, &settings, &mut replicate_rng(3, 9)).unwrap();
        let b = run_trial(&s, &settings, &mut replicate_rng(3, 9)).unwrap();
        assert_eq!(a, b);
        for r in &a.indications {
            let interim = r.interim.as_ref().unwrap();
            assert_eq!(interim.n_enrolled, 40);
            let expected = if interim.action == InterimAction::S { 40 } else { 50 };
            assert_eq!(r.n_enrolled, expected);
        }
    }

    #[test]
    fn oc_is_independent_of_thread_count() {
        let s = scenario("base-3");
        let settings = quick();
        let one = operating_characteristics(&s, 4, &settings, 11, Some(1)).unwrap();
        let three = operating_characteristics(&s, 4, &settings, 11, Some(3)).unwrap();
        assert_eq!(one, three);
        for ind in &one.indications {
            let f = ind.final_actions;
            assert!((f.s + f.inc + f.ra + f.rp - 100.0).abs() < 1e-9);
        }
    }

    #[test]
    fn single_replicate_percentages_are_all_or_nothing() {
        let oc = operating_characteristics(&scenario("base-1"), 1, &quick(), 2, Some(1)).unwrap();
        for ind in &oc.indications {
            for a in FinalAction::ALL {
                assert!(ind.final_actions.get(a) == 0.0 || ind.final_actions.get(a) == 100.0);
            }
        }
        assert!(operating_characteristics(&scenario("base-1"), 0, &quick(), 2, None).is_err());
    }

    #[test]
    fn two_step_fixes_estimated_thresholds() {
        let s = scenario("base-3");
        let mut rng = replicate_rng(21, 0);
        let data = TrialData::new(
            (0..3)
                .map(|i| Indication::observed(format!("ind{i}"), simulate_patients(&s, i, 60, &mut rng)))
                .collect(),
        )
        .unwrap();
        let settings = quick();
        let r = two_step_analysis(&data, &settings.priors, &settings.sampler, &settings.decision).unwrap();
        let again = two_step_analysis(&data, &settings.priors, &settings.sampler, &settings.decision).unwrap();
        assert_eq!(r, again);
        assert_eq!(r.method, AnalysisMethod::TwoStep);
        for ind in &r.indications {
            assert_eq!(ind.threshold_fixed, ind.threshold.is_some());
        }
    }
}

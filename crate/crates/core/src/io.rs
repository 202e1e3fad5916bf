//! File formats: patient CSV, run configuration TOML, and report output.
//!
//! Patient data is a CSV file with the header `indication,biomarker,response`;
//! rows are grouped by indication label in order of first appearance.
//!
//! The configuration file is flat TOML. Every key is optional and unknown
//! keys are rejected. `lrv`, `tv` and `epsilon` take either one number for
//! all indications or an array with one number per indication; an `epsilon`
//! of 0 means "derive the grain from LRV and TV".

use std::collections::HashMap;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::decision::{DecisionConfig, FinalAction, RateThresholds};
use crate::error::{Error, Result};
use crate::model::{Indication, Patient, PriorConfig, ThresholdPrior, TrialData};
use crate::sampler::{ProposalScales, SamplerConfig};
use crate::trial::{InterimReport, OperatingCharacteristics, TrialReport};

pub const DATASET_HEADER: [&str; 3] = ["indication", "biomarker", "response"];

/// Read a patient CSV file.
pub fn parse_dataset(path: impl AsRef<Path>) -> Result<TrialData> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_dataset_str(&text, path)
}

/// As [`parse_dataset`] on in-memory text; `path` is used in error messages.
pub fn parse_dataset_str(text: &str, path: &Path) -> Result<TrialData> {
    let parse_err = |line: usize, message: String| Error::Parse {
        path: path.to_path_buf(),
        line,
        message,
    };
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let header = reader.headers().map_err(|e| parse_err(1, e.to_string()))?.clone();
    if header.is_empty() || (header.len() == 1 && header[0].is_empty()) {
        return Err(parse_err(1, "empty file".into()));
    }
    if header.iter().ne(DATASET_HEADER) {
        return Err(parse_err(
            1,
            format!("expected header `{}`, found `{}`", DATASET_HEADER.join(","), header.iter().collect::<Vec<_>>().join(",")),
        ));
    }

    let mut order: Vec<String> = Vec::new();
    let mut groups: HashMap<String, Vec<Patient>> = HashMap::new();
    for record in reader.records() {
        let record = record.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line() as usize);
            parse_err(line, e.to_string())
        })?;
        let line = record.position().map_or(0, |p| p.line() as usize);
        let label = record[0].to_string();
        if label.is_empty() {
            return Err(parse_err(line, "empty indication label".into()));
        }
        let biomarker: f64 = record[1]
            .parse()
            .map_err(|_| parse_err(line, format!("biomarker `{}` is not a number", &record[1])))?;
        if !biomarker.is_finite() {
            return Err(parse_err(line, format!("biomarker `{}` is not finite", &record[1])));
        }
        let response = match &record[2] {
            "0" => false,
            "1" => true,
            other => return Err(parse_err(line, format!("response `{other}` must be 0 or 1"))),
        };
        if !groups.contains_key(&label) {
            order.push(label.clone());
        }
        groups.entry(label).or_default().push(Patient { biomarker, response });
    }
    if order.is_empty() {
        return Err(parse_err(1, "no patient rows".into()));
    }
    TrialData::new(
        order
            .into_iter()
            .map(|label| {
                let patients = groups.remove(&label).unwrap_or_default();
                Indication::observed(label, patients)
            })
            .collect(),
    )
}

/// Write patients in the format read by [`parse_dataset`].
pub fn write_dataset(path: impl AsRef<Path>, data: &TrialData) -> Result<()> {
    let path = path.as_ref();
    let mut w = csv::Writer::from_writer(Vec::new());
    let csv_err = |e: csv::Error| Error::Data(e.to_string());
    w.write_record(DATASET_HEADER).map_err(csv_err)?;
    for ind in &data.indications {
        for p in &ind.patients {
            w.write_record([ind.label.as_str(), &p.biomarker.to_string(), if p.response { "1" } else { "0" }])
                .map_err(csv_err)?;
        }
    }
    let bytes = w.into_inner().map_err(|e| Error::Data(e.to_string()))?;
    fs::write(path, bytes).map_err(|e| Error::io(path, e))
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    #[default]
    Analyze,
    Interim,
    Simulate,
    TwoStep,
}

/// Which model is fitted: hierarchical thresholds, independent thresholds,
/// or hierarchical with the two-pass threshold analysis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Variant {
    Simba,
    Nb,
    TwoStep,
}

impl Variant {
    pub fn as_str(self) -> &'static str {
        match self {
            Variant::Simba => "simba",
            Variant::Nb => "nb",
            Variant::TwoStep => "two-step",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub priors: PriorConfig,
    pub sampler: SamplerConfig,
    pub decision: DecisionConfig,
    /// Subgroup flag cutoff used for the no-borrowing variant.
    pub lambda_nb: f64,
    pub mode: Mode,
    /// `None` runs both `simba` and `nb` when simulating, `simba` otherwise.
    pub variant: Option<Variant>,
    pub scenario: String,
    pub data: Option<PathBuf>,
    pub reps: usize,
    pub out: PathBuf,
    /// Worker threads for simulation; `None` uses all cores.
    pub threads: Option<usize>,
}

impl Default for RunConfig {
    fn default() -> Self {
        ConfigFile::default().into_run_config().expect("defaults are valid")
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        self.priors.validate()?;
        self.sampler.validate()?;
        if self.decision.rates.is_empty() {
            return Err(Error::Config("at least one LRV/TV pair is required".into()));
        }
        let probe = DecisionConfig {
            rates: vec![self.decision.rates[0]],
            ..self.decision.clone()
        };
        probe.validate(1)?;
        for r in &self.decision.rates {
            r.partition()?;
        }
        if !(0.0..=1.0).contains(&self.lambda_nb) {
            return Err(Error::Config(format!("`lambda_nb` must lie in [0, 1], got {}", self.lambda_nb)));
        }
        if self.reps == 0 {
            return Err(Error::Config("`reps` must be at least 1".into()));
        }
        if self.sampler.seed > i64::MAX as u64 {
            return Err(Error::Config(format!("`seed` must be at most {}, got {}", i64::MAX, self.sampler.seed)));
        }
        if self.threads == Some(0) {
            return Err(Error::Config("`threads` must be at least 1".into()));
        }
        Ok(())
    }

    /// Priors and subgroup cutoff for a variant.
    pub fn for_variant(&self, variant: Variant) -> (PriorConfig, DecisionConfig) {
        match variant {
            Variant::Simba | Variant::TwoStep => (self.priors, self.decision.clone()),
            Variant::Nb => {
                let nb = PriorConfig::no_borrow();
                let priors = PriorConfig {
                    threshold: match self.priors.threshold {
                        t @ ThresholdPrior::FixedNoBorrow { .. } => t,
                        _ => nb.threshold,
                    },
                    ..self.priors
                };
                let decision = DecisionConfig {
                    lambda: self.lambda_nb,
                    ..self.decision.clone()
                };
                (priors, decision)
            }
        }
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(&ConfigFile::from_run_config(self)).map_err(|e| Error::Config(e.to_string()))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
enum OneOrMany {
    One(f64),
    Many(Vec<f64>),
}

impl OneOrMany {
    fn values(&self) -> Vec<f64> {
        match self {
            OneOrMany::One(v) => vec![*v],
            OneOrMany::Many(v) => v.clone(),
        }
    }

    fn from_values(v: Vec<f64>) -> Self {
        if v.len() == 1 {
            OneOrMany::One(v[0])
        } else {
            OneOrMany::Many(v)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
enum ThresholdPriorKind {
    HalfCauchy,
    InverseGamma,
    Fixed,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct ConfigFile {
    mode: Mode,
    #[serde(skip_serializing_if = "Option::is_none")]
    variant: Option<Variant>,
    scenario: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    data: Option<PathBuf>,
    reps: usize,
    out: PathBuf,
    #[serde(skip_serializing_if = "Option::is_none")]
    threads: Option<usize>,

    a: f64,
    b: f64,
    mu_theta: f64,
    sigma_theta: f64,
    mu_theta_minus: f64,
    sigma_theta_minus: f64,
    a_delta: f64,
    b_delta: f64,
    sigma: f64,
    threshold_prior: ThresholdPriorKind,
    gamma: f64,
    ig_shape: f64,
    ig_scale: f64,
    mu_x0: f64,
    sigma_x0: f64,

    total_iters: usize,
    burn_in: usize,
    thin: usize,
    seed: u64,
    adapt: bool,
    model_moves: usize,
    proposal_theta: f64,
    proposal_theta_minus: f64,
    proposal_log_delta: f64,
    proposal_x: f64,
    proposal_log_sigma_x: f64,

    lrv: OneOrMany,
    tv: OneOrMany,
    #[serde(skip_serializing_if = "Option::is_none")]
    epsilon: Option<OneOrMany>,
    w1: f64,
    w2: f64,
    lambda: f64,
    lambda_nb: f64,
}

impl Default for ConfigFile {
    fn default() -> Self {
        let p = PriorConfig::default();
        let s = SamplerConfig::default();
        let d = DecisionConfig::default();
        ConfigFile {
            mode: Mode::Analyze,
            variant: None,
            scenario: "base-3".into(),
            data: None,
            reps: 200,
            out: PathBuf::from("out"),
            threads: None,
            a: p.a,
            b: p.b,
            mu_theta: p.mu_theta,
            sigma_theta: p.sigma_theta,
            mu_theta_minus: p.mu_theta_minus,
            sigma_theta_minus: p.sigma_theta_minus,
            a_delta: p.a_delta,
            b_delta: p.b_delta,
            sigma: p.sigma,
            threshold_prior: ThresholdPriorKind::HalfCauchy,
            gamma: 2.5,
            ig_shape: 1.0,
            ig_scale: 1.0,
            mu_x0: 0.0,
            sigma_x0: 3.0,
            total_iters: s.total_iters,
            burn_in: s.burn_in,
            thin: s.thin,
            seed: s.seed,
            adapt: s.adapt,
            model_moves: s.model_moves,
            proposal_theta: s.proposal.theta,
            proposal_theta_minus: s.proposal.theta_minus,
            proposal_log_delta: s.proposal.log_delta,
            proposal_x: s.proposal.x,
            proposal_log_sigma_x: s.proposal.log_sigma_x,
            lrv: OneOrMany::One(d.rates[0].lrv),
            tv: OneOrMany::One(d.rates[0].tv),
            epsilon: None,
            w1: d.w1,
            w2: d.w2,
            lambda: d.lambda,
            lambda_nb: 0.97,
        }
    }
}

impl ConfigFile {
    fn into_run_config(self) -> Result<RunConfig> {
        let threshold = match self.threshold_prior {
            ThresholdPriorKind::HalfCauchy => ThresholdPrior::HalfCauchy { gamma: self.gamma },
            ThresholdPriorKind::InverseGamma => ThresholdPrior::InverseGamma {
                shape: self.ig_shape,
                scale: self.ig_scale,
            },
            ThresholdPriorKind::Fixed => ThresholdPrior::FixedNoBorrow {
                mu_x0: self.mu_x0,
                sigma_x0: self.sigma_x0,
            },
        };
        let lrv = self.lrv.values();
        let tv = self.tv.values();
        let eps = self.epsilon.as_ref().map(OneOrMany::values);
        let n = lrv.len().max(tv.len()).max(eps.as_ref().map_or(1, Vec::len));
        let pick = |v: &[f64], name: &str, i: usize| -> Result<f64> {
            match v.len() {
                1 => Ok(v[0]),
                len if len == n => Ok(v[i]),
                len => Err(Error::Config(format!("`{name}` has {len} entries, expected 1 or {n}"))),
            }
        };
        let rates = (0..n)
            .map(|i| {
                let epsilon = match &eps {
                    None => None,
                    Some(e) => Some(pick(e, "epsilon", i)?).filter(|&e| e != 0.0),
                };
                Ok(RateThresholds {
                    lrv: pick(&lrv, "lrv", i)?,
                    tv: pick(&tv, "tv", i)?,
                    epsilon,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        let config = RunConfig {
            priors: PriorConfig {
                a: self.a,
                b: self.b,
                mu_theta: self.mu_theta,
                sigma_theta: self.sigma_theta,
                mu_theta_minus: self.mu_theta_minus,
                sigma_theta_minus: self.sigma_theta_minus,
                a_delta: self.a_delta,
                b_delta: self.b_delta,
                sigma: self.sigma,
                threshold,
            },
            sampler: SamplerConfig {
                total_iters: self.total_iters,
                burn_in: self.burn_in,
                thin: self.thin,
                seed: self.seed,
                proposal: ProposalScales {
                    theta: self.proposal_theta,
                    theta_minus: self.proposal_theta_minus,
                    log_delta: self.proposal_log_delta,
                    x: self.proposal_x,
                    log_sigma_x: self.proposal_log_sigma_x,
                },
                adapt: self.adapt,
                model_moves: self.model_moves,
            },
            decision: DecisionConfig {
                rates,
                w1: self.w1,
                w2: self.w2,
                lambda: self.lambda,
            },
            lambda_nb: self.lambda_nb,
            mode: self.mode,
            variant: self.variant,
            scenario: self.scenario,
            data: self.data,
            reps: self.reps,
            out: self.out,
            threads: self.threads,
        };
        config.validate()?;
        Ok(config)
    }

    fn from_run_config(c: &RunConfig) -> Self {
        let mut f = ConfigFile::default();
        let p = &c.priors;
        match p.threshold {
            ThresholdPrior::HalfCauchy { gamma } => {
                f.threshold_prior = ThresholdPriorKind::HalfCauchy;
                f.gamma = gamma;
            }
            ThresholdPrior::InverseGamma { shape, scale } => {
                f.threshold_prior = ThresholdPriorKind::InverseGamma;
                f.ig_shape = shape;
                f.ig_scale = scale;
            }
            ThresholdPrior::FixedNoBorrow { mu_x0, sigma_x0 } => {
                f.threshold_prior = ThresholdPriorKind::Fixed;
                f.mu_x0 = mu_x0;
                f.sigma_x0 = sigma_x0;
            }
        }
        let s = &c.sampler;
        let d = &c.decision;
        let rates = &d.rates;
        let eps: Vec<f64> = rates.iter().map(|r| r.epsilon.unwrap_or(0.0)).collect();
        ConfigFile {
            mode: c.mode,
            variant: c.variant,
            scenario: c.scenario.clone(),
            data: c.data.clone(),
            reps: c.reps,
            out: c.out.clone(),
            threads: c.threads,
            a: p.a,
            b: p.b,
            mu_theta: p.mu_theta,
            sigma_theta: p.sigma_theta,
            mu_theta_minus: p.mu_theta_minus,
            sigma_theta_minus: p.sigma_theta_minus,
            a_delta: p.a_delta,
            b_delta: p.b_delta,
            sigma: p.sigma,
            total_iters: s.total_iters,
            burn_in: s.burn_in,
            thin: s.thin,
            seed: s.seed,
            adapt: s.adapt,
            model_moves: s.model_moves,
            proposal_theta: s.proposal.theta,
            proposal_theta_minus: s.proposal.theta_minus,
            proposal_log_delta: s.proposal.log_delta,
            proposal_x: s.proposal.x,
            proposal_log_sigma_x: s.proposal.log_sigma_x,
            lrv: OneOrMany::from_values(rates.iter().map(|r| r.lrv).collect()),
            tv: OneOrMany::from_values(rates.iter().map(|r| r.tv).collect()),
            epsilon: eps.iter().any(|&e| e != 0.0).then(|| OneOrMany::from_values(eps)),
            w1: d.w1,
            w2: d.w2,
            lambda: d.lambda,
            lambda_nb: c.lambda_nb,
            ..f
        }
    }
}

/// Read a configuration file; see the module docs for the format.
pub fn parse_config(path: impl AsRef<Path>) -> Result<RunConfig> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_config_str(&text, path)
}

/// As [`parse_config`] on in-memory text; `path` is used in error messages.
pub fn parse_config_str(text: &str, path: &Path) -> Result<RunConfig> {
    let file: ConfigFile = toml::from_str(text).map_err(|e| {
        let line = e.span().map_or(0, |s| text[..s.start.min(text.len())].matches('\n').count() + 1);
        Error::Parse {
            path: path.to_path_buf(),
            line,
            message: e.message().trim().to_string(),
        }
    })?;
    file.into_run_config().map_err(|e| match e {
        Error::Config(m) => Error::Config(format!("{}: {m}", path.display())),
        other => other,
    })
}

fn create_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))
}

fn write_file(path: PathBuf, contents: impl AsRef<[u8]>) -> Result<PathBuf> {
    fs::write(&path, contents).map_err(|e| Error::io(&path, e))?;
    Ok(path)
}

fn to_json<T: Serialize>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value).map_err(|e| Error::Data(e.to_string()))?;
    s.push('\n');
    Ok(s)
}

fn csv_string(header: &[&str], rows: &[Vec<String>]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let err = |e: csv::Error| Error::Data(e.to_string());
    w.write_record(header).map_err(err)?;
    for r in rows {
        w.write_record(r).map_err(err)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Data(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| Error::Data(e.to_string()))
}

fn opt<T: ToString>(v: Option<T>) -> String {
    v.map_or_else(String::new, |v| v.to_string())
}

/// Write `report.json` and `summary.csv` into `dir`.
pub fn write_report(report: &TrialReport, dir: impl AsRef<Path>) -> Result<Vec<PathBuf>> {
    let dir = dir.as_ref();
    create_dir(dir)?;
    let header = [
        "indication",
        "n_enrolled",
        "n_responders",
        "final_action",
        "a",
        "a_plus",
        "a_minus",
        "mode_model",
        "prob_m2",
        "subgroup_flag",
        "t_hat",
        "obs_size",
        "threshold_fixed",
        "interim_action",
        "enrichment_cutoff",
    ];
    let rows: Vec<Vec<String>> = report
        .indications
        .iter()
        .map(|r| {
            vec![
                r.label.clone(),
                r.n_enrolled.to_string(),
                r.n_responders.to_string(),
                r.final_action.to_string(),
                r.intervals.a.to_string(),
                r.intervals.a_plus.to_string(),
                r.intervals.a_minus.to_string(),
                format!("{:?}", r.intervals.model),
                r.prob_m2.to_string(),
                r.subgroup_flag.to_string(),
                opt(r.threshold.map(|t| t.t_hat)),
                opt(r.threshold.map(|t| t.obs_size)),
                r.threshold_fixed.to_string(),
                opt(r.interim.as_ref().map(|d| d.action)),
                opt(r.enrichment_cutoff),
            ]
        })
        .collect();
    Ok(vec![
        write_file(dir.join("report.json"), to_json(report)?)?,
        write_file(dir.join("summary.csv"), csv_string(&header, &rows)?)?,
    ])
}

pub fn read_report(path: impl AsRef<Path>) -> Result<TrialReport> {
    read_json(path.as_ref())
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    serde_json::from_str(&text).map_err(|e| Error::Parse {
        path: path.to_path_buf(),
        line: e.line(),
        message: e.to_string(),
    })
}

/// Write `interim.json` and `interim.csv` into `dir`.
pub fn write_interim_report(report: &InterimReport, dir: impl AsRef<Path>) -> Result<Vec<PathBuf>> {
    let dir = dir.as_ref();
    create_dir(dir)?;
    let header = [
        "indication",
        "n_enrolled",
        "n_responders",
        "interim_action",
        "a",
        "a_plus",
        "a_minus",
        "prob_m2",
        "t_hat",
    ];
    let rows: Vec<Vec<String>> = report
        .indications
        .iter()
        .map(|d| {
            vec![
                d.label.clone(),
                d.n_enrolled.to_string(),
                d.n_responders.to_string(),
                d.action.to_string(),
                d.intervals.a.to_string(),
                d.intervals.a_plus.to_string(),
                d.intervals.a_minus.to_string(),
                d.prob_m2.to_string(),
                opt(d.threshold.map(|t| t.t_hat)),
            ]
        })
        .collect();
    Ok(vec![
        write_file(dir.join("interim.json"), to_json(report)?)?,
        write_file(dir.join("interim.csv"), csv_string(&header, &rows)?)?,
    ])
}

pub fn read_interim_report(path: impl AsRef<Path>) -> Result<InterimReport> {
    read_json(path.as_ref())
}

/// One simulated scenario under one variant.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OcRun {
    pub variant: Variant,
    pub oc: OperatingCharacteristics,
}

/// Write `oc.json`, `decisions.csv` (action percentages) and
/// `thresholds.csv` (one row per replicate and indication) into `dir`.
pub fn write_oc_tables(runs: &[OcRun], dir: impl AsRef<Path>) -> Result<Vec<PathBuf>> {
    let dir = dir.as_ref();
    create_dir(dir)?;
    let decision_header = [
        "scenario",
        "variant",
        "indication",
        "true_x",
        "p_minus",
        "p_plus",
        "optimal_action",
        "S",
        "INC",
        "RA",
        "RP",
        "interim_S",
        "interim_EA",
        "interim_EP",
        "subgroup_flag_rate",
        "mean_sample_size",
        "reps",
        "base_seed",
    ];
    let mut decisions = Vec::new();
    let mut thresholds = Vec::new();
    for run in runs {
        let oc = &run.oc;
        for ((ind, truth), best) in oc.indications.iter().zip(&oc.scenario.indications).zip(&oc.optimal_actions) {
            let mut row = vec![
                oc.scenario.label.clone(),
                run.variant.as_str().to_string(),
                ind.label.clone(),
                truth.x.to_string(),
                truth.p_minus.to_string(),
                truth.p_plus.to_string(),
                best.to_string(),
            ];
            row.extend(FinalAction::ALL.iter().map(|&a| ind.final_actions.get(a).to_string()));
            row.extend([ind.interim_actions.s, ind.interim_actions.ea, ind.interim_actions.ep].map(|v| v.to_string()));
            row.extend([
                ind.subgroup_flag_rate.to_string(),
                ind.mean_sample_size.to_string(),
                oc.n_reps.to_string(),
                oc.base_seed.to_string(),
            ]);
            decisions.push(row);
            for (rep, t) in ind.t_hat.iter().enumerate() {
                thresholds.push(vec![
                    oc.scenario.label.clone(),
                    run.variant.as_str().to_string(),
                    ind.label.clone(),
                    truth.x.to_string(),
                    rep.to_string(),
                    opt(*t),
                    oc.base_seed.to_string(),
                ]);
            }
        }
    }
    let threshold_header = ["scenario", "variant", "indication", "true_x", "replicate", "t_hat", "base_seed"];
    Ok(vec![
        write_file(dir.join("oc.json"), to_json(&runs)?)?,
        write_file(dir.join("decisions.csv"), csv_string(&decision_header, &decisions)?)?,
        write_file(dir.join("thresholds.csv"), csv_string(&threshold_header, &thresholds)?)?,
    ])
}

pub fn read_oc(path: impl AsRef<Path>) -> Result<Vec<OcRun>> {
    read_json(path.as_ref())
}

/// Write every resolved setting to `effective_config.toml`.
pub fn write_effective_config(config: &RunConfig, dir: impl AsRef<Path>) -> Result<PathBuf> {
    let dir = dir.as_ref();
    create_dir(dir)?;
    write_file(dir.join("effective_config.toml"), config.to_toml()?)
}

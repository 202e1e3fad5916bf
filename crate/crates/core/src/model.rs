//! Domain types and log-density evaluation for the two sub-models.
//!
//! Sub-model `M1` gives every patient in an indication the same response
//! rate `invlogit(theta)`. Sub-model `M2` splits the indication at a
//! biomarker threshold `x`: patients with `X <= x` respond with
//! `invlogit(theta_minus)` and patients with `X > x` with
//! `invlogit(theta_minus + delta)`, where `delta > 0`.

use serde::{Deserialize, Serialize};

use crate::density;
use crate::error::{ensure_finite, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Patient {
    pub biomarker: f64,
    pub response: bool,
}

impl Patient {
    pub fn new(biomarker: f64, response: bool) -> Result<Self> {
        ensure_finite("biomarker", biomarker)?;
        Ok(Patient {
            biomarker,
            response,
        })
    }
}

/// One arm of the basket: its patients plus the planned interim and maximum sizes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Indication {
    pub label: String,
    pub patients: Vec<Patient>,
    pub n_interim: usize,
    pub n_max: usize,
}

impl Indication {
    /// An indication whose enrollment is complete: both sizes equal the patient count.
    pub fn observed(label: impl Into<String>, patients: Vec<Patient>) -> Self {
        let n = patients.len();
        Indication {
            label: label.into(),
            patients,
            n_interim: n,
            n_max: n,
        }
    }

    /// An indication that has not enrolled anyone yet.
    pub fn planned(label: impl Into<String>, n_interim: usize, n_max: usize) -> Self {
        Indication {
            label: label.into(),
            patients: Vec::new(),
            n_interim,
            n_max,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_interim == 0 || self.n_interim > self.n_max {
            return Err(Error::Data(format!(
                "indication `{}`: need 0 < n_interim ({}) <= n_max ({})",
                self.label, self.n_interim, self.n_max
            )));
        }
        if self.patients.len() > self.n_max {
            return Err(Error::Data(format!(
                "indication `{}` has {} patients, more than n_max = {}",
                self.label,
                self.patients.len(),
                self.n_max
            )));
        }
        for p in &self.patients {
            ensure_finite("biomarker", p.biomarker)?;
        }
        Ok(())
    }

    pub fn responders(&self) -> usize {
        self.patients.iter().filter(|p| p.response).count()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialData {
    pub indications: Vec<Indication>,
}

impl TrialData {
    pub fn new(indications: Vec<Indication>) -> Result<Self> {
        let data = TrialData { indications };
        data.validate()?;
        Ok(data)
    }

    pub fn validate(&self) -> Result<()> {
        if self.indications.is_empty() {
            return Err(Error::Data("trial data needs at least one indication".into()));
        }
        self.indications.iter().try_for_each(Indication::validate)
    }

    pub fn len(&self) -> usize {
        self.indications.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indications.is_empty()
    }
}

/// Prior on the indication thresholds `x_i`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum ThresholdPrior {
    /// `x_i ~ N(mu_x, sigma_x^2)`, `mu_x ~ N(0, sigma^2)`, `sigma_x ~ Half-Cauchy(0, gamma)`.
    HalfCauchy { gamma: f64 },
    /// As `HalfCauchy` but with `sigma_x^2 ~ InvGamma(shape, scale)`, which is conjugate.
    InverseGamma { shape: f64, scale: f64 },
    /// Independent `x_i ~ N(mu_x0, sigma_x0^2)`; no borrowing across indications.
    FixedNoBorrow { mu_x0: f64, sigma_x0: f64 },
}

impl ThresholdPrior {
    pub fn is_hierarchical(&self) -> bool {
        !matches!(self, ThresholdPrior::FixedNoBorrow { .. })
    }
}

/// Hyperparameters of the hierarchical model.
///
/// `delta_i ~ Gamma(a_delta, b_delta)` uses the shape/rate convention, so the
/// prior mean of the log-odds gap is `a_delta / b_delta` (about 1.40 with the
/// defaults).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PriorConfig {
    pub a: f64,
    pub b: f64,
    pub mu_theta: f64,
    pub sigma_theta: f64,
    pub mu_theta_minus: f64,
    pub sigma_theta_minus: f64,
    pub a_delta: f64,
    pub b_delta: f64,
    /// Standard deviation of the `mu_x` prior.
    pub sigma: f64,
    pub threshold: ThresholdPrior,
}

impl Default for PriorConfig {
    fn default() -> Self {
        PriorConfig {
            a: 1.0,
            b: 1.0,
            mu_theta: -2.3,
            sigma_theta: 10.0,
            mu_theta_minus: -2.3,
            sigma_theta_minus: 2.0,
            a_delta: 30.0,
            b_delta: 21.5,
            sigma: 2.0,
            threshold: ThresholdPrior::HalfCauchy { gamma: 2.5 },
        }
    }
}

impl PriorConfig {
    /// Defaults with the fixed `N(0, 3^2)` threshold prior.
    pub fn no_borrow() -> Self {
        PriorConfig {
            threshold: ThresholdPrior::FixedNoBorrow {
                mu_x0: 0.0,
                sigma_x0: 3.0,
            },
            ..PriorConfig::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("a", self.a),
            ("b", self.b),
            ("sigma_theta", self.sigma_theta),
            ("sigma_theta_minus", self.sigma_theta_minus),
            ("a_delta", self.a_delta),
            ("b_delta", self.b_delta),
            ("sigma", self.sigma),
        ];
        let mut checks: Vec<(&str, f64)> = positive.to_vec();
        match self.threshold {
            ThresholdPrior::HalfCauchy { gamma } => checks.push(("gamma", gamma)),
            ThresholdPrior::InverseGamma { shape, scale } => {
                checks.push(("ig_shape", shape));
                checks.push(("ig_scale", scale));
            }
            ThresholdPrior::FixedNoBorrow { mu_x0, sigma_x0 } => {
                ensure_finite("fixed_mu_x", mu_x0)?;
                checks.push(("fixed_sigma_x", sigma_x0));
            }
        }
        for (name, v) in checks {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::Config(format!("`{name}` must be a positive number, got {v}")));
            }
        }
        for (name, v) in [("mu_theta", self.mu_theta), ("mu_theta_minus", self.mu_theta_minus)] {
            if !v.is_finite() {
                return Err(Error::Config(format!("`{name}` must be finite, got {v}")));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum SubModel {
    /// No subgroup: one response rate for all comers.
    M1,
    /// Biomarker-defined positive and negative subgroups.
    M2,
}

/// Both parameter blocks of one indication. `model` selects the active one.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IndicationState {
    pub model: SubModel,
    pub theta: f64,
    pub theta_minus: f64,
    pub delta: f64,
    pub x: f64,
}

impl IndicationState {
    pub fn p_all(&self) -> f64 {
        invlogit(self.theta)
    }

    pub fn p_minus(&self) -> f64 {
        invlogit(self.theta_minus)
    }

    pub fn p_plus(&self) -> f64 {
        invlogit(self.theta_minus + self.delta)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelState {
    pub p_m: f64,
    pub indications: Vec<IndicationState>,
    pub mu_x: f64,
    pub sigma_x: f64,
}

impl ModelState {
    pub fn validate(&self) -> Result<()> {
        if !(self.p_m > 0.0 && self.p_m < 1.0) {
            return Err(Error::Data(format!("p_M must lie in (0, 1), got {}", self.p_m)));
        }
        if !(self.sigma_x > 0.0 && self.sigma_x.is_finite()) {
            return Err(Error::Data(format!("sigma_x must be positive, got {}", self.sigma_x)));
        }
        ensure_finite("mu_x", self.mu_x)?;
        for s in &self.indications {
            ensure_finite("theta", s.theta)?;
            ensure_finite("theta_minus", s.theta_minus)?;
            ensure_finite("x", s.x)?;
            if !(s.delta > 0.0 && s.delta.is_finite()) {
                return Err(Error::Data(format!("delta must be positive, got {}", s.delta)));
            }
        }
        Ok(())
    }
}

pub fn invlogit(theta: f64) -> f64 {
    if theta >= 0.0 {
        1.0 / (1.0 + (-theta).exp())
    } else {
        let e = theta.exp();
        e / (1.0 + e)
    }
}

pub fn logit(p: f64) -> f64 {
    (p / (1.0 - p)).ln()
}

/// `log(1 + e^theta)` without overflow.
pub fn softplus(theta: f64) -> f64 {
    if theta > 0.0 {
        theta + (-theta).exp().ln_1p()
    } else {
        theta.exp().ln_1p()
    }
}

/// Bernoulli-logit log-likelihood of `responders` successes out of `n`.
pub(crate) fn bernoulli_logit(theta: f64, n: usize, responders: usize) -> f64 {
    if n == 0 {
        return 0.0;
    }
    responders as f64 * theta - n as f64 * softplus(theta)
}

pub fn log_lik_m1(theta: f64, patients: &[Patient]) -> Result<f64> {
    ensure_finite("theta", theta)?;
    let s = patients.iter().filter(|p| p.response).count();
    Ok(bernoulli_logit(theta, patients.len(), s))
}

/// Patients with `biomarker <= x` belong to the negative subgroup.
pub fn log_lik_m2(theta_minus: f64, delta: f64, x: f64, patients: &[Patient]) -> Result<f64> {
    ensure_finite("theta_minus", theta_minus)?;
    ensure_finite("delta", delta)?;
    ensure_finite("x", x)?;
    if delta <= 0.0 {
        return Err(Error::Data(format!("delta must be positive, got {delta}")));
    }
    let (mut n_neg, mut s_neg, mut n_pos, mut s_pos) = (0, 0, 0, 0);
    for p in patients {
        if p.biomarker <= x {
            n_neg += 1;
            s_neg += p.response as usize;
        } else {
            n_pos += 1;
            s_pos += p.response as usize;
        }
    }
    Ok(bernoulli_logit(theta_minus, n_neg, s_neg) + bernoulli_logit(theta_minus + delta, n_pos, s_pos))
}

/// Log of the joint prior density of a full product-space state.
///
/// Both parameter blocks of every indication contribute, whatever the current
/// model indicator. Under the inverse-gamma variant the prior is placed on
/// `sigma_x^2`; the returned value is the induced density of `sigma_x`.
pub fn log_prior(state: &ModelState, config: &PriorConfig) -> Result<f64> {
    state.validate()?;
    let mut lp = density::beta(state.p_m, config.a, config.b);
    for s in &state.indications {
        lp += match s.model {
            SubModel::M1 => state.p_m.ln(),
            SubModel::M2 => (-state.p_m).ln_1p(),
        };
        lp += density::normal(s.theta, config.mu_theta, config.sigma_theta);
        lp += density::normal(s.theta_minus, config.mu_theta_minus, config.sigma_theta_minus);
        lp += density::gamma(s.delta, config.a_delta, config.b_delta);
        lp += match config.threshold {
            ThresholdPrior::FixedNoBorrow { mu_x0, sigma_x0 } => density::normal(s.x, mu_x0, sigma_x0),
            _ => density::normal(s.x, state.mu_x, state.sigma_x),
        };
    }
    match config.threshold {
        ThresholdPrior::HalfCauchy { gamma } => {
            lp += density::normal(state.mu_x, 0.0, config.sigma);
            lp += density::half_cauchy(state.sigma_x, gamma);
        }
        ThresholdPrior::InverseGamma { shape, scale } => {
            lp += density::normal(state.mu_x, 0.0, config.sigma);
            let var = state.sigma_x * state.sigma_x;
            lp += density::inverse_gamma(var, shape, scale) + (2.0 * state.sigma_x).ln();
        }
        ThresholdPrior::FixedNoBorrow { .. } => {}
    }
    Ok(lp)
}

/// All-comer response rate when a fraction `cdf(x)` of patients sits in the negative subgroup.
pub fn overall_rate(p_minus: f64, p_plus: f64, x: f64, biomarker_cdf: impl Fn(f64) -> f64) -> f64 {
    let f = biomarker_cdf(x);
    f * p_minus + (1.0 - f) * p_plus
}

pub fn standard_normal_cdf(x: f64) -> f64 {
    0.5 * statrs::function::erf::erfc(-x / std::f64::consts::SQRT_2)
}

/// Sufficient statistics of one indication, sorted by biomarker, so that the
/// subgroup split at any threshold is a binary search.
#[derive(Debug, Clone)]
pub(crate) struct IndicationStats {
    sorted: Vec<f64>,
    /// `cum[k]` = responders among the `k` smallest biomarkers.
    cum: Vec<usize>,
}

impl IndicationStats {
    pub fn new(patients: &[Patient]) -> Self {
        let mut pairs: Vec<(f64, bool)> = patients.iter().map(|p| (p.biomarker, p.response)).collect();
        pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut cum = Vec::with_capacity(pairs.len() + 1);
        cum.push(0);
        let mut acc = 0;
        for &(_, y) in &pairs {
            acc += y as usize;
            cum.push(acc);
        }
        IndicationStats {
            sorted: pairs.into_iter().map(|(x, _)| x).collect(),
            cum,
        }
    }

    pub fn n(&self) -> usize {
        self.sorted.len()
    }

    pub fn responders(&self) -> usize {
        self.cum[self.sorted.len()]
    }

    pub fn median(&self) -> Option<f64> {
        let n = self.sorted.len();
        match n {
            0 => None,
            _ if n % 2 == 1 => Some(self.sorted[n / 2]),
            _ => Some(0.5 * (self.sorted[n / 2 - 1] + self.sorted[n / 2])),
        }
    }

    /// `(n_neg, responders_neg)` for the split at `x` (inclusive on the negative side).
    pub fn negative_part(&self, x: f64) -> (usize, usize) {
        let k = self.sorted.partition_point(|&b| b <= x);
        (k, self.cum[k])
    }

    pub fn ll_m1(&self, theta: f64) -> f64 {
        bernoulli_logit(theta, self.n(), self.responders())
    }

    pub fn ll_m2(&self, theta_minus: f64, delta: f64, x: f64) -> f64 {
        let (n_neg, s_neg) = self.negative_part(x);
        bernoulli_logit(theta_minus, n_neg, s_neg)
            + bernoulli_logit(theta_minus + delta, self.n() - n_neg, self.responders() - s_neg)
    }
}

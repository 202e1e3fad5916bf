//! Metropolis-within-Gibbs sampler for the joint posterior.
//!
//! Model choice uses a product-space (Carlin–Chib) construction: every
//! indication always carries both parameter blocks, and the pseudo-prior of
//! the inactive block is its own prior. The inactive block is therefore
//! refreshed by an exact prior draw and the model indicator has a closed-form
//! full conditional. Active blocks are updated by Gaussian random-walk
//! Metropolis steps (`delta` and `sigma_x` on the log scale).
//!
//! One sweep updates, in order: `p_M`; then for each indication the model
//! indicator, `theta`, `(theta_minus, delta)` and `x`; then `mu_x` and
//! `sigma_x` when the threshold prior is hierarchical.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Beta, Gamma, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::density;
use crate::error::{Error, Result};
use crate::model::{
    logit, IndicationState, IndicationStats, ModelState, PriorConfig, SubModel, ThresholdPrior,
    TrialData,
};

const TARGET_ACCEPTANCE: f64 = 0.3;
const MIN_LOG_SCALE: f64 = -9.2; // ~1e-4
const MAX_LOG_SCALE: f64 = 4.6; // ~1e2
const P_M_FLOOR: f64 = 1e-300;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProposalScales {
    pub theta: f64,
    pub theta_minus: f64,
    pub log_delta: f64,
    pub x: f64,
    pub log_sigma_x: f64,
}

impl Default for ProposalScales {
    fn default() -> Self {
        ProposalScales {
            theta: 0.5,
            theta_minus: 0.5,
            log_delta: 0.5,
            x: 0.5,
            log_sigma_x: 0.5,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SamplerConfig {
    pub total_iters: usize,
    pub burn_in: usize,
    pub thin: usize,
    pub seed: u64,
    /// Initial random-walk standard deviations.
    pub proposal: ProposalScales,
    /// Tune proposal scales toward 30% acceptance during burn-in; frozen afterwards.
    pub adapt: bool,
    /// Number of (refresh inactive block, redraw model indicator) pairs per
    /// indication and sweep.
    pub model_moves: usize,
}

impl Default for SamplerConfig {
    fn default() -> Self {
        SamplerConfig {
            total_iters: 4000,
            burn_in: 2000,
            thin: 1,
            seed: 1,
            proposal: ProposalScales::default(),
            adapt: true,
            model_moves: 4,
        }
    }
}

impl SamplerConfig {
    pub fn validate(&self) -> Result<()> {
        if self.total_iters == 0 || self.burn_in >= self.total_iters {
            return Err(Error::Config(format!(
                "need 0 <= burn_in ({}) < total_iters ({})",
                self.burn_in, self.total_iters
            )));
        }
        if self.thin == 0 {
            return Err(Error::Config("thin must be positive".into()));
        }
        if self.model_moves == 0 {
            return Err(Error::Config("model_moves must be positive".into()));
        }
        let p = self.proposal;
        for (name, v) in [
            ("proposal_theta", p.theta),
            ("proposal_theta_minus", p.theta_minus),
            ("proposal_log_delta", p.log_delta),
            ("proposal_x", p.x),
            ("proposal_log_sigma_x", p.log_sigma_x),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::Config(format!("`{name}` must be positive, got {v}")));
            }
        }
        Ok(())
    }

    /// Number of retained draws.
    pub fn n_draws(&self) -> usize {
        (self.total_iters - self.burn_in) / self.thin
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct BlockAcceptance {
    pub proposed: u64,
    pub accepted: u64,
}

impl BlockAcceptance {
    /// `None` when the block was never updated by a Metropolis step after burn-in.
    pub fn rate(&self) -> Option<f64> {
        (self.proposed > 0).then(|| self.accepted as f64 / self.proposed as f64)
    }

    fn record(&mut self, accepted: bool) {
        self.proposed += 1;
        self.accepted += accepted as u64;
    }
}

/// Post-burn-in Metropolis acceptance counts, pooled over indications.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct AcceptanceRates {
    pub theta: BlockAcceptance,
    pub theta_minus: BlockAcceptance,
    pub log_delta: BlockAcceptance,
    pub x: BlockAcceptance,
    pub log_sigma_x: BlockAcceptance,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PosteriorSamples {
    pub draws: Vec<ModelState>,
    pub acceptance: AcceptanceRates,
    pub seed: u64,
    pub config: SamplerConfig,
    /// Thresholds held fixed during sampling, per indication.
    pub fixed_thresholds: Vec<Option<f64>>,
}

impl PosteriorSamples {
    pub fn len(&self) -> usize {
        self.draws.len()
    }

    pub fn is_empty(&self) -> bool {
        self.draws.is_empty()
    }

    pub fn n_indications(&self) -> usize {
        self.draws.first().map_or(0, |d| d.indications.len())
    }

    pub fn indication(&self, i: usize) -> impl Iterator<Item = &IndicationState> + '_ {
        self.draws.iter().map(move |d| &d.indications[i])
    }

    /// Posterior probability of the subgroup model for indication `i`.
    pub fn prob_m2(&self, i: usize) -> f64 {
        if self.draws.is_empty() {
            return 0.0;
        }
        let m2 = self.indication(i).filter(|s| s.model == SubModel::M2).count();
        m2 as f64 / self.draws.len() as f64
    }

    /// Threshold draws from the iterations in which indication `i` was under `M2`.
    pub fn subgroup_thresholds(&self, i: usize) -> Vec<f64> {
        self.indication(i)
            .filter(|s| s.model == SubModel::M2)
            .map(|s| s.x)
            .collect()
    }
}

/// Probability of `M1` in the full conditional of a model indicator.
pub fn prob_m1_conditional(p_m: f64, ll_m1: f64, ll_m2: f64) -> f64 {
    if p_m >= 1.0 {
        return 1.0;
    }
    if p_m <= 0.0 {
        return 0.0;
    }
    let d = ((-p_m).ln_1p() + ll_m2) - (p_m.ln() + ll_m1);
    if d > 0.0 {
        let e = (-d).exp();
        e / (1.0 + e)
    } else {
        1.0 / (1.0 + d.exp())
    }
}

#[derive(Clone, Copy)]
enum Block {
    Theta = 0,
    ThetaMinus = 1,
    LogDelta = 2,
    X = 3,
}

/// Chain state that is not part of the model: RNG, proposal scales and counters.
pub struct Sampler {
    stats: Vec<IndicationStats>,
    priors: PriorConfig,
    config: SamplerConfig,
    fixed_x: Vec<Option<f64>>,
    rng: ChaCha8Rng,
    log_scales: Vec<[f64; 4]>,
    adapt_steps: Vec<[u64; 4]>,
    log_scale_sigma_x: f64,
    adapt_steps_sigma_x: u64,
    acceptance: AcceptanceRates,
    adapting: bool,
    counting: bool,
}

impl Sampler {
    pub fn new(data: &TrialData, priors: &PriorConfig, config: &SamplerConfig) -> Result<Self> {
        if data.indications.is_empty() {
            return Err(Error::Data("trial data needs at least one indication".into()));
        }
        priors.validate()?;
        config.validate()?;
        let n = data.indications.len();
        let p = config.proposal;
        let init = [p.theta.ln(), p.theta_minus.ln(), p.log_delta.ln(), p.x.ln()];
        Ok(Sampler {
            stats: data.indications.iter().map(|ind| IndicationStats::new(&ind.patients)).collect(),
            priors: *priors,
            config: *config,
            fixed_x: vec![None; n],
            rng: ChaCha8Rng::seed_from_u64(config.seed),
            log_scales: vec![init; n],
            adapt_steps: vec![[0; 4]; n],
            log_scale_sigma_x: p.log_sigma_x.ln(),
            adapt_steps_sigma_x: 0,
            acceptance: AcceptanceRates::default(),
            adapting: false,
            counting: false,
        })
    }

    /// Hold `x_i` at the given value for every `Some` entry.
    pub fn with_fixed_thresholds(mut self, fixed: &[Option<f64>]) -> Result<Self> {
        if fixed.len() != self.stats.len() {
            return Err(Error::Config(format!(
                "{} fixed thresholds given for {} indications",
                fixed.len(),
                self.stats.len()
            )));
        }
        for x in fixed.iter().flatten() {
            crate::error::ensure_finite("fixed threshold", *x)?;
        }
        self.fixed_x = fixed.to_vec();
        Ok(self)
    }

    /// Deterministic starting point: all indications under `M1`, rates at
    /// their smoothed empirical values, thresholds at the biomarker median.
    pub fn initial_state(&self) -> ModelState {
        let pr = &self.priors;
        let indications: Vec<IndicationState> = self
            .stats
            .iter()
            .zip(&self.fixed_x)
            .map(|(s, fixed)| {
                let rate = (s.responders() as f64 + 0.5) / (s.n() as f64 + 1.0);
                let x = fixed.unwrap_or_else(|| s.median().unwrap_or(self.threshold_prior_center()));
                IndicationState {
                    model: SubModel::M1,
                    theta: logit(rate),
                    theta_minus: logit(rate),
                    delta: pr.a_delta / pr.b_delta,
                    x,
                }
            })
            .collect();
        let (mu_x, sigma_x) = match pr.threshold {
            ThresholdPrior::FixedNoBorrow { mu_x0, sigma_x0 } => (mu_x0, sigma_x0),
            _ => {
                let mean = indications.iter().map(|s| s.x).sum::<f64>() / indications.len() as f64;
                (mean, 1.0)
            }
        };
        ModelState {
            p_m: pr.a / (pr.a + pr.b),
            indications,
            mu_x,
            sigma_x,
        }
    }

    fn threshold_prior_center(&self) -> f64 {
        match self.priors.threshold {
            ThresholdPrior::FixedNoBorrow { mu_x0, .. } => mu_x0,
            _ => 0.0,
        }
    }

    /// Run the chain from [`Sampler::initial_state`] and collect the retained draws.
    pub fn run(mut self) -> PosteriorSamples {
        let mut state = self.initial_state();
        let cfg = self.config;
        let mut draws = Vec::with_capacity(cfg.n_draws());
        for t in 0..cfg.total_iters {
            self.adapting = cfg.adapt && t < cfg.burn_in;
            self.counting = t >= cfg.burn_in;
            self.sweep(&mut state);
            if t >= cfg.burn_in && (t - cfg.burn_in + 1).is_multiple_of(cfg.thin) {
                draws.push(state.clone());
            }
        }
        PosteriorSamples {
            draws,
            acceptance: self.acceptance,
            seed: cfg.seed,
            config: cfg,
            fixed_thresholds: self.fixed_x,
        }
    }

    pub fn sweep(&mut self, state: &mut ModelState) {
        self.update_p_m(state);
        for i in 0..self.stats.len() {
            self.update_model(state, i);
            self.update_theta(state, i);
            self.update_theta_minus_delta(state, i);
            self.update_x(state, i);
        }
        self.update_mu_x(state);
        self.update_sigma_x(state);
    }

    pub fn acceptance(&self) -> &AcceptanceRates {
        &self.acceptance
    }

    /// Exact draw `p_M ~ Beta(a + #M1, b + #M2)`.
    pub fn update_p_m(&mut self, state: &mut ModelState) {
        let n1 = state.indications.iter().filter(|s| s.model == SubModel::M1).count();
        let n2 = state.indications.len() - n1;
        let beta = Beta::new(self.priors.a + n1 as f64, self.priors.b + n2 as f64)
            .expect("validated beta parameters");
        let p: f64 = self.rng.sample(beta);
        state.p_m = p.clamp(P_M_FLOOR, 1.0 - f64::EPSILON / 2.0);
    }

    /// Refresh the inactive block from its prior, then redraw `M_i` from its
    /// full conditional; repeated `model_moves` times.
    pub fn update_model(&mut self, state: &mut ModelState, i: usize) {
        for _ in 0..self.config.model_moves {
            match state.indications[i].model {
                SubModel::M1 => self.refresh_m2_block(state, i),
                SubModel::M2 => self.refresh_m1_block(state, i),
            }
            let s = &state.indications[i];
            let stats = &self.stats[i];
            let p1 = prob_m1_conditional(
                state.p_m,
                stats.ll_m1(s.theta),
                stats.ll_m2(s.theta_minus, s.delta, s.x),
            );
            let u: f64 = self.rng.random();
            state.indications[i].model = if u < p1 { SubModel::M1 } else { SubModel::M2 };
        }
    }

    pub fn update_theta(&mut self, state: &mut ModelState, i: usize) {
        if state.indications[i].model != SubModel::M1 {
            self.refresh_m1_block(state, i);
            return;
        }
        let (mu, sd) = (self.priors.mu_theta, self.priors.sigma_theta);
        let current = state.indications[i].theta;
        let proposal = current + self.scale(i, Block::Theta) * self.std_normal();
        let stats = &self.stats[i];
        let target = |t: f64| stats.ll_m1(t) + density::normal(t, mu, sd);
        let log_ratio = target(proposal) - target(current);
        if self.metropolis(i, Block::Theta, log_ratio) {
            state.indications[i].theta = proposal;
        }
    }

    /// Two Metropolis steps under `M2`: `theta_minus` on its natural scale, then
    /// `log(delta)` with the Jacobian of the log transform.
    pub fn update_theta_minus_delta(&mut self, state: &mut ModelState, i: usize) {
        if state.indications[i].model != SubModel::M2 {
            self.refresh_subgroup_rates(state, i);
            return;
        }
        let pr = self.priors;
        let s = state.indications[i];

        let proposal = s.theta_minus + self.scale(i, Block::ThetaMinus) * self.std_normal();
        let stats = &self.stats[i];
        let target =
            |tm: f64| stats.ll_m2(tm, s.delta, s.x) + density::normal(tm, pr.mu_theta_minus, pr.sigma_theta_minus);
        let log_ratio = target(proposal) - target(s.theta_minus);
        if self.metropolis(i, Block::ThetaMinus, log_ratio) {
            state.indications[i].theta_minus = proposal;
        }

        let s = state.indications[i];
        let eta = s.delta.ln();
        let proposal = eta + self.scale(i, Block::LogDelta) * self.std_normal();
        let stats = &self.stats[i];
        let target = |eta: f64| {
            let d = eta.exp();
            stats.ll_m2(s.theta_minus, d, s.x) + density::gamma(d, pr.a_delta, pr.b_delta) + eta
        };
        let log_ratio = target(proposal) - target(eta);
        if self.metropolis(i, Block::LogDelta, log_ratio) {
            let d = proposal.exp();
            if d > 0.0 && d.is_finite() {
                state.indications[i].delta = d;
            }
        }
    }

    pub fn update_x(&mut self, state: &mut ModelState, i: usize) {
        if let Some(x) = self.fixed_x[i] {
            state.indications[i].x = x;
            return;
        }
        if state.indications[i].model != SubModel::M2 {
            state.indications[i].x = self.draw_x_prior(state);
            return;
        }
        let (mu, sd) = self.x_prior(state);
        let s = state.indications[i];
        let proposal = s.x + self.scale(i, Block::X) * self.std_normal();
        let stats = &self.stats[i];
        let target = |x: f64| stats.ll_m2(s.theta_minus, s.delta, x) + density::normal(x, mu, sd);
        let log_ratio = target(proposal) - target(s.x);
        if self.metropolis(i, Block::X, log_ratio) {
            state.indications[i].x = proposal;
        }
    }

    /// Exact normal-normal draw given all current thresholds.
    pub fn update_mu_x(&mut self, state: &mut ModelState) {
        if !self.hierarchy_active() {
            return;
        }
        let n = state.indications.len() as f64;
        let var_x = state.sigma_x * state.sigma_x;
        let precision = n / var_x + 1.0 / (self.priors.sigma * self.priors.sigma);
        let sum: f64 = state.indications.iter().map(|s| s.x).sum();
        let mean = sum / var_x / precision;
        state.mu_x = mean + self.std_normal() / precision.sqrt();
    }

    /// Metropolis on `log(sigma_x)` under the half-Cauchy prior; exact
    /// inverse-gamma draw of `sigma_x^2` under the conjugate variant.
    pub fn update_sigma_x(&mut self, state: &mut ModelState) {
        if !self.hierarchy_active() {
            return;
        }
        let ss: f64 = state.indications.iter().map(|s| (s.x - state.mu_x).powi(2)).sum();
        let n = state.indications.len() as f64;
        match self.priors.threshold {
            ThresholdPrior::HalfCauchy { gamma } => {
                // sum of normal log-densities as a function of log(sigma_x)
                let target = |eta: f64| {
                    let var = (2.0 * eta).exp();
                    -n * eta - 0.5 * ss / var + density::half_cauchy(eta.exp(), gamma) + eta
                };
                let eta = state.sigma_x.ln();
                let proposal = eta + self.log_scale_sigma_x.exp() * self.std_normal();
                let log_ratio = target(proposal) - target(eta);
                let alpha = log_ratio.min(0.0).exp();
                let accepted = self.rng.random::<f64>() < alpha;
                if self.adapting {
                    self.adapt_steps_sigma_x += 1;
                    let step = (self.adapt_steps_sigma_x as f64 + 1.0).powf(-0.6);
                    self.log_scale_sigma_x =
                        (self.log_scale_sigma_x + step * (alpha - TARGET_ACCEPTANCE)).clamp(MIN_LOG_SCALE, MAX_LOG_SCALE);
                }
                if self.counting {
                    self.acceptance.log_sigma_x.record(accepted);
                }
                if accepted {
                    let s = proposal.exp();
                    if s > 0.0 && s.is_finite() {
                        state.sigma_x = s;
                    }
                }
            }
            ThresholdPrior::InverseGamma { shape, scale } => {
                let gamma = Gamma::new(shape + 0.5 * n, 1.0 / (scale + 0.5 * ss)).expect("validated gamma parameters");
                let precision: f64 = self.rng.sample(gamma);
                let s = (1.0 / precision).sqrt();
                if s > 0.0 && s.is_finite() {
                    state.sigma_x = s;
                }
            }
            ThresholdPrior::FixedNoBorrow { .. } => {}
        }
    }

    fn hierarchy_active(&self) -> bool {
        self.priors.threshold.is_hierarchical() && self.fixed_x.iter().any(Option::is_none)
    }

    fn x_prior(&self, state: &ModelState) -> (f64, f64) {
        match self.priors.threshold {
            ThresholdPrior::FixedNoBorrow { mu_x0, sigma_x0 } => (mu_x0, sigma_x0),
            _ => (state.mu_x, state.sigma_x),
        }
    }

    fn draw_x_prior(&mut self, state: &ModelState) -> f64 {
        let (mu, sd) = self.x_prior(state);
        mu + sd * self.std_normal()
    }

    fn refresh_m1_block(&mut self, state: &mut ModelState, i: usize) {
        state.indications[i].theta = self.priors.mu_theta + self.priors.sigma_theta * self.std_normal();
    }

    fn refresh_subgroup_rates(&mut self, state: &mut ModelState, i: usize) {
        let pr = self.priors;
        state.indications[i].theta_minus = pr.mu_theta_minus + pr.sigma_theta_minus * self.std_normal();
        let gamma = Gamma::new(pr.a_delta, 1.0 / pr.b_delta).expect("validated gamma parameters");
        let d: f64 = self.rng.sample(gamma);
        if d > 0.0 {
            state.indications[i].delta = d;
        }
    }

    fn refresh_m2_block(&mut self, state: &mut ModelState, i: usize) {
        self.refresh_subgroup_rates(state, i);
        state.indications[i].x = match self.fixed_x[i] {
            Some(x) => x,
            None => self.draw_x_prior(state),
        };
    }

    fn std_normal(&mut self) -> f64 {
        self.rng.sample(StandardNormal)
    }

    fn scale(&self, i: usize, block: Block) -> f64 {
        self.log_scales[i][block as usize].exp()
    }

    /// Accept/reject and, during burn-in, a Robbins–Monro update of the block's log scale.
    fn metropolis(&mut self, i: usize, block: Block, log_ratio: f64) -> bool {
        let alpha = if log_ratio.is_nan() { 0.0 } else { log_ratio.min(0.0).exp() };
        let accepted = self.rng.random::<f64>() < alpha;
        let b = block as usize;
        if self.adapting {
            self.adapt_steps[i][b] += 1;
            let step = (self.adapt_steps[i][b] as f64 + 1.0).powf(-0.6);
            let ls = &mut self.log_scales[i][b];
            *ls = (*ls + step * (alpha - TARGET_ACCEPTANCE)).clamp(MIN_LOG_SCALE, MAX_LOG_SCALE);
        }
        if self.counting {
            let acc = &mut self.acceptance;
            match block {
                Block::Theta => acc.theta.record(accepted),
                Block::ThetaMinus => acc.theta_minus.record(accepted),
                Block::LogDelta => acc.log_delta.record(accepted),
                Block::X => acc.x.record(accepted),
            }
        }
        accepted
    }
}

pub fn run_chain(data: &TrialData, priors: &PriorConfig, config: &SamplerConfig) -> Result<PosteriorSamples> {
    Ok(Sampler::new(data, priors, config)?.run())
}

/// As [`run_chain`] with `x_i` held at `fixed[i]` wherever it is `Some`.
pub fn run_chain_with_fixed_thresholds(
    data: &TrialData,
    priors: &PriorConfig,
    config: &SamplerConfig,
    fixed: &[Option<f64>],
) -> Result<PosteriorSamples> {
    Ok(Sampler::new(data, priors, config)?.with_fixed_thresholds(fixed)?.run())
}

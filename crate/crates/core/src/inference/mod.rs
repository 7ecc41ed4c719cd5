//! Posterior inference over cue order, directions and thresholds.
//!
//! Two routes produce a [`StrategyPosterior`]: exhaustive enumeration of every
//! configuration ([`exhaustive_posterior`]) and collapsed Gibbs sampling
//! ([`gibbs_sample`]), which visits the cues one at a time and resamples each
//! cue's position, direction and threshold jointly.

mod exact;
mod gibbs;
mod thresholds;

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::likelihood::{epsilon_posterior, FitCounts, NoisePrior};
use crate::model::{StrategyKey, TtbStrategy};
use crate::special::{ln_gamma, log_beta_inc_half_unchecked};

pub use exact::{
    configuration_count, exhaustive_posterior, exhaustive_posterior_with_cap, ENUMERATION_CAP,
};
pub use gibbs::{gibbs_sample, Candidate, GibbsChain, Initialization, SamplerConfig};
pub use thresholds::{default_threshold_grid, ThresholdGrid};

#[derive(Clone, Debug, PartialEq)]
pub struct PosteriorEntry {
    pub strategy: TtbStrategy,
    pub counts: FitCounts,
    /// `ln p(g, d, t) + ln p(Y | X, g, d, t)`.
    pub log_posterior: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub enum PosteriorKind {
    Exact { probabilities: Vec<f64>, log_evidence: f64 },
    Sampled { burn_in: usize },
}

/// Either every configuration with its normalised probability, or an ordered
/// list of post-burn-in MCMC draws.
#[derive(Clone, Debug, PartialEq)]
pub struct StrategyPosterior {
    kind: PosteriorKind,
    entries: Vec<PosteriorEntry>,
    n_cues: usize,
}

/// A distinct strategy with its total posterior weight.
#[derive(Clone, Debug, PartialEq)]
pub struct WeightedStrategy {
    pub strategy: TtbStrategy,
    pub counts: FitCounts,
    pub log_posterior: f64,
    pub probability: f64,
}

impl StrategyPosterior {
    pub(crate) fn exact(entries: Vec<PosteriorEntry>, n_cues: usize) -> Self {
        let logs: Vec<f64> = entries.iter().map(|e| e.log_posterior).collect();
        let log_evidence = crate::special::log_sum_exp(&logs);
        let probabilities = logs.iter().map(|l| (l - log_evidence).exp()).collect();
        Self { kind: PosteriorKind::Exact { probabilities, log_evidence }, entries, n_cues }
    }

    pub(crate) fn sampled(entries: Vec<PosteriorEntry>, n_cues: usize, burn_in: usize) -> Self {
        Self { kind: PosteriorKind::Sampled { burn_in }, entries, n_cues }
    }

    /// Posterior made of a single strategy with probability one.
    pub fn point_mass(strategy: TtbStrategy, counts: FitCounts, log_posterior: f64) -> Self {
        let n_cues = strategy.n_cues();
        Self::exact(vec![PosteriorEntry { strategy, counts, log_posterior }], n_cues)
    }

    pub fn kind(&self) -> &PosteriorKind {
        &self.kind
    }

    pub fn is_exact(&self) -> bool {
        matches!(self.kind, PosteriorKind::Exact { .. })
    }

    pub fn entries(&self) -> &[PosteriorEntry] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn n_cues(&self) -> usize {
        self.n_cues
    }

    /// Weight of each entry: normalised probability, or `1/S` per draw.
    pub fn weights(&self) -> Vec<f64> {
        match &self.kind {
            PosteriorKind::Exact { probabilities, .. } => probabilities.clone(),
            PosteriorKind::Sampled { .. } => {
                vec![1.0 / self.entries.len() as f64; self.entries.len()]
            }
        }
    }

    /// Distinct strategies with summed weights, most probable first. Ties keep
    /// first-seen order.
    pub fn aggregated(&self) -> Vec<WeightedStrategy> {
        let mut index: HashMap<StrategyKey, usize> = HashMap::new();
        let mut out: Vec<WeightedStrategy> = Vec::new();
        for (e, w) in self.entries.iter().zip(self.weights()) {
            match index.get(&e.strategy.key()) {
                Some(&k) => out[k].probability += w,
                None => {
                    index.insert(e.strategy.key(), out.len());
                    out.push(WeightedStrategy {
                        strategy: e.strategy.clone(),
                        counts: e.counts,
                        log_posterior: e.log_posterior,
                        probability: w,
                    });
                }
            }
        }
        out.sort_by(|a, b| b.probability.total_cmp(&a.probability));
        out
    }

    /// Highest-posterior entry; the earliest one wins ties.
    pub fn map_entry(&self) -> Option<&PosteriorEntry> {
        self.entries.iter().reduce(|best, e| {
            if e.log_posterior > best.log_posterior {
                e
            } else {
                best
            }
        })
    }

    /// Posterior mean of the flip rate ε, averaged over strategies.
    pub fn epsilon_mean(&self, prior: &NoisePrior) -> Result<f64> {
        if self.is_empty() {
            return Err(Error::EmptyPosterior);
        }
        let mut mean = 0.0;
        for (e, w) in self.entries.iter().zip(self.weights()) {
            mean += w * epsilon_posterior(&e.counts, prior)?.mean();
        }
        Ok(mean)
    }
}

/// `M × M` matrix: entry `[m][r]` is the posterior probability that cue `m`
/// is searched at position `r`.
pub fn cue_rank_marginals(posterior: &StrategyPosterior) -> Result<Vec<Vec<f64>>> {
    if posterior.is_empty() {
        return Err(Error::EmptyPosterior);
    }
    let m = posterior.n_cues();
    let mut out = vec![vec![0.0; m]; m];
    for (e, w) in posterior.entries().iter().zip(posterior.weights()) {
        for (pos, &cue) in e.strategy.order().iter().enumerate() {
            out[cue][pos] += w;
        }
    }
    Ok(out)
}

/// Log marginal likelihood from unweighted counts, memoised on the counts.
/// The sampler evaluates the same few count triples over and over.
#[derive(Debug)]
pub(crate) struct Scorer {
    prior: NoisePrior,
    weight: f64,
    log_norm: f64,
    log_prior: f64,
    cache: HashMap<(u64, u64), f64>,
}

impl Scorer {
    pub(crate) fn new(prior: NoisePrior, weight: f64, grid: &ThresholdGrid) -> Self {
        Self {
            prior,
            weight,
            log_norm: prior.log_normalizer(),
            log_prior: log_prior(grid),
            cache: HashMap::new(),
        }
    }

    /// `ln p(g, d, t) + ln p(Y | g, d, t)` for raw `[correct, incorrect, undecided]`.
    pub(crate) fn log_posterior(&mut self, raw: [u64; 3]) -> f64 {
        let (prior, weight) = (self.prior, self.weight);
        let beta_term = *self.cache.entry((raw[1], raw[0])).or_insert_with(|| {
            log_beta_inc_half_unchecked(
                raw[1] as f64 * weight + prior.alpha(),
                raw[0] as f64 * weight + prior.beta(),
            )
        });
        self.log_prior + raw[2] as f64 * weight * 0.5f64.ln() + beta_term - self.log_norm
    }
}

/// Uniform prior over orders, directions and threshold candidates.
pub(crate) fn log_prior(grid: &ThresholdGrid) -> f64 {
    let m = grid.n_cues() as f64;
    let thresholds: f64 = grid.sizes().iter().map(|&k| (k as f64).ln()).sum();
    -ln_gamma(m + 1.0) - m * std::f64::consts::LN_2 - thresholds
}

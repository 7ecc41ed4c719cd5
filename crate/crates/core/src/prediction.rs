//! Posterior predictive probabilities for new comparisons and the accuracy
//! metric used by the benchmarks.

use serde::{Deserialize, Serialize};

use crate::baselines::LogRegModel;
use crate::error::{Error, Result};
use crate::inference::StrategyPosterior;
use crate::likelihood::{epsilon_posterior, NoisePrior};
use crate::model::{ttb_predict_delta, Outcome, PairwiseComparisons, TtbStrategy};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DecidedLabel {
    First,
    Second,
    /// `p_first` is exactly 1/2.
    Coin,
}

impl DecidedLabel {
    pub fn from_probability(p_first: f64) -> Self {
        if p_first > 0.5 {
            DecidedLabel::First
        } else if p_first < 0.5 {
            DecidedLabel::Second
        } else {
            DecidedLabel::Coin
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PredictiveResult {
    pub p_first: f64,
    pub p_second: f64,
    pub decided: DecidedLabel,
}

impl PredictiveResult {
    pub fn from_p_first(p_first: f64) -> Self {
        let p_first = p_first.clamp(0.0, 1.0);
        Self { p_first, p_second: 1.0 - p_first, decided: DecidedLabel::from_probability(p_first) }
    }
}

/// Anything that assigns a probability to "first item wins".
pub trait PairwisePredictor {
    fn n_cues(&self) -> usize;
    fn p_first_delta(&self, delta: &[f64]) -> f64;

    fn p_first(&self, x1: &[f64], x2: &[f64]) -> Result<f64> {
        let m = self.n_cues();
        for x in [x1, x2] {
            if x.len() != m {
                return Err(Error::DimensionMismatch { expected: m, found: x.len() });
            }
        }
        let delta: Vec<f64> = x1.iter().zip(x2).map(|(a, b)| a - b).collect();
        Ok(self.p_first_delta(&delta))
    }
}

/// Posterior predictive with repeated draws merged, so each distinct
/// strategy is evaluated once per pair.
#[derive(Clone, Debug)]
pub struct PosteriorPredictor {
    n_cues: usize,
    /// (strategy, posterior weight, probability that its verdict is not flipped)
    components: Vec<(TtbStrategy, f64, f64)>,
}

impl PosteriorPredictor {
    pub fn new(posterior: &StrategyPosterior, prior: &NoisePrior) -> Result<Self> {
        if posterior.is_empty() {
            return Err(Error::EmptyPosterior);
        }
        let mut components = Vec::new();
        for ws in posterior.aggregated() {
            let keep = epsilon_posterior(&ws.counts, prior)?.prob_no_flip();
            components.push((ws.strategy, ws.probability, keep));
        }
        Ok(Self { n_cues: posterior.n_cues(), components })
    }

    pub fn predict(&self, x1: &[f64], x2: &[f64]) -> Result<PredictiveResult> {
        self.p_first(x1, x2).map(PredictiveResult::from_p_first)
    }
}

impl PairwisePredictor for PosteriorPredictor {
    fn n_cues(&self) -> usize {
        self.n_cues
    }

    fn p_first_delta(&self, delta: &[f64]) -> f64 {
        let mut p = 0.0;
        let mut total = 0.0;
        for (s, w, keep) in &self.components {
            total += w;
            p += w * match ttb_predict_delta(s, delta) {
                Outcome::FirstWins => *keep,
                Outcome::SecondWins => 1.0 - keep,
                Outcome::Undecided => 0.5,
            };
        }
        p / total
    }
}

/// A single deterministic strategy: probability 1, 0 or 1/2.
impl PairwisePredictor for TtbStrategy {
    fn n_cues(&self) -> usize {
        TtbStrategy::n_cues(self)
    }

    fn p_first_delta(&self, delta: &[f64]) -> f64 {
        match ttb_predict_delta(self, delta) {
            Outcome::FirstWins => 1.0,
            Outcome::SecondWins => 0.0,
            Outcome::Undecided => 0.5,
        }
    }
}

impl PairwisePredictor for LogRegModel {
    fn n_cues(&self) -> usize {
        self.weights.len()
    }

    fn p_first_delta(&self, delta: &[f64]) -> f64 {
        let zero = vec![0.0; delta.len()];
        self.predict(delta, &zero).expect("lengths checked by caller")
    }
}

/// Posterior predictive probability that `x1` beats `x2`.
pub fn predictive_prob(
    posterior: &StrategyPosterior,
    prior: &NoisePrior,
    x1: &[f64],
    x2: &[f64],
) -> Result<PredictiveResult> {
    PosteriorPredictor::new(posterior, prior)?.predict(x1, x2)
}

/// Mean credit over the test pairs: 1 for a correct decided label, 0 for a
/// wrong one, 1/2 when the predictor sits exactly at 1/2.
pub fn evaluate_accuracy<P: PairwisePredictor + ?Sized>(
    predictor: &P,
    test: &PairwiseComparisons,
) -> Result<f64> {
    if test.is_empty() {
        return Err(Error::EmptyTestSet);
    }
    if test.n_cues() != predictor.n_cues() {
        return Err(Error::DimensionMismatch { expected: predictor.n_cues(), found: test.n_cues() });
    }
    let mut credit = 0.0;
    for k in 0..test.len() {
        let p = predictor.p_first_delta(test.delta(k));
        credit += match DecidedLabel::from_probability(p) {
            DecidedLabel::Coin => 0.5,
            DecidedLabel::First if test.label(k) => 1.0,
            DecidedLabel::Second if !test.label(k) => 1.0,
            _ => 0.0,
        };
    }
    Ok(credit / test.len() as f64)
}

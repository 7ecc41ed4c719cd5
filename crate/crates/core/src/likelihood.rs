//! Flip-noise likelihood of a TTB strategy with the noise rate integrated out.
//!
//! Each pair is either decided correctly, decided incorrectly, or left
//! undecided by the strategy. With a Beta(α, β) prior on ε restricted to
//! (0, 1/2) the marginal likelihood is
//!
//! ```text
//! p(Y | X, g, d) = (1/2)^N∅ · B½(Nᵢ + α, N꜀ + β) / B½(α, β)
//! ```
//!
//! Counts carry the pair weight, so they are reals.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{ttb_predict_delta, Outcome, PairwiseComparisons, TtbStrategy};
use crate::special::{log_beta_inc_half, log_beta_inc_half_unchecked, trunc_beta_mean};

/// Beta prior on the flip rate, truncated to (0, 1/2).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NoisePrior {
    alpha: f64,
    beta: f64,
}

impl NoisePrior {
    pub fn new(alpha: f64, beta: f64) -> Result<Self> {
        if alpha.is_finite() && beta.is_finite() && alpha > 0.0 && beta > 0.0 {
            Ok(Self { alpha, beta })
        } else {
            Err(Error::invalid(format!(
                "noise prior needs positive shape parameters, got ({alpha}, {beta})"
            )))
        }
    }

    pub fn uniform() -> Self {
        Self { alpha: 1.0, beta: 1.0 }
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    /// `ln B½(α, β)`, the normaliser of the truncated prior.
    pub fn log_normalizer(&self) -> f64 {
        log_beta_inc_half_unchecked(self.alpha, self.beta)
    }
}

impl Default for NoisePrior {
    fn default() -> Self {
        Self::uniform()
    }
}

/// Weighted numbers of correct, incorrect and undecided predictions.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct FitCounts {
    pub n_correct: f64,
    pub n_incorrect: f64,
    pub n_undecided: f64,
}

impl FitCounts {
    pub fn new(n_correct: f64, n_incorrect: f64, n_undecided: f64) -> Result<Self> {
        let c = Self { n_correct, n_incorrect, n_undecided };
        if [n_correct, n_incorrect, n_undecided].iter().all(|v| v.is_finite() && *v >= 0.0) {
            Ok(c)
        } else {
            Err(Error::invalid(format!("counts must be nonnegative, got {c:?}")))
        }
    }

    pub fn total(&self) -> f64 {
        self.n_correct + self.n_incorrect + self.n_undecided
    }

    pub fn scaled(&self, weight: f64) -> Self {
        Self {
            n_correct: self.n_correct * weight,
            n_incorrect: self.n_incorrect * weight,
            n_undecided: self.n_undecided * weight,
        }
    }
}

impl std::ops::Add for FitCounts {
    type Output = FitCounts;

    fn add(self, rhs: Self) -> Self {
        Self {
            n_correct: self.n_correct + rhs.n_correct,
            n_incorrect: self.n_incorrect + rhs.n_incorrect,
            n_undecided: self.n_undecided + rhs.n_undecided,
        }
    }
}

/// Posterior of ε given a strategy: Beta(a, b) restricted to (0, 1/2).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TruncatedBetaPosterior {
    pub a: f64,
    pub b: f64,
}

impl TruncatedBetaPosterior {
    pub fn mean(&self) -> f64 {
        trunc_beta_mean(self.a, self.b).expect("parameters validated on construction")
    }

    /// Probability that the next decided comparison is not flipped.
    pub fn prob_no_flip(&self) -> f64 {
        1.0 - self.mean()
    }
}

/// Classify one predicted outcome against a label.
pub(crate) fn classify(outcome: Outcome, first_wins: bool) -> Verdict {
    match outcome {
        Outcome::Undecided => Verdict::Undecided,
        Outcome::FirstWins if first_wins => Verdict::Correct,
        Outcome::SecondWins if !first_wins => Verdict::Correct,
        _ => Verdict::Incorrect,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum Verdict {
    Correct,
    Incorrect,
    Undecided,
}

/// Unweighted integer counts.
pub(crate) fn raw_counts(strategy: &TtbStrategy, data: &PairwiseComparisons) -> [u64; 3] {
    let mut raw = [0u64; 3];
    for k in 0..data.len() {
        match classify(ttb_predict_delta(strategy, data.delta(k)), data.label(k)) {
            Verdict::Correct => raw[0] += 1,
            Verdict::Incorrect => raw[1] += 1,
            Verdict::Undecided => raw[2] += 1,
        }
    }
    raw
}

pub(crate) fn weighted(raw: [u64; 3], weight: f64) -> FitCounts {
    FitCounts {
        n_correct: raw[0] as f64 * weight,
        n_incorrect: raw[1] as f64 * weight,
        n_undecided: raw[2] as f64 * weight,
    }
}

/// Score every pair with `strategy` and tally the verdicts, scaled by the
/// data's pair weight.
pub fn count_outcomes(strategy: &TtbStrategy, data: &PairwiseComparisons) -> Result<FitCounts> {
    if !data.is_empty() && data.n_cues() != strategy.n_cues() {
        return Err(Error::DimensionMismatch {
            expected: strategy.n_cues(),
            found: data.n_cues(),
        });
    }
    Ok(weighted(raw_counts(strategy, data), data.weight()))
}

/// Log marginal likelihood with ε integrated out.
pub fn log_marginal_likelihood(counts: &FitCounts, prior: &NoisePrior) -> Result<f64> {
    let counts = FitCounts::new(counts.n_correct, counts.n_incorrect, counts.n_undecided)?;
    Ok(counts.n_undecided * 0.5f64.ln()
        + log_beta_inc_half(counts.n_incorrect + prior.alpha, counts.n_correct + prior.beta)?
        - prior.log_normalizer())
}

/// Conditional posterior of ε given a strategy's fit counts.
pub fn epsilon_posterior(counts: &FitCounts, prior: &NoisePrior) -> Result<TruncatedBetaPosterior> {
    let counts = FitCounts::new(counts.n_correct, counts.n_incorrect, counts.n_undecided)?;
    Ok(TruncatedBetaPosterior {
        a: counts.n_incorrect + prior.alpha,
        b: counts.n_correct + prior.beta,
    })
}

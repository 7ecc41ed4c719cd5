use std::path::Path;

use crate::baselines::CueValidity;
use crate::error::{Error, Result};
use crate::inference::{cue_rank_marginals, GibbsChain, Initialization, StrategyPosterior, ThresholdGrid};
use crate::likelihood::NoisePrior;
use crate::model::PairwiseComparisons;
use crate::svg;

#[derive(Clone, Debug, PartialEq)]
pub struct LogPosteriorTrace {
    /// Entry 0 is the random starting state, entry `k` the state after sweep `k`.
    pub log_post: Vec<f64>,
    pub scaled: Vec<f64>,
}

impl LogPosteriorTrace {
    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let mut w = csv::Writer::from_path(path)?;
        w.write_record(["iteration", "log_post", "scaled"])?;
        for (k, (l, s)) in self.log_post.iter().zip(&self.scaled).enumerate() {
            w.write_record([k.to_string(), l.to_string(), s.to_string()])?;
        }
        w.flush().map_err(|source| Error::Io { path: path.to_path_buf(), source })
    }
}

/// Rescale to `[0, 1]`. A constant sequence maps to all ones.
pub fn min_max_scaled(values: &[f64]) -> Vec<f64> {
    let lo = values.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if hi > lo {
        values.iter().map(|v| (v - lo) / (hi - lo)).collect()
    } else {
        vec![1.0; values.len()]
    }
}

/// Unnormalised log posterior of one Gibbs chain from a random start,
/// recorded before the first sweep and after each of `iterations` sweeps.
pub fn trace_log_posterior(
    data: &PairwiseComparisons,
    prior: &NoisePrior,
    iterations: usize,
    seed: u64,
    thresholds: Option<&ThresholdGrid>,
) -> Result<LogPosteriorTrace> {
    if iterations == 0 {
        return Err(Error::invalid("trace needs at least one iteration"));
    }
    let mut chain = GibbsChain::new(data, prior, thresholds, seed, Initialization::Random)?;
    let mut log_post = Vec::with_capacity(iterations + 1);
    log_post.push(chain.log_posterior());
    for _ in 0..iterations {
        chain.sweep();
        log_post.push(chain.log_posterior());
    }
    let scaled = min_max_scaled(&log_post);
    Ok(LogPosteriorTrace { log_post, scaled })
}

/// Write `ranks.csv` (cue, rank, probability, validity), one row per cue and
/// 1-based search position, and optionally an SVG heatmap. Returns the
/// rank-marginal matrix.
pub fn export_cue_rank_heatmap(
    posterior: &StrategyPosterior,
    validities: &[CueValidity],
    cue_names: &[String],
    csv_path: &Path,
    svg_path: Option<&Path>,
) -> Result<Vec<Vec<f64>>> {
    let ranks = cue_rank_marginals(posterior)?;
    let m = ranks.len();
    if validities.len() != m || cue_names.len() != m {
        return Err(Error::DimensionMismatch { expected: m, found: validities.len().min(cue_names.len()) });
    }
    let mut w = csv::Writer::from_path(csv_path)?;
    w.write_record(["cue", "rank", "probability", "validity"])?;
    for (cue, row) in ranks.iter().enumerate() {
        for (pos, p) in row.iter().enumerate() {
            w.write_record([
                cue_names[cue].clone(),
                (pos + 1).to_string(),
                p.to_string(),
                validities[cue].validity.to_string(),
            ])?;
        }
    }
    w.flush().map_err(|source| Error::Io { path: csv_path.to_path_buf(), source })?;

    if let Some(path) = svg_path {
        let cols: Vec<String> = (1..=m).map(|r| r.to_string()).collect();
        let v: Vec<f64> = validities.iter().map(|c| c.validity).collect();
        let doc = svg::matrix_heatmap("cue rank posterior", cue_names, &cols, &ranks, Some(("validity", &v)));
        std::fs::write(path, doc).map_err(|source| Error::Io { path: path.to_path_buf(), source })?;
    }
    Ok(ranks)
}

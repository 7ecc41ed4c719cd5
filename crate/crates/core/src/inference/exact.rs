use super::{PosteriorEntry, Scorer, StrategyPosterior, ThresholdGrid};
use crate::error::{Error, Result};
use crate::likelihood::{raw_counts, weighted, NoisePrior};
use crate::model::{Direction, PairwiseComparisons, TtbStrategy};

/// Largest configuration space scored exhaustively by default.
pub const ENUMERATION_CAP: usize = 1_000_000;

/// `M! · 2^M · ∏ K_m`, as a float so large spaces do not overflow.
pub fn configuration_count(grid: &ThresholdGrid) -> f64 {
    let m = grid.n_cues();
    let orders: f64 = (1..=m).map(|k| k as f64).product();
    let thresholds: f64 = grid.sizes().iter().map(|&k| k as f64).product();
    orders * 2f64.powi(m as i32) * thresholds
}

/// Advance to the next permutation in lexicographic order.
fn next_permutation(p: &mut [usize]) -> bool {
    let Some(i) = (1..p.len()).rev().find(|&i| p[i - 1] < p[i]) else {
        return false;
    };
    let j = (i..p.len()).rev().find(|&j| p[j] > p[i - 1]).expect("pivot has a successor");
    p.swap(i - 1, j);
    p[i..].reverse();
    true
}

/// Threshold indices with the last cue varying fastest; false after wrapping.
fn advance_odometer(idx: &mut [usize], sizes: &[usize]) -> bool {
    for c in (0..idx.len()).rev() {
        idx[c] += 1;
        if idx[c] < sizes[c] {
            return true;
        }
        idx[c] = 0;
    }
    false
}

/// Score every configuration. Enumeration order: orders lexicographically,
/// then direction masks (bit `m` set means cue `m` is negative), then
/// threshold indices with the last cue varying fastest.
pub fn exhaustive_posterior(
    data: &PairwiseComparisons,
    prior: &NoisePrior,
    thresholds: Option<&ThresholdGrid>,
) -> Result<StrategyPosterior> {
    exhaustive_posterior_with_cap(data, prior, thresholds, ENUMERATION_CAP)
}

pub fn exhaustive_posterior_with_cap(
    data: &PairwiseComparisons,
    prior: &NoisePrior,
    thresholds: Option<&ThresholdGrid>,
    cap: usize,
) -> Result<StrategyPosterior> {
    let m = data.n_cues();
    let zeros = ThresholdGrid::zeros(m);
    let grid = thresholds.unwrap_or(&zeros);
    if grid.n_cues() != m {
        return Err(Error::DimensionMismatch { expected: m, found: grid.n_cues() });
    }
    let total = configuration_count(grid);
    if total > cap as f64 {
        return Err(Error::EnumerationCap { configurations: total, cap });
    }

    let mut scorer = Scorer::new(*prior, data.weight(), grid);
    let sizes = grid.sizes();
    let mut entries = Vec::with_capacity(total as usize);
    let mut order: Vec<usize> = (0..m).collect();
    loop {
        for mask in 0..(1usize << m) {
            let directions: Vec<Direction> = (0..m)
                .map(|c| if mask >> c & 1 == 1 { Direction::Negative } else { Direction::Positive })
                .collect();
            let mut idx = vec![0usize; m];
            loop {
                let ts = (0..m).map(|c| grid.candidates(c)[idx[c]]).collect();
                let strategy =
                    TtbStrategy::from_parts_unchecked(order.clone(), directions.clone(), ts);
                let raw = raw_counts(&strategy, data);
                entries.push(PosteriorEntry {
                    log_posterior: scorer.log_posterior(raw),
                    counts: weighted(raw, data.weight()),
                    strategy,
                });
                if !advance_odometer(&mut idx, &sizes) {
                    break;
                }
            }
        }
        if !next_permutation(&mut order) {
            break;
        }
    }
    Ok(StrategyPosterior::exact(entries, m))
}

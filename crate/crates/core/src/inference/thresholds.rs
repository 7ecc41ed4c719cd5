use crate::error::{Error, Result};
use crate::model::PairwiseComparisons;

/// Candidate discrimination thresholds per cue, with a uniform prior over the
/// candidates of each cue.
#[derive(Clone, Debug, PartialEq)]
pub struct ThresholdGrid {
    per_cue: Vec<Vec<f64>>,
}

impl ThresholdGrid {
    /// Each cue's list must be sorted ascending, distinct, nonnegative and
    /// start at 0.
    pub fn new(per_cue: Vec<Vec<f64>>) -> Result<Self> {
        Self::validated(per_cue, true)
    }

    /// All thresholds pinned at 0: the plain TTB model.
    pub fn zeros(n_cues: usize) -> Self {
        Self { per_cue: vec![vec![0.0]; n_cues] }
    }

    /// One fixed threshold per cue. Unlike [`ThresholdGrid::new`] the value
    /// need not be 0; used when the thresholds are known rather than learned.
    pub fn fixed(values: &[f64]) -> Result<Self> {
        Self::validated(values.iter().map(|&t| vec![t]).collect(), false)
    }

    fn validated(per_cue: Vec<Vec<f64>>, require_zero: bool) -> Result<Self> {
        if per_cue.is_empty() {
            return Err(Error::invalid("threshold grid needs at least one cue"));
        }
        for (m, ts) in per_cue.iter().enumerate() {
            if ts.is_empty() {
                return Err(Error::invalid(format!("cue {} has no threshold candidates", m + 1)));
            }
            if ts.iter().any(|t| !(t.is_finite() && *t >= 0.0)) {
                return Err(Error::invalid(format!("cue {} has a negative threshold", m + 1)));
            }
            if ts.windows(2).any(|w| w[0] >= w[1]) {
                return Err(Error::invalid(format!(
                    "thresholds of cue {} must be strictly ascending",
                    m + 1
                )));
            }
            if require_zero && ts[0] != 0.0 {
                return Err(Error::invalid(format!("thresholds of cue {} must include 0", m + 1)));
            }
        }
        Ok(Self { per_cue })
    }

    pub fn n_cues(&self) -> usize {
        self.per_cue.len()
    }

    pub fn candidates(&self, cue: usize) -> &[f64] {
        &self.per_cue[cue]
    }

    pub fn sizes(&self) -> Vec<usize> {
        self.per_cue.iter().map(Vec::len).collect()
    }

    pub fn per_cue(&self) -> &[Vec<f64>] {
        &self.per_cue
    }
}

/// Linear interpolation between order statistics (`h = (n - 1) p`).
fn quantile_sorted(sorted: &[f64], p: f64) -> f64 {
    let h = (sorted.len() - 1) as f64 * p;
    let lo = h.floor() as usize;
    let hi = h.ceil() as usize;
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

/// `{0}` plus the `k/K` quantiles (`k = 1..K-1`) of each cue's absolute
/// differences over the training pairs. Cues whose differences are all equal
/// get `{0}` only.
pub fn default_threshold_grid(data: &PairwiseComparisons, k: usize) -> Result<ThresholdGrid> {
    if k == 0 {
        return Err(Error::invalid("threshold grid size K must be at least 1"));
    }
    let m = data.n_cues();
    let mut per_cue = Vec::with_capacity(m);
    for cue in 0..m {
        let mut abs: Vec<f64> = (0..data.len()).map(|p| data.delta(p)[cue].abs()).collect();
        abs.sort_by(f64::total_cmp);
        let mut grid = vec![0.0];
        let degenerate = abs.first().zip(abs.last()).is_none_or(|(lo, hi)| lo == hi);
        if !degenerate {
            for i in 1..k {
                let q = quantile_sorted(&abs, i as f64 / k as f64);
                if q > *grid.last().expect("grid starts non-empty") {
                    grid.push(q);
                }
            }
        }
        per_cue.push(grid);
    }
    ThresholdGrid::new(per_cue)
}

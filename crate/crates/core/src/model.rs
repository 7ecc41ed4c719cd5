//! Deterministic Take The Best predictor and the pairwise comparison data it
//! is trained on.
//!
//! Cue indices are 0-based in the API. Anything rendered for humans (CSV,
//! [`TtbStrategy`]'s `Display`) is 1-based.

use std::collections::HashSet;
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Items described by `M` real-valued cues, each with a criterion value.
#[derive(Clone, Debug, PartialEq)]
pub struct ItemTable {
    items: Vec<Vec<f64>>,
    criterion: Vec<f64>,
    cue_names: Vec<String>,
}

impl ItemTable {
    pub fn new(items: Vec<Vec<f64>>, criterion: Vec<f64>, cue_names: Vec<String>) -> Result<Self> {
        let m = cue_names.len();
        if m == 0 {
            return Err(Error::invalid("item table needs at least one cue"));
        }
        if items.len() != criterion.len() {
            return Err(Error::invalid(format!(
                "{} items but {} criterion values",
                items.len(),
                criterion.len()
            )));
        }
        for row in &items {
            if row.len() != m {
                return Err(Error::DimensionMismatch { expected: m, found: row.len() });
            }
            if row.iter().any(|v| !v.is_finite()) {
                return Err(Error::invalid("cue values must be finite"));
            }
        }
        if criterion.iter().any(|v| !v.is_finite()) {
            return Err(Error::invalid("criterion values must be finite"));
        }
        Ok(Self { items, criterion, cue_names })
    }

    /// Table with generated cue names `cue1..cueM`.
    pub fn from_rows(items: Vec<Vec<f64>>, criterion: Vec<f64>) -> Result<Self> {
        let m = items.first().map_or(0, Vec::len);
        let names = (1..=m).map(|k| format!("cue{k}")).collect();
        Self::new(items, criterion, names)
    }

    pub fn n_items(&self) -> usize {
        self.items.len()
    }

    pub fn n_cues(&self) -> usize {
        self.cue_names.len()
    }

    pub fn item(&self, i: usize) -> &[f64] {
        &self.items[i]
    }

    pub fn items(&self) -> &[Vec<f64>] {
        &self.items
    }

    pub fn criterion(&self) -> &[f64] {
        &self.criterion
    }

    pub fn cue_names(&self) -> &[String] {
        &self.cue_names
    }

    /// Rows picked by `indices`, in that order.
    pub fn subset(&self, indices: &[usize]) -> ItemTable {
        ItemTable {
            items: indices.iter().map(|&i| self.items[i].clone()).collect(),
            criterion: indices.iter().map(|&i| self.criterion[i]).collect(),
            cue_names: self.cue_names.clone(),
        }
    }
}

/// One observed comparison: `first_wins` is `y_ij = 1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Comparison {
    pub first: usize,
    pub second: usize,
    pub first_wins: bool,
}

/// Labelled pairs over a shared set of feature vectors, with a likelihood
/// exponent applied to every pair.
#[derive(Clone, Debug)]
pub struct PairwiseComparisons {
    items: Arc<Vec<Vec<f64>>>,
    pairs: Vec<Comparison>,
    deltas: Vec<f64>,
    n_cues: usize,
    weight: f64,
}

impl PairwiseComparisons {
    pub fn new(items: Vec<Vec<f64>>, pairs: Vec<Comparison>, weight: f64) -> Result<Self> {
        let n_cues = items.first().map_or(0, Vec::len);
        if n_cues == 0 {
            return Err(Error::invalid("comparisons need items with at least one cue"));
        }
        Self::with_shared_items(Arc::new(items), pairs, weight)
    }

    pub fn with_shared_items(
        items: Arc<Vec<Vec<f64>>>,
        pairs: Vec<Comparison>,
        weight: f64,
    ) -> Result<Self> {
        if !(weight.is_finite() && weight > 0.0) {
            return Err(Error::invalid(format!("pair weight must be positive, got {weight}")));
        }
        let n_cues = items.first().map_or(0, Vec::len);
        if let Some(bad) = items.iter().find(|x| x.len() != n_cues) {
            return Err(Error::DimensionMismatch { expected: n_cues, found: bad.len() });
        }
        let mut seen = HashSet::with_capacity(pairs.len());
        let mut deltas = Vec::with_capacity(pairs.len() * n_cues);
        for p in &pairs {
            if p.first >= items.len() || p.second >= items.len() {
                return Err(Error::invalid(format!(
                    "pair ({}, {}) references a missing item",
                    p.first, p.second
                )));
            }
            if p.first == p.second {
                return Err(Error::invalid(format!("pair compares item {} with itself", p.first)));
            }
            let key = (p.first.min(p.second), p.first.max(p.second));
            if !seen.insert(key) {
                return Err(Error::invalid(format!(
                    "duplicated pair ({}, {})",
                    p.first, p.second
                )));
            }
            let (a, b) = (&items[p.first], &items[p.second]);
            deltas.extend(a.iter().zip(b).map(|(x, y)| x - y));
        }
        Ok(Self { items, pairs, deltas, n_cues, weight })
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn n_cues(&self) -> usize {
        self.n_cues
    }

    pub fn n_items(&self) -> usize {
        self.items.len()
    }

    pub fn weight(&self) -> f64 {
        self.weight
    }

    pub fn pairs(&self) -> &[Comparison] {
        &self.pairs
    }

    pub fn items(&self) -> &[Vec<f64>] {
        &self.items
    }

    /// `x_first - x_second` for pair `k`.
    pub fn delta(&self, k: usize) -> &[f64] {
        &self.deltas[k * self.n_cues..(k + 1) * self.n_cues]
    }

    pub fn label(&self, k: usize) -> bool {
        self.pairs[k].first_wins
    }

    /// Feature vectors `(x_first, x_second)` of pair `k`.
    pub fn pair_items(&self, k: usize) -> (&[f64], &[f64]) {
        let p = self.pairs[k];
        (&self.items[p.first], &self.items[p.second])
    }

    pub fn with_weight(&self, weight: f64) -> Result<Self> {
        if !(weight.is_finite() && weight > 0.0) {
            return Err(Error::invalid(format!("pair weight must be positive, got {weight}")));
        }
        Ok(Self { weight, ..self.clone() })
    }

    /// Same pairs with every label inverted.
    pub fn with_flipped_labels(&self) -> Self {
        let pairs = self
            .pairs
            .iter()
            .map(|p| Comparison { first_wins: !p.first_wins, ..*p })
            .collect();
        Self { pairs, ..self.clone() }
    }

    /// Append pairs; used to grow a dataset in tests and simulations.
    pub fn extended(&self, extra: &[Comparison]) -> Result<Self> {
        let mut pairs = self.pairs.clone();
        pairs.extend_from_slice(extra);
        Self::with_shared_items(Arc::clone(&self.items), pairs, self.weight)
    }
}

/// Preferred sign of a cue difference.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Direction {
    Positive,
    Negative,
}

impl Direction {
    pub const BOTH: [Direction; 2] = [Direction::Positive, Direction::Negative];

    pub fn sign(self) -> f64 {
        match self {
            Direction::Positive => 1.0,
            Direction::Negative => -1.0,
        }
    }

    pub fn flipped(self) -> Self {
        match self {
            Direction::Positive => Direction::Negative,
            Direction::Negative => Direction::Positive,
        }
    }

    pub fn symbol(self) -> char {
        match self {
            Direction::Positive => '+',
            Direction::Negative => '-',
        }
    }
}

/// Cue search order, per-cue directions and per-cue discrimination thresholds.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TtbStrategy {
    order: Vec<usize>,
    directions: Vec<Direction>,
    thresholds: Vec<f64>,
}

impl TtbStrategy {
    pub fn new(order: Vec<usize>, directions: Vec<Direction>, thresholds: Vec<f64>) -> Result<Self> {
        let m = order.len();
        if m == 0 {
            return Err(Error::invalid("strategy needs at least one cue"));
        }
        if directions.len() != m {
            return Err(Error::DimensionMismatch { expected: m, found: directions.len() });
        }
        if thresholds.len() != m {
            return Err(Error::DimensionMismatch { expected: m, found: thresholds.len() });
        }
        let mut seen = vec![false; m];
        for &c in &order {
            if c >= m || std::mem::replace(&mut seen[c], true) {
                return Err(Error::invalid(format!("cue order {order:?} is not a permutation")));
            }
        }
        if let Some(t) = thresholds.iter().find(|t| !(t.is_finite() && **t >= 0.0)) {
            return Err(Error::invalid(format!("threshold {t} is not a nonnegative real")));
        }
        Ok(Self { order, directions, thresholds })
    }

    /// Strategy with all thresholds at zero.
    pub fn without_thresholds(order: Vec<usize>, directions: Vec<Direction>) -> Result<Self> {
        let m = order.len();
        Self::new(order, directions, vec![0.0; m])
    }

    pub fn n_cues(&self) -> usize {
        self.order.len()
    }

    pub fn order(&self) -> &[usize] {
        &self.order
    }

    pub fn directions(&self) -> &[Direction] {
        &self.directions
    }

    pub fn thresholds(&self) -> &[f64] {
        &self.thresholds
    }

    /// Search position of each cue (inverse of the order).
    pub fn ranks(&self) -> Vec<usize> {
        let mut ranks = vec![0; self.order.len()];
        for (pos, &c) in self.order.iter().enumerate() {
            ranks[c] = pos;
        }
        ranks
    }

    pub fn with_flipped_directions(&self) -> Self {
        Self {
            directions: self.directions.iter().map(|d| d.flipped()).collect(),
            ..self.clone()
        }
    }

    /// Relabel cues: cue `c` becomes cue `perm[c]`.
    pub fn relabeled(&self, perm: &[usize]) -> Self {
        let m = self.order.len();
        let mut directions = vec![Direction::Positive; m];
        let mut thresholds = vec![0.0; m];
        for c in 0..m {
            directions[perm[c]] = self.directions[c];
            thresholds[perm[c]] = self.thresholds[c];
        }
        Self { order: self.order.iter().map(|&c| perm[c]).collect(), directions, thresholds }
    }

    /// Key usable for hashing; thresholds are compared bitwise.
    pub fn key(&self) -> StrategyKey {
        StrategyKey {
            order: self.order.clone(),
            directions: self.directions.clone(),
            thresholds: self.thresholds.iter().map(|t| t.to_bits()).collect(),
        }
    }

    pub(crate) fn from_parts_unchecked(
        order: Vec<usize>,
        directions: Vec<Direction>,
        thresholds: Vec<f64>,
    ) -> Self {
        Self { order, directions, thresholds }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct StrategyKey {
    order: Vec<usize>,
    directions: Vec<Direction>,
    thresholds: Vec<u64>,
}

impl fmt::Display for TtbStrategy {
    /// `order=2>1>3 dirs=+-+ thresholds=0,0.5,0` with 1-based cue labels.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let order: Vec<String> = self.order.iter().map(|c| (c + 1).to_string()).collect();
        let dirs: String = self.directions.iter().map(|d| d.symbol()).collect();
        let ts: Vec<String> = self.thresholds.iter().map(|t| t.to_string()).collect();
        write!(f, "order={} dirs={} thresholds={}", order.join(">"), dirs, ts.join(","))
    }
}

/// Result of one deterministic TTB comparison.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Outcome {
    FirstWins,
    SecondWins,
    Undecided,
}

impl Outcome {
    pub fn swapped(self) -> Self {
        match self {
            Outcome::FirstWins => Outcome::SecondWins,
            Outcome::SecondWins => Outcome::FirstWins,
            Outcome::Undecided => Outcome::Undecided,
        }
    }
}

/// Outcome from a precomputed difference `delta = x1 - x2`.
pub fn ttb_predict_delta(strategy: &TtbStrategy, delta: &[f64]) -> Outcome {
    for &c in &strategy.order {
        let dv = delta[c];
        if dv.abs() > strategy.thresholds[c] {
            return if (dv > 0.0) == (strategy.directions[c] == Direction::Positive) {
                Outcome::FirstWins
            } else {
                Outcome::SecondWins
            };
        }
    }
    Outcome::Undecided
}

/// Scan cues in search order and decide on the first one whose absolute
/// difference exceeds its threshold.
pub fn ttb_predict(strategy: &TtbStrategy, x1: &[f64], x2: &[f64]) -> Result<Outcome> {
    let m = strategy.n_cues();
    for x in [x1, x2] {
        if x.len() != m {
            return Err(Error::DimensionMismatch { expected: m, found: x.len() });
        }
    }
    let delta: Vec<f64> = x1.iter().zip(x2).map(|(a, b)| a - b).collect();
    Ok(ttb_predict_delta(strategy, &delta))
}

/// Which pairs of a table to turn into comparisons.
#[derive(Clone, Debug, PartialEq)]
pub enum PairPolicy {
    AllPairs,
    Pairs(Vec<(usize, usize)>),
}

/// Label pairs by the criterion (`y = 1` iff the first item's criterion is
/// larger). Pairs with tied criteria are dropped.
pub fn build_comparisons(
    table: &ItemTable,
    policy: &PairPolicy,
    apply_weight: bool,
) -> Result<PairwiseComparisons> {
    let n = table.n_items();
    if n < 2 {
        return Err(Error::TooFewItems(n));
    }
    let candidates: Vec<(usize, usize)> = match policy {
        PairPolicy::AllPairs => {
            (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect()
        }
        PairPolicy::Pairs(list) => list.clone(),
    };
    let crit = table.criterion();
    let pairs: Vec<Comparison> = candidates
        .iter()
        .filter(|&&(i, j)| i < n && j < n && crit[i] != crit[j])
        .map(|&(i, j)| Comparison { first: i, second: j, first_wins: crit[i] > crit[j] })
        .collect();
    if let Some(&(i, j)) = candidates.iter().find(|&&(i, j)| i >= n || j >= n) {
        return Err(Error::invalid(format!("pair ({i}, {j}) is out of range for {n} items")));
    }
    if pairs.is_empty() {
        return Err(Error::AllPairsTied);
    }
    let weight = if apply_weight && *policy == PairPolicy::AllPairs {
        transitivity_weight(n)?
    } else {
        1.0
    };
    PairwiseComparisons::new(table.items().to_vec(), pairs, weight)
}

/// `log2(N!) / C(N, 2)`: bits in a full ranking spread over all pairwise
/// comparisons of `N` items.
pub fn transitivity_weight(n_items: usize) -> Result<f64> {
    if n_items < 2 {
        return Err(Error::TooFewItems(n_items));
    }
    let log2_factorial: f64 = (2..=n_items).map(|k| (k as f64).log2()).sum();
    let n = n_items as f64;
    Ok(log2_factorial / (n * (n - 1.0) / 2.0))
}

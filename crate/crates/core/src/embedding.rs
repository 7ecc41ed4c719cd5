//! Bayesian linear regression with pairwise preference observations from an
//! agent who ranks points through a TTB strategy.
//!
//! The weights `w` of `f(x) = wᵀx` get a Gaussian prior and a few direct
//! noisy observations. Pairwise preferences enter through one extra log
//! factor: either a PTTB likelihood (the agent is modelled as learning a
//! TTB strategy from comparisons induced by `w`) or a plain flip-noise
//! likelihood on `sign(wᵀδ)`. The posterior is evaluated on a 2-D grid.

use std::path::Path;

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::harness::derive_seed;
use crate::inference::{exhaustive_posterior, ThresholdGrid};
use crate::likelihood::NoisePrior;
use crate::model::{
    build_comparisons, transitivity_weight, ttb_predict, Comparison, ItemTable, Outcome, PairPolicy,
    PairwiseComparisons, TtbStrategy,
};
use crate::special::{log_beta_inc_half_unchecked, log_sum_exp};
use crate::svg;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WeightGrid {
    pub w1_range: (f64, f64),
    pub w2_range: (f64, f64),
    pub resolution: usize,
}

impl Default for WeightGrid {
    fn default() -> Self {
        Self { w1_range: (-2.0, 2.0), w2_range: (-2.0, 2.0), resolution: 47 }
    }
}

fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n).map(|k| lo + (hi - lo) * k as f64 / (n - 1) as f64).collect()
}

impl WeightGrid {
    pub fn axes(&self) -> (Vec<f64>, Vec<f64>) {
        (
            linspace(self.w1_range.0, self.w1_range.1, self.resolution),
            linspace(self.w2_range.0, self.w2_range.1, self.resolution),
        )
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RegressionTask {
    /// Direct observations `(x_i, y_i)`.
    pub x: Vec<Vec<f64>>,
    pub y: Vec<f64>,
    pub noise_variance: f64,
    pub prior_variance: f64,
    pub grid: WeightGrid,
}

impl RegressionTask {
    pub fn new(x: Vec<Vec<f64>>, y: Vec<f64>) -> Self {
        Self { x, y, noise_variance: 1.0, prior_variance: 1.0, grid: WeightGrid::default() }
    }

    fn validate(&self) -> Result<()> {
        if !(self.noise_variance > 0.0 && self.prior_variance > 0.0) {
            return Err(Error::invalid("noise and prior variances must be positive"));
        }
        if self.grid.resolution < 2 {
            return Err(Error::invalid("weight grid needs at least 2 points per axis"));
        }
        if self.x.len() != self.y.len() {
            return Err(Error::invalid("direct data x and y lengths differ"));
        }
        if let Some(row) = self.x.iter().find(|r| r.len() != 2) {
            return Err(Error::DimensionMismatch { expected: 2, found: row.len() });
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AgentConfig {
    /// Covariate points the agent compares, `X_G`.
    pub points: Vec<Vec<f64>>,
    /// Discrimination threshold the agent applies to every covariate.
    pub threshold: f64,
    pub subset_size: usize,
    pub seed: u64,
    /// Weight both the agent's training comparisons and the observed pairs.
    pub transitivity_weight: bool,
}

/// `n × n` grid over `[lo, hi]²`, first coordinate varying fastest.
pub fn square_grid(lo: f64, hi: f64, n: usize) -> Vec<Vec<f64>> {
    let axis = linspace(lo, hi, n);
    axis.iter().flat_map(|&b| axis.iter().map(move |&a| vec![a, b])).collect()
}

impl Default for AgentConfig {
    fn default() -> Self {
        Self {
            points: square_grid(-1.0, 1.0, 5),
            threshold: 0.25,
            subset_size: 10,
            seed: 0,
            transitivity_weight: true,
        }
    }
}

impl AgentConfig {
    fn validate(&self, dim: usize) -> Result<()> {
        if self.points.is_empty() {
            return Err(Error::invalid("agent covariate grid is empty"));
        }
        if let Some(p) = self.points.iter().find(|p| p.len() != dim) {
            return Err(Error::DimensionMismatch { expected: dim, found: p.len() });
        }
        if !(self.threshold.is_finite() && self.threshold >= 0.0) {
            return Err(Error::invalid("agent threshold must be nonnegative"));
        }
        if self.subset_size < 2 || self.subset_size > self.points.len() {
            return Err(Error::invalid(format!(
                "subset size must be between 2 and {}",
                self.points.len()
            )));
        }
        Ok(())
    }

    fn thresholds(&self, dim: usize) -> Result<ThresholdGrid> {
        ThresholdGrid::fixed(&vec![self.threshold; dim])
    }

    /// Seeded choice of observed points, sorted.
    pub fn subset(&self) -> Vec<usize> {
        let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(self.seed, &[1]));
        let mut idx = sample(&mut rng, self.points.len(), self.subset_size).into_vec();
        idx.sort_unstable();
        idx
    }
}

/// Labelled pairs over a set of covariate points.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PreferenceObservations {
    pub points: Vec<Vec<f64>>,
    /// `first_wins` is `h_ij`.
    pub pairs: Vec<Comparison>,
    pub weight: f64,
}

impl PreferenceObservations {
    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    fn delta(&self, c: &Comparison) -> Vec<f64> {
        self.points[c.first].iter().zip(&self.points[c.second]).map(|(a, b)| a - b).collect()
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// All-pairs comparisons on `X_G` labelled by `wᵀx`; `None` when every pair
/// is tied (e.g. `w = 0`).
fn induced_comparisons(w: &[f64], agent: &AgentConfig) -> Result<Option<PairwiseComparisons>> {
    let crit = agent.points.iter().map(|p| dot(w, p)).collect();
    let table = ItemTable::from_rows(agent.points.clone(), crit)?;
    match build_comparisons(&table, &PairPolicy::AllPairs, agent.transitivity_weight) {
        Ok(c) => Ok(Some(c)),
        Err(Error::AllPairsTied) => Ok(None),
        Err(e) => Err(e),
    }
}

fn observation_pairs(
    agent: &AgentConfig,
    mut label: impl FnMut(&[f64], &[f64]) -> bool,
) -> Result<PreferenceObservations> {
    let points: Vec<Vec<f64>> = agent.subset().iter().map(|&i| agent.points[i].clone()).collect();
    let n = points.len();
    let mut pairs = Vec::with_capacity(n * (n - 1) / 2);
    for i in 0..n {
        for j in i + 1..n {
            pairs.push(Comparison { first: i, second: j, first_wins: label(&points[i], &points[j]) });
        }
    }
    let weight = if agent.transitivity_weight { transitivity_weight(n)? } else { 1.0 };
    Ok(PreferenceObservations { points, pairs, weight })
}

/// The agent's TTB strategy: MAP of the exhaustive posterior on the
/// comparisons `true_w` induces on `X_G`, thresholds pinned at the agent's.
pub fn agent_strategy(true_w: &[f64], agent: &AgentConfig) -> Result<TtbStrategy> {
    agent.validate(true_w.len())?;
    let grid = agent.thresholds(true_w.len())?;
    let train = induced_comparisons(true_w, agent)?.ok_or(Error::AllPairsTied)?;
    let post = exhaustive_posterior(&train, &NoisePrior::uniform(), Some(&grid))?;
    Ok(post.map_entry().ok_or(Error::EmptyPosterior)?.strategy.clone())
}

/// Preferences from the TTB agent on the seeded subset of `X_G`; undecided
/// pairs are settled by a seeded fair coin.
pub fn simulate_agent(true_w: &[f64], agent: &AgentConfig) -> Result<PreferenceObservations> {
    let strategy = agent_strategy(true_w, agent)?;
    let mut coin = ChaCha8Rng::seed_from_u64(derive_seed(agent.seed, &[2]));
    observation_pairs(agent, |a, b| match ttb_predict(&strategy, a, b).expect("dimensions validated") {
        Outcome::FirstWins => true,
        Outcome::SecondWins => false,
        Outcome::Undecided => coin.random_bool(0.5),
    })
}

/// Noise-free preferences `h = (wᵀx_i > wᵀx_j)` on the same subset; exact
/// ties use the seeded coin.
pub fn simulate_unbiased(true_w: &[f64], agent: &AgentConfig) -> Result<PreferenceObservations> {
    agent.validate(true_w.len())?;
    let mut coin = ChaCha8Rng::seed_from_u64(derive_seed(agent.seed, &[2]));
    observation_pairs(agent, |a, b| {
        let (fa, fb) = (dot(true_w, a), dot(true_w, b));
        if fa == fb {
            coin.random_bool(0.5)
        } else {
            fa > fb
        }
    })
}

/// `[correct, incorrect, undecided]` of `strategy` on the observations.
fn observation_counts(strategy: &TtbStrategy, obs: &PreferenceObservations) -> [f64; 3] {
    let mut c = [0.0; 3];
    for p in &obs.pairs {
        let k = match ttb_predict(strategy, &obs.points[p.first], &obs.points[p.second]) {
            Ok(Outcome::Undecided) => 2,
            Ok(Outcome::FirstWins) if p.first_wins => 0,
            Ok(Outcome::SecondWins) if !p.first_wins => 0,
            _ => 1,
        };
        c[k] += obs.weight;
    }
    c
}

/// Log probability of the observations under the PTTB model induced by `w`:
/// the posterior over strategies learned from `w`'s comparisons on `X_G`,
/// with the flip rate shared between training and observed pairs.
pub fn ttb_evidence(
    w: &[f64],
    agent: &AgentConfig,
    obs: &PreferenceObservations,
    prior: &NoisePrior,
) -> Result<f64> {
    if obs.is_empty() {
        return Ok(0.0);
    }
    let dim = w.len();
    if let Some(p) = obs.points.iter().find(|p| p.len() != dim) {
        return Err(Error::DimensionMismatch { expected: dim, found: p.len() });
    }
    let grid = agent.thresholds(dim)?;
    let train = match induced_comparisons(w, agent)? {
        Some(t) => t,
        // nothing to learn from: every strategy fits equally well
        None => PairwiseComparisons::new(agent.points.clone(), Vec::new(), 1.0)?,
    };
    let post = exhaustive_posterior(&train, prior, Some(&grid))?;
    let probs = post.weights();
    let mut terms = Vec::with_capacity(post.len());
    for (entry, p) in post.entries().iter().zip(probs) {
        let n = observation_counts(&entry.strategy, obs);
        let c = entry.counts;
        let a = c.n_incorrect + prior.alpha();
        let b = c.n_correct + prior.beta();
        terms.push(
            p.ln() + n[2] * 0.5f64.ln() + log_beta_inc_half_unchecked(a + n[1], b + n[0])
                - log_beta_inc_half_unchecked(a, b),
        );
    }
    Ok(log_sum_exp(&terms))
}

/// Flip-noise likelihood of the observations given `sign(wᵀδ)`, with a
/// uniform prior on the flip rate over (0, 1/2). Pairs with `wᵀδ = 0` count
/// 1/2 each.
pub fn unbiased_evidence(w: &[f64], obs: &PreferenceObservations) -> Result<f64> {
    let (mut right, mut wrong, mut tie) = (0.0, 0.0, 0.0);
    for p in &obs.pairs {
        let d = obs.delta(p);
        if d.len() != w.len() {
            return Err(Error::DimensionMismatch { expected: w.len(), found: d.len() });
        }
        let s = dot(w, &d);
        if s == 0.0 {
            tie += obs.weight;
        } else if (s > 0.0) == p.first_wins {
            right += obs.weight;
        } else {
            wrong += obs.weight;
        }
    }
    Ok(std::f64::consts::LN_2 + tie * 0.5f64.ln() + log_beta_inc_half_unchecked(wrong + 1.0, right + 1.0))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PairwiseModel {
    None,
    Ttb,
    Unbiased,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DensityScaling {
    /// Normalised to integrate to one over the grid cells.
    #[default]
    Raw,
    /// Largest cell equal to one.
    Max1,
}

/// Posterior over a weight grid; `log_values[j][i]` is at `(w1[i], w2[j])`
/// and includes all normalising constants of the prior and the Gaussian
/// likelihood.
#[derive(Clone, Debug, PartialEq)]
pub struct GridDensity {
    pub w1: Vec<f64>,
    pub w2: Vec<f64>,
    pub log_values: Vec<Vec<f64>>,
    pub scaling: DensityScaling,
}

impl GridDensity {
    fn max_log(&self) -> f64 {
        self.log_values.iter().flatten().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    /// Exponentiated after subtracting the maximum, then scaled.
    pub fn values(&self) -> Vec<Vec<f64>> {
        let max = self.max_log();
        let mut v: Vec<Vec<f64>> =
            self.log_values.iter().map(|row| row.iter().map(|l| (l - max).exp()).collect()).collect();
        if self.scaling == DensityScaling::Raw {
            let cell = (self.w1[1] - self.w1[0]) * (self.w2[1] - self.w2[0]);
            let total: f64 = v.iter().flatten().sum::<f64>() * cell;
            v.iter_mut().flatten().for_each(|x| *x /= total);
        }
        v
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.w2.len(), self.w1.len())
    }

    /// Grid node with the largest value; first in row-major order on ties.
    pub fn argmax(&self) -> (f64, f64) {
        let mut best = (f64::NEG_INFINITY, 0, 0);
        for (j, row) in self.log_values.iter().enumerate() {
            for (i, &l) in row.iter().enumerate() {
                if l > best.0 {
                    best = (l, i, j);
                }
            }
        }
        (self.w1[best.1], self.w2[best.2])
    }

    /// Share of the grid's mass on nodes within Euclidean `radius` of `center`.
    pub fn mass_within(&self, center: (f64, f64), radius: f64) -> f64 {
        let max = self.max_log();
        let (mut inside, mut total) = (0.0, 0.0);
        for (j, row) in self.log_values.iter().enumerate() {
            for (i, l) in row.iter().enumerate() {
                let v = (l - max).exp();
                total += v;
                if (self.w1[i] - center.0).hypot(self.w2[j] - center.1) <= radius {
                    inside += v;
                }
            }
        }
        inside / total
    }

    /// `w1, w2, density` in the density's scaling, `w1` varying fastest.
    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let mut w = csv::Writer::from_path(path)?;
        w.write_record(["w1", "w2", "density"])?;
        for (j, row) in self.values().iter().enumerate() {
            for (i, v) in row.iter().enumerate() {
                w.write_record([self.w1[i].to_string(), self.w2[j].to_string(), v.to_string()])?;
            }
        }
        w.flush().map_err(|source| Error::Io { path: path.to_path_buf(), source })
    }
}

/// Log posterior (up to the pairwise term's normaliser) at every grid node.
pub fn grid_posterior(
    task: &RegressionTask,
    obs: Option<&PreferenceObservations>,
    agent: Option<&AgentConfig>,
    model: PairwiseModel,
    prior: &NoisePrior,
    scaling: DensityScaling,
) -> Result<GridDensity> {
    task.validate()?;
    let pair_obs = match model {
        PairwiseModel::None => None,
        _ => Some(obs.ok_or_else(|| Error::invalid("pairwise model needs observations"))?),
    };
    if model == PairwiseModel::Ttb && agent.is_none() {
        return Err(Error::invalid("TTB pairwise model needs the agent configuration"));
    }
    let (w1, w2) = task.grid.axes();
    let (s2, t2) = (task.noise_variance, task.prior_variance);
    let ln2pi = (2.0 * std::f64::consts::PI).ln();
    let nodes: Vec<(usize, usize)> =
        (0..w2.len()).flat_map(|j| (0..w1.len()).map(move |i| (j, i))).collect();
    let logs: Vec<f64> = nodes
        .par_iter()
        .map(|&(j, i)| {
            let w = [w1[i], w2[j]];
            let mut l = -0.5 * dot(&w, &w) / t2 - (ln2pi + t2.ln());
            for (x, y) in task.x.iter().zip(&task.y) {
                let r = y - dot(&w, x);
                l += -0.5 * r * r / s2 - 0.5 * (ln2pi + s2.ln());
            }
            l += match (model, pair_obs) {
                (PairwiseModel::Ttb, Some(o)) => ttb_evidence(&w, agent.expect("checked"), o, prior)?,
                (PairwiseModel::Unbiased, Some(o)) => unbiased_evidence(&w, o)?,
                _ => 0.0,
            };
            Ok(l)
        })
        .collect::<Result<_>>()?;
    let log_values = logs.chunks(w1.len()).map(<[f64]>::to_vec).collect();
    Ok(GridDensity { w1, w2, log_values, scaling })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EmbeddingConfig {
    pub seed: u64,
    pub true_w: Vec<f64>,
    pub n_direct: usize,
    pub noise_variance: f64,
    pub prior_variance: f64,
    pub grid: WeightGrid,
    /// `seed` is replaced by one derived from the experiment seed.
    pub agent: AgentConfig,
    pub prior: NoisePrior,
}

impl Default for EmbeddingConfig {
    fn default() -> Self {
        Self {
            seed: 0,
            true_w: vec![1.0, 0.8],
            n_direct: 2,
            noise_variance: 1.0,
            prior_variance: 1.0,
            grid: WeightGrid::default(),
            agent: AgentConfig::default(),
            prior: NoisePrior::uniform(),
        }
    }
}

pub const PANEL_NAMES: [&str; 5] = [
    "no_pairwise",
    "ttb_obs_ttb_model",
    "unbiased_obs_ttb_model",
    "ttb_obs_unbiased_model",
    "unbiased_obs_unbiased_model",
];

#[derive(Clone, Debug)]
pub struct EmbeddingResult {
    pub task: RegressionTask,
    pub agent: AgentConfig,
    pub ttb_obs: PreferenceObservations,
    pub unbiased_obs: PreferenceObservations,
    /// In [`PANEL_NAMES`] order.
    pub panels: Vec<(String, GridDensity)>,
    pub true_w: Vec<f64>,
}

impl EmbeddingResult {
    pub fn panel(&self, name: &str) -> Option<&GridDensity> {
        self.panels.iter().find(|(n, _)| n == name).map(|(_, d)| d)
    }

    /// `panel_<name>.csv` for each panel, plus SVG heatmaps when asked.
    pub fn write(&self, dir: &Path, svg_plots: bool) -> Result<()> {
        let marker = (self.true_w[0], self.true_w[1]);
        for (name, density) in &self.panels {
            density.write_csv(&dir.join(format!("panel_{name}.csv")))?;
            if svg_plots {
                let doc = svg::density_heatmap(name, &density.w1, &density.w2, &density.values(), Some(marker));
                let path = dir.join(format!("panel_{name}.svg"));
                std::fs::write(&path, doc).map_err(|source| Error::Io { path, source })?;
            }
        }
        Ok(())
    }
}

/// Direct data, both observation types on one subset of `X_G`, and the five
/// posterior panels, all determined by `config.seed`.
pub fn run_embedding_experiment(config: &EmbeddingConfig) -> Result<EmbeddingResult> {
    let dim = config.true_w.len();
    if dim != 2 {
        return Err(Error::DimensionMismatch { expected: 2, found: dim });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(config.seed, &[0]));
    let noise = Normal::new(0.0, config.noise_variance.sqrt())
        .map_err(|e| Error::invalid(format!("noise variance: {e}")))?;
    let x: Vec<Vec<f64>> = (0..config.n_direct)
        .map(|_| (0..dim).map(|_| rng.random_range(-1.0..=1.0)).collect())
        .collect();
    let y: Vec<f64> = x.iter().map(|xi| dot(&config.true_w, xi) + noise.sample(&mut rng)).collect();
    let task = RegressionTask {
        x,
        y,
        noise_variance: config.noise_variance,
        prior_variance: config.prior_variance,
        grid: config.grid.clone(),
    };
    let agent = AgentConfig { seed: derive_seed(config.seed, &[1]), ..config.agent.clone() };
    let ttb_obs = simulate_agent(&config.true_w, &agent)?;
    let unbiased_obs = simulate_unbiased(&config.true_w, &agent)?;

    let specs = [
        (None, PairwiseModel::None),
        (Some(&ttb_obs), PairwiseModel::Ttb),
        (Some(&unbiased_obs), PairwiseModel::Ttb),
        (Some(&ttb_obs), PairwiseModel::Unbiased),
        (Some(&unbiased_obs), PairwiseModel::Unbiased),
    ];
    let mut panels = Vec::with_capacity(specs.len());
    for (name, (obs, model)) in PANEL_NAMES.iter().zip(specs) {
        let d = grid_posterior(&task, obs, Some(&agent), model, &config.prior, DensityScaling::Max1)?;
        panels.push((name.to_string(), d));
    }
    Ok(EmbeddingResult { task, agent, ttb_obs, unbiased_obs, panels, true_w: config.true_w.clone() })
}

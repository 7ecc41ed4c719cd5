use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{PosteriorEntry, Scorer, StrategyPosterior, ThresholdGrid};
use crate::baselines::classic_ttb_fit;
use crate::error::{Error, Result};
use crate::likelihood::{weighted, FitCounts, NoisePrior};
use crate::model::{Direction, PairwiseComparisons, TtbStrategy};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Initialization {
    /// Uniformly random order, directions and threshold indices.
    #[default]
    Random,
    /// Validity-ordered classic TTB fit, zero thresholds.
    ClassicTtb,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SamplerConfig {
    pub samples: usize,
    pub burn_in: usize,
    pub seed: u64,
    #[serde(default)]
    pub init: Initialization,
}

impl SamplerConfig {
    pub fn new(samples: usize, burn_in: usize, seed: u64) -> Result<Self> {
        let c = Self { samples, burn_in, seed, init: Initialization::Random };
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<()> {
        if self.samples == 0 {
            return Err(Error::invalid("sampler needs at least one sample"));
        }
        Ok(())
    }
}

impl Default for SamplerConfig {
    fn default() -> Self {
        Self { samples: 1000, burn_in: 100, seed: 0, init: Initialization::Random }
    }
}

/// One configuration reachable from the current state by moving a single cue.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Candidate {
    /// Search position of the moved cue in the candidate order.
    pub position: usize,
    pub direction: Direction,
    pub threshold_index: usize,
    pub counts: FitCounts,
    pub log_posterior: f64,
    raw: [u64; 3],
}

/// State of one collapsed Gibbs chain over `(g, d, t)`.
pub struct GibbsChain<'a> {
    data: &'a PairwiseComparisons,
    grid: ThresholdGrid,
    scorer: Scorer,
    order: Vec<usize>,
    directions: Vec<Direction>,
    threshold_idx: Vec<usize>,
    raw: [u64; 3],
    log_posterior: f64,
    rng: ChaCha8Rng,
}

impl<'a> GibbsChain<'a> {
    pub fn new(
        data: &'a PairwiseComparisons,
        prior: &NoisePrior,
        thresholds: Option<&ThresholdGrid>,
        seed: u64,
        init: Initialization,
    ) -> Result<Self> {
        let m = data.n_cues();
        if m == 0 {
            return Err(Error::invalid("sampler needs at least one cue"));
        }
        let grid = thresholds.cloned().unwrap_or_else(|| ThresholdGrid::zeros(m));
        if grid.n_cues() != m {
            return Err(Error::DimensionMismatch { expected: m, found: grid.n_cues() });
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (order, directions, threshold_idx) = match init {
            Initialization::Random => {
                let mut order: Vec<usize> = (0..m).collect();
                order.shuffle(&mut rng);
                let directions = (0..m)
                    .map(|_| if rng.random_bool(0.5) { Direction::Positive } else { Direction::Negative })
                    .collect();
                let idx = grid.sizes().iter().map(|&k| rng.random_range(0..k)).collect();
                (order, directions, idx)
            }
            Initialization::ClassicTtb => {
                let fit = classic_ttb_fit(data)?;
                (fit.order().to_vec(), fit.directions().to_vec(), vec![0; m])
            }
        };
        let scorer = Scorer::new(*prior, data.weight(), &grid);
        let mut chain = Self {
            data,
            grid,
            scorer,
            order,
            directions,
            threshold_idx,
            raw: [0; 3],
            log_posterior: 0.0,
            rng,
        };
        chain.raw = crate::likelihood::raw_counts(&chain.strategy(), data);
        chain.log_posterior = chain.scorer.log_posterior(chain.raw);
        Ok(chain)
    }

    pub fn strategy(&self) -> TtbStrategy {
        let ts = self.threshold_idx.iter().enumerate().map(|(c, &i)| self.grid.candidates(c)[i]);
        TtbStrategy::from_parts_unchecked(
            self.order.clone(),
            self.directions.clone(),
            ts.collect(),
        )
    }

    pub fn counts(&self) -> FitCounts {
        weighted(self.raw, self.data.weight())
    }

    /// Unnormalised log posterior of the current configuration.
    pub fn log_posterior(&self) -> f64 {
        self.log_posterior
    }

    fn thr(&self, cue: usize) -> f64 {
        self.grid.candidates(cue)[self.threshold_idx[cue]]
    }

    /// Every configuration obtained by removing `cue` from the order and
    /// reinserting it at each of the `M` positions, with either direction
    /// and each of its threshold candidates; all other cues keep their
    /// relative order, directions and thresholds. Ordered by position, then
    /// direction (positive first), then threshold index.
    ///
    /// Costs one pass over the pairs: for each pair the first discriminating
    /// cue among the others fixes where `cue` can still take over.
    pub fn candidates(&mut self, cue: usize) -> Vec<Candidate> {
        let m = self.order.len();
        let rest: Vec<usize> = self.order.iter().copied().filter(|&c| c != cue).collect();
        let rest_thr: Vec<f64> = rest.iter().map(|&c| self.thr(c)).collect();
        let rest_pos: Vec<bool> =
            rest.iter().map(|&c| self.directions[c] == Direction::Positive).collect();
        let ts = self.grid.candidates(cue);
        let k = ts.len();

        // per (threshold, stop position): [agree, disagree, correct, incorrect, undecided]
        let mut acc = vec![[0u64; 5]; k * m];
        let mut base = [0u64; 3];
        for p in 0..self.data.len() {
            let delta = self.data.delta(p);
            let y = self.data.label(p);
            let mut stop = m - 1;
            let mut verdict = 2;
            for (j, &c) in rest.iter().enumerate() {
                let dv = delta[c];
                if dv.abs() > rest_thr[j] {
                    stop = j;
                    verdict = if ((dv > 0.0) == rest_pos[j]) == y { 0 } else { 1 };
                    break;
                }
            }
            base[verdict] += 1;
            let dm = delta[cue];
            let agree = (dm > 0.0) == y;
            for (ti, &t) in ts.iter().enumerate() {
                if dm.abs() <= t {
                    break;
                }
                let a = &mut acc[ti * m + stop];
                a[if agree { 0 } else { 1 }] += 1;
                a[2 + verdict] += 1;
            }
        }
        for ti in 0..k {
            for s in (0..m - 1).rev() {
                let next = acc[ti * m + s + 1];
                let cur = &mut acc[ti * m + s];
                for (x, y) in cur.iter_mut().zip(next) {
                    *x += y;
                }
            }
        }

        let weight = self.data.weight();
        let mut out = Vec::with_capacity(2 * m * k);
        for position in 0..m {
            for direction in Direction::BOTH {
                for ti in 0..k {
                    let a = acc[ti * m + position];
                    let (right, wrong) = match direction {
                        Direction::Positive => (a[0], a[1]),
                        Direction::Negative => (a[1], a[0]),
                    };
                    let raw = [
                        base[0] - a[2] + right,
                        base[1] - a[3] + wrong,
                        base[2] - a[4],
                    ];
                    out.push(Candidate {
                        position,
                        direction,
                        threshold_index: ti,
                        counts: weighted(raw, weight),
                        log_posterior: self.scorer.log_posterior(raw),
                        raw,
                    });
                }
            }
        }
        out
    }

    /// Strategy that `candidate` (produced for `cue`) stands for.
    pub fn candidate_strategy(&self, cue: usize, candidate: &Candidate) -> TtbStrategy {
        let mut order: Vec<usize> = self.order.iter().copied().filter(|&c| c != cue).collect();
        order.insert(candidate.position, cue);
        let mut directions = self.directions.clone();
        directions[cue] = candidate.direction;
        let mut ts: Vec<f64> = (0..order.len()).map(|c| self.thr(c)).collect();
        ts[cue] = self.grid.candidates(cue)[candidate.threshold_index];
        TtbStrategy::from_parts_unchecked(order, directions, ts)
    }

    /// Resample the position, direction and threshold of one cue.
    pub fn update_cue(&mut self, cue: usize) {
        let candidates = self.candidates(cue);
        let logs: Vec<f64> = candidates.iter().map(|c| c.log_posterior).collect();
        let pick = &candidates[sample_log_weights(&logs, &mut self.rng)];

        self.order.retain(|&c| c != cue);
        self.order.insert(pick.position, cue);
        self.directions[cue] = pick.direction;
        self.threshold_idx[cue] = pick.threshold_index;
        self.raw = pick.raw;
        self.log_posterior = pick.log_posterior;
    }

    /// One full sweep: every cue once, in a fresh random order.
    pub fn sweep(&mut self) {
        let mut cues: Vec<usize> = (0..self.order.len()).collect();
        cues.shuffle(&mut self.rng);
        for cue in cues {
            self.update_cue(cue);
        }
    }

    fn entry(&self) -> PosteriorEntry {
        PosteriorEntry {
            strategy: self.strategy(),
            counts: self.counts(),
            log_posterior: self.log_posterior,
        }
    }
}

/// Index drawn with probability proportional to `exp(logs[i])`.
fn sample_log_weights(logs: &[f64], rng: &mut impl Rng) -> usize {
    let max = logs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let weights: Vec<f64> = logs.iter().map(|l| (l - max).exp()).collect();
    let total: f64 = weights.iter().sum();
    let mut u = rng.random::<f64>() * total;
    for (i, w) in weights.iter().enumerate() {
        if u < *w {
            return i;
        }
        u -= w;
    }
    // rounding left u at the very top
    weights.iter().rposition(|&w| w > 0.0).unwrap_or(0)
}

/// Collapsed Gibbs sampling of `(g, d, t)`: `burn_in` discarded sweeps, then
/// one recorded configuration per sweep.
pub fn gibbs_sample(
    data: &PairwiseComparisons,
    prior: &NoisePrior,
    config: &SamplerConfig,
    thresholds: Option<&ThresholdGrid>,
) -> Result<StrategyPosterior> {
    config.validate()?;
    let mut chain = GibbsChain::new(data, prior, thresholds, config.seed, config.init)?;
    for _ in 0..config.burn_in {
        chain.sweep();
    }
    let mut entries = Vec::with_capacity(config.samples);
    for _ in 0..config.samples {
        chain.sweep();
        entries.push(chain.entry());
    }
    Ok(StrategyPosterior::sampled(entries, data.n_cues(), config.burn_in))
}

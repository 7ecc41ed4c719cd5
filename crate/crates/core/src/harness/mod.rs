//! Replicated train/test benchmarks, MCMC traces and cue-rank exports.

mod data;
mod trace;

use std::fmt;
use std::path::Path;
use std::str::FromStr;
use std::time::Instant;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::baselines::{classic_ttb_fit, logreg_fit};
use crate::error::{Error, Result};
use crate::inference::{default_threshold_grid, gibbs_sample, SamplerConfig};
use crate::likelihood::NoisePrior;
use crate::model::{build_comparisons, ItemTable, PairPolicy, PairwiseComparisons};
use crate::prediction::{evaluate_accuracy, PosteriorPredictor};

pub use data::{load_item_table, LoadedTable};
pub use trace::{export_cue_rank_heatmap, min_max_scaled, trace_log_posterior, LogPosteriorTrace};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    Pttb,
    PttbCdt,
    Ttb,
    #[serde(rename = "logreg")]
    LogReg,
}

impl Method {
    pub const ALL: [Method; 4] = [Method::Pttb, Method::PttbCdt, Method::Ttb, Method::LogReg];

    pub fn name(self) -> &'static str {
        match self {
            Method::Pttb => "pttb",
            Method::PttbCdt => "pttb-cdt",
            Method::Ttb => "ttb",
            Method::LogReg => "logreg",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Method::ALL
            .into_iter()
            .find(|m| m.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::invalid(format!("unknown method `{s}` (pttb, pttb-cdt, ttb, logreg)")))
    }
}

/// A named item table to benchmark on.
#[derive(Clone, Debug)]
pub struct Dataset {
    pub name: String,
    pub table: ItemTable,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BenchmarkConfig {
    pub fractions: Vec<f64>,
    pub replications: usize,
    pub methods: Vec<Method>,
    pub sampler: SamplerConfig,
    pub prior: NoisePrior,
    pub base_seed: u64,
    /// Raise PTTB training likelihoods to the transitivity weight.
    pub transitivity_weight: bool,
    /// Quantile count `K` of the PTTB-CDT threshold grid.
    pub threshold_quantiles: usize,
    /// Write wall-clock seconds; when false the column is 0 so runs compare
    /// byte for byte.
    pub record_timing: bool,
}

impl Default for BenchmarkConfig {
    fn default() -> Self {
        Self {
            fractions: (1..=9).map(|k| k as f64 / 10.0).collect(),
            replications: 100,
            methods: Method::ALL.to_vec(),
            sampler: SamplerConfig::default(),
            prior: NoisePrior::uniform(),
            base_seed: 0,
            transitivity_weight: true,
            threshold_quantiles: 4,
            record_timing: true,
        }
    }
}

impl BenchmarkConfig {
    pub fn validate(&self) -> Result<()> {
        if self.fractions.is_empty() {
            return Err(Error::invalid("at least one training fraction is required"));
        }
        if let Some(f) = self.fractions.iter().find(|f| !(**f > 0.0 && **f < 1.0)) {
            return Err(Error::invalid(format!("training fraction {f} is outside (0, 1)")));
        }
        if self.replications == 0 {
            return Err(Error::invalid("replications must be at least 1"));
        }
        if self.methods.is_empty() {
            return Err(Error::invalid("no methods selected"));
        }
        if self.threshold_quantiles == 0 {
            return Err(Error::invalid("threshold grid size K must be at least 1"));
        }
        self.sampler.validate()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AccuracyRow {
    pub dataset: String,
    pub method: Method,
    pub fraction: f64,
    pub replication: usize,
    pub accuracy: f64,
    pub seconds: f64,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct AccuracyTable {
    pub rows: Vec<AccuracyRow>,
}

/// Mean accuracy of one (dataset, method, fraction) cell.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AccuracySummary {
    pub dataset: String,
    pub method: Method,
    pub fraction: f64,
    pub replications: usize,
    pub mean_accuracy: f64,
}

impl AccuracyTable {
    pub fn mean_accuracy(&self, dataset: &str, method: Method, fraction: f64) -> Option<f64> {
        let acc: Vec<f64> = self
            .rows
            .iter()
            .filter(|r| r.dataset == dataset && r.method == method && r.fraction == fraction)
            .map(|r| r.accuracy)
            .collect();
        (!acc.is_empty()).then(|| acc.iter().sum::<f64>() / acc.len() as f64)
    }

    /// One line per cell, in row order.
    pub fn summary(&self) -> Vec<AccuracySummary> {
        let mut out: Vec<AccuracySummary> = Vec::new();
        for r in &self.rows {
            let hit = out
                .iter_mut()
                .find(|s| s.dataset == r.dataset && s.method == r.method && s.fraction == r.fraction);
            match hit {
                Some(s) => {
                    s.mean_accuracy += r.accuracy;
                    s.replications += 1;
                }
                None => out.push(AccuracySummary {
                    dataset: r.dataset.clone(),
                    method: r.method,
                    fraction: r.fraction,
                    replications: 1,
                    mean_accuracy: r.accuracy,
                }),
            }
        }
        for s in &mut out {
            s.mean_accuracy /= s.replications as f64;
        }
        out
    }

    /// `results.csv`: dataset, method, fraction, replication, accuracy, seconds.
    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let mut w = csv::Writer::from_path(path)?;
        w.write_record(["dataset", "method", "fraction", "replication", "accuracy", "seconds"])?;
        for r in &self.rows {
            w.write_record([
                r.dataset.clone(),
                r.method.to_string(),
                r.fraction.to_string(),
                r.replication.to_string(),
                r.accuracy.to_string(),
                r.seconds.to_string(),
            ])?;
        }
        w.flush().map_err(|source| Error::Io { path: path.to_path_buf(), source })
    }
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn fnv1a(s: &str) -> u64 {
    s.bytes().fold(0xcbf2_9ce4_8422_2325, |h, b| (h ^ b as u64).wrapping_mul(0x0100_0000_01b3))
}

/// Seed for one work unit; `parts` are folded in order.
pub fn derive_seed(base: u64, parts: &[u64]) -> u64 {
    parts.iter().fold(splitmix64(base), |h, &p| splitmix64(h ^ p))
}

/// Item-level split: `round(f·N)` training items, the rest for testing.
/// Both index lists come back sorted.
pub fn split_items(n_items: usize, fraction: f64, seed: u64) -> (Vec<usize>, Vec<usize>) {
    let mut idx: Vec<usize> = (0..n_items).collect();
    idx.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let n_train = ((fraction * n_items as f64).round() as usize).min(n_items);
    let (train, test) = idx.split_at(n_train);
    let (mut train, mut test) = (train.to_vec(), test.to_vec());
    train.sort_unstable();
    test.sort_unstable();
    (train, test)
}

struct Unit<'a> {
    dataset: &'a Dataset,
    fraction: f64,
    replication: usize,
}

fn run_unit(unit: &Unit<'_>, config: &BenchmarkConfig) -> Result<Vec<AccuracyRow>> {
    let name = &unit.dataset.name;
    let parts = [fnv1a(name), unit.fraction.to_bits(), unit.replication as u64];
    let split_seed = derive_seed(config.base_seed, &parts);
    let table = &unit.dataset.table;
    let (train_idx, test_idx) = split_items(table.n_items(), unit.fraction, split_seed);
    if train_idx.len() < 2 || test_idx.len() < 2 {
        log::warn!(
            "{name} f={} rep={}: split leaves {} train / {} test items, skipped",
            unit.fraction,
            unit.replication,
            train_idx.len(),
            test_idx.len()
        );
        return Ok(Vec::new());
    }
    let pairs = |idx: &[usize], weighted: bool| {
        build_comparisons(&table.subset(idx), &PairPolicy::AllPairs, weighted)
    };
    let (train, test) = match (pairs(&train_idx, config.transitivity_weight), pairs(&test_idx, false)) {
        (Ok(a), Ok(b)) => (a, b),
        (Err(Error::AllPairsTied), _) | (_, Err(Error::AllPairsTied)) => {
            log::warn!("{name} f={} rep={}: all pairs tied, skipped", unit.fraction, unit.replication);
            return Ok(Vec::new());
        }
        (Err(e), _) | (_, Err(e)) => return Err(e),
    };

    let mut rows = Vec::with_capacity(config.methods.len());
    for &method in &config.methods {
        let start = Instant::now();
        let mut sampler = config.sampler.clone();
        sampler.seed = derive_seed(split_seed, &[method as u64, config.sampler.seed]);
        let accuracy = fit_and_score(method, &train, &test, &sampler, config)?;
        rows.push(AccuracyRow {
            dataset: name.clone(),
            method,
            fraction: unit.fraction,
            replication: unit.replication,
            accuracy,
            seconds: if config.record_timing { start.elapsed().as_secs_f64() } else { 0.0 },
        });
    }
    Ok(rows)
}

fn fit_and_score(
    method: Method,
    train: &PairwiseComparisons,
    test: &PairwiseComparisons,
    sampler: &SamplerConfig,
    config: &BenchmarkConfig,
) -> Result<f64> {
    match method {
        Method::Pttb | Method::PttbCdt => {
            let grid = match method {
                Method::PttbCdt => Some(default_threshold_grid(train, config.threshold_quantiles)?),
                _ => None,
            };
            let post = gibbs_sample(train, &config.prior, sampler, grid.as_ref())?;
            evaluate_accuracy(&PosteriorPredictor::new(&post, &config.prior)?, test)
        }
        Method::Ttb => evaluate_accuracy(&classic_ttb_fit(train)?, test),
        Method::LogReg => evaluate_accuracy(&logreg_fit(train)?.model, test),
    }
}

/// Every (dataset, fraction, replication) is an independent work unit run on
/// the current rayon pool. Rows come back ordered by dataset (input order),
/// method, fraction (config order) and replication.
pub fn run_benchmark(config: &BenchmarkConfig, datasets: &[Dataset]) -> Result<AccuracyTable> {
    config.validate()?;
    let mut units = Vec::new();
    for dataset in datasets {
        for &fraction in &config.fractions {
            for replication in 0..config.replications {
                units.push(Unit { dataset, fraction, replication });
            }
        }
    }
    let per_unit: Vec<Vec<AccuracyRow>> =
        units.par_iter().map(|u| run_unit(u, config)).collect::<Result<_>>()?;
    let mut rows: Vec<AccuracyRow> = per_unit.into_iter().flatten().collect();
    let dataset_rank = |name: &str| datasets.iter().position(|d| d.name == name);
    let fraction_rank = |f: f64| config.fractions.iter().position(|&g| g == f);
    rows.sort_by_key(|r| {
        (dataset_rank(&r.dataset), r.method, fraction_rank(r.fraction), r.replication)
    });
    Ok(AccuracyTable { rows })
}

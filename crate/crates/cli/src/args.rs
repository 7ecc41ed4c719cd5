use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use pttb::harness::Method;
use pttb::inference::{default_threshold_grid, ThresholdGrid};
use pttb::model::PairwiseComparisons;
use serde::{Serialize, Serializer};

#[derive(Debug, Parser)]
#[command(name = "pttb", version, about = "Bayesian inference over Take The Best strategies")]
pub struct Cli {
    /// Worker threads for parallel stages (default: all cores).
    #[arg(long, global = true)]
    pub jobs: Option<usize>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Posterior over strategies for one dataset.
    Fit(FitArgs),
    /// Train/test accuracy over splits, fractions and methods.
    Bench(BenchArgs),
    /// Log-posterior trace of Gibbs chains from random starts.
    Trace(TraceArgs),
    /// Regression posterior with pairwise preference feedback.
    Embed(EmbedArgs),
    /// Posterior predictive probability for one pair of items.
    Predict(PredictArgs),
}

#[derive(Debug, Args, Serialize)]
pub struct DataArgs {
    /// CSV with a header row; every column except the criterion and
    /// `--exclude` is a cue.
    #[arg(long)]
    pub data: PathBuf,

    #[arg(long)]
    pub criterion: String,

    /// Columns to ignore (comma separated or repeated).
    #[arg(long, value_delimiter = ',')]
    pub exclude: Vec<String>,

    /// Use raw likelihoods instead of raising them to log2(N!)/C(N,2).
    #[arg(long)]
    pub no_transitivity_weight: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum FitMethod {
    Exact,
    Mcmc,
}

/// `none`, `auto:K` (zero plus K-quantiles of |δ|), a comma list shared by
/// every cue, or per-cue comma lists separated by `;`.
#[derive(Clone, Debug, PartialEq)]
pub enum ThresholdSpec {
    None,
    Auto(usize),
    List(Vec<Vec<f64>>),
}

impl FromStr for ThresholdSpec {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let s = s.trim();
        if s.eq_ignore_ascii_case("none") {
            return Ok(ThresholdSpec::None);
        }
        if let Some(k) = s.strip_prefix("auto:") {
            let k: usize = k.parse().map_err(|_| format!("bad quantile count in `{s}`"))?;
            if k == 0 {
                return Err("auto:K needs K >= 1".into());
            }
            return Ok(ThresholdSpec::Auto(k));
        }
        let groups = s
            .split(';')
            .map(|g| {
                g.split(',')
                    .map(|v| v.trim().parse::<f64>().map_err(|_| format!("bad threshold `{v}`")))
                    .collect::<Result<Vec<f64>, String>>()
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(ThresholdSpec::List(groups))
    }
}

impl fmt::Display for ThresholdSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ThresholdSpec::None => f.write_str("none"),
            ThresholdSpec::Auto(k) => write!(f, "auto:{k}"),
            ThresholdSpec::List(groups) => {
                let g: Vec<String> =
                    groups.iter().map(|g| g.iter().map(f64::to_string).collect::<Vec<_>>().join(",")).collect();
                f.write_str(&g.join(";"))
            }
        }
    }
}

impl Serialize for ThresholdSpec {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl ThresholdSpec {
    pub fn resolve(&self, data: &PairwiseComparisons) -> pttb::Result<Option<ThresholdGrid>> {
        let m = data.n_cues();
        match self {
            ThresholdSpec::None => Ok(None),
            ThresholdSpec::Auto(k) => default_threshold_grid(data, *k).map(Some),
            ThresholdSpec::List(groups) if groups.len() == 1 => ThresholdGrid::new(vec![groups[0].clone(); m]).map(Some),
            ThresholdSpec::List(groups) if groups.len() == m => ThresholdGrid::new(groups.clone()).map(Some),
            ThresholdSpec::List(groups) => {
                Err(pttb::Error::DimensionMismatch { expected: m, found: groups.len() })
            }
        }
    }
}

#[derive(Debug, Args, Serialize)]
pub struct SamplingArgs {
    #[arg(long, value_enum, default_value_t = FitMethod::Exact)]
    pub method: FitMethod,

    /// Recorded MCMC draws after burn-in.
    #[arg(long, default_value_t = 1000)]
    pub samples: usize,

    #[arg(long, default_value_t = 100)]
    pub burnin: usize,

    #[arg(long, default_value = "none")]
    pub thresholds: ThresholdSpec,

    /// Beta prior on the flip rate, `alpha,beta`.
    #[arg(long, value_delimiter = ',', num_args = 2, default_values_t = [1.0, 1.0])]
    pub noise_prior: Vec<f64>,
}

#[derive(Debug, Args, Serialize)]
pub struct FitArgs {
    #[command(flatten)]
    pub data: DataArgs,

    #[command(flatten)]
    pub sampling: SamplingArgs,

    #[arg(long, env = "PTTB_SEED", default_value_t = 0)]
    pub seed: u64,

    /// Configurations listed in summary.json.
    #[arg(long, default_value_t = 10)]
    pub top: usize,

    #[arg(long)]
    #[serde(skip)]
    pub out: PathBuf,

    /// Also write ranks.svg.
    #[arg(long)]
    pub svg: bool,
}

#[derive(Debug, Args, Serialize)]
pub struct BenchArgs {
    /// `PATH:CRITERION`; the file stem names the dataset. Repeatable.
    #[arg(long = "dataset", required = true)]
    pub datasets: Vec<String>,

    /// Columns to ignore in every dataset.
    #[arg(long, value_delimiter = ',')]
    pub exclude: Vec<String>,

    #[arg(long, value_delimiter = ',', default_value = "0.1,0.2,0.3,0.4,0.5,0.6,0.7,0.8,0.9")]
    pub fractions: Vec<f64>,

    #[arg(long, default_value_t = 100)]
    pub reps: usize,

    #[arg(long, value_delimiter = ',', default_value = "pttb,pttb-cdt,ttb,logreg")]
    #[serde(serialize_with = "method_names")]
    pub methods: Vec<Method>,

    #[arg(long, default_value_t = 1000)]
    pub samples: usize,

    #[arg(long, default_value_t = 100)]
    pub burnin: usize,

    /// Quantile count K of the PTTB-CDT threshold grid.
    #[arg(long, default_value_t = 4)]
    pub quantiles: usize,

    #[arg(long)]
    pub no_transitivity_weight: bool,

    /// Write 0 in the seconds column so repeated runs match byte for byte.
    #[arg(long)]
    pub no_timing: bool,

    #[arg(long, env = "PTTB_SEED", default_value_t = 0)]
    pub seed: u64,

    #[arg(long)]
    #[serde(skip)]
    pub out: PathBuf,

    /// Also write accuracy-vs-fraction charts.
    #[arg(long)]
    pub svg: bool,
}

fn method_names<S: Serializer>(methods: &[Method], s: S) -> Result<S::Ok, S::Error> {
    s.collect_seq(methods.iter().map(|m| m.name()))
}

#[derive(Debug, Args, Serialize)]
pub struct TraceArgs {
    #[command(flatten)]
    pub data: DataArgs,

    /// Sweeps per chain.
    #[arg(long, default_value_t = 50)]
    pub iterations: usize,

    #[arg(long, default_value_t = 1)]
    pub restarts: usize,

    #[arg(long, default_value = "none")]
    pub thresholds: ThresholdSpec,

    #[arg(long, env = "PTTB_SEED", default_value_t = 0)]
    pub seed: u64,

    #[arg(long)]
    #[serde(skip)]
    pub out: PathBuf,

    #[arg(long)]
    pub svg: bool,
}

#[derive(Debug, Args, Serialize)]
pub struct EmbedArgs {
    #[arg(long, env = "PTTB_SEED", default_value_t = 0)]
    pub seed: u64,

    #[arg(long, value_delimiter = ',', num_args = 2, default_values_t = [1.0, 0.8], allow_negative_numbers = true)]
    pub true_w: Vec<f64>,

    /// Direct (x, y) observations.
    #[arg(long, default_value_t = 2)]
    pub n_direct: usize,

    #[arg(long, default_value_t = 1.0)]
    pub noise_variance: f64,

    #[arg(long, default_value_t = 1.0)]
    pub prior_variance: f64,

    /// Grid nodes per axis over [-2, 2]².
    #[arg(long, default_value_t = 47)]
    pub resolution: usize,

    /// Points of the 5×5 covariate grid the agent is asked about.
    #[arg(long, default_value_t = 10)]
    pub subset: usize,

    /// The agent's discrimination threshold on each covariate.
    #[arg(long, default_value_t = 0.25)]
    pub threshold: f64,

    #[arg(long)]
    pub no_transitivity_weight: bool,

    #[arg(long)]
    #[serde(skip)]
    pub out: PathBuf,

    #[arg(long)]
    pub svg: bool,
}

#[derive(Debug, Args, Serialize)]
pub struct PredictArgs {
    #[command(flatten)]
    pub data: DataArgs,

    #[command(flatten)]
    pub sampling: SamplingArgs,

    #[arg(long, env = "PTTB_SEED", default_value_t = 0)]
    pub seed: u64,

    /// Cue values of the first item, comma separated, in column order.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true, required = true)]
    pub x1: Vec<f64>,

    #[arg(long, value_delimiter = ',', allow_negative_numbers = true, required = true)]
    pub x2: Vec<f64>,

    /// Directory for prediction.json and the manifest; stdout only if absent.
    #[arg(long)]
    #[serde(skip)]
    pub out: Option<PathBuf>,
}

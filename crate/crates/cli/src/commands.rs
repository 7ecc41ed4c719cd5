use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use serde::Serialize;

use pttb::baselines::cue_validities;
use pttb::embedding::{run_embedding_experiment, AgentConfig, EmbeddingConfig, WeightGrid};
use pttb::harness::{
    derive_seed, export_cue_rank_heatmap, load_item_table, run_benchmark, trace_log_posterior, BenchmarkConfig,
    Dataset,
};
use pttb::inference::{exhaustive_posterior, gibbs_sample, PosteriorKind, SamplerConfig, StrategyPosterior, ThresholdGrid};
use pttb::likelihood::{FitCounts, NoisePrior};
use pttb::model::{build_comparisons, ItemTable, PairPolicy, PairwiseComparisons, TtbStrategy};
use pttb::prediction::predictive_prob;
use pttb::svg;

use crate::args::{BenchArgs, DataArgs, EmbedArgs, FitArgs, FitMethod, PredictArgs, SamplingArgs, TraceArgs};
use crate::manifest::{create_dir, write_json, InputFile, RunManifest};

#[derive(Debug, Serialize)]
struct DataSummary {
    n_items: usize,
    n_cues: usize,
    n_pairs: usize,
    cue_names: Vec<String>,
    dropped_rows: usize,
    /// Exponent applied to every training likelihood.
    likelihood_weight: f64,
}

struct Loaded {
    table: ItemTable,
    data: PairwiseComparisons,
    summary: DataSummary,
}

fn load(path: &Path, criterion: &str, exclude: &[String], weighted: bool) -> Result<Loaded> {
    let loaded = load_item_table(path, criterion, exclude)?;
    if loaded.dropped_rows > 0 {
        log::warn!("{}: dropped {} rows with missing values", path.display(), loaded.dropped_rows);
    }
    let table = loaded.table;
    let data = build_comparisons(&table, &PairPolicy::AllPairs, weighted)?;
    let summary = DataSummary {
        n_items: table.n_items(),
        n_cues: table.n_cues(),
        n_pairs: data.len(),
        cue_names: table.cue_names().to_vec(),
        dropped_rows: loaded.dropped_rows,
        likelihood_weight: data.weight(),
    };
    Ok(Loaded { table, data, summary })
}

fn load_data(a: &DataArgs) -> Result<Loaded> {
    load(&a.data, &a.criterion, &a.exclude, !a.no_transitivity_weight)
}

fn noise_prior(a: &SamplingArgs) -> Result<NoisePrior> {
    Ok(NoisePrior::new(a.noise_prior[0], a.noise_prior[1])?)
}

fn sampler_config(a: &SamplingArgs, seed: u64) -> Result<Option<SamplerConfig>> {
    match a.method {
        FitMethod::Exact => Ok(None),
        FitMethod::Mcmc => Ok(Some(SamplerConfig::new(a.samples, a.burnin, seed)?)),
    }
}

fn posterior(
    data: &PairwiseComparisons,
    prior: &NoisePrior,
    a: &SamplingArgs,
    seed: u64,
    grid: Option<&ThresholdGrid>,
) -> Result<StrategyPosterior> {
    Ok(match a.method {
        FitMethod::Exact => exhaustive_posterior(data, prior, grid)?,
        FitMethod::Mcmc => {
            let cfg = sampler_config(a, seed)?.expect("mcmc has a sampler");
            gibbs_sample(data, prior, &cfg, grid)?
        }
    })
}

/// A strategy listed in search order with cue names.
#[derive(Debug, Serialize)]
struct Configuration {
    probability: f64,
    order: Vec<String>,
    directions: Vec<String>,
    thresholds: Vec<f64>,
    #[serde(flatten)]
    counts: FitCounts,
    log_posterior: f64,
}

impl Configuration {
    fn new(s: &TtbStrategy, names: &[String], counts: FitCounts, log_posterior: f64, probability: f64) -> Self {
        Self {
            probability,
            order: s.order().iter().map(|&c| names[c].clone()).collect(),
            directions: s.order().iter().map(|&c| s.directions()[c].symbol().to_string()).collect(),
            thresholds: s.order().iter().map(|&c| s.thresholds()[c]).collect(),
            counts,
            log_posterior,
        }
    }

    fn record(&self) -> [String; 8] {
        [
            self.probability.to_string(),
            self.order.join(">"),
            self.directions.concat(),
            self.thresholds.iter().map(f64::to_string).collect::<Vec<_>>().join(";"),
            self.counts.n_correct.to_string(),
            self.counts.n_incorrect.to_string(),
            self.counts.n_undecided.to_string(),
            self.log_posterior.to_string(),
        ]
    }
}

const CONFIG_HEADER: [&str; 8] =
    ["probability", "order", "directions", "thresholds", "n_correct", "n_incorrect", "n_undecided", "log_posterior"];

#[derive(Serialize)]
struct FitSummary<'a> {
    method: FitMethod,
    data: &'a DataSummary,
    distinct_configurations: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    log_evidence: Option<f64>,
    epsilon_mean: f64,
    map: Configuration,
    top: Vec<Configuration>,
}

#[derive(Serialize)]
struct FitResolved<'a> {
    data: &'a DataSummary,
    threshold_grid: Option<&'a [Vec<f64>]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    sampler: Option<SamplerConfig>,
}

pub fn fit(a: &FitArgs) -> Result<()> {
    let loaded = load_data(&a.data)?;
    let prior = noise_prior(&a.sampling)?;
    let grid = a.sampling.thresholds.resolve(&loaded.data)?;
    let post = posterior(&loaded.data, &prior, &a.sampling, a.seed, grid.as_ref())?;
    let names = loaded.table.cue_names();
    create_dir(&a.out)?;

    let aggregated = post.aggregated();
    let mut w = csv::Writer::from_path(a.out.join("posterior.csv"))?;
    w.write_record(CONFIG_HEADER)?;
    for s in &aggregated {
        w.write_record(Configuration::new(&s.strategy, names, s.counts, s.log_posterior, s.probability).record())?;
    }
    w.flush()?;

    if a.sampling.method == FitMethod::Mcmc {
        let mut w = csv::Writer::from_path(a.out.join("samples.csv"))?;
        let mut header = vec!["sample"];
        header.extend(CONFIG_HEADER.iter().skip(1));
        w.write_record(&header)?;
        for (k, e) in post.entries().iter().enumerate() {
            let rec = Configuration::new(&e.strategy, names, e.counts, e.log_posterior, 0.0).record();
            w.write_record(std::iter::once(k.to_string()).chain(rec.into_iter().skip(1)))?;
        }
        w.flush()?;
    }

    let svg_path = a.out.join("ranks.svg");
    export_cue_rank_heatmap(
        &post,
        &cue_validities(&loaded.data),
        names,
        &a.out.join("ranks.csv"),
        a.svg.then_some(svg_path.as_path()),
    )?;

    let map = post.map_entry().context("empty posterior")?;
    let map_prob = aggregated.iter().find(|s| s.strategy == map.strategy).map_or(0.0, |s| s.probability);
    let log_evidence = match post.kind() {
        PosteriorKind::Exact { log_evidence, .. } => Some(*log_evidence),
        PosteriorKind::Sampled { .. } => None,
    };
    let summary = FitSummary {
        method: a.sampling.method,
        data: &loaded.summary,
        distinct_configurations: aggregated.len(),
        log_evidence,
        epsilon_mean: post.epsilon_mean(&prior)?,
        map: Configuration::new(&map.strategy, names, map.counts, map.log_posterior, map_prob),
        top: aggregated
            .iter()
            .take(a.top)
            .map(|s| Configuration::new(&s.strategy, names, s.counts, s.log_posterior, s.probability))
            .collect(),
    };
    write_json(&a.out.join("summary.json"), &summary)?;

    let resolved = FitResolved {
        data: &loaded.summary,
        threshold_grid: grid.as_ref().map(|g| g.per_cue()),
        sampler: sampler_config(&a.sampling, a.seed)?,
    };
    RunManifest::new("fit", a, resolved, vec![InputFile::read(&a.data.data)?]).write(&a.out)
}

#[derive(Serialize)]
struct BenchDataset {
    name: String,
    path: PathBuf,
    criterion: String,
    #[serde(flatten)]
    summary: DataSummary,
}

#[derive(Serialize)]
struct BenchResolved<'a> {
    config: &'a BenchmarkConfig,
    datasets: Vec<BenchDataset>,
}

pub fn bench(a: &BenchArgs) -> Result<()> {
    let mut datasets = Vec::new();
    let mut described = Vec::new();
    let mut inputs = Vec::new();
    for spec in &a.datasets {
        let Some((path, criterion)) = spec.rsplit_once(':') else {
            bail!("dataset `{spec}` is not of the form PATH:CRITERION");
        };
        let path = PathBuf::from(path);
        let name = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_else(|| spec.clone());
        if datasets.iter().any(|d: &Dataset| d.name == name) {
            bail!("two datasets are named `{name}`");
        }
        let loaded = load(&path, criterion, &a.exclude, !a.no_transitivity_weight)?;
        inputs.push(InputFile::read(&path)?);
        described.push(BenchDataset {
            name: name.clone(),
            path: path.clone(),
            criterion: criterion.to_string(),
            summary: loaded.summary,
        });
        datasets.push(Dataset { name, table: loaded.table });
    }

    let config = BenchmarkConfig {
        fractions: a.fractions.clone(),
        replications: a.reps,
        methods: a.methods.clone(),
        sampler: SamplerConfig::new(a.samples, a.burnin, a.seed)?,
        prior: NoisePrior::uniform(),
        base_seed: a.seed,
        transitivity_weight: !a.no_transitivity_weight,
        threshold_quantiles: a.quantiles,
        record_timing: !a.no_timing,
    };
    config.validate()?;
    create_dir(&a.out)?;
    let table = run_benchmark(&config, &datasets)?;
    table.write_csv(&a.out.join("results.csv"))?;

    let summary = table.summary();
    let mut w = csv::Writer::from_path(a.out.join("summary.csv"))?;
    for s in &summary {
        w.serialize(s)?;
    }
    w.flush()?;

    if a.svg {
        for d in &datasets {
            let series: Vec<svg::Series> = config
                .methods
                .iter()
                .map(|&m| svg::Series {
                    label: m.name().to_string(),
                    points: summary
                        .iter()
                        .filter(|s| s.dataset == d.name && s.method == m)
                        .map(|s| (s.fraction, s.mean_accuracy))
                        .collect(),
                })
                .collect();
            let doc = svg::line_chart(&d.name, "training fraction", "mean accuracy", &series);
            let path = a.out.join(format!("accuracy_{}.svg", d.name));
            std::fs::write(&path, doc).with_context(|| format!("writing {}", path.display()))?;
        }
    }
    RunManifest::new("bench", a, BenchResolved { config: &config, datasets: described }, inputs).write(&a.out)
}

#[derive(Serialize)]
struct TraceResolved<'a> {
    data: &'a DataSummary,
    threshold_grid: Option<&'a [Vec<f64>]>,
    restart_seeds: Vec<u64>,
}

#[derive(Serialize)]
struct TraceSummary {
    /// Min-max scaled log posterior after the first sweep, per restart.
    scaled_after_first_sweep: Vec<f64>,
    final_log_posterior: Vec<f64>,
}

pub fn trace(a: &TraceArgs) -> Result<()> {
    if a.restarts == 0 {
        bail!("--restarts must be at least 1");
    }
    let loaded = load_data(&a.data)?;
    let grid = a.thresholds.resolve(&loaded.data)?;
    let seeds: Vec<u64> = (0..a.restarts as u64).map(|k| derive_seed(a.seed, &[k])).collect();
    let traces = seeds
        .iter()
        .map(|&s| trace_log_posterior(&loaded.data, &NoisePrior::uniform(), a.iterations, s, grid.as_ref()))
        .collect::<pttb::Result<Vec<_>>>()?;
    create_dir(&a.out)?;

    let mut w = csv::Writer::from_path(a.out.join("trace.csv"))?;
    w.write_record(["restart", "iteration", "log_post", "scaled"])?;
    for (r, t) in traces.iter().enumerate() {
        for (k, (l, s)) in t.log_post.iter().zip(&t.scaled).enumerate() {
            w.write_record([r.to_string(), k.to_string(), l.to_string(), s.to_string()])?;
        }
    }
    w.flush()?;

    let summary = TraceSummary {
        scaled_after_first_sweep: traces.iter().map(|t| t.scaled[1]).collect(),
        final_log_posterior: traces.iter().map(|t| *t.log_post.last().expect("trace is non-empty")).collect(),
    };
    write_json(&a.out.join("summary.json"), &summary)?;

    if a.svg {
        let series: Vec<svg::Series> = traces
            .iter()
            .enumerate()
            .map(|(r, t)| svg::Series {
                label: format!("restart {r}"),
                points: t.scaled.iter().enumerate().map(|(k, &s)| (k as f64, s)).collect(),
            })
            .collect();
        let doc = svg::line_chart("log posterior", "iteration", "scaled log posterior", &series);
        std::fs::write(a.out.join("trace.svg"), doc).context("writing trace.svg")?;
    }
    let resolved = TraceResolved {
        data: &loaded.summary,
        threshold_grid: grid.as_ref().map(|g| g.per_cue()),
        restart_seeds: seeds,
    };
    RunManifest::new("trace", a, resolved, vec![InputFile::read(&a.data.data)?]).write(&a.out)
}

#[derive(Serialize)]
struct PanelSummary {
    name: String,
    argmax: (f64, f64),
    /// Share of grid mass within Euclidean distance 0.5 of the true weights.
    mass_near_truth: f64,
}

#[derive(Serialize)]
struct EmbedSummary<'a> {
    direct_x: &'a [Vec<f64>],
    direct_y: &'a [f64],
    observed_points: Vec<usize>,
    panels: Vec<PanelSummary>,
}

pub fn embed(a: &EmbedArgs) -> Result<()> {
    let config = EmbeddingConfig {
        seed: a.seed,
        true_w: a.true_w.clone(),
        n_direct: a.n_direct,
        noise_variance: a.noise_variance,
        prior_variance: a.prior_variance,
        grid: WeightGrid { resolution: a.resolution, ..WeightGrid::default() },
        agent: AgentConfig {
            threshold: a.threshold,
            subset_size: a.subset,
            transitivity_weight: !a.no_transitivity_weight,
            ..AgentConfig::default()
        },
        prior: NoisePrior::uniform(),
    };
    let result = run_embedding_experiment(&config)?;
    create_dir(&a.out)?;
    result.write(&a.out, a.svg)?;
    let truth = (a.true_w[0], a.true_w[1]);
    let summary = EmbedSummary {
        direct_x: &result.task.x,
        direct_y: &result.task.y,
        observed_points: result.agent.subset(),
        panels: result
            .panels
            .iter()
            .map(|(name, d)| PanelSummary { name: name.clone(), argmax: d.argmax(), mass_near_truth: d.mass_within(truth, 0.5) })
            .collect(),
    };
    write_json(&a.out.join("summary.json"), &summary)?;
    RunManifest::new("embed", a, &config, Vec::new()).write(&a.out)
}

pub fn predict(a: &PredictArgs) -> Result<()> {
    let loaded = load_data(&a.data)?;
    let m = loaded.table.n_cues();
    if a.x1.len() != m || a.x2.len() != m {
        bail!("--x1 and --x2 need {m} values each (cues: {})", loaded.table.cue_names().join(", "));
    }
    let prior = noise_prior(&a.sampling)?;
    let grid = a.sampling.thresholds.resolve(&loaded.data)?;
    let post = posterior(&loaded.data, &prior, &a.sampling, a.seed, grid.as_ref())?;
    let result = predictive_prob(&post, &prior, &a.x1, &a.x2)?;
    println!("{}", serde_json::to_string(&result)?);
    if let Some(out) = &a.out {
        create_dir(out)?;
        write_json(&out.join("prediction.json"), &result)?;
        let resolved = FitResolved {
            data: &loaded.summary,
            threshold_grid: grid.as_ref().map(|g| g.per_cue()),
            sampler: sampler_config(&a.sampling, a.seed)?,
        };
        RunManifest::new("predict", a, resolved, vec![InputFile::read(&a.data.data)?]).write(out)?;
    }
    Ok(())
}

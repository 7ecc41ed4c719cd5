//! Property checks, runnable from `#[test]`s and from the acceptance runner.
//! Each takes a case count and reports the first counterexample.

use std::collections::HashMap;

use proptest::prelude::*;
use proptest::test_runner::{Config, RngAlgorithm, TestCaseError, TestRng, TestRunner};

use pttb::baselines::{classic_ttb_fit, cue_validities, logistic_gradient, logistic_loss, logreg_fit};
use pttb::embedding::{
    grid_posterior, run_embedding_experiment, simulate_agent, ttb_evidence, unbiased_evidence, AgentConfig,
    DensityScaling, EmbeddingConfig, PairwiseModel, RegressionTask, WeightGrid,
};
use pttb::harness::{run_benchmark, split_items, BenchmarkConfig, Dataset, Method};
use pttb::inference::{
    cue_rank_marginals, exhaustive_posterior, gibbs_sample, GibbsChain, Initialization, SamplerConfig,
    ThresholdGrid,
};
use pttb::likelihood::{count_outcomes, log_marginal_likelihood, FitCounts, NoisePrior};
use pttb::model::{ttb_predict, Comparison, Direction, ItemTable, Outcome, PairwiseComparisons, TtbStrategy};
use pttb::prediction::{evaluate_accuracy, predictive_prob, PosteriorPredictor};
use pttb::special::{ln_beta, log_beta_inc_half, trunc_beta_mean};

use super::{integrate, synthetic_instance};

pub type Check = fn(u32) -> Result<(), String>;

fn run<S: Strategy>(cases: u32, strategy: S, test: impl Fn(S::Value) -> Result<(), TestCaseError>) -> Result<(), String> {
    let config = Config { cases, failure_persistence: None, ..Config::default() };
    let mut runner = TestRunner::new_with_rng(config, TestRng::deterministic_rng(RngAlgorithm::ChaCha));
    runner.run(&strategy, test).map_err(|e| e.to_string())
}

fn strategy_and_pair(max_m: usize) -> impl Strategy<Value = (TtbStrategy, Vec<f64>, Vec<f64>)> {
    (1..=max_m).prop_flat_map(|m| {
        let levels = prop::collection::vec(-2i32..=2, m).prop_map(|v| v.into_iter().map(f64::from).collect::<Vec<_>>());
        (
            Just((0..m).collect::<Vec<usize>>()).prop_shuffle(),
            prop::collection::vec(any::<bool>(), m),
            prop::collection::vec(prop_oneof![Just(0.0), 0.0..2.0f64], m),
            levels.clone(),
            levels,
        )
            .prop_map(|(order, pos, ts, x1, x2)| {
                let dirs = pos.into_iter().map(|p| if p { Direction::Positive } else { Direction::Negative }).collect();
                (TtbStrategy::new(order, dirs, ts).unwrap(), x1, x2)
            })
    })
}

/// Small labelled dataset: `n` items with `m` integer cues, random labels.
fn dataset(max_m: usize) -> impl Strategy<Value = PairwiseComparisons> {
    (1..=max_m, 3usize..7, any::<u64>()).prop_map(|(m, n, seed)| synthetic_instance(seed, n, m, 3, 0.2))
}

// ---- core model ----

pub fn model_antisymmetry(cases: u32) -> Result<(), String> {
    run(cases, strategy_and_pair(5), |(s, a, b)| {
        let ab = ttb_predict(&s, &a, &b).unwrap();
        let ba = ttb_predict(&s, &b, &a).unwrap();
        prop_assert_eq!(ab, ba.swapped());
        Ok(())
    })
}

pub fn model_direction_flip(cases: u32) -> Result<(), String> {
    run(cases, strategy_and_pair(5), |(s, a, b)| {
        let o = ttb_predict(&s, &a, &b).unwrap();
        prop_assert_eq!(ttb_predict(&s.with_flipped_directions(), &a, &b).unwrap(), o.swapped());
        Ok(())
    })
}

pub fn model_zero_delta_undecided(cases: u32) -> Result<(), String> {
    run(cases, strategy_and_pair(5), |(s, a, _)| {
        let zero = TtbStrategy::without_thresholds(s.order().to_vec(), s.directions().to_vec()).unwrap();
        prop_assert_eq!(ttb_predict(&zero, &a, &a).unwrap(), Outcome::Undecided);
        prop_assert_eq!(ttb_predict(&s, &a, &a).unwrap(), Outcome::Undecided);
        Ok(())
    })
}

fn relabel_vec(x: &[f64], perm: &[usize]) -> Vec<f64> {
    let mut out = vec![0.0; x.len()];
    for (c, v) in x.iter().enumerate() {
        out[perm[c]] = *v;
    }
    out
}

pub fn model_cue_permutation_invariance(cases: u32) -> Result<(), String> {
    let s = strategy_and_pair(5).prop_flat_map(|t| {
        let m = t.0.n_cues();
        (Just(t), Just((0..m).collect::<Vec<usize>>()).prop_shuffle())
    });
    run(cases, s, |((s, a, b), perm)| {
        let moved = s.relabeled(&perm);
        let o = ttb_predict(&s, &a, &b).unwrap();
        prop_assert_eq!(ttb_predict(&moved, &relabel_vec(&a, &perm), &relabel_vec(&b, &perm)).unwrap(), o);
        Ok(())
    })
}

// ---- special functions ----

fn ab() -> impl Strategy<Value = (f64, f64)> {
    (0.1f64..300.0, 0.1f64..300.0)
}

pub fn special_monotone(cases: u32) -> Result<(), String> {
    run(cases, (ab(), 0.01f64..5.0), |((a, b), step)| {
        let base = log_beta_inc_half(a, b).unwrap();
        prop_assert!(log_beta_inc_half(a + step, b).unwrap() < base);
        prop_assert!(log_beta_inc_half(a, b + step).unwrap() < base);
        Ok(())
    })
}

pub fn special_recurrence(cases: u32) -> Result<(), String> {
    run(cases, ab(), |(a, b)| {
        let l = log_beta_inc_half(a, b).unwrap();
        let sum = (log_beta_inc_half(a + 1.0, b).unwrap() - l).exp() + (log_beta_inc_half(a, b + 1.0).unwrap() - l).exp();
        prop_assert!((sum - 1.0).abs() < 1e-10, "sum ratio {sum}");
        Ok(())
    })
}

pub fn special_complement(cases: u32) -> Result<(), String> {
    run(cases, ab(), |(a, b)| {
        let full = ln_beta(a, b);
        let sum = (log_beta_inc_half(a, b).unwrap() - full).exp() + (log_beta_inc_half(b, a).unwrap() - full).exp();
        prop_assert!((sum - 1.0).abs() < 1e-10, "sum ratio {sum}");
        Ok(())
    })
}

pub fn special_mean_in_range(cases: u32) -> Result<(), String> {
    run(cases, (0.01f64..2000.0, 0.01f64..2000.0), |(a, b)| {
        let m = trunc_beta_mean(a, b).unwrap();
        prop_assert!(m > 0.0 && m < 0.5, "mean {m}");
        Ok(())
    })
}

// ---- likelihood ----

pub fn likelihood_undecided_factorization(cases: u32) -> Result<(), String> {
    run(cases, (0.0f64..50.0, 0.0f64..50.0, 0.0f64..50.0, 1u32..20, 0.05f64..1.0), |(c, i, u, k, w)| {
        let prior = NoisePrior::uniform();
        let base = log_marginal_likelihood(&FitCounts::new(c, i, u).unwrap(), &prior).unwrap();
        let more = log_marginal_likelihood(&FitCounts::new(c, i, u + k as f64 * w).unwrap(), &prior).unwrap();
        prop_assert!((more - base - k as f64 * w * 0.5f64.ln()).abs() < 1e-10);
        Ok(())
    })
}

pub fn likelihood_flip_duality(cases: u32) -> Result<(), String> {
    let s = dataset(4).prop_flat_map(|d| {
        let m = d.n_cues();
        (Just(d), Just((0..m).collect::<Vec<usize>>()).prop_shuffle(), prop::collection::vec(any::<bool>(), m))
    });
    run(cases, s, |(data, order, pos)| {
        let dirs = pos.into_iter().map(|p| if p { Direction::Positive } else { Direction::Negative }).collect();
        let s = TtbStrategy::without_thresholds(order, dirs).unwrap();
        let a = count_outcomes(&s, &data).unwrap();
        let b = count_outcomes(&s.with_flipped_directions(), &data.with_flipped_labels()).unwrap();
        prop_assert_eq!(a, b);
        Ok(())
    })
}

pub fn likelihood_decreasing_in_errors(cases: u32) -> Result<(), String> {
    run(cases, (1u32..60, 0u32..10), |(total, u)| {
        let prior = NoisePrior::uniform();
        let mut prev = f64::INFINITY;
        for ni in 0..=total {
            let counts = FitCounts::new((total - ni) as f64, ni as f64, u as f64).unwrap();
            let l = log_marginal_likelihood(&counts, &prior).unwrap();
            prop_assert!(l < prev, "not decreasing at N_i = {ni}");
            prev = l;
        }
        Ok(())
    })
}

pub fn likelihood_bounded(cases: u32) -> Result<(), String> {
    run(cases, (0u32..200, 0u32..200, 0u32..200), |(c, i, u)| {
        let counts = FitCounts::new(c as f64, i as f64, u as f64).unwrap();
        let p = log_marginal_likelihood(&counts, &NoisePrior::uniform()).unwrap().exp();
        prop_assert!(p > 0.0 && p <= 1.0, "likelihood {p}");
        Ok(())
    })
}

// ---- inference ----

pub fn inference_exact_normalized(cases: u32) -> Result<(), String> {
    let s = dataset(3).prop_flat_map(|d| {
        let m = d.n_cues();
        (Just(d), prop::collection::vec(1usize..3, m))
    });
    run(cases, s, |(data, ks)| {
        let grid = ThresholdGrid::new(ks.iter().map(|&k| (0..k).map(|t| t as f64 * 0.75).collect()).collect()).unwrap();
        let post = exhaustive_posterior(&data, &NoisePrior::uniform(), Some(&grid)).unwrap();
        let m = data.n_cues();
        let expected: usize = (1..=m).product::<usize>() * (1 << m) * ks.iter().product::<usize>();
        prop_assert_eq!(post.len(), expected);
        let total: f64 = post.weights().iter().sum();
        prop_assert!((total - 1.0).abs() < 1e-9);
        for row in cue_rank_marginals(&post).unwrap() {
            prop_assert!((row.iter().sum::<f64>() - 1.0).abs() < 1e-9);
        }
        Ok(())
    })
}

pub fn inference_candidates_contain_current(cases: u32) -> Result<(), String> {
    let s = (dataset(4), any::<u64>(), 1usize..4).prop_flat_map(|(d, seed, k)| {
        let m = d.n_cues();
        (Just(d), Just(seed), Just(k), 0..m)
    });
    run(cases, s, |(data, seed, k, cue)| {
        let m = data.n_cues();
        let grid = ThresholdGrid::new(vec![(0..k).map(|t| t as f64).collect(); m]).unwrap();
        let mut chain = GibbsChain::new(&data, &NoisePrior::uniform(), Some(&grid), seed, Initialization::Random).unwrap();
        chain.sweep();
        let current = chain.strategy();
        let cands = chain.candidates(cue);
        prop_assert_eq!(cands.len(), 2 * m * k);
        let hit = cands.iter().find(|c| chain.candidate_strategy(cue, c) == current);
        prop_assert!(hit.is_some(), "current state missing from candidates");
        prop_assert!((hit.unwrap().log_posterior - chain.log_posterior()).abs() < 1e-12);
        Ok(())
    })
}

pub fn inference_relabeling_invariance(cases: u32) -> Result<(), String> {
    let s = dataset(3).prop_flat_map(|d| {
        let m = d.n_cues();
        (Just(d), Just((0..m).collect::<Vec<usize>>()).prop_shuffle())
    });
    run(cases, s, |(data, perm)| {
        let items: Vec<Vec<f64>> = data.items().iter().map(|x| relabel_vec(x, &perm)).collect();
        let moved = PairwiseComparisons::new(items, data.pairs().to_vec(), data.weight()).unwrap();
        let prior = NoisePrior::uniform();
        let a = exhaustive_posterior(&data, &prior, None).unwrap();
        let b = exhaustive_posterior(&moved, &prior, None).unwrap();
        let lookup: HashMap<_, f64> =
            b.entries().iter().zip(b.weights()).map(|(e, p)| (e.strategy.key(), p)).collect();
        for (e, p) in a.entries().iter().zip(a.weights()) {
            let q = lookup[&e.strategy.relabeled(&perm).key()];
            prop_assert!((p - q).abs() < 1e-12);
        }
        Ok(())
    })
}

pub fn inference_uninformative_data_gives_prior(cases: u32) -> Result<(), String> {
    run(cases, (1usize..4, 2usize..6, any::<bool>()), |(m, n, label)| {
        // identical items: every pair undecided under every strategy
        let items = vec![vec![1.0; m]; n];
        let pairs = (1..n).map(|j| Comparison { first: 0, second: j, first_wins: label }).collect();
        let data = PairwiseComparisons::new(items, pairs, 1.0).unwrap();
        let post = exhaustive_posterior(&data, &NoisePrior::uniform(), None).unwrap();
        let uniform = 1.0 / post.len() as f64;
        prop_assert!(post.weights().iter().all(|p| (p - uniform).abs() < 1e-12));
        Ok(())
    })
}

pub fn inference_seeded_determinism(cases: u32) -> Result<(), String> {
    run(cases, (dataset(4), any::<u64>()), |(data, seed)| {
        let cfg = SamplerConfig::new(30, 5, seed).unwrap();
        let a = gibbs_sample(&data, &NoisePrior::uniform(), &cfg, None).unwrap();
        let b = gibbs_sample(&data, &NoisePrior::uniform(), &cfg, None).unwrap();
        prop_assert_eq!(a, b);
        Ok(())
    })
}

// ---- prediction ----

pub fn prediction_complement(cases: u32) -> Result<(), String> {
    run(cases, (dataset(3), prop::collection::vec(-2i32..=2, 6)), |(data, xs)| {
        let m = data.n_cues();
        let x1: Vec<f64> = xs[..m].iter().map(|&v| v as f64).collect();
        let x2: Vec<f64> = xs[3..3 + m].iter().map(|&v| v as f64).collect();
        let post = exhaustive_posterior(&data, &NoisePrior::uniform(), None).unwrap();
        let p = predictive_prob(&post, &NoisePrior::uniform(), &x1, &x2).unwrap().p_first;
        let q = predictive_prob(&post, &NoisePrior::uniform(), &x2, &x1).unwrap().p_first;
        prop_assert!((p + q - 1.0).abs() < 1e-12);
        prop_assert!((0.0..=1.0).contains(&p));
        Ok(())
    })
}

fn point_mass_p(nc: f64, ni: f64) -> f64 {
    let s = TtbStrategy::without_thresholds(vec![0], vec![Direction::Positive]).unwrap();
    let post = pttb::inference::StrategyPosterior::point_mass(s, FitCounts::new(nc, ni, 0.0).unwrap(), 0.0);
    predictive_prob(&post, &NoisePrior::uniform(), &[1.0], &[0.0]).unwrap().p_first
}

pub fn prediction_monotone_in_evidence(cases: u32) -> Result<(), String> {
    run(cases, (0u32..300, 0u32..300), |(nc, ni)| {
        let (nc, ni) = (nc as f64, ni as f64);
        prop_assert!(point_mass_p(nc + 1.0, ni) > point_mass_p(nc, ni));
        Ok(())
    })
}

pub fn prediction_matches_quadrature(cases: u32) -> Result<(), String> {
    run(cases, (0.0f64..40.0, 0.0f64..40.0), |(nc, ni)| {
        // ∫ (1-ε) ε^{a-1} (1-ε)^{b-1} dε / ∫ ε^{a-1} (1-ε)^{b-1} dε over (0, 1/2), with ε = s² to
        // tame the endpoint at 0
        let (a, b) = (ni + 1.0, nc + 1.0);
        let kernel = |s: f64, extra: f64| {
            let e: f64 = s * s;
            2.0 * s * e.powf(a - 1.0) * (1.0 - e).powf(b - 1.0 + extra)
        };
        let hi = 0.5f64.sqrt();
        let num = integrate(|s| kernel(s, 1.0), 0.0, hi, 1e-13);
        let den = integrate(|s| kernel(s, 0.0), 0.0, hi, 1e-13);
        let p = point_mass_p(nc, ni);
        prop_assert!((p - num / den).abs() < 1e-8, "{p} vs {}", num / den);
        Ok(())
    })
}

// ---- baselines ----

pub fn baselines_valid_fit(cases: u32) -> Result<(), String> {
    run(cases, dataset(5), |data| {
        let s = classic_ttb_fit(&data).unwrap();
        let mut seen = s.order().to_vec();
        seen.sort_unstable();
        prop_assert_eq!(seen, (0..data.n_cues()).collect::<Vec<_>>());
        for v in cue_validities(&data) {
            prop_assert!((0.5..=1.0).contains(&v.validity));
            if v.discriminating_count == 0 {
                prop_assert_eq!(v.validity, 0.5);
            }
        }
        Ok(())
    })
}

pub fn baselines_rescaling_invariance(cases: u32) -> Result<(), String> {
    let s = dataset(4).prop_flat_map(|d| {
        let m = d.n_cues();
        (Just(d), prop::collection::vec(0.01f64..100.0, m))
    });
    run(cases, s, |(data, scale)| {
        let items = data.items().iter().map(|x| x.iter().zip(&scale).map(|(v, s)| v * s).collect()).collect();
        let scaled = PairwiseComparisons::new(items, data.pairs().to_vec(), 1.0).unwrap();
        prop_assert_eq!(classic_ttb_fit(&data).unwrap(), classic_ttb_fit(&scaled).unwrap());
        Ok(())
    })
}

pub fn baselines_gradient_fd(cases: u32) -> Result<(), String> {
    let s = dataset(4).prop_flat_map(|d| {
        let m = d.n_cues();
        (Just(d), prop::collection::vec(-2.0f64..2.0, m))
    });
    run(cases, s, |(data, w)| {
        let g = logistic_gradient(&w, &data, 1e-4);
        for k in 0..w.len() {
            let h = 1e-5;
            let mut up = w.clone();
            let mut dn = w.clone();
            up[k] += h;
            dn[k] -= h;
            let fd = (logistic_loss(&up, &data, 1e-4) - logistic_loss(&dn, &data, 1e-4)) / (2.0 * h);
            prop_assert!((fd - g[k]).abs() < 1e-6, "cue {k}: {fd} vs {}", g[k]);
        }
        Ok(())
    })
}

pub fn baselines_loss_nonincreasing(cases: u32) -> Result<(), String> {
    run(cases, dataset(5), |data| {
        let fit = logreg_fit(&data).unwrap();
        prop_assert!(fit.loss_history.windows(2).all(|w| w[1] <= w[0]));
        prop_assert!(fit.model.weights.iter().all(|w| w.is_finite()));
        let x1 = data.items()[0].clone();
        let x2 = data.items()[1].clone();
        let p = fit.model.predict(&x1, &x2).unwrap() + fit.model.predict(&x2, &x1).unwrap();
        prop_assert!((p - 1.0).abs() < 1e-12);
        Ok(())
    })
}

// ---- harness ----

pub fn harness_split_disjoint(cases: u32) -> Result<(), String> {
    run(cases, (2usize..200, 0.01f64..0.99, any::<u64>()), |(n, f, seed)| {
        let (train, test) = split_items(n, f, seed);
        prop_assert_eq!(train.len() + test.len(), n);
        prop_assert!(train.iter().all(|i| test.binary_search(i).is_err()));
        prop_assert_eq!(train.len(), ((f * n as f64).round() as usize).min(n));
        Ok(())
    })
}

pub fn harness_training_accuracy(cases: u32) -> Result<(), String> {
    run(cases, (1usize..4, 3usize..9, any::<u64>()), |(m, n, seed)| {
        // noiseless labels from a hidden TTB rule
        let data = synthetic_instance(seed, n, m, 3, 0.0);
        let post = exhaustive_posterior(&data, &NoisePrior::uniform(), None).unwrap();
        let acc = evaluate_accuracy(&PosteriorPredictor::new(&post, &NoisePrior::uniform()).unwrap(), &data).unwrap();
        prop_assert!(acc >= 0.5, "training accuracy {acc}");
        Ok(())
    })
}

pub fn harness_determinism(cases: u32) -> Result<(), String> {
    run(cases, (any::<u64>(), 6usize..12), |(seed, n)| {
        let items: Vec<Vec<f64>> = (0..n).map(|i| vec![(i * 7 % 5) as f64, (i % 3) as f64]).collect();
        let crit: Vec<f64> = (0..n).map(|i| ((i * 13) % 17) as f64).collect();
        let table = ItemTable::from_rows(items, crit).unwrap();
        let cfg = BenchmarkConfig {
            fractions: vec![0.5],
            replications: 2,
            methods: Method::ALL.to_vec(),
            sampler: SamplerConfig::new(20, 5, seed).unwrap(),
            base_seed: seed,
            record_timing: false,
            ..BenchmarkConfig::default()
        };
        let ds = [Dataset { name: "d".into(), table }];
        prop_assert_eq!(run_benchmark(&cfg, &ds).unwrap(), run_benchmark(&cfg, &ds).unwrap());
        Ok(())
    })
}

// ---- embedding ----

fn small_task(x: Vec<Vec<f64>>, y: Vec<f64>) -> RegressionTask {
    RegressionTask { grid: WeightGrid { resolution: 11, ..WeightGrid::default() }, ..RegressionTask::new(x, y) }
}

pub fn embedding_conjugate(cases: u32) -> Result<(), String> {
    let s = (prop::collection::vec(-1.0f64..1.0, 4), prop::collection::vec(-3.0f64..3.0, 2), 0.2f64..3.0, 0.2f64..3.0);
    run(cases, s, |(xs, y, s2, t2)| {
        let x = vec![xs[..2].to_vec(), xs[2..].to_vec()];
        let task = RegressionTask { noise_variance: s2, prior_variance: t2, ..small_task(x.clone(), y.clone()) };
        let d = grid_posterior(&task, None, None, PairwiseModel::None, &NoisePrior::uniform(), DensityScaling::Max1)
            .unwrap();
        for (j, row) in d.log_values.iter().enumerate() {
            for (i, l) in row.iter().enumerate() {
                let o = super::conjugate_log_joint(&x, &y, s2, t2, [d.w1[i], d.w2[j]]);
                prop_assert!((l - o).abs() <= 1e-8 * o.abs().max(1.0), "{l} vs {o}");
            }
        }
        Ok(())
    })
}

fn agent_with(seed: u64, threshold: f64) -> AgentConfig {
    AgentConfig { threshold, seed, points: pttb::embedding::square_grid(-1.0, 1.0, 3), subset_size: 5, ..AgentConfig::default() }
}

pub fn embedding_exchangeable_term(cases: u32) -> Result<(), String> {
    run(cases, (any::<u64>(), -2.0f64..2.0, -2.0f64..2.0), |(seed, a, b)| {
        let agent = agent_with(seed, 0.25);
        let obs = simulate_agent(&[a, b], &agent).unwrap();
        let task = small_task(vec![vec![0.3, -0.4], vec![0.9, 0.1]], vec![0.2, 1.0]);
        let prior = NoisePrior::uniform();
        let none = grid_posterior(&task, None, None, PairwiseModel::None, &prior, DensityScaling::Max1).unwrap();
        let ttb = grid_posterior(&task, Some(&obs), Some(&agent), PairwiseModel::Ttb, &prior, DensityScaling::Max1).unwrap();
        let unb = grid_posterior(&task, Some(&obs), None, PairwiseModel::Unbiased, &prior, DensityScaling::Max1).unwrap();
        for j in 0..none.w2.len() {
            for i in 0..none.w1.len() {
                let w = [none.w1[i], none.w2[j]];
                let et = ttb_evidence(&w, &agent, &obs, &prior).unwrap();
                let eu = unbiased_evidence(&w, &obs).unwrap();
                prop_assert!((ttb.log_values[j][i] - none.log_values[j][i] - et).abs() < 1e-9);
                prop_assert!((unb.log_values[j][i] - none.log_values[j][i] - eu).abs() < 1e-9);
            }
        }
        Ok(())
    })
}

pub fn embedding_scale_invariance(cases: u32) -> Result<(), String> {
    let s = (any::<u64>(), -2.0f64..2.0, -2.0f64..2.0, -2.0f64..2.0, -2.0f64..2.0, 0.05f64..20.0);
    run(cases, s, |(seed, a, b, u, v, c)| {
        let agent = agent_with(seed, 0.0);
        let obs = simulate_agent(&[a, b], &agent).unwrap();
        let prior = NoisePrior::uniform();
        let w = [u, v];
        let cw = [c * u, c * v];
        let e1 = ttb_evidence(&w, &agent, &obs, &prior).unwrap();
        let e2 = ttb_evidence(&cw, &agent, &obs, &prior).unwrap();
        prop_assert!((e1 - e2).abs() < 1e-9, "{e1} vs {e2}");
        prop_assert!((unbiased_evidence(&w, &obs).unwrap() - unbiased_evidence(&cw, &obs).unwrap()).abs() < 1e-12);
        Ok(())
    })
}

pub fn embedding_panels_deterministic(cases: u32) -> Result<(), String> {
    run(cases, any::<u64>(), |seed| {
        let cfg = EmbeddingConfig { seed, grid: WeightGrid { resolution: 7, ..WeightGrid::default() }, ..EmbeddingConfig::default() };
        let a = run_embedding_experiment(&cfg).unwrap();
        let b = run_embedding_experiment(&cfg).unwrap();
        prop_assert_eq!(a.panels.len(), 5);
        for ((na, da), (nb, db)) in a.panels.iter().zip(&b.panels) {
            prop_assert_eq!(na, nb);
            prop_assert_eq!(&da.log_values, &db.log_values);
            prop_assert_eq!(da.shape(), (7, 7));
        }
        Ok(())
    })
}

/// Every property with the case count used by the acceptance runner.
pub const ALL: &[(&str, Check, u32)] = &[
    ("ttb antisymmetry", model_antisymmetry, 256),
    ("ttb direction flip", model_direction_flip, 256),
    ("ttb zero difference undecided", model_zero_delta_undecided, 128),
    ("ttb cue relabeling", model_cue_permutation_invariance, 256),
    ("incomplete beta monotone", special_monotone, 256),
    ("incomplete beta recurrence", special_recurrence, 256),
    ("incomplete beta complement", special_complement, 256),
    ("truncated mean in (0, 1/2)", special_mean_in_range, 256),
    ("undecided factorization", likelihood_undecided_factorization, 256),
    ("direction/label flip duality", likelihood_flip_duality, 128),
    ("likelihood decreasing in errors", likelihood_decreasing_in_errors, 64),
    ("likelihood in (0, 1]", likelihood_bounded, 256),
    ("exact posterior normalized", inference_exact_normalized, 48),
    ("candidates contain current state", inference_candidates_contain_current, 64),
    ("posterior relabeling invariance", inference_relabeling_invariance, 32),
    ("uninformative data gives prior", inference_uninformative_data_gives_prior, 32),
    ("sampler seeded determinism", inference_seeded_determinism, 16),
    ("predictive complement", prediction_complement, 48),
    ("predictive monotone in evidence", prediction_monotone_in_evidence, 128),
    ("predictive matches quadrature", prediction_matches_quadrature, 48),
    ("classic TTB valid", baselines_valid_fit, 128),
    ("validity order rescaling invariance", baselines_rescaling_invariance, 128),
    ("logistic gradient finite differences", baselines_gradient_fd, 64),
    ("logistic loss non-increasing", baselines_loss_nonincreasing, 64),
    ("item split disjoint", harness_split_disjoint, 256),
    ("training accuracy at least 1/2", harness_training_accuracy, 48),
    ("benchmark determinism", harness_determinism, 4),
    ("no-pairwise panel is conjugate", embedding_conjugate, 16),
    ("evidence is an additive term", embedding_exchangeable_term, 4),
    ("evidence scale invariance", embedding_scale_invariance, 32),
    ("embedding panels deterministic", embedding_panels_deterministic, 3),
];

//! Independent oracles and instance generators shared by the integration
//! tests. Nothing here calls the numerical routines under test.
#![allow(dead_code)]

pub mod props;

use std::collections::HashMap;

use pttb::model::{Comparison, PairwiseComparisons};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

// Gauss-Kronrod 7/15 nodes and weights (QUADPACK qk15).
const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_18,
    0.140_653_259_715_525_92,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_83,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

fn gk15(f: &impl Fn(f64) -> f64, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut kron = WGK[7] * fc;
    let mut gauss = WG[3] * fc;
    for j in 0..7 {
        let x = h * XGK[j];
        let s = f(c - x) + f(c + x);
        kron += WGK[j] * s;
        if j % 2 == 1 {
            gauss += WG[j / 2] * s;
        }
    }
    (kron * h, ((kron - gauss) * h).abs())
}

/// Globally adaptive Gauss-Kronrod integration: keep bisecting the interval
/// with the largest error estimate.
pub fn integrate(f: impl Fn(f64) -> f64, a: f64, b: f64, rel_tol: f64) -> f64 {
    let mut parts = vec![(a, b, gk15(&f, a, b))];
    for _ in 0..20_000 {
        let total: f64 = parts.iter().map(|p| p.2 .0).sum();
        let err: f64 = parts.iter().map(|p| p.2 .1).sum();
        if err <= rel_tol * total.abs() {
            break;
        }
        let (k, _) = parts
            .iter()
            .enumerate()
            .max_by(|x, y| x.1 .2 .1.total_cmp(&y.1 .2 .1))
            .unwrap();
        let (lo, hi, _) = parts.swap_remove(k);
        let mid = 0.5 * (lo + hi);
        parts.push((lo, mid, gk15(&f, lo, mid)));
        parts.push((mid, hi, gk15(&f, mid, hi)));
    }
    parts.iter().map(|p| p.2 .0).sum()
}

/// `ln ∫₀^{1/2} ε^{a-1} (1-ε)^{b-1} dε` by quadrature in `t = -ln ε`, where the
/// integrand `exp(-a t) (1 - e^{-t})^{b-1}` has no endpoint singularity.
/// The integrand is scaled by its maximum so nothing under- or overflows.
pub fn log_beta_half_quadrature(a: f64, b: f64) -> f64 {
    let lg = |t: f64| -a * t + (b - 1.0) * (-(-t).exp_m1()).ln();
    let t0 = std::f64::consts::LN_2;
    let mode = if b - 1.0 > a { ((a + b - 1.0) / a).ln() } else { t0 };
    let peak = lg(mode).max(lg(t0));
    let mut end = mode + 1.0;
    while lg(end) > peak - 80.0 {
        end = mode + 2.0 * (end - mode);
    }
    let h = |t: f64| (lg(t) - peak).exp();
    let mut total = 0.0;
    if mode > t0 {
        total += integrate(h, t0, mode, 1e-14);
    }
    total += integrate(h, mode, end, 1e-14);
    peak + total.ln()
}

/// `ln B(a, b)` by the same route over the whole unit interval:
/// `B½(a, b) + B½(b, a)`.
pub fn log_beta_quadrature(a: f64, b: f64) -> f64 {
    let x = log_beta_half_quadrature(a, b);
    let y = log_beta_half_quadrature(b, a);
    x.max(y) + (-(x - y).abs()).exp().ln_1p()
}

/// Plain TTB written out independently of the library.
pub fn ttb_oracle(order: &[usize], positive: &[bool], thresholds: &[f64], delta: &[f64]) -> Option<bool> {
    for &c in order {
        if delta[c].abs() > thresholds[c] {
            return Some((delta[c] > 0.0) == positive[c]);
        }
    }
    None
}

pub fn permutations(m: usize) -> Vec<Vec<usize>> {
    if m == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for p in permutations(m - 1) {
        for pos in 0..=p.len() {
            let mut q = p.clone();
            q.insert(pos, m - 1);
            out.push(q);
        }
    }
    out
}

/// Brute-force posterior over `(g, d)` with zero thresholds and a uniform
/// noise prior: every configuration's likelihood from its own counts and the
/// quadrature oracle. Keyed by (order, positive flags).
pub fn brute_force_posterior(data: &PairwiseComparisons) -> HashMap<(Vec<usize>, Vec<bool>), f64> {
    let m = data.n_cues();
    let w = data.weight();
    let zeros = vec![0.0; m];
    let mut memo: HashMap<(u64, u64), f64> = HashMap::new();
    let mut logs = Vec::new();
    for order in permutations(m) {
        for mask in 0..(1usize << m) {
            let positive: Vec<bool> = (0..m).map(|c| mask >> c & 1 == 0).collect();
            let (mut nc, mut ni, mut nu) = (0u64, 0u64, 0u64);
            for k in 0..data.len() {
                match ttb_oracle(&order, &positive, &zeros, data.delta(k)) {
                    None => nu += 1,
                    Some(p) if p == data.label(k) => nc += 1,
                    Some(_) => ni += 1,
                }
            }
            let lb = *memo
                .entry((ni, nc))
                .or_insert_with(|| log_beta_half_quadrature(ni as f64 * w + 1.0, nc as f64 * w + 1.0));
            logs.push(((order.clone(), positive), nu as f64 * w * 0.5f64.ln() + lb));
        }
    }
    let max = logs.iter().map(|l| l.1).fold(f64::NEG_INFINITY, f64::max);
    let z: f64 = logs.iter().map(|l| (l.1 - max).exp()).sum();
    logs.into_iter().map(|(k, l)| (k, (l - max).exp() / z)).collect()
}

pub fn total_variation(p: &HashMap<(Vec<usize>, Vec<bool>), f64>, q: &HashMap<(Vec<usize>, Vec<bool>), f64>) -> f64 {
    let mut keys: Vec<_> = p.keys().chain(q.keys()).collect();
    keys.sort();
    keys.dedup();
    0.5 * keys.iter().map(|k| (p.get(*k).unwrap_or(&0.0) - q.get(*k).unwrap_or(&0.0)).abs()).sum::<f64>()
}

/// Items with integer cue levels in `0..levels` and labels from a hidden
/// lexicographic rule with random directions, flipped with probability
/// `noise`.
pub fn synthetic_instance(seed: u64, n_items: usize, m: usize, levels: u32, noise: f64) -> PairwiseComparisons {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let items: Vec<Vec<f64>> = (0..n_items)
        .map(|_| (0..m).map(|_| rng.random_range(0..levels) as f64).collect())
        .collect();
    let mut order: Vec<usize> = (0..m).collect();
    for i in (1..m).rev() {
        order.swap(i, rng.random_range(0..=i));
    }
    let positive: Vec<bool> = (0..m).map(|_| rng.random_bool(0.5)).collect();
    let zeros = vec![0.0; m];
    let mut pairs = Vec::new();
    for i in 0..n_items {
        for j in i + 1..n_items {
            let delta: Vec<f64> = items[i].iter().zip(&items[j]).map(|(a, b)| a - b).collect();
            let truth = ttb_oracle(&order, &positive, &zeros, &delta).unwrap_or_else(|| rng.random_bool(0.5));
            let label = if rng.random_bool(noise) { !truth } else { truth };
            pairs.push(Comparison { first: i, second: j, first_wins: label });
        }
    }
    PairwiseComparisons::new(items, pairs, 1.0).unwrap()
}

/// Conjugate Gaussian posterior for two weights: returns
/// `ln N(w; μ, A⁻¹) + ln p(D)` for a prior `N(0, τ² I)` and noise `σ²`.
/// Written out with 2×2 algebra; needs exactly two direct observations.
pub fn conjugate_log_joint(x: &[Vec<f64>], y: &[f64], s2: f64, t2: f64, w: [f64; 2]) -> f64 {
    assert_eq!(x.len(), 2);
    let ln2pi = (2.0 * std::f64::consts::PI).ln();
    // posterior precision A = I/τ² + XᵀX/σ²
    let mut a = [[1.0 / t2, 0.0], [0.0, 1.0 / t2]];
    let mut xty = [0.0; 2];
    for (xi, yi) in x.iter().zip(y) {
        for r in 0..2 {
            xty[r] += xi[r] * yi / s2;
            for c in 0..2 {
                a[r][c] += xi[r] * xi[c] / s2;
            }
        }
    }
    let det_a = a[0][0] * a[1][1] - a[0][1] * a[1][0];
    let mu = [
        (a[1][1] * xty[0] - a[0][1] * xty[1]) / det_a,
        (a[0][0] * xty[1] - a[1][0] * xty[0]) / det_a,
    ];
    let d = [w[0] - mu[0], w[1] - mu[1]];
    let quad = d[0] * (a[0][0] * d[0] + a[0][1] * d[1]) + d[1] * (a[1][0] * d[0] + a[1][1] * d[1]);
    let log_post = -0.5 * quad - ln2pi + 0.5 * det_a.ln();
    // marginal likelihood y ~ N(0, K), K = σ² I + τ² X Xᵀ
    let dot = |u: &[f64], v: &[f64]| u[0] * v[0] + u[1] * v[1];
    let k = [
        [s2 + t2 * dot(&x[0], &x[0]), t2 * dot(&x[0], &x[1])],
        [t2 * dot(&x[1], &x[0]), s2 + t2 * dot(&x[1], &x[1])],
    ];
    let det_k = k[0][0] * k[1][1] - k[0][1] * k[1][0];
    let kinv_y = [
        (k[1][1] * y[0] - k[0][1] * y[1]) / det_k,
        (k[0][0] * y[1] - k[1][0] * y[0]) / det_k,
    ];
    let log_ev = -0.5 * (y[0] * kinv_y[0] + y[1] * kinv_y[1]) - ln2pi - 0.5 * det_k.ln();
    log_post + log_ev
}

/// `data/` at the workspace root, or `PTTB_DATA_DIR`.
pub fn data_dir() -> std::path::PathBuf {
    std::env::var_os("PTTB_DATA_DIR")
        .map(Into::into)
        .unwrap_or_else(|| std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data"))
}

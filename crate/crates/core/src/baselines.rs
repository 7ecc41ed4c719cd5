//! Comparison methods: classic validity-ordered TTB and logistic regression
//! on cue differences.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{Direction, PairwiseComparisons, TtbStrategy};

/// Ecological validity of one cue over the discriminating training pairs.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CueValidity {
    /// Folded into `[0.5, 1]` by choosing the direction.
    pub validity: f64,
    pub direction: Direction,
    pub discriminating_count: usize,
}

pub fn cue_validities(train: &PairwiseComparisons) -> Vec<CueValidity> {
    (0..train.n_cues())
        .map(|cue| {
            let mut hits = 0usize;
            let mut seen = 0usize;
            for k in 0..train.len() {
                let dv = train.delta(k)[cue];
                if dv != 0.0 {
                    seen += 1;
                    if (dv > 0.0) == train.label(k) {
                        hits += 1;
                    }
                }
            }
            let raw = if seen == 0 { 0.5 } else { hits as f64 / seen as f64 };
            let direction = if raw >= 0.5 { Direction::Positive } else { Direction::Negative };
            CueValidity { validity: raw.max(1.0 - raw), direction, discriminating_count: seen }
        })
        .collect()
}

/// Cues ordered by descending validity, ties by ascending index; zero
/// thresholds.
pub fn classic_ttb_fit(train: &PairwiseComparisons) -> Result<TtbStrategy> {
    if train.is_empty() {
        return Err(Error::invalid("classic TTB needs at least one training pair"));
    }
    let v = cue_validities(train);
    let mut order: Vec<usize> = (0..v.len()).collect();
    order.sort_by(|&a, &b| v[b].validity.total_cmp(&v[a].validity).then(a.cmp(&b)));
    TtbStrategy::without_thresholds(order, v.iter().map(|c| c.direction).collect())
}

/// Ridge penalty on the logistic weights.
pub const LOGREG_RIDGE: f64 = 1e-4;
const LOGREG_MAX_ITER: usize = 100;
const LOGREG_GRAD_TOL: f64 = 1e-10;

/// Logistic model `p(first wins) = σ(βᵀ(x₁ - x₂))`, no intercept.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LogRegModel {
    pub weights: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct LogRegFit {
    pub model: LogRegModel,
    pub converged: bool,
    pub iterations: usize,
    /// Objective after every accepted iterate, starting at β = 0.
    pub loss_history: Vec<f64>,
}

fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

/// `ln(1 + e^z)` without overflow.
fn softplus(z: f64) -> f64 {
    if z > 0.0 {
        z + (-z).exp().ln_1p()
    } else {
        z.exp().ln_1p()
    }
}

/// Mean negative Bernoulli log-likelihood plus `λ/2 ‖β‖²`.
pub fn logistic_loss(weights: &[f64], data: &PairwiseComparisons, ridge: f64) -> f64 {
    let n = data.len().max(1) as f64;
    let nll: f64 = (0..data.len())
        .map(|k| {
            let z: f64 = weights.iter().zip(data.delta(k)).map(|(w, d)| w * d).sum();
            if data.label(k) {
                softplus(-z)
            } else {
                softplus(z)
            }
        })
        .sum();
    nll / n + 0.5 * ridge * weights.iter().map(|w| w * w).sum::<f64>()
}

pub fn logistic_gradient(weights: &[f64], data: &PairwiseComparisons, ridge: f64) -> Vec<f64> {
    let n = data.len().max(1) as f64;
    let mut g: Vec<f64> = weights.iter().map(|w| ridge * w).collect();
    for k in 0..data.len() {
        let d = data.delta(k);
        let z: f64 = weights.iter().zip(d).map(|(w, x)| w * x).sum();
        let r = sigmoid(z) - if data.label(k) { 1.0 } else { 0.0 };
        for (gi, xi) in g.iter_mut().zip(d) {
            *gi += r * xi / n;
        }
    }
    g
}

fn logistic_hessian(weights: &[f64], data: &PairwiseComparisons, ridge: f64) -> DMatrix<f64> {
    let m = weights.len();
    let n = data.len().max(1) as f64;
    let mut h = DMatrix::<f64>::identity(m, m) * ridge;
    for k in 0..data.len() {
        let d = data.delta(k);
        let z: f64 = weights.iter().zip(d).map(|(w, x)| w * x).sum();
        let s = sigmoid(z);
        let c = s * (1.0 - s) / n;
        for i in 0..m {
            for j in 0..m {
                h[(i, j)] += c * d[i] * d[j];
            }
        }
    }
    h
}

/// Damped Newton iterations with backtracking, so the objective never
/// increases. Returns the best iterate even without convergence.
pub fn logreg_fit(train: &PairwiseComparisons) -> Result<LogRegFit> {
    if train.is_empty() {
        return Err(Error::invalid("logistic regression needs at least one training pair"));
    }
    let m = train.n_cues();
    let mut w = vec![0.0; m];
    let mut loss = logistic_loss(&w, train, LOGREG_RIDGE);
    let mut history = vec![loss];
    let mut converged = false;
    let mut iterations = 0;
    for it in 1..=LOGREG_MAX_ITER {
        iterations = it;
        let g = logistic_gradient(&w, train, LOGREG_RIDGE);
        let gnorm = g.iter().map(|x| x * x).sum::<f64>().sqrt();
        if gnorm < LOGREG_GRAD_TOL {
            converged = true;
            break;
        }
        let h = logistic_hessian(&w, train, LOGREG_RIDGE);
        let gv = DVector::from_vec(g.clone());
        let step = match h.cholesky() {
            Some(ch) => ch.solve(&gv),
            None => gv.clone(),
        };
        let mut t = 1.0;
        let mut accepted = false;
        while t > 1e-12 {
            let trial: Vec<f64> = w.iter().zip(step.iter()).map(|(wi, si)| wi - t * si).collect();
            let trial_loss = logistic_loss(&trial, train, LOGREG_RIDGE);
            if trial_loss <= loss {
                let decrease = loss - trial_loss;
                w = trial;
                loss = trial_loss;
                history.push(loss);
                accepted = true;
                if decrease <= 1e-15 * loss.abs().max(1.0) {
                    converged = true;
                }
                break;
            }
            t *= 0.5;
        }
        if !accepted || converged {
            converged = true;
            break;
        }
    }
    if !converged {
        log::warn!("logistic regression stopped after {iterations} iterations without converging");
    }
    Ok(LogRegFit { model: LogRegModel { weights: w }, converged, iterations, loss_history: history })
}

impl LogRegModel {
    pub fn predict(&self, x1: &[f64], x2: &[f64]) -> Result<f64> {
        let m = self.weights.len();
        for x in [x1, x2] {
            if x.len() != m {
                return Err(Error::DimensionMismatch { expected: m, found: x.len() });
            }
        }
        let z: f64 = self.weights.iter().zip(x1.iter().zip(x2)).map(|(w, (a, b))| w * (a - b)).sum();
        Ok(sigmoid(z))
    }
}

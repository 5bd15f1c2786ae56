//! Linear softmax probe over feature vectors.
//!
//! A small multinomial logistic regression trained by full-batch gradient
//! descent on cross-entropy plus L2. Its job is analysis, not recognition
//! accuracy: classify utterances into the configured emotions and report
//! how the class probabilities move along straight-line sweeps through
//! feature space. Optional white Gaussian noise, redrawn each epoch from a
//! fixed seed, regularizes training the way audio-level noise injection
//! would.

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ranking::Standardization;

/// Current on-disk probe format.
pub const PROBE_FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    pub learning_rate: f64,
    pub l2_penalty: f64,
    pub epochs: usize,
    pub noise_sigma: f64,
    pub seed: u64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            learning_rate: 1.0,
            l2_penalty: 1e-4,
            epochs: 200,
            noise_sigma: 0.0,
            seed: 0,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.learning_rate.is_finite() && self.learning_rate > 0.0) {
            return Err(Error::InvalidConfig(format!(
                "learning rate must be positive, got {}",
                self.learning_rate
            )));
        }
        if !(self.l2_penalty.is_finite() && self.l2_penalty >= 0.0) {
            return Err(Error::InvalidConfig(format!(
                "l2 penalty must be non-negative, got {}",
                self.l2_penalty
            )));
        }
        if self.epochs == 0 {
            return Err(Error::InvalidConfig("epochs must be positive".into()));
        }
        if !(self.noise_sigma.is_finite() && self.noise_sigma >= 0.0) {
            return Err(Error::InvalidConfig(format!(
                "noise sigma must be non-negative, got {}",
                self.noise_sigma
            )));
        }
        Ok(())
    }
}

/// Trained probe: K x d weights, K biases, label order, standardization.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProbeModel {
    pub format_version: u32,
    pub weights: Vec<Vec<f64>>,
    pub biases: Vec<f64>,
    pub emotion_labels: Vec<String>,
    pub standardization: Standardization,
}

impl ProbeModel {
    pub fn num_classes(&self) -> usize {
        self.emotion_labels.len()
    }

    pub fn dim(&self) -> usize {
        self.standardization.dim()
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let model: ProbeModel = serde_json::from_str(text)?;
        if model.format_version != PROBE_FORMAT_VERSION {
            return Err(Error::InvalidConfig(format!(
                "probe format {} unsupported (expected {})",
                model.format_version, PROBE_FORMAT_VERSION
            )));
        }
        model.validate()?;
        Ok(model)
    }

    /// Structural invariants a loaded probe must satisfy.
    pub fn validate(&self) -> Result<()> {
        let k = self.emotion_labels.len();
        if k < 2 {
            return Err(Error::DegenerateLabels(format!(
                "probe has {k} classes, need at least 2"
            )));
        }
        if self.weights.len() != k || self.biases.len() != k {
            return Err(Error::InvalidConfig(format!(
                "probe: {} weight rows / {} biases for {k} labels",
                self.weights.len(),
                self.biases.len()
            )));
        }
        let d = self.standardization.dim();
        for row in &self.weights {
            if row.len() != d {
                return Err(Error::DimensionMismatch {
                    expected: d,
                    got: row.len(),
                });
            }
            if row.iter().any(|w| !w.is_finite()) {
                return Err(Error::InvalidConfig("probe: non-finite weight".into()));
            }
        }
        if self.biases.iter().any(|b| !b.is_finite()) {
            return Err(Error::InvalidConfig("probe: non-finite bias".into()));
        }
        Ok(())
    }
}

fn softmax_rows(logits: &DMatrix<f64>) -> DMatrix<f64> {
    let mut out = logits.clone();
    for mut row in out.row_iter_mut() {
        let max = row.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let mut sum = 0.0;
        for v in row.iter_mut() {
            *v = (*v - max).exp();
            sum += *v;
        }
        for v in row.iter_mut() {
            *v /= sum;
        }
    }
    out
}

/// Mean cross-entropy plus L2 on the weights (biases unpenalized).
fn loss(
    x: &DMatrix<f64>,
    labels: &[usize],
    w: &DMatrix<f64>,
    b: &DVector<f64>,
    l2: f64,
) -> f64 {
    let n = x.nrows() as f64;
    let mut logits = x * w.transpose();
    for mut row in logits.row_iter_mut() {
        row += b.transpose();
    }
    let probs = softmax_rows(&logits);
    let mut ce = 0.0;
    for (i, &label) in labels.iter().enumerate() {
        ce -= probs[(i, label)].max(1e-300).ln();
    }
    ce / n + 0.5 * l2 * w.iter().map(|v| v * v).sum::<f64>()
}

fn gradients(
    x: &DMatrix<f64>,
    labels: &[usize],
    w: &DMatrix<f64>,
    b: &DVector<f64>,
    l2: f64,
) -> (DMatrix<f64>, DVector<f64>) {
    let n = x.nrows() as f64;
    let mut logits = x * w.transpose();
    for mut row in logits.row_iter_mut() {
        row += b.transpose();
    }
    let mut delta = softmax_rows(&logits);
    for (i, &label) in labels.iter().enumerate() {
        delta[(i, label)] -= 1.0;
    }
    delta /= n;
    let grad_w = delta.transpose() * x + l2 * w;
    let grad_b = delta.row_sum().transpose();
    (grad_w, grad_b)
}

/// Public handle on the training loss for verification against finite
/// differences; `w_flat` is row-major K x d and `b` length K.
pub fn cross_entropy_loss(
    data: &[Vec<f64>],
    labels: &[usize],
    num_classes: usize,
    w_flat: &[f64],
    b: &[f64],
    l2: f64,
) -> f64 {
    let n = data.len();
    let d = data.first().map_or(0, Vec::len);
    let x = DMatrix::from_row_iterator(n, d, data.iter().flatten().cloned());
    let w = DMatrix::from_row_iterator(num_classes, d, w_flat.iter().cloned());
    let bv = DVector::from_column_slice(b);
    loss(&x, labels, &w, &bv, l2)
}

/// Analytic gradient matching [`cross_entropy_loss`], flattened row-major.
pub fn cross_entropy_gradient(
    data: &[Vec<f64>],
    labels: &[usize],
    num_classes: usize,
    w_flat: &[f64],
    b: &[f64],
    l2: f64,
) -> (Vec<f64>, Vec<f64>) {
    let n = data.len();
    let d = data.first().map_or(0, Vec::len);
    let x = DMatrix::from_row_iterator(n, d, data.iter().flatten().cloned());
    let w = DMatrix::from_row_iterator(num_classes, d, w_flat.iter().cloned());
    let bv = DVector::from_column_slice(b);
    let (gw, gb) = gradients(&x, labels, &w, &bv, l2);
    (
        gw.row_iter()
            .flat_map(|r| r.iter().cloned().collect::<Vec<_>>())
            .collect(),
        gb.iter().cloned().collect(),
    )
}

/// Trains the probe on labeled feature vectors.
///
/// Labels are ordered by first appearance in the data. With
/// `noise_sigma = 0` the step size is halved whenever a step would
/// increase the loss, so the loss is non-increasing over epochs; with
/// noise the inputs are re-perturbed every epoch and no guard applies.
pub fn train_probe(data: &[(Vec<f64>, String)], config: &TrainConfig) -> Result<ProbeModel> {
    config.validate()?;
    if data.is_empty() {
        return Err(Error::DegenerateLabels("no training samples".into()));
    }
    let mut emotion_labels: Vec<String> = Vec::new();
    for (_, label) in data {
        if !emotion_labels.contains(label) {
            emotion_labels.push(label.clone());
        }
    }
    if emotion_labels.len() < 2 {
        return Err(Error::DegenerateLabels(format!(
            "need at least 2 classes, got {}",
            emotion_labels.len()
        )));
    }
    let dim = data[0].0.len();
    for (row, _) in data {
        if row.len() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                got: row.len(),
            });
        }
    }

    let rows: Vec<Vec<f64>> = data.iter().map(|(row, _)| row.clone()).collect();
    let standardization = Standardization::fit(&rows);
    let standardized: Vec<Vec<f64>> = rows.iter().map(|r| standardization.apply(r)).collect();
    let labels: Vec<usize> = data
        .iter()
        .map(|(_, label)| emotion_labels.iter().position(|l| l == label).unwrap())
        .collect();

    let n = standardized.len();
    let k = emotion_labels.len();
    let x_clean = DMatrix::from_row_iterator(n, dim, standardized.iter().flatten().cloned());
    let mut w: DMatrix<f64> = DMatrix::zeros(k, dim);
    let mut b: DVector<f64> = DVector::zeros(k);
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut lr = config.learning_rate;

    let noisy = config.noise_sigma > 0.0;
    let mut prev_loss = f64::INFINITY;
    for _ in 0..config.epochs {
        let x_epoch = if noisy {
            let mut x = x_clean.clone();
            for v in x.iter_mut() {
                let u1: f64 = rng.gen_range(1e-12..1.0);
                let u2: f64 = rng.gen_range(0.0..1.0);
                let g = (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos();
                *v += config.noise_sigma * g;
            }
            x
        } else {
            x_clean.clone()
        };
        let (gw, gb) = gradients(&x_epoch, &labels, &w, &b, config.l2_penalty);
        if noisy {
            w -= lr * &gw;
            b -= lr * &gb;
            continue;
        }
        // Halve the step until it no longer increases the loss.
        let current = loss(&x_epoch, &labels, &w, &b, config.l2_penalty);
        debug_assert!(current <= prev_loss + 1e-12);
        prev_loss = current;
        let mut stepped = false;
        while lr >= 1e-12 {
            let w_next = &w - lr * &gw;
            let b_next = &b - lr * &gb;
            let next = loss(&x_epoch, &labels, &w_next, &b_next, config.l2_penalty);
            if next <= current {
                w = w_next;
                b = b_next;
                stepped = true;
                break;
            }
            lr *= 0.5;
        }
        if !stepped {
            break;
        }
    }

    Ok(ProbeModel {
        format_version: PROBE_FORMAT_VERSION,
        weights: w
            .row_iter()
            .map(|r| r.iter().cloned().collect())
            .collect(),
        biases: b.iter().cloned().collect(),
        emotion_labels,
        standardization,
    })
}

/// Class probabilities for one vector; non-negative and summing to 1.
pub fn classify(model: &ProbeModel, x: &[f64]) -> Result<Vec<f64>> {
    if x.len() != model.dim() {
        return Err(Error::DimensionMismatch {
            expected: model.dim(),
            got: x.len(),
        });
    }
    let z = model.standardization.apply(x);
    let logits: Vec<f64> = model
        .weights
        .iter()
        .zip(&model.biases)
        .map(|(row, bias)| row.iter().zip(&z).map(|(w, v)| w * v).sum::<f64>() + bias)
        .collect();
    let max = logits.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let exp: Vec<f64> = logits.iter().map(|l| (l - max).exp()).collect();
    let sum: f64 = exp.iter().sum();
    Ok(exp.iter().map(|e| e / sum).collect())
}

/// Classifications along the straight line from `start` to `end`,
/// inclusive, at `steps` evenly spaced points.
pub fn probability_sweep(
    model: &ProbeModel,
    start: &[f64],
    end: &[f64],
    steps: usize,
) -> Result<Vec<Vec<f64>>> {
    if steps < 2 {
        return Err(Error::InvalidConfig(format!(
            "sweep needs at least 2 steps, got {steps}"
        )));
    }
    if start.len() != model.dim() || end.len() != model.dim() {
        return Err(Error::DimensionMismatch {
            expected: model.dim(),
            got: if start.len() != model.dim() {
                start.len()
            } else {
                end.len()
            },
        });
    }
    (0..steps)
        .map(|k| {
            let t = k as f64 / (steps - 1) as f64;
            let point: Vec<f64> = start
                .iter()
                .zip(end)
                .map(|(s, e)| s + t * (e - s))
                .collect();
            classify(model, &point)
        })
        .collect()
}

/// Fraction of samples whose argmax class matches the label.
pub fn accuracy(model: &ProbeModel, data: &[(Vec<f64>, String)]) -> Result<f64> {
    if data.is_empty() {
        return Ok(0.0);
    }
    let mut correct = 0usize;
    for (row, label) in data {
        let probs = classify(model, row)?;
        let argmax = probs
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.partial_cmp(b.1).unwrap())
            .map(|(i, _)| i)
            .unwrap();
        if &model.emotion_labels[argmax] == label {
            correct += 1;
        }
    }
    Ok(correct as f64 / data.len() as f64)
}

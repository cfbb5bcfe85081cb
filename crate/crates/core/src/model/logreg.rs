use serde::{Deserialize, Serialize};

use super::{Example, ModelError};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    pub weights: Vec<f64>,
    pub bias: f64,
}

impl ModelParams {
    pub fn zeros(dim: usize) -> Self {
        Self { weights: vec![0.0; dim], bias: 0.0 }
    }

    pub fn dim(&self) -> usize {
        self.weights.len()
    }

    pub fn is_finite(&self) -> bool {
        self.bias.is_finite() && self.weights.iter().all(|w| w.is_finite())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TrainConfig {
    pub learning_rate: f64,
    pub epochs: usize,
    pub l2_lambda: f64,
    /// Seeds the train/test shuffle; training itself is full-batch.
    pub seed: u64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self { learning_rate: 0.5, epochs: 3_000, l2_lambda: 0.0, seed: 42 }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<(), ModelError> {
        if !(self.learning_rate.is_finite() && self.learning_rate > 0.0) {
            return Err(ModelError::InvalidConfig("learning_rate must be > 0".into()));
        }
        if self.epochs == 0 {
            return Err(ModelError::InvalidConfig("epochs must be > 0".into()));
        }
        if !(self.l2_lambda.is_finite() && self.l2_lambda >= 0.0) {
            return Err(ModelError::InvalidConfig("l2_lambda must be >= 0".into()));
        }
        Ok(())
    }
}

pub fn sigmoid(z: f64) -> f64 {
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

fn linear(params: &ModelParams, x: &[f64]) -> f64 {
    params.weights.iter().zip(x).map(|(w, v)| w * v).sum::<f64>() + params.bias
}

/// `sigmoid(w·x + b)`.
pub fn predict_proba(params: &ModelParams, features: &[f64]) -> Result<f64, ModelError> {
    if features.len() != params.dim() {
        return Err(ModelError::DimensionMismatch { expected: params.dim(), found: features.len() });
    }
    Ok(sigmoid(linear(params, features)))
}

/// Mean logistic loss plus `λ/2 · ‖w‖²` (bias unpenalized).
pub fn loss(params: &ModelParams, examples: &[Example], l2_lambda: f64) -> f64 {
    let n = examples.len() as f64;
    let data: f64 = examples
        .iter()
        .map(|e| {
            let z = linear(params, &e.features);
            softplus(z) - if e.label { z } else { 0.0 }
        })
        .sum::<f64>()
        / n;
    data + 0.5 * l2_lambda * params.weights.iter().map(|w| w * w).sum::<f64>()
}

/// Analytic gradient of [`loss`]: weights first, bias last.
pub fn gradient(params: &ModelParams, examples: &[Example], l2_lambda: f64) -> Vec<f64> {
    let d = params.dim();
    let n = examples.len() as f64;
    let mut grad = vec![0.0; d + 1];
    for e in examples {
        let residual = sigmoid(linear(params, &e.features)) - if e.label { 1.0 } else { 0.0 };
        for (g, x) in grad[..d].iter_mut().zip(&e.features) {
            *g += residual * x;
        }
        grad[d] += residual;
    }
    for g in &mut grad {
        *g /= n;
    }
    for (g, w) in grad[..d].iter_mut().zip(&params.weights) {
        *g += l2_lambda * w;
    }
    grad
}

fn check_examples(examples: &[Example]) -> Result<usize, ModelError> {
    let first = examples.first().ok_or(ModelError::SingleClassData)?;
    let dim = first.features.len();
    let mut pos = false;
    let mut neg = false;
    for (i, e) in examples.iter().enumerate() {
        if e.features.len() != dim {
            return Err(ModelError::DimensionMismatch { expected: dim, found: e.features.len() });
        }
        if e.features.iter().any(|x| !x.is_finite()) {
            return Err(ModelError::NonFiniteFeature(i));
        }
        pos |= e.label;
        neg |= !e.label;
    }
    if !(pos && neg) {
        return Err(ModelError::SingleClassData);
    }
    Ok(dim)
}

/// Full-batch gradient descent from zero weights for `cfg.epochs` steps.
pub fn train_logreg(examples: &[Example], cfg: &TrainConfig) -> Result<ModelParams, ModelError> {
    train_logreg_traced(examples, cfg).map(|(p, _)| p)
}

/// As [`train_logreg`], also returning the loss before every step and
/// after the last one (`epochs + 1` values).
pub fn train_logreg_traced(
    examples: &[Example],
    cfg: &TrainConfig,
) -> Result<(ModelParams, Vec<f64>), ModelError> {
    cfg.validate()?;
    let dim = check_examples(examples)?;
    let mut params = ModelParams::zeros(dim);
    let mut trace = Vec::with_capacity(cfg.epochs + 1);
    for _ in 0..cfg.epochs {
        trace.push(loss(&params, examples, cfg.l2_lambda));
        let grad = gradient(&params, examples, cfg.l2_lambda);
        for (w, g) in params.weights.iter_mut().zip(&grad) {
            *w -= cfg.learning_rate * g;
        }
        params.bias -= cfg.learning_rate * grad[dim];
    }
    trace.push(loss(&params, examples, cfg.l2_lambda));
    if !params.is_finite() {
        return Err(ModelError::Diverged);
    }
    Ok((params, trace))
}

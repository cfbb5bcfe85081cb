//! Logistic-regression risk model and its evaluation.
//!
//! The model stands in for an existing risk scorer: adding the red-flag
//! features is nothing more than a longer input vector. [`compare`] trains
//! the same model on a legacy feature subset and on the full quantified set
//! to measure the lift.

mod logreg;
mod metrics;

pub use logreg::{
    gradient, loss, predict_proba, sigmoid, train_logreg, train_logreg_traced, ModelParams,
    TrainConfig,
};
pub use metrics::{auc, evaluate, Confusion, EvalReport, THRESHOLD};

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Features a legacy volume/velocity rule set would already use.
pub const BASELINE_FEATURES: [&str; 2] = ["linked_transaction_count", "window_span_seconds"];

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ModelError {
    #[error("training and AUC need at least one example of each class")]
    SingleClassData,
    #[error("example {0} has a non-finite feature")]
    NonFiniteFeature(usize),
    #[error("expected {expected} features, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("scores must not be NaN")]
    NonFiniteScore,
    #[error("invalid training configuration: {0}")]
    InvalidConfig(String),
    #[error("training diverged to non-finite parameters")]
    Diverged,
}

/// One labelled feature vector.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Example {
    pub features: Vec<f64>,
    pub label: bool,
}

/// A disjoint train/test partition.
#[derive(Debug, Clone, PartialEq)]
pub struct Split {
    pub train: Vec<Example>,
    pub test: Vec<Example>,
}

/// Train one model per feature set on its own partition and evaluate each on
/// its test rows. Callers pass the same row split for both so the reports
/// are comparable. Returns `(baseline, enriched)`.
pub fn compare(
    baseline: &Split,
    enriched: &Split,
    cfg: &TrainConfig,
) -> Result<(EvalReport, EvalReport), ModelError> {
    let b = train_logreg(&baseline.train, cfg)?;
    let e = train_logreg(&enriched.train, cfg)?;
    Ok((evaluate(&b, &baseline.test)?, evaluate(&e, &enriched.test)?))
}

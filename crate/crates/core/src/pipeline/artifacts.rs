use std::path::Path;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use super::{ErrorKind, PipelineError, Result, Stage};
use crate::extract::FeatureVector;
use crate::model::{EvalReport, ModelParams};
use crate::txmodel::Label;

pub const TRANSACTIONS_CSV: &str = "transactions.csv";
pub const WINDOWS_JSON: &str = "windows.json";
pub const FEATURES_JSON: &str = "features.json";
pub const QUANTIZER_JSON: &str = "quantizer.json";
pub const MODEL_JSON: &str = "model.json";
pub const BASELINE_MODEL_JSON: &str = "baseline_model.json";
pub const REPORT_JSON: &str = "report.json";
/// LLM call log, relative to the output directory. Timestamped, so not
/// reproducible.
pub const CALL_LOG: &str = "logs/llm_calls.jsonl";

/// One entry of `features.json`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FeatureRecord {
    pub window_index: usize,
    pub label: Label,
    pub features: FeatureVector,
    pub backend: String,
    /// Prompt template used; `None` for the rules backend.
    pub template_version: Option<String>,
}

/// Schema of `model.json` and `baseline_model.json`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelFile {
    pub feature_names: Vec<String>,
    pub weights: Vec<f64>,
    pub bias: f64,
    /// sha256 of the `quantizer.json` bytes the model was trained against.
    pub quantizer_digest: String,
}

impl ModelFile {
    pub fn params(&self) -> ModelParams {
        ModelParams { weights: self.weights.clone(), bias: self.bias }
    }
}

/// Schema of `report.json`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ComparisonReport {
    pub baseline_features: Vec<String>,
    pub enriched_features: Vec<String>,
    pub n_train: usize,
    pub n_test: usize,
    pub baseline: EvalReport,
    pub enriched: EvalReport,
    /// `enriched.auc - baseline.auc`.
    pub auc_delta: f64,
}

/// Seeded shuffle of `0..n` cut into `(train, test)` index lists, each
/// sorted ascending. `n_train = round(n * fraction)`, kept in `[1, n - 1]`
/// when `n >= 2`.
pub fn split_indices(n: usize, fraction: f64, seed: u64) -> (Vec<usize>, Vec<usize>) {
    let mut idx: Vec<usize> = (0..n).collect();
    idx.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let mut n_train = (n as f64 * fraction).round() as usize;
    if n >= 2 {
        n_train = n_train.clamp(1, n - 1);
    } else {
        n_train = n_train.min(n);
    }
    let mut test = idx.split_off(n_train);
    idx.sort_unstable();
    test.sort_unstable();
    (idx, test)
}

pub(super) fn io_error(stage: Stage, path: &Path, e: impl std::fmt::Display) -> PipelineError {
    PipelineError::new(stage, ErrorKind::Io, format!("{}: {e}", path.display()))
}

pub(super) fn read_bytes(stage: Stage, path: &Path) -> Result<Vec<u8>> {
    std::fs::read(path).map_err(|e| io_error(stage, path, e))
}

pub(super) fn read_json<T: DeserializeOwned>(stage: Stage, path: &Path) -> Result<T> {
    let bytes = read_bytes(stage, path)?;
    serde_json::from_slice(&bytes).map_err(|e| {
        PipelineError::new(stage, ErrorKind::Data, format!("{}: {e}", path.display()))
    })
}

pub(super) fn json_bytes<T: Serialize>(value: &T) -> Vec<u8> {
    let mut bytes = serde_json::to_vec_pretty(value).expect("artifact types serialize");
    bytes.push(b'\n');
    bytes
}

pub(super) fn write_bytes(stage: Stage, path: &Path, bytes: &[u8]) -> Result<()> {
    if let Some(parent) = path.parent() {
        std::fs::create_dir_all(parent).map_err(|e| io_error(stage, parent, e))?;
    }
    std::fs::write(path, bytes).map_err(|e| io_error(stage, path, e))
}

//! Feature extraction: one [`FeatureVector`] per window, from either the
//! deterministic rules backend or an LLM (live over HTTP, or replayed from
//! disk). Both paths share the same contract; the rules backend is the
//! reference the LLM path is validated against.

mod backend;
mod features;
mod response;
mod rules;

pub use backend::{
    extract_llm, replay_key, BackendConfig, BackendKind, CallLog, CallRecord, Extractor,
    HttpChatClient, ReplayStore, RetryPolicy, MAX_RETRIES_LIMIT,
};
pub use features::{feature_definition, FeatureVector, Seconds, FEATURE_COUNT, FEATURE_NAMES};
pub use response::{parse_llm_response, ParseError};
pub use rules::extract_rules;

use rayon::prelude::*;
use thiserror::Error;

use crate::promptkit::{PatternDescription, PromptError};
use crate::txmodel::Dataset;

#[derive(Debug, Error)]
pub enum ExtractError {
    #[error("window has no transactions")]
    EmptyWindow,
    #[error("backend configuration: {0}")]
    Config(String),
    #[error("transport failure: {0}")]
    Transport(String),
    #[error("no replay fixture for window digest {0}")]
    ReplayMiss(String),
    #[error("could not parse completion: {0}")]
    Parse(#[from] ParseError),
    #[error("completion violates feature contract: {0}")]
    ContractViolation(String),
    #[error(transparent)]
    Prompt(#[from] PromptError),
    #[error("i/o: {0}")]
    Io(String),
}

/// Result for one window of a batch.
pub type WindowResult = (usize, Result<FeatureVector, ExtractError>);

impl Extractor {
    /// One result per window, in window order. Windows are processed on up
    /// to `max_concurrency` threads; a failing window never affects others.
    pub fn batch(&self, dataset: &Dataset, pattern: &PatternDescription) -> Vec<WindowResult> {
        let run = || {
            dataset
                .windows
                .par_iter()
                .enumerate()
                .map(|(i, lw)| (i, self.extract(&lw.window, pattern)))
                .collect::<Vec<_>>()
        };
        match rayon::ThreadPoolBuilder::new().num_threads(self.max_concurrency()).build() {
            Ok(pool) => pool.install(run),
            Err(e) => {
                log::warn!("could not start worker pool ({e}); extracting serially");
                dataset
                    .windows
                    .iter()
                    .enumerate()
                    .map(|(i, lw)| (i, self.extract(&lw.window, pattern)))
                    .collect()
            }
        }
    }
}

/// Extract features for every window of `dataset` with the backend in
/// `cfg`. A backend that cannot be constructed yields its error for every
/// window.
pub fn batch_extract(
    dataset: &Dataset,
    pattern: &PatternDescription,
    cfg: &BackendConfig,
) -> Vec<WindowResult> {
    match Extractor::new(cfg) {
        Ok(extractor) => extractor.batch(dataset, pattern),
        Err(e) => {
            let msg = e.to_string();
            (0..dataset.len()).map(|i| (i, Err(ExtractError::Config(msg.clone())))).collect()
        }
    }
}

//! The end-to-end flow behind the `redflag` binary:
//! generate → extract → train → eval.
//!
//! Every command reads its inputs from and writes its artifacts to
//! `output_dir`. Artifacts are deterministic given the configuration; the
//! only non-reproducible output is the timestamped LLM call log under
//! `logs/`.

mod artifacts;
mod commands;
mod config;

pub use artifacts::{
    split_indices, ComparisonReport, FeatureRecord, ModelFile, BASELINE_MODEL_JSON, CALL_LOG,
    FEATURES_JSON, MODEL_JSON, QUANTIZER_JSON, REPORT_JSON, TRANSACTIONS_CSV, WINDOWS_JSON,
};
pub use commands::{
    cmd_eval, cmd_extract, cmd_gen, cmd_pipeline, cmd_train, EvalSummary, ExtractSummary,
    GenSummary, PipelineSummary, TrainSummary,
};
pub use config::PipelineConfig;

use std::fmt;

use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stage {
    Config,
    Gen,
    Extract,
    Train,
    Eval,
}

impl Stage {
    pub fn as_str(&self) -> &'static str {
        match self {
            Self::Config => "config",
            Self::Gen => "gen",
            Self::Extract => "extract",
            Self::Train => "train",
            Self::Eval => "eval",
        }
    }
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    Config,
    Data,
    Backend,
    Io,
}

impl ErrorKind {
    /// Process exit status for this kind of failure.
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Config => 2,
            Self::Data => 3,
            Self::Backend => 4,
            Self::Io => 5,
        }
    }

    fn label(&self) -> &'static str {
        match self {
            Self::Config => "configuration error",
            Self::Data => "data error",
            Self::Backend => "backend error",
            Self::Io => "i/o error",
        }
    }
}

/// A failure tagged with the stage that produced it.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("[{stage}] {}: {message}", kind.label())]
pub struct PipelineError {
    pub stage: Stage,
    pub kind: ErrorKind,
    pub message: String,
}

impl PipelineError {
    pub fn new(stage: Stage, kind: ErrorKind, message: impl Into<String>) -> Self {
        Self { stage, kind, message: message.into() }
    }

    pub fn exit_code(&self) -> i32 {
        self.kind.exit_code()
    }
}

pub type Result<T, E = PipelineError> = std::result::Result<T, E>;

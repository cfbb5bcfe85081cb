use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::{ErrorKind, PipelineError, Result, Stage};
use crate::extract::{BackendConfig, BackendKind};
use crate::model::TrainConfig;
use crate::promptkit::{default_fanout_pattern, PatternDescription};
use crate::synthgen::{FanOutSpec, GeneratorConfig, Windowing};

/// Whole-pipeline configuration. Every field has a default, so `{}` is a
/// valid config file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PipelineConfig {
    pub generator: GeneratorConfig,
    pub fanout: FanOutSpec,
    pub window_duration_seconds: u64,
    pub window_stride_seconds: u64,
    pub pattern: PatternDescription,
    pub backend: BackendConfig,
    pub train: TrainConfig,
    pub split_fraction: f64,
    pub output_dir: PathBuf,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self {
            generator: GeneratorConfig::default(),
            fanout: FanOutSpec::default(),
            window_duration_seconds: 86_400,
            window_stride_seconds: 86_400,
            pattern: default_fanout_pattern(),
            backend: BackendConfig::default(),
            train: TrainConfig::default(),
            split_fraction: 0.8,
            output_dir: PathBuf::from("out"),
        }
    }
}

fn config_error(msg: impl Into<String>) -> PipelineError {
    PipelineError::new(Stage::Config, ErrorKind::Config, msg)
}

impl PipelineConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let bytes = std::fs::read(path).map_err(|e| {
            PipelineError::new(Stage::Config, ErrorKind::Io, format!("{}: {e}", path.display()))
        })?;
        let cfg: Self = serde_json::from_slice(&bytes)
            .map_err(|e| config_error(format!("{}: {e}", path.display())))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn with_overrides(mut self, backend: Option<BackendKind>, out: Option<PathBuf>) -> Self {
        if let Some(kind) = backend {
            self.backend.kind = kind;
        }
        if let Some(dir) = out {
            self.output_dir = dir;
        }
        self
    }

    pub fn windowing(&self) -> Windowing {
        Windowing {
            duration_seconds: self.window_duration_seconds,
            stride_seconds: self.window_stride_seconds,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.generator.validate().map_err(|e| config_error(e.to_string()))?;
        self.fanout.validate(&self.generator).map_err(|e| config_error(e.to_string()))?;
        if self.window_stride_seconds == 0 || self.window_stride_seconds > self.window_duration_seconds {
            return Err(config_error("window stride must lie in [1, window_duration_seconds]"));
        }
        self.pattern.validate().map_err(|e| config_error(e.to_string()))?;
        self.backend.validate().map_err(|e| config_error(e.to_string()))?;
        self.train.validate().map_err(|e| config_error(e.to_string()))?;
        if !(self.split_fraction > 0.0 && self.split_fraction < 1.0) {
            return Err(config_error("split_fraction must lie in (0, 1)"));
        }
        Ok(())
    }

    pub fn artifact(&self, name: &str) -> PathBuf {
        self.output_dir.join(name)
    }
}

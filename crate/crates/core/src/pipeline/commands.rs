use std::fmt;

use super::artifacts::{
    io_error, json_bytes, read_bytes, read_json, split_indices, write_bytes, ComparisonReport,
    FeatureRecord, ModelFile, BASELINE_MODEL_JSON, CALL_LOG, FEATURES_JSON, MODEL_JSON,
    QUANTIZER_JSON, REPORT_JSON, TRANSACTIONS_CSV, WINDOWS_JSON,
};
use super::{ErrorKind, PipelineConfig, PipelineError, Result, Stage};
use crate::digest::sha256_hex;
use crate::extract::{BackendKind, CallLog, ExtractError, Extractor, FEATURE_NAMES};
use crate::model::{evaluate, train_logreg, Example, ModelError, BASELINE_FEATURES};
use crate::promptkit::TEMPLATE_VERSION;
use crate::quantify::{fit_spec, quantify, QuantizationSpec};
use crate::synthgen::{generate, SynthError};
use crate::txmodel::{parse_transactions_csv, serialize_transactions_csv, Dataset, WindowsFile};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GenSummary {
    pub n_transactions: usize,
    pub n_windows: usize,
    pub n_positive: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExtractSummary {
    pub backend: BackendKind,
    pub n_extracted: usize,
    /// `(window_index, error message)` for every window that failed.
    pub failures: Vec<(usize, String)>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TrainSummary {
    pub n_train: usize,
    pub n_test: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvalSummary {
    pub report: ComparisonReport,
}

impl fmt::Display for EvalSummary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let r = &self.report;
        write!(
            f,
            "baseline AUC {:.4} | enriched AUC {:.4} | delta {:+.4} | precision {:.3} recall {:.3} | n_test {}",
            r.baseline.auc, r.enriched.auc, r.auc_delta, r.enriched.precision, r.enriched.recall, r.n_test
        )
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PipelineSummary {
    pub gen: GenSummary,
    pub extract: ExtractSummary,
    pub train: TrainSummary,
    pub eval: EvalSummary,
}

fn data_error(stage: Stage, msg: impl Into<String>) -> PipelineError {
    PipelineError::new(stage, ErrorKind::Data, msg)
}

fn synth_error(e: SynthError) -> PipelineError {
    let kind = match e {
        SynthError::Tx(_) => ErrorKind::Data,
        _ => ErrorKind::Config,
    };
    PipelineError::new(Stage::Gen, kind, e.to_string())
}

fn extract_error(e: &ExtractError) -> PipelineError {
    let kind = match e {
        ExtractError::Config(_) => ErrorKind::Config,
        ExtractError::Transport(_) | ExtractError::ReplayMiss(_) => ErrorKind::Backend,
        ExtractError::Io(_) => ErrorKind::Io,
        _ => ErrorKind::Data,
    };
    PipelineError::new(Stage::Extract, kind, e.to_string())
}

fn model_error(stage: Stage, e: ModelError) -> PipelineError {
    let kind = match e {
        ModelError::InvalidConfig(_) => ErrorKind::Config,
        _ => ErrorKind::Data,
    };
    PipelineError::new(stage, kind, e.to_string())
}

/// Generate the synthetic corpus and write `transactions.csv` and
/// `windows.json`.
pub fn cmd_gen(cfg: &PipelineConfig) -> Result<GenSummary> {
    cfg.validate()?;
    let corpus = generate(&cfg.generator, &cfg.fanout, cfg.windowing()).map_err(synth_error)?;
    let dataset = &corpus.dataset;
    write_bytes(
        Stage::Gen,
        &cfg.artifact(TRANSACTIONS_CSV),
        &serialize_transactions_csv(&corpus.transactions),
    )?;
    write_bytes(Stage::Gen, &cfg.artifact(WINDOWS_JSON), &json_bytes(&dataset.to_windows_file()))?;
    let summary = GenSummary {
        n_transactions: corpus.transactions.len(),
        n_windows: dataset.len(),
        n_positive: dataset.positives(),
    };
    log::info!(
        "gen: {} transactions, {} windows ({} positive)",
        summary.n_transactions,
        summary.n_windows,
        summary.n_positive
    );
    Ok(summary)
}

fn load_dataset(cfg: &PipelineConfig, stage: Stage) -> Result<Dataset> {
    let csv_path = cfg.artifact(TRANSACTIONS_CSV);
    let txns = parse_transactions_csv(&read_bytes(stage, &csv_path)?)
        .map_err(|e| data_error(stage, format!("{}: {e}", csv_path.display())))?;
    let file: WindowsFile = read_json(stage, &cfg.artifact(WINDOWS_JSON))?;
    Dataset::from_windows_file(&file, &txns)
        .map_err(|e| data_error(stage, format!("{WINDOWS_JSON}: {e}")))
}

/// Extract features for every window and write `features.json`. Failed
/// windows are logged and left out; the command fails only when no window
/// succeeds.
pub fn cmd_extract(cfg: &PipelineConfig) -> Result<ExtractSummary> {
    cfg.validate()?;
    // Backend construction comes first so a missing API key fails before
    // any input is read or any request is sent.
    let mut extractor = Extractor::new(&cfg.backend).map_err(|e| extract_error(&e))?;
    let kind = extractor.kind();
    if kind != BackendKind::Rules {
        let path = cfg.artifact(CALL_LOG);
        let log = CallLog::to_file(&path).map_err(|e| io_error(Stage::Extract, &path, e))?;
        extractor = extractor.with_log(log);
    }
    let dataset = load_dataset(cfg, Stage::Extract)?;

    let template_version = (kind != BackendKind::Rules).then(|| TEMPLATE_VERSION.to_owned());
    let mut records = Vec::with_capacity(dataset.len());
    let mut failures = Vec::new();
    let mut first_error = None;
    for (i, result) in extractor.batch(&dataset, &cfg.pattern) {
        match result {
            Ok(features) => records.push(FeatureRecord {
                window_index: i,
                label: dataset.windows[i].label,
                features,
                backend: kind.as_str().to_owned(),
                template_version: template_version.clone(),
            }),
            Err(e) => {
                log::warn!("extract: window {i} failed: {e}");
                failures.push((i, e.to_string()));
                first_error.get_or_insert(e);
            }
        }
    }
    if records.is_empty() {
        if let Some(e) = first_error {
            let mut err = extract_error(&e);
            err.message = format!("all {} windows failed; first: {}", dataset.len(), err.message);
            return Err(err);
        }
    }
    write_bytes(Stage::Extract, &cfg.artifact(FEATURES_JSON), &json_bytes(&records))?;
    log::info!(
        "extract: {} windows via {} ({} failed)",
        records.len(),
        kind.as_str(),
        failures.len()
    );
    Ok(ExtractSummary { backend: kind, n_extracted: records.len(), failures })
}

fn load_features(cfg: &PipelineConfig, stage: Stage) -> Result<Vec<FeatureRecord>> {
    let records: Vec<FeatureRecord> = read_json(stage, &cfg.artifact(FEATURES_JSON))?;
    let mut seen = std::collections::HashSet::new();
    for r in &records {
        if !seen.insert(r.window_index) {
            return Err(data_error(stage, format!("duplicate window_index {}", r.window_index)));
        }
        r.features.check_contract().map_err(|m| {
            data_error(stage, format!("{FEATURES_JSON}: window {}: {m}", r.window_index))
        })?;
    }
    if records.is_empty() {
        return Err(data_error(stage, format!("{FEATURES_JSON} holds no records")));
    }
    Ok(records)
}

fn examples(
    records: &[FeatureRecord],
    idx: &[usize],
    spec: &QuantizationSpec,
    names: &[&str],
) -> Vec<Example> {
    idx.iter()
        .map(|&i| Example {
            features: quantify(&records[i].features, spec).select(names),
            label: records[i].label.is_positive(),
        })
        .collect()
}

fn require_both_classes(stage: Stage, part: &str, rows: &[Example]) -> Result<()> {
    let pos = rows.iter().filter(|e| e.label).count();
    if pos == 0 || pos == rows.len() {
        return Err(data_error(
            stage,
            format!("{part} partition has a single class ({pos} of {} positive)", rows.len()),
        ));
    }
    Ok(())
}

fn names_vec(names: &[&str]) -> Vec<String> {
    names.iter().map(|s| s.to_string()).collect()
}

/// Split, fit the quantizer on the training rows, train the baseline and
/// enriched models, and write `quantizer.json`, `model.json` and
/// `baseline_model.json`.
pub fn cmd_train(cfg: &PipelineConfig) -> Result<TrainSummary> {
    cfg.validate()?;
    let stage = Stage::Train;
    let records = load_features(cfg, stage)?;
    let (train_idx, test_idx) = split_indices(records.len(), cfg.split_fraction, cfg.train.seed);

    let train_vectors: Vec<_> = train_idx.iter().map(|&i| records[i].features.clone()).collect();
    let spec = fit_spec(&train_vectors).map_err(|e| data_error(stage, e.to_string()))?;
    let quantizer_bytes = json_bytes(&spec);
    let quantizer_digest = sha256_hex(&quantizer_bytes);

    let test = examples(&records, &test_idx, &spec, &FEATURE_NAMES);
    require_both_classes(stage, "test", &test)?;

    let mut outputs = Vec::new();
    for (file, names) in [(MODEL_JSON, &FEATURE_NAMES[..]), (BASELINE_MODEL_JSON, &BASELINE_FEATURES[..])] {
        let train = examples(&records, &train_idx, &spec, names);
        require_both_classes(stage, "training", &train)?;
        let params = train_logreg(&train, &cfg.train).map_err(|e| model_error(stage, e))?;
        let model = ModelFile {
            feature_names: names_vec(names),
            weights: params.weights,
            bias: params.bias,
            quantizer_digest: quantizer_digest.clone(),
        };
        outputs.push((file, json_bytes(&model)));
    }

    write_bytes(stage, &cfg.artifact(QUANTIZER_JSON), &quantizer_bytes)?;
    for (file, bytes) in outputs {
        write_bytes(stage, &cfg.artifact(file), &bytes)?;
    }
    log::info!("train: {} train rows, {} held out", train_idx.len(), test_idx.len());
    Ok(TrainSummary { n_train: train_idx.len(), n_test: test_idx.len() })
}

fn load_model(cfg: &PipelineConfig, file: &str, quantizer_digest: &str) -> Result<ModelFile> {
    let stage = Stage::Eval;
    let model: ModelFile = read_json(stage, &cfg.artifact(file))?;
    if model.quantizer_digest != quantizer_digest {
        return Err(data_error(stage, format!("{file} was trained against a different quantizer")));
    }
    if model.weights.len() != model.feature_names.len() {
        return Err(data_error(stage, format!("{file}: weights and feature_names differ in length")));
    }
    if let Some(bad) = model.feature_names.iter().find(|n| !FEATURE_NAMES.contains(&n.as_str())) {
        return Err(data_error(stage, format!("{file}: unknown feature `{bad}`")));
    }
    Ok(model)
}

/// Score the held-out rows with both models and write `report.json`.
pub fn cmd_eval(cfg: &PipelineConfig) -> Result<EvalSummary> {
    cfg.validate()?;
    let stage = Stage::Eval;
    let records = load_features(cfg, stage)?;
    let quantizer_path = cfg.artifact(QUANTIZER_JSON);
    let quantizer_bytes = read_bytes(stage, &quantizer_path)?;
    let spec: QuantizationSpec = serde_json::from_slice(&quantizer_bytes)
        .map_err(|e| data_error(stage, format!("{}: {e}", quantizer_path.display())))?;
    let digest = sha256_hex(&quantizer_bytes);
    let enriched_model = load_model(cfg, MODEL_JSON, &digest)?;
    let baseline_model = load_model(cfg, BASELINE_MODEL_JSON, &digest)?;

    let (train_idx, test_idx) = split_indices(records.len(), cfg.split_fraction, cfg.train.seed);
    let mut reports = Vec::new();
    for model in [&baseline_model, &enriched_model] {
        let names: Vec<&str> = model.feature_names.iter().map(String::as_str).collect();
        let test = examples(&records, &test_idx, &spec, &names);
        require_both_classes(stage, "test", &test)?;
        reports.push(evaluate(&model.params(), &test).map_err(|e| model_error(stage, e))?);
    }
    let enriched = reports.pop().expect("two reports");
    let baseline = reports.pop().expect("two reports");
    let report = ComparisonReport {
        baseline_features: baseline_model.feature_names,
        enriched_features: enriched_model.feature_names,
        n_train: train_idx.len(),
        n_test: test_idx.len(),
        auc_delta: enriched.auc - baseline.auc,
        baseline,
        enriched,
    };
    write_bytes(stage, &cfg.artifact(REPORT_JSON), &json_bytes(&report))?;
    let summary = EvalSummary { report };
    log::info!("eval: {summary}");
    Ok(summary)
}

/// `gen`, `extract`, `train` and `eval` in sequence.
pub fn cmd_pipeline(cfg: &PipelineConfig) -> Result<PipelineSummary> {
    Ok(PipelineSummary {
        gen: cmd_gen(cfg)?,
        extract: cmd_extract(cfg)?,
        train: cmd_train(cfg)?,
        eval: cmd_eval(cfg)?,
    })
}

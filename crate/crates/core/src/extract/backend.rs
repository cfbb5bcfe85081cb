use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::sync::Mutex;
use std::time::Duration;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use super::{extract_rules, parse_llm_response, ExtractError, FeatureVector};
use crate::promptkit::{render_prompt, window_digest, PatternDescription, RenderedPrompt};
use crate::txmodel::TransactionWindow;

pub const MAX_RETRIES_LIMIT: u32 = 5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BackendKind {
    Rules,
    Llm,
    Replay,
}

impl BackendKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            Self::Rules => "rules",
            Self::Llm => "llm",
            Self::Replay => "replay",
        }
    }
}

impl std::str::FromStr for BackendKind {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "rules" => Ok(Self::Rules),
            "llm" => Ok(Self::Llm),
            "replay" => Ok(Self::Replay),
            other => Err(format!("unknown backend `{other}` (expected rules, llm or replay)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BackendConfig {
    pub kind: BackendKind,
    /// Chat-completions endpoint (llm only).
    pub endpoint_url: String,
    pub model_name: String,
    /// Name of the environment variable holding the bearer token.
    pub api_key_env_var: String,
    /// Must be 0.
    pub temperature: f64,
    pub max_retries: u32,
    /// Directory of `<window_digest>.txt` completions (replay only).
    pub replay_dir: PathBuf,
    /// Upper bound on windows processed concurrently by batch extraction.
    pub max_concurrency: usize,
    pub retry_base_delay_ms: u64,
    pub request_timeout_secs: u64,
}

impl Default for BackendConfig {
    fn default() -> Self {
        Self {
            kind: BackendKind::Rules,
            endpoint_url: "https://api.openai.com/v1/chat/completions".into(),
            model_name: "gpt-4o-mini".into(),
            api_key_env_var: "OPENAI_API_KEY".into(),
            temperature: 0.0,
            max_retries: 3,
            replay_dir: PathBuf::from("replay"),
            max_concurrency: 4,
            retry_base_delay_ms: 500,
            request_timeout_secs: 60,
        }
    }
}

impl BackendConfig {
    pub fn validate(&self) -> Result<(), ExtractError> {
        let bad = |m: String| Err(ExtractError::Config(m));
        if self.temperature != 0.0 {
            return bad(format!("temperature must be 0, got {}", self.temperature));
        }
        if self.max_retries > MAX_RETRIES_LIMIT {
            return bad(format!("max_retries must be <= {MAX_RETRIES_LIMIT}"));
        }
        if self.max_concurrency == 0 {
            return bad("max_concurrency must be >= 1".into());
        }
        if self.kind == BackendKind::Llm {
            if self.endpoint_url.is_empty() || self.model_name.is_empty() {
                return bad("llm backend needs endpoint_url and model_name".into());
            }
            if self.api_key_env_var.is_empty() {
                return bad("llm backend needs api_key_env_var".into());
            }
        }
        Ok(())
    }
}

/// Exponential backoff: `base * 2^attempt`, capped.
#[derive(Debug, Clone, Copy)]
pub struct RetryPolicy {
    pub max_retries: u32,
    pub base_delay: Duration,
    pub max_delay: Duration,
}

impl RetryPolicy {
    pub fn delay_for(&self, attempt: u32) -> Duration {
        let factor = 1u32.checked_shl(attempt).unwrap_or(u32::MAX);
        self.base_delay.saturating_mul(factor).min(self.max_delay)
    }
}

/// Blocking client for the chat-completions wire protocol.
#[derive(Debug, Clone)]
pub struct HttpChatClient {
    client: reqwest::blocking::Client,
    endpoint: String,
    model: String,
    api_key: String,
    retry: RetryPolicy,
}

enum Attempt {
    Retryable(String),
    Fatal(String),
}

impl HttpChatClient {
    /// Reads the API key from the configured environment variable. Fails
    /// with a configuration error, without touching the network, if it is
    /// unset or empty.
    pub fn from_config(cfg: &BackendConfig) -> Result<Self, ExtractError> {
        cfg.validate()?;
        let api_key = std::env::var(&cfg.api_key_env_var)
            .ok()
            .filter(|k| !k.is_empty())
            .ok_or_else(|| {
                ExtractError::Config(format!(
                    "environment variable `{}` holding the API key is not set",
                    cfg.api_key_env_var
                ))
            })?;
        let client = reqwest::blocking::Client::builder()
            .timeout(Duration::from_secs(cfg.request_timeout_secs))
            .build()
            .map_err(|e| ExtractError::Config(format!("building HTTP client: {e}")))?;
        Ok(Self {
            client,
            endpoint: cfg.endpoint_url.clone(),
            model: cfg.model_name.clone(),
            api_key,
            retry: RetryPolicy {
                max_retries: cfg.max_retries,
                base_delay: Duration::from_millis(cfg.retry_base_delay_ms),
                max_delay: Duration::from_secs(30),
            },
        })
    }

    /// JSON request body for one extraction.
    pub fn request_body(&self, prompt: &str) -> Value {
        json!({
            "model": self.model,
            "temperature": 0,
            "messages": [{ "role": "user", "content": prompt }],
        })
    }

    /// POST the prompt and return the first choice's message content.
    /// Connection failures, timeouts, 429 and 5xx are retried with backoff;
    /// other statuses fail immediately.
    pub fn complete(&self, prompt: &str) -> Result<String, ExtractError> {
        let body = self.request_body(prompt);
        let mut attempt = 0;
        loop {
            match self.attempt(&body) {
                Ok(text) => return Ok(text),
                Err(Attempt::Fatal(msg)) => return Err(ExtractError::Transport(msg)),
                Err(Attempt::Retryable(msg)) => {
                    if attempt >= self.retry.max_retries {
                        return Err(ExtractError::Transport(format!(
                            "{msg} (gave up after {} attempts)",
                            attempt + 1
                        )));
                    }
                    let delay = self.retry.delay_for(attempt);
                    log::warn!("chat completion failed: {msg}; retrying in {delay:?}");
                    std::thread::sleep(delay);
                    attempt += 1;
                }
            }
        }
    }

    fn attempt(&self, body: &Value) -> Result<String, Attempt> {
        let resp = self
            .client
            .post(&self.endpoint)
            .bearer_auth(&self.api_key)
            .json(body)
            .send()
            .map_err(|e| Attempt::Retryable(format!("request failed: {e}")))?;
        let status = resp.status();
        if status.as_u16() == 429 || status.is_server_error() {
            return Err(Attempt::Retryable(format!("HTTP {status}")));
        }
        if !status.is_success() {
            let detail = resp.text().unwrap_or_default();
            return Err(Attempt::Fatal(format!("HTTP {status}: {}", truncate(&detail, 200))));
        }
        let payload: Value = resp
            .json()
            .map_err(|e| Attempt::Fatal(format!("response is not JSON: {e}")))?;
        payload
            .pointer("/choices/0/message/content")
            .and_then(Value::as_str)
            .map(str::to_owned)
            .ok_or_else(|| Attempt::Fatal("response has no choices[0].message.content".into()))
    }
}

fn truncate(s: &str, max: usize) -> &str {
    match s.char_indices().nth(max) {
        Some((i, _)) => &s[..i],
        None => s,
    }
}

/// Canned completions stored as `<window_digest>.txt`.
#[derive(Debug, Clone)]
pub struct ReplayStore {
    dir: PathBuf,
}

impl ReplayStore {
    pub fn new(dir: impl Into<PathBuf>) -> Self {
        Self { dir: dir.into() }
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn path_for(&self, digest: &str) -> PathBuf {
        self.dir.join(format!("{digest}.txt"))
    }

    pub fn lookup(&self, digest: &str) -> Result<String, ExtractError> {
        match std::fs::read_to_string(self.path_for(digest)) {
            Ok(text) => Ok(text),
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => {
                Err(ExtractError::ReplayMiss(digest.to_owned()))
            }
            Err(e) => Err(ExtractError::Io(format!("reading replay fixture {digest}: {e}"))),
        }
    }

    /// Store a completion for later replay.
    pub fn record(&self, digest: &str, completion: &str) -> std::io::Result<()> {
        std::fs::create_dir_all(&self.dir)?;
        std::fs::write(self.path_for(digest), completion)
    }
}

/// One LLM exchange.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CallRecord {
    pub window_digest: String,
    pub template_version: String,
    pub backend: String,
    pub completion: String,
}

/// Append-only log of LLM exchanges. All writes go through one mutex, so
/// concurrent workers never interleave lines. When backed by a file each
/// line is a JSON object with a `logged_at` unix timestamp.
#[derive(Debug, Default)]
pub struct CallLog {
    records: Mutex<Vec<CallRecord>>,
    sink: Option<Mutex<BufWriter<File>>>,
}

impl CallLog {
    pub fn in_memory() -> Self {
        Self::default()
    }

    pub fn to_file(path: &Path) -> std::io::Result<Self> {
        if let Some(parent) = path.parent() {
            std::fs::create_dir_all(parent)?;
        }
        let file = std::fs::OpenOptions::new().create(true).append(true).open(path)?;
        Ok(Self { records: Mutex::default(), sink: Some(Mutex::new(BufWriter::new(file))) })
    }

    pub fn append(&self, record: CallRecord) {
        log::debug!(
            "llm call window={} template={} completion={:?}",
            record.window_digest,
            record.template_version,
            record.completion
        );
        if let Some(sink) = &self.sink {
            let logged_at = std::time::SystemTime::now()
                .duration_since(std::time::UNIX_EPOCH)
                .map(|d| d.as_secs())
                .unwrap_or(0);
            let line = json!({
                "logged_at": logged_at,
                "window_digest": record.window_digest,
                "template_version": record.template_version,
                "backend": record.backend,
                "completion": record.completion,
            });
            let mut w = sink.lock().unwrap_or_else(|p| p.into_inner());
            if let Err(e) = writeln!(w, "{line}").and_then(|_| w.flush()) {
                log::error!("call log write failed: {e}");
            }
        }
        self.records.lock().unwrap_or_else(|p| p.into_inner()).push(record);
    }

    pub fn records(&self) -> Vec<CallRecord> {
        self.records.lock().unwrap_or_else(|p| p.into_inner()).clone()
    }
}

#[derive(Debug)]
enum Source {
    Rules,
    Llm(HttpChatClient),
    Replay(ReplayStore),
}

/// A configured feature extractor, shareable across worker threads.
#[derive(Debug)]
pub struct Extractor {
    source: Source,
    log: CallLog,
    max_concurrency: usize,
}

impl Extractor {
    pub fn new(cfg: &BackendConfig) -> Result<Self, ExtractError> {
        cfg.validate()?;
        let source = match cfg.kind {
            BackendKind::Rules => Source::Rules,
            BackendKind::Llm => Source::Llm(HttpChatClient::from_config(cfg)?),
            BackendKind::Replay => Source::Replay(ReplayStore::new(&cfg.replay_dir)),
        };
        Ok(Self { source, log: CallLog::in_memory(), max_concurrency: cfg.max_concurrency })
    }

    pub fn with_log(mut self, log: CallLog) -> Self {
        self.log = log;
        self
    }

    pub fn kind(&self) -> BackendKind {
        match self.source {
            Source::Rules => BackendKind::Rules,
            Source::Llm(_) => BackendKind::Llm,
            Source::Replay(_) => BackendKind::Replay,
        }
    }

    pub fn log(&self) -> &CallLog {
        &self.log
    }

    pub fn max_concurrency(&self) -> usize {
        self.max_concurrency
    }

    pub fn extract(
        &self,
        window: &TransactionWindow,
        pattern: &PatternDescription,
    ) -> Result<FeatureVector, ExtractError> {
        let prompt = match &self.source {
            Source::Rules => return extract_rules(window),
            _ => render_prompt(window, pattern)?,
        };
        let completion = self.complete(&prompt)?;
        self.log.append(CallRecord {
            window_digest: prompt.window_digest.clone(),
            template_version: prompt.template_version.clone(),
            backend: self.kind().as_str().to_owned(),
            completion: completion.clone(),
        });
        let features = parse_llm_response(&completion)?;
        features.check_contract().map_err(ExtractError::ContractViolation)?;
        Ok(features)
    }

    fn complete(&self, prompt: &RenderedPrompt) -> Result<String, ExtractError> {
        match &self.source {
            Source::Rules => unreachable!("rules backend renders no prompt"),
            Source::Llm(client) => client.complete(&prompt.text),
            Source::Replay(store) => store.lookup(&prompt.window_digest),
        }
    }
}

/// Extract features through the LLM path (live or replayed).
pub fn extract_llm(
    window: &TransactionWindow,
    pattern: &PatternDescription,
    cfg: &BackendConfig,
) -> Result<FeatureVector, ExtractError> {
    if cfg.kind == BackendKind::Rules {
        return Err(ExtractError::Config("extract_llm needs an llm or replay backend".into()));
    }
    if window.is_empty() {
        return Err(ExtractError::EmptyWindow);
    }
    Extractor::new(cfg)?.extract(window, pattern)
}

/// Digest under which a replay fixture for `window` is stored.
pub fn replay_key(window: &TransactionWindow) -> String {
    window_digest(window)
}

//! Prompt rendering for the LLM extraction backend.
//!
//! A [`PatternDescription`] (the investigator's red flag) and a
//! [`TransactionWindow`] are rendered through a versioned template that ships
//! with the crate at `templates/feature_extraction_v1.txt`. The window is
//! embedded as the same CSV bytes the rules backend reads, and its SHA-256 is
//! carried alongside as `window_digest` so replies can be traced back.

use std::collections::HashSet;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::digest::sha256_hex;
use crate::extract::{feature_definition, FEATURE_NAMES};
use crate::txmodel::TransactionWindow;

/// Raw template text, bit-exact with the shipped file.
pub const TEMPLATE: &str = include_str!("../templates/feature_extraction_v1.txt");

/// Identifier of [`TEMPLATE`]. Bump whenever the file changes.
pub const TEMPLATE_VERSION: &str = "feature-extraction/v1";

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PromptError {
    #[error("cannot render a prompt for an empty window")]
    EmptyWindow,
    #[error("unknown feature `{0}`")]
    UnknownFeature(String),
    #[error("feature `{0}` requested twice")]
    DuplicateFeature(String),
    #[error("pattern requests no features")]
    NoFeatures,
}

/// An investigator red flag: a name, a narrative and the features the
/// extractor must measure.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PatternDescription {
    pub name: String,
    pub narrative: String,
    pub requested_features: Vec<String>,
}

impl PatternDescription {
    pub fn validate(&self) -> Result<(), PromptError> {
        if self.requested_features.is_empty() {
            return Err(PromptError::NoFeatures);
        }
        let mut seen = HashSet::new();
        for f in &self.requested_features {
            if !FEATURE_NAMES.contains(&f.as_str()) {
                return Err(PromptError::UnknownFeature(f.clone()));
            }
            if !seen.insert(f.as_str()) {
                return Err(PromptError::DuplicateFeature(f.clone()));
            }
        }
        Ok(())
    }
}

/// The built-in fan-out red flag, requesting every feature.
pub fn default_fanout_pattern() -> PatternDescription {
    PatternDescription {
        name: "fan-out".into(),
        narrative: "Watch for the rapid movement of funds from a single source to multiple \
                    destinations within a short timeframe. A large balance is broken into \
                    similar-sized transfers that leave the account in a tight burst, often \
                    to recipients with no prior relationship, which makes the money harder \
                    to follow."
            .into(),
        requested_features: FEATURE_NAMES.iter().map(|s| s.to_string()).collect(),
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RenderedPrompt {
    pub text: String,
    pub window_digest: String,
    pub template_version: String,
}

/// SHA-256 of the window's canonical CSV encoding.
pub fn window_digest(window: &TransactionWindow) -> String {
    sha256_hex(window.to_csv().as_bytes())
}

/// Render `pattern` and `window` through [`TEMPLATE`]. Pure: equal inputs
/// give equal output.
pub fn render_prompt(
    window: &TransactionWindow,
    pattern: &PatternDescription,
) -> Result<RenderedPrompt, PromptError> {
    if window.is_empty() {
        return Err(PromptError::EmptyWindow);
    }
    pattern.validate()?;

    let csv = window.to_csv();
    let definitions = pattern
        .requested_features
        .iter()
        .map(|f| format!("- {f}: {}", feature_definition(f).unwrap_or_default()))
        .collect::<Vec<_>>()
        .join("\n");
    let keys = pattern.requested_features.join(", ");
    let start = crate::txmodel::format_timestamp(&window.window_start());
    let duration = window.duration_seconds().to_string();

    let text = substitute(TEMPLATE, |key| match key {
        "pattern_name" => Some(pattern.name.as_str()),
        "narrative" => Some(pattern.narrative.as_str()),
        "focal_account" => Some(window.focal_account().as_str()),
        "window_start" => Some(start.as_str()),
        "window_duration_seconds" => Some(duration.as_str()),
        "window_csv" => Some(csv.as_str()),
        "feature_definitions" => Some(definitions.as_str()),
        "feature_keys" => Some(keys.as_str()),
        _ => None,
    });

    Ok(RenderedPrompt {
        text,
        window_digest: sha256_hex(csv.as_bytes()),
        template_version: TEMPLATE_VERSION.to_owned(),
    })
}

/// Single-pass `{{key}}` substitution. Inserted values are never rescanned,
/// so a narrative containing `{{window_csv}}` stays literal. Unknown keys are
/// left untouched.
fn substitute<'a>(template: &str, lookup: impl Fn(&str) -> Option<&'a str>) -> String {
    let mut out = String::with_capacity(template.len() * 2);
    let mut rest = template;
    while let Some(open) = rest.find("{{") {
        out.push_str(&rest[..open]);
        let after = &rest[open + 2..];
        match after.find("}}") {
            Some(close) => match lookup(&after[..close]) {
                Some(value) => {
                    out.push_str(value);
                    rest = &after[close + 2..];
                }
                None => {
                    out.push_str("{{");
                    rest = after;
                }
            },
            None => {
                out.push_str(&rest[open..]);
                rest = "";
            }
        }
    }
    out.push_str(rest);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::txmodel::{AccountId, Currency, Transaction, TxnType};
    use chrono::{DateTime, Duration, Utc};

    fn window(n: usize) -> TransactionWindow {
        let t0: DateTime<Utc> = "2024-03-01T09:00:00Z".parse().unwrap();
        let src = AccountId::new("SRC").unwrap();
        let txns = (0..n)
            .map(|i| {
                Transaction::new(
                    format!("tx-{i}"),
                    t0 + Duration::seconds(600 * i as i64),
                    src.clone(),
                    AccountId::new(format!("DST{i}")).unwrap(),
                    "10000.00".parse().unwrap(),
                    Currency::new("USD").unwrap(),
                    TxnType::Transfer,
                )
                .unwrap()
            })
            .collect();
        TransactionWindow::new(src, t0, 86_400, txns).unwrap()
    }

    #[test]
    fn prompt_contains_ids_and_feature_names() {
        let p = render_prompt(&window(5), &default_fanout_pattern()).unwrap();
        for i in 0..5 {
            assert!(p.text.contains(&format!("tx-{i}")));
        }
        for name in [
            "linked_transaction_count",
            "amount_dispersion",
            "currency_variety",
            "mean_interval_seconds",
        ] {
            assert!(p.text.contains(name));
        }
        assert!(p.text.contains(&window(5).to_csv()));
        assert_eq!(p.template_version, TEMPLATE_VERSION);
        assert!(!p.text.contains("{{"));
    }

    #[test]
    fn rendering_is_deterministic() {
        let a = render_prompt(&window(3), &default_fanout_pattern()).unwrap();
        let b = render_prompt(&window(3), &default_fanout_pattern()).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn unknown_and_duplicate_features_rejected() {
        let mut p = default_fanout_pattern();
        p.requested_features.push("velocity".into());
        assert_eq!(
            render_prompt(&window(2), &p),
            Err(PromptError::UnknownFeature("velocity".into()))
        );
        let mut p = default_fanout_pattern();
        p.requested_features.push("amount_dispersion".into());
        assert!(matches!(render_prompt(&window(2), &p), Err(PromptError::DuplicateFeature(_))));
        p.requested_features.clear();
        assert_eq!(render_prompt(&window(2), &p), Err(PromptError::NoFeatures));
    }

    #[test]
    fn empty_window_rejected() {
        let w = TransactionWindow::new(
            AccountId::new("A").unwrap(),
            "2024-01-01T00:00:00Z".parse().unwrap(),
            10,
            vec![],
        )
        .unwrap();
        assert_eq!(render_prompt(&w, &default_fanout_pattern()), Err(PromptError::EmptyWindow));
    }

    #[test]
    fn default_pattern_shape() {
        let p = default_fanout_pattern();
        assert_eq!(p.name, "fan-out");
        assert_eq!(p.requested_features, FEATURE_NAMES);
        assert!(p
            .narrative
            .contains("from a single source to multiple destinations within a short timeframe"));
    }

    #[test]
    fn narrative_placeholders_stay_literal() {
        let mut p = default_fanout_pattern();
        p.narrative = "see {{window_csv}} here".into();
        let r = render_prompt(&window(1), &p).unwrap();
        assert!(r.text.contains("see {{window_csv}} here"));
    }

    #[test]
    fn substitute_handles_unterminated_markers() {
        assert_eq!(substitute("a {{x", |_| Some("y")), "a {{x");
        assert_eq!(substitute("{{q}}-{{x}}", |k| (k == "x").then_some("1")), "{{q}}-1");
    }
}

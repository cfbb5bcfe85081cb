//! Parsing of free-text LLM completions into a [`FeatureVector`].

use serde_json::{Map, Number, Value};
use thiserror::Error;

use super::{FeatureVector, Seconds, FEATURE_NAMES};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ParseError {
    #[error("no JSON object found in completion")]
    NoJsonFound,
    #[error("missing key `{0}`")]
    MissingKey(String),
    #[error("unexpected key `{0}`")]
    ExtraKey(String),
    #[error("value of `{0}` is not a finite number")]
    NonNumericValue(String),
    #[error("count `{0}` has a fractional part")]
    FractionalCount(String),
    #[error("count `{0}` is negative")]
    NegativeCount(String),
}

/// Locate the first JSON object in `text` (bare or inside a markdown fence)
/// and read the six features from it. Keys must match exactly; counts must
/// be whole numbers.
pub fn parse_llm_response(text: &str) -> Result<FeatureVector, ParseError> {
    let obj = first_object(text).ok_or(ParseError::NoJsonFound)?;

    for name in FEATURE_NAMES {
        if !obj.contains_key(name) {
            return Err(ParseError::MissingKey(name.to_owned()));
        }
    }
    if let Some(extra) = obj.keys().find(|k| !FEATURE_NAMES.contains(&k.as_str())) {
        return Err(ParseError::ExtraKey(extra.clone()));
    }

    let number = |name: &str| -> Result<&Number, ParseError> {
        match &obj[name] {
            Value::Number(n) => Ok(n),
            _ => Err(ParseError::NonNumericValue(name.to_owned())),
        }
    };
    let real = |name: &str| -> Result<f64, ParseError> {
        number(name)?
            .as_f64()
            .filter(|v| v.is_finite())
            .ok_or_else(|| ParseError::NonNumericValue(name.to_owned()))
    };
    let count = |name: &str| -> Result<u64, ParseError> {
        let n = number(name)?;
        if let Some(u) = n.as_u64() {
            return Ok(u);
        }
        if n.is_i64() {
            return Err(ParseError::NegativeCount(name.to_owned()));
        }
        let v = real(name)?;
        if v.fract() != 0.0 {
            return Err(ParseError::FractionalCount(name.to_owned()));
        }
        if v < 0.0 {
            return Err(ParseError::NegativeCount(name.to_owned()));
        }
        if v > u64::MAX as f64 {
            return Err(ParseError::NonNumericValue(name.to_owned()));
        }
        Ok(v as u64)
    };
    let seconds = |name: &str| -> Result<Seconds, ParseError> {
        Seconds::from_f64(real(name)?).ok_or_else(|| ParseError::NonNumericValue(name.to_owned()))
    };

    Ok(FeatureVector {
        linked_transaction_count: count("linked_transaction_count")?,
        amount_dispersion: real("amount_dispersion")?,
        currency_variety: count("currency_variety")?,
        mean_interval_seconds: seconds("mean_interval_seconds")?,
        min_interval_seconds: seconds("min_interval_seconds")?,
        window_span_seconds: seconds("window_span_seconds")?,
    })
}

fn first_object(text: &str) -> Option<Map<String, Value>> {
    text.match_indices('{').find_map(|(i, _)| {
        let mut stream = serde_json::Deserializer::from_str(&text[i..]).into_iter::<Value>();
        match stream.next() {
            Some(Ok(Value::Object(map))) => Some(map),
            _ => None,
        }
    })
}

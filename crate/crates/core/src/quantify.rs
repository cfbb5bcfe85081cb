//! Min-max quantization of raw features into `[0, 1]`.
//!
//! Bounds are fitted on training vectors only. Interval features are
//! inverted after scaling so that, for every component, larger means more
//! suspicious (a fast burst scores near 1).

use std::collections::BTreeMap;

use serde::de::Error as _;
use serde::ser::SerializeMap;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::extract::{FeatureVector, FEATURE_COUNT, FEATURE_NAMES};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum QuantifyError {
    #[error("cannot fit a quantizer on zero vectors")]
    EmptyInput,
    #[error("invalid quantizer: {0}")]
    InvalidSpec(String),
}

/// Features where a smaller raw value is more suspicious.
pub const INVERTED_FEATURES: [&str; 3] =
    ["mean_interval_seconds", "min_interval_seconds", "window_span_seconds"];

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FeatureBounds {
    pub lo: f64,
    pub hi: f64,
    pub invert: bool,
}

/// Fitted per-feature bounds, in [`FEATURE_NAMES`] order.
#[derive(Debug, Clone, PartialEq)]
pub struct QuantizationSpec {
    bounds: [FeatureBounds; FEATURE_COUNT],
}

impl QuantizationSpec {
    pub fn new(bounds: [FeatureBounds; FEATURE_COUNT]) -> Result<Self, QuantifyError> {
        for (name, b) in FEATURE_NAMES.iter().zip(&bounds) {
            if !(b.lo.is_finite() && b.hi.is_finite() && b.lo < b.hi) {
                return Err(QuantifyError::InvalidSpec(format!(
                    "{name}: need finite lo < hi, got [{}, {}]",
                    b.lo, b.hi
                )));
            }
        }
        Ok(Self { bounds })
    }

    pub fn bounds(&self) -> &[FeatureBounds; FEATURE_COUNT] {
        &self.bounds
    }

    pub fn get(&self, name: &str) -> Option<&FeatureBounds> {
        FEATURE_NAMES.iter().position(|n| *n == name).map(|i| &self.bounds[i])
    }
}

// `quantizer.json`: {feature name -> {lo, hi, invert}} in canonical order.
impl Serialize for QuantizationSpec {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut map = s.serialize_map(Some(FEATURE_COUNT))?;
        for (name, b) in FEATURE_NAMES.iter().zip(&self.bounds) {
            map.serialize_entry(name, b)?;
        }
        map.end()
    }
}

impl<'de> Deserialize<'de> for QuantizationSpec {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let mut raw = BTreeMap::<String, FeatureBounds>::deserialize(d)?;
        let mut bounds = Vec::with_capacity(FEATURE_COUNT);
        for name in FEATURE_NAMES {
            bounds.push(raw.remove(name).ok_or_else(|| D::Error::missing_field(name))?);
        }
        if let Some(extra) = raw.keys().next() {
            return Err(D::Error::custom(format!("unknown feature `{extra}`")));
        }
        let bounds: [FeatureBounds; FEATURE_COUNT] = bounds.try_into().expect("length checked");
        QuantizationSpec::new(bounds).map_err(D::Error::custom)
    }
}

/// Quantized features, each in `[0, 1]`, in [`FEATURE_NAMES`] order.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuantifiedVector(pub [f64; FEATURE_COUNT]);

impl QuantifiedVector {
    pub fn get(&self, name: &str) -> Option<f64> {
        FEATURE_NAMES.iter().position(|n| *n == name).map(|i| self.0[i])
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    /// Components named in `names`, in that order.
    pub fn select(&self, names: &[&str]) -> Vec<f64> {
        names.iter().filter_map(|n| self.get(n)).collect()
    }
}

/// Per-feature min/max over `vectors`; constant features get `hi = lo + 1`.
pub fn fit_spec(vectors: &[FeatureVector]) -> Result<QuantizationSpec, QuantifyError> {
    let first = vectors.first().ok_or(QuantifyError::EmptyInput)?.to_array();
    let mut lo = first;
    let mut hi = first;
    for v in &vectors[1..] {
        for (i, x) in v.to_array().into_iter().enumerate() {
            lo[i] = lo[i].min(x);
            hi[i] = hi[i].max(x);
        }
    }
    let bounds = std::array::from_fn(|i| {
        let h = if lo[i] == hi[i] { lo[i] + 1.0 } else { hi[i] };
        FeatureBounds { lo: lo[i], hi: h, invert: INVERTED_FEATURES.contains(&FEATURE_NAMES[i]) }
    });
    QuantizationSpec::new(bounds)
}

/// `clamp((x - lo) / (hi - lo), 0, 1)`, flipped to `1 - x'` for inverted
/// features.
pub fn quantify(v: &FeatureVector, spec: &QuantizationSpec) -> QuantifiedVector {
    let raw = v.to_array();
    QuantifiedVector(std::array::from_fn(|i| {
        let b = spec.bounds[i];
        let scaled = ((raw[i] - b.lo) / (b.hi - b.lo)).clamp(0.0, 1.0);
        if b.invert {
            1.0 - scaled
        } else {
            scaled
        }
    }))
}

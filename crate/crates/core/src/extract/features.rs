use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// Feature names in canonical order. Every vector, prompt, quantizer and
/// model uses this order.
pub const FEATURE_NAMES: [&str; 6] = [
    "linked_transaction_count",
    "amount_dispersion",
    "currency_variety",
    "mean_interval_seconds",
    "min_interval_seconds",
    "window_span_seconds",
];

pub const FEATURE_COUNT: usize = FEATURE_NAMES.len();

/// Plain-language definition of each feature, used in prompts.
pub fn feature_definition(name: &str) -> Option<&'static str> {
    Some(match name {
        "linked_transaction_count" => "number of transactions in the window (integer)",
        "amount_dispersion" => {
            "coefficient of variation of the amounts: population standard deviation divided \
             by the mean, ignoring currency; 0 when there are fewer than 2 transactions"
        }
        "currency_variety" => "number of distinct currency codes (integer)",
        "mean_interval_seconds" => {
            "time between the first and last transaction divided by (count - 1), in \
             seconds; 0 when there are fewer than 2 transactions"
        }
        "min_interval_seconds" => {
            "smallest gap between consecutive transactions sorted by time, in seconds; 0 \
             when there are fewer than 2 transactions"
        }
        "window_span_seconds" => "seconds between the first and last transaction",
        _ => return None,
    })
}

/// A non-negative-by-contract duration in seconds, held as an exact
/// rational so identities such as `mean * (n - 1) == span` hold exactly.
///
/// Serialized as a JSON number. Deserialization is exact for every finite
/// `f64`.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Seconds(BigRational);

impl Seconds {
    pub fn zero() -> Self {
        Self(BigRational::zero())
    }

    pub fn whole(secs: i64) -> Self {
        Self(BigRational::from_integer(BigInt::from(secs)))
    }

    /// `numer / denom`.
    ///
    /// # Panics
    /// If `denom` is zero.
    pub fn ratio(numer: i64, denom: u64) -> Self {
        assert!(denom != 0, "zero denominator");
        Self(BigRational::new(BigInt::from(numer), BigInt::from(denom)))
    }

    /// Exact conversion; `None` for NaN or infinities.
    pub fn from_f64(value: f64) -> Option<Self> {
        BigRational::from_float(value).map(Self)
    }

    pub fn to_f64(&self) -> f64 {
        self.0.to_f64().unwrap_or(f64::NAN)
    }

    pub fn is_negative(&self) -> bool {
        self.0.is_negative()
    }

    pub fn scaled(&self, k: u64) -> Self {
        Self(&self.0 * BigRational::from_integer(BigInt::from(k)))
    }

    pub fn as_rational(&self) -> &BigRational {
        &self.0
    }
}

impl fmt::Debug for Seconds {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_integer() {
            write!(f, "{}s", self.0)
        } else {
            write!(f, "{}s(≈{})", self.0, self.to_f64())
        }
    }
}

impl fmt::Display for Seconds {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_f64())
    }
}

impl Serialize for Seconds {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_f64(self.to_f64())
    }
}

impl<'de> Deserialize<'de> for Seconds {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let v = f64::deserialize(d)?;
        Self::from_f64(v).ok_or_else(|| serde::de::Error::custom("seconds must be finite"))
    }
}

/// The six red-flag features of one window, in raw units.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FeatureVector {
    pub linked_transaction_count: u64,
    /// Coefficient of variation of the amounts (dimensionless).
    pub amount_dispersion: f64,
    pub currency_variety: u64,
    pub mean_interval_seconds: Seconds,
    pub min_interval_seconds: Seconds,
    pub window_span_seconds: Seconds,
}

impl FeatureVector {
    /// Values as `f64` in [`FEATURE_NAMES`] order.
    pub fn to_array(&self) -> [f64; FEATURE_COUNT] {
        [
            self.linked_transaction_count as f64,
            self.amount_dispersion,
            self.currency_variety as f64,
            self.mean_interval_seconds.to_f64(),
            self.min_interval_seconds.to_f64(),
            self.window_span_seconds.to_f64(),
        ]
    }

    /// Invariants that can be checked without the source window:
    /// non-negativity, `1 <= variety <= count` and
    /// `min_interval <= mean_interval <= span`.
    pub fn check_contract(&self) -> Result<(), String> {
        if !self.amount_dispersion.is_finite() || self.amount_dispersion < 0.0 {
            return Err(format!(
                "amount_dispersion must be finite and >= 0, got {}",
                self.amount_dispersion
            ));
        }
        if self.currency_variety < 1 || self.currency_variety > self.linked_transaction_count {
            return Err(format!(
                "currency_variety {} outside [1, linked_transaction_count = {}]",
                self.currency_variety, self.linked_transaction_count
            ));
        }
        if self.min_interval_seconds.is_negative() {
            return Err("min_interval_seconds must be >= 0".into());
        }
        if self.min_interval_seconds > self.mean_interval_seconds {
            return Err("min_interval_seconds exceeds mean_interval_seconds".into());
        }
        if self.mean_interval_seconds > self.window_span_seconds {
            return Err("mean_interval_seconds exceeds window_span_seconds".into());
        }
        Ok(())
    }

    /// Field-wise comparison: integers exactly, everything else within `tol`.
    pub fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        self.linked_transaction_count == other.linked_transaction_count
            && self.currency_variety == other.currency_variety
            && self
                .to_array()
                .iter()
                .zip(other.to_array())
                .all(|(a, b)| (a - b).abs() <= tol)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> FeatureVector {
        FeatureVector {
            linked_transaction_count: 3,
            amount_dispersion: 0.5,
            currency_variety: 2,
            mean_interval_seconds: Seconds::ratio(1000, 3),
            min_interval_seconds: Seconds::whole(100),
            window_span_seconds: Seconds::whole(2000),
        }
    }

    #[test]
    fn seconds_exact_arithmetic() {
        let mean = Seconds::ratio(1, 49);
        assert_eq!(mean.scaled(49), Seconds::whole(1));
        assert_eq!(Seconds::from_f64(0.5).unwrap(), Seconds::ratio(1, 2));
        assert!(Seconds::from_f64(f64::NAN).is_none());
    }

    #[test]
    fn contract_checks() {
        assert!(sample().check_contract().is_ok());
        let mut v = sample();
        v.mean_interval_seconds = Seconds::whole(3000);
        assert!(v.check_contract().is_err());
        let mut v = sample();
        v.currency_variety = 4;
        assert!(v.check_contract().is_err());
        let mut v = sample();
        v.min_interval_seconds = Seconds::whole(-1);
        assert!(v.check_contract().is_err());
    }

    #[test]
    fn serde_uses_plain_numbers() {
        let json = serde_json::to_value(sample()).unwrap();
        assert_eq!(json["window_span_seconds"], serde_json::json!(2000.0));
        let back: FeatureVector = serde_json::from_value(json).unwrap();
        assert!(back.approx_eq(&sample(), 1e-12));
    }
}

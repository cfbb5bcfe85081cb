//! Transaction domain types, CSV ingestion and per-account windowing.
//!
//! A [`Transaction`] is one money movement. Transactions are grouped into
//! [`TransactionWindow`]s (all outgoing transactions of one focal account
//! inside one time interval), which are the unit of feature extraction and
//! labelling. A [`Dataset`] is a labelled list of windows.

mod csv_io;
mod dataset;
mod types;
mod window;

pub use csv_io::{parse_transactions_csv, serialize_transactions_csv, CSV_HEADER};
pub use dataset::{Dataset, DatasetMeta, Label, LabeledWindow, WindowRecord, WindowsFile};
pub use types::{AccountId, Amount, Currency, Transaction, TxnType, MAX_AMOUNT_SCALE};
pub use window::{build_windows, TransactionWindow};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TxError {
    #[error("malformed row at line {line}: {reason}")]
    MalformedRow { line: usize, reason: String },
    #[error("duplicate transaction id `{0}`")]
    DuplicateId(String),
    #[error("empty input: expected a header row")]
    EmptyInput,
    #[error("invalid windowing: duration {duration}s, stride {stride}s (need duration >= stride >= 1)")]
    InvalidWindowing { duration: u64, stride: u64 },
    #[error("invalid transaction: {0}")]
    InvalidTransaction(String),
    #[error("invalid window: {0}")]
    InvalidWindow(String),
    #[error("invalid dataset: {0}")]
    InvalidDataset(String),
}

pub type Result<T, E = TxError> = std::result::Result<T, E>;

/// RFC 3339 UTC with a `Z` suffix and whole seconds, e.g. `2024-01-01T00:00:00Z`.
pub(crate) const TIMESTAMP_FORMAT: &str = "%Y-%m-%dT%H:%M:%SZ";

pub(crate) fn format_timestamp(ts: &chrono::DateTime<chrono::Utc>) -> String {
    ts.format(TIMESTAMP_FORMAT).to_string()
}

/// Serde adapter for whole-second UTC timestamps.
pub(crate) mod ts_serde {
    use chrono::{DateTime, Utc};
    use serde::{de::Error, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(ts: &DateTime<Utc>, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&super::format_timestamp(ts))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<DateTime<Utc>, D::Error> {
        let raw = String::deserialize(d)?;
        super::types::parse_timestamp(&raw).map_err(D::Error::custom)
    }
}

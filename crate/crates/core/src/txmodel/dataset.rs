use std::collections::HashMap;

use chrono::{DateTime, Utc};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::{ts_serde, AccountId, Result, Transaction, TransactionWindow, TxError};

/// Ground-truth label of a window.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Label {
    Benign,
    Suspicious,
}

impl Label {
    pub fn as_u8(self) -> u8 {
        match self {
            Self::Benign => 0,
            Self::Suspicious => 1,
        }
    }

    pub fn is_positive(self) -> bool {
        self == Self::Suspicious
    }
}

impl From<bool> for Label {
    fn from(positive: bool) -> Self {
        if positive {
            Self::Suspicious
        } else {
            Self::Benign
        }
    }
}

impl TryFrom<u8> for Label {
    type Error = TxError;
    fn try_from(value: u8) -> Result<Self> {
        match value {
            0 => Ok(Self::Benign),
            1 => Ok(Self::Suspicious),
            other => Err(TxError::InvalidDataset(format!("label must be 0 or 1, got {other}"))),
        }
    }
}

impl Serialize for Label {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_u8(self.as_u8())
    }
}

impl<'de> Deserialize<'de> for Label {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = u8::deserialize(d)?;
        Label::try_from(raw).map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabeledWindow {
    pub window: TransactionWindow,
    pub label: Label,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DatasetMeta {
    pub seed: u64,
    pub config_digest: String,
}

/// Labelled corpus of windows.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Dataset {
    pub windows: Vec<LabeledWindow>,
    pub meta: DatasetMeta,
}

impl Dataset {
    pub fn len(&self) -> usize {
        self.windows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.windows.is_empty()
    }

    pub fn positives(&self) -> usize {
        self.windows.iter().filter(|w| w.label.is_positive()).count()
    }

    /// Flatten into the `windows.json` representation, which references
    /// transactions by id.
    pub fn to_windows_file(&self) -> WindowsFile {
        let windows = self
            .windows
            .iter()
            .enumerate()
            .map(|(window_index, lw)| WindowRecord {
                window_index,
                focal_account: lw.window.focal_account().clone(),
                window_start: lw.window.window_start(),
                window_duration_seconds: lw.window.duration_seconds(),
                label: lw.label,
                txn_ids: lw.window.transactions().iter().map(|t| t.txn_id().to_owned()).collect(),
            })
            .collect();
        WindowsFile { meta: self.meta.clone(), windows }
    }

    /// Rebuild a dataset from `windows.json` plus the transactions it
    /// references.
    pub fn from_windows_file(file: &WindowsFile, txns: &[Transaction]) -> Result<Self> {
        let by_id: HashMap<&str, &Transaction> = txns.iter().map(|t| (t.txn_id(), t)).collect();
        let mut windows = Vec::with_capacity(file.windows.len());
        for (pos, rec) in file.windows.iter().enumerate() {
            if rec.window_index != pos {
                return Err(TxError::InvalidDataset(format!(
                    "window_index {} found at position {pos}",
                    rec.window_index
                )));
            }
            let members = rec
                .txn_ids
                .iter()
                .map(|id| {
                    by_id.get(id.as_str()).map(|t| (*t).clone()).ok_or_else(|| {
                        TxError::InvalidDataset(format!("window {pos} references unknown txn `{id}`"))
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            let window = TransactionWindow::new(
                rec.focal_account.clone(),
                rec.window_start,
                rec.window_duration_seconds,
                members,
            )?;
            windows.push(LabeledWindow { window, label: rec.label });
        }
        Ok(Self { windows, meta: file.meta.clone() })
    }
}

/// One entry of `windows.json`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WindowRecord {
    pub window_index: usize,
    pub focal_account: AccountId,
    #[serde(with = "ts_serde")]
    pub window_start: DateTime<Utc>,
    pub window_duration_seconds: u64,
    pub label: Label,
    pub txn_ids: Vec<String>,
}

/// Schema of `windows.json`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WindowsFile {
    pub meta: DatasetMeta,
    pub windows: Vec<WindowRecord>,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn label_serde_is_numeric() {
        assert_eq!(serde_json::to_string(&Label::Suspicious).unwrap(), "1");
        assert_eq!(serde_json::from_str::<Label>("0").unwrap(), Label::Benign);
        assert!(serde_json::from_str::<Label>("2").is_err());
    }
}

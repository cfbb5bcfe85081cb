use std::collections::BTreeMap;

use chrono::{DateTime, Duration, Utc};

use super::{serialize_transactions_csv, AccountId, Result, Transaction, TxError};

/// All outgoing transactions of one focal account inside
/// `[window_start, window_start + duration)`, sorted by `(timestamp, txn_id)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TransactionWindow {
    focal_account: AccountId,
    window_start: DateTime<Utc>,
    duration_seconds: u64,
    transactions: Vec<Transaction>,
}

impl TransactionWindow {
    /// Validates membership and sorts the transactions; input order does not
    /// matter.
    pub fn new(
        focal_account: AccountId,
        window_start: DateTime<Utc>,
        duration_seconds: u64,
        mut transactions: Vec<Transaction>,
    ) -> Result<Self> {
        if duration_seconds == 0 {
            return Err(TxError::InvalidWindow("duration must be positive".into()));
        }
        let end = window_start + seconds(duration_seconds);
        for t in &transactions {
            if t.src_account() != &focal_account {
                return Err(TxError::InvalidWindow(format!(
                    "transaction `{}` has source `{}`, not focal account `{focal_account}`",
                    t.txn_id(),
                    t.src_account()
                )));
            }
            if t.timestamp() < window_start || t.timestamp() >= end {
                return Err(TxError::InvalidWindow(format!(
                    "transaction `{}` lies outside the window interval",
                    t.txn_id()
                )));
            }
        }
        transactions.sort_by(|a, b| a.sort_key().cmp(&b.sort_key()));
        Ok(Self { focal_account, window_start, duration_seconds, transactions })
    }

    pub fn focal_account(&self) -> &AccountId {
        &self.focal_account
    }

    pub fn window_start(&self) -> DateTime<Utc> {
        self.window_start
    }

    pub fn duration_seconds(&self) -> u64 {
        self.duration_seconds
    }

    pub fn window_end(&self) -> DateTime<Utc> {
        self.window_start + seconds(self.duration_seconds)
    }

    pub fn transactions(&self) -> &[Transaction] {
        &self.transactions
    }

    pub fn len(&self) -> usize {
        self.transactions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.transactions.is_empty()
    }

    /// The window's transactions in the canonical CSV encoding. This is the
    /// byte string that both prompts and digests are built from.
    pub fn to_csv(&self) -> String {
        String::from_utf8(serialize_transactions_csv(&self.transactions))
            .expect("CSV writer emits UTF-8")
    }
}

fn seconds(n: u64) -> Duration {
    Duration::seconds(i64::try_from(n).unwrap_or(i64::MAX))
}

/// Slice transactions into per-source-account windows.
///
/// For each account the grid of starts is anchored at its earliest outgoing
/// transaction and advances by `stride_seconds`; a window covers
/// `[start, start + duration_seconds)`. Empty windows are skipped. Output is
/// ordered by account id, then window start, and does not depend on input
/// order.
pub fn build_windows(
    txns: &[Transaction],
    duration_seconds: u64,
    stride_seconds: u64,
) -> Result<Vec<TransactionWindow>> {
    if stride_seconds == 0 || stride_seconds > duration_seconds {
        return Err(TxError::InvalidWindowing { duration: duration_seconds, stride: stride_seconds });
    }

    let mut by_account: BTreeMap<&AccountId, Vec<&Transaction>> = BTreeMap::new();
    for t in txns {
        by_account.entry(t.src_account()).or_default().push(t);
    }

    let mut windows = Vec::new();
    for (account, mut own) in by_account {
        own.sort_by(|a, b| a.sort_key().cmp(&b.sort_key()));
        let anchor = own[0].timestamp();
        let last = own[own.len() - 1].timestamp();
        let total = (last - anchor).num_seconds() as u64;

        // `lo` is the first transaction not before the current start; it only
        // moves forward as the start advances.
        let mut lo = 0usize;
        let mut offset = 0u64;
        while offset <= total {
            let start = anchor + seconds(offset);
            let end = start + seconds(duration_seconds);
            while lo < own.len() && own[lo].timestamp() < start {
                lo += 1;
            }
            let hi = lo + own[lo..].iter().take_while(|t| t.timestamp() < end).count();
            if hi > lo {
                let members = own[lo..hi].iter().map(|t| (*t).clone()).collect();
                windows.push(TransactionWindow {
                    focal_account: account.clone(),
                    window_start: start,
                    duration_seconds,
                    transactions: members,
                });
            } else if lo < own.len() {
                // Jump straight to the last grid start whose window could
                // reach the next transaction.
                let gap = (own[lo].timestamp() - start).num_seconds() as u64;
                let skip = gap.saturating_sub(duration_seconds) / stride_seconds;
                offset += skip * stride_seconds;
                if skip > 0 {
                    continue;
                }
            }
            offset += stride_seconds;
        }
    }
    Ok(windows)
}

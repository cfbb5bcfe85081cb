#![allow(dead_code)]

use std::path::PathBuf;

use chrono::{DateTime, Duration, TimeZone, Utc};
use proptest::prelude::*;
use redflag::txmodel::{
    parse_transactions_csv, AccountId, Amount, Currency, Dataset, Transaction, TransactionWindow,
    TxnType, WindowsFile,
};
use rust_decimal::Decimal;

pub fn fixtures() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures")
}

pub fn oracle_replay_dir() -> PathBuf {
    fixtures().join("oracle/replay")
}

pub fn oracle_dataset() -> Dataset {
    let dir = fixtures().join("oracle");
    let txns = parse_transactions_csv(&std::fs::read(dir.join("transactions.csv")).unwrap()).unwrap();
    let file: WindowsFile =
        serde_json::from_slice(&std::fs::read(dir.join("windows.json")).unwrap()).unwrap();
    Dataset::from_windows_file(&file, &txns).unwrap()
}

pub fn t0() -> DateTime<Utc> {
    Utc.with_ymd_and_hms(2024, 1, 1, 0, 0, 0).unwrap()
}

pub fn acct(s: &str) -> AccountId {
    AccountId::new(s).unwrap()
}

pub fn txn(id: &str, offset: i64, src: &str, dst: &str, amount: &str, currency: &str) -> Transaction {
    Transaction::new(
        id,
        t0() + Duration::seconds(offset),
        acct(src),
        acct(dst),
        amount.parse::<Amount>().unwrap(),
        Currency::new(currency).unwrap(),
        TxnType::Transfer,
    )
    .unwrap()
}

/// A one-day window starting at `t0()` for the source of the first
/// transaction.
pub fn day_window(txns: Vec<Transaction>) -> TransactionWindow {
    let focal = txns[0].src_account().clone();
    TransactionWindow::new(focal, t0(), 86_400, txns).unwrap()
}

const CURRENCIES: [&str; 5] = ["USD", "EUR", "GBP", "JPY", "CHF"];

pub fn arb_amount() -> impl Strategy<Value = Amount> {
    (1i64..=10_000_000_000, 0u32..=4)
        .prop_map(|(units, scale)| Amount::new(Decimal::new(units, scale)).unwrap())
}

/// `(offset seconds, dst index, amount, currency index, type index)`.
fn arb_row(max_offset: i64) -> impl Strategy<Value = (i64, usize, Amount, usize, usize)> {
    (0..max_offset, 0usize..20, arb_amount(), 0usize..CURRENCIES.len(), 0usize..4)
}

fn build(i: usize, src: &str, row: (i64, usize, Amount, usize, usize)) -> Transaction {
    let (offset, dst, amount, cur, ty) = row;
    Transaction::new(
        format!("T{i:05}"),
        t0() + Duration::seconds(offset),
        acct(src),
        acct(&format!("D{dst:02}")),
        amount,
        Currency::new(CURRENCIES[cur]).unwrap(),
        TxnType::ALL[ty],
    )
    .unwrap()
}

/// Transactions from up to five sources over ten days, with unique ids.
pub fn arb_transactions(max_len: usize) -> impl Strategy<Value = Vec<Transaction>> {
    prop::collection::vec((0usize..5, arb_row(10 * 86_400)), 0..=max_len).prop_map(|rows| {
        rows.into_iter()
            .enumerate()
            .map(|(i, (src, row))| build(i, &format!("S{src}"), row))
            .collect()
    })
}

/// A non-empty window of one focal account over one day, in arbitrary
/// (unsorted) input order.
pub fn arb_window_txns(max_len: usize) -> impl Strategy<Value = Vec<Transaction>> {
    prop::collection::vec(arb_row(86_400), 1..=max_len)
        .prop_map(|rows| rows.into_iter().enumerate().map(|(i, r)| build(i, "FOCAL", r)).collect())
}

pub fn arb_window(max_len: usize) -> impl Strategy<Value = TransactionWindow> {
    arb_window_txns(max_len).prop_map(day_window)
}

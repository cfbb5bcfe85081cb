use std::collections::HashSet;

use super::types::parse_timestamp;
use super::{format_timestamp, AccountId, Result, Transaction, TxError};

/// Exact header row of the transaction CSV format.
pub const CSV_HEADER: &str = "txn_id,timestamp,src_account,dst_account,amount,currency,txn_type";

const COLUMNS: usize = 7;

/// Parse a transaction CSV. Rows are returned in file order; line numbers in
/// errors are 1-based with the header on line 1.
pub fn parse_transactions_csv(bytes: &[u8]) -> Result<Vec<Transaction>> {
    if bytes.iter().all(u8::is_ascii_whitespace) {
        return Err(TxError::EmptyInput);
    }
    let text = std::str::from_utf8(bytes).map_err(|e| TxError::MalformedRow {
        line: 1 + bytes[..e.valid_up_to()].iter().filter(|&&b| b == b'\n').count(),
        reason: "input is not valid UTF-8".into(),
    })?;

    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .from_reader(text.as_bytes());

    let mut records = reader.records();
    let header = match records.next() {
        None => return Err(TxError::EmptyInput),
        Some(rec) => rec.map_err(|e| csv_error(1, e))?,
    };
    let header_line = header.iter().collect::<Vec<_>>().join(",");
    if header_line != CSV_HEADER {
        return Err(TxError::MalformedRow {
            line: 1,
            reason: format!("expected header `{CSV_HEADER}`"),
        });
    }

    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for (idx, rec) in records.enumerate() {
        let fallback_line = idx + 2;
        let rec = rec.map_err(|e| csv_error(fallback_line, e))?;
        let line = rec.position().map_or(fallback_line, |p| p.line() as usize);
        let txn = parse_row(&rec).map_err(|reason| TxError::MalformedRow { line, reason })?;
        if !seen.insert(txn.txn_id().to_owned()) {
            return Err(TxError::DuplicateId(txn.txn_id().to_owned()));
        }
        out.push(txn);
    }
    Ok(out)
}

fn csv_error(line: usize, err: csv::Error) -> TxError {
    let line = err.position().map_or(line, |p| p.line() as usize);
    TxError::MalformedRow { line, reason: err.to_string() }
}

fn parse_row(rec: &csv::StringRecord) -> std::result::Result<Transaction, String> {
    if rec.len() != COLUMNS {
        return Err(format!("expected {COLUMNS} fields, found {}", rec.len()));
    }
    let reason = |e: TxError| match e {
        TxError::InvalidTransaction(msg) => msg,
        other => other.to_string(),
    };
    let timestamp = parse_timestamp(&rec[1]).map_err(reason)?;
    let src = AccountId::new(&rec[2]).map_err(reason)?;
    let dst = AccountId::new(&rec[3]).map_err(reason)?;
    let amount = rec[4].parse().map_err(reason)?;
    let currency = rec[5].parse().map_err(reason)?;
    let txn_type = rec[6].parse().map_err(reason)?;
    Transaction::new(&rec[0], timestamp, src, dst, amount, currency, txn_type).map_err(reason)
}

/// Render transactions as CSV with the canonical header. Output is
/// deterministic and `parse_transactions_csv` inverts it exactly.
pub fn serialize_transactions_csv(txns: &[Transaction]) -> Vec<u8> {
    let mut writer = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    writer
        .write_record(CSV_HEADER.split(','))
        .expect("writing to a Vec cannot fail");
    for t in txns {
        writer
            .write_record([
                t.txn_id(),
                &format_timestamp(&t.timestamp()),
                t.src_account().as_str(),
                t.dst_account().as_str(),
                &t.amount().to_string(),
                t.currency().as_str(),
                t.txn_type().as_str(),
            ])
            .expect("writing to a Vec cannot fail");
    }
    writer.into_inner().expect("flushing a Vec cannot fail")
}

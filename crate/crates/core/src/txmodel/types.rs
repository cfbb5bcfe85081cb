use std::fmt;
use std::str::FromStr;

use chrono::{DateTime, Timelike, Utc};
use rust_decimal::Decimal;
use serde::{Deserialize, Serialize};

use super::{Result, TxError};

/// Maximum number of fractional digits an [`Amount`] may carry.
pub const MAX_AMOUNT_SCALE: u32 = 4;

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct AccountId(String);

impl AccountId {
    pub fn new(id: impl Into<String>) -> Result<Self> {
        let id = id.into();
        if id.trim().is_empty() {
            return Err(TxError::InvalidTransaction("account id must be non-empty".into()));
        }
        Ok(Self(id))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl TryFrom<String> for AccountId {
    type Error = TxError;
    fn try_from(value: String) -> Result<Self> {
        Self::new(value)
    }
}

impl From<AccountId> for String {
    fn from(value: AccountId) -> Self {
        value.0
    }
}

impl fmt::Display for AccountId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// Three-letter uppercase ISO-style currency code.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct Currency([u8; 3]);

impl Currency {
    pub fn new(code: &str) -> Result<Self> {
        let bytes = code.as_bytes();
        if bytes.len() != 3 || !bytes.iter().all(u8::is_ascii_uppercase) {
            return Err(TxError::InvalidTransaction(format!(
                "currency `{code}` must match [A-Z]{{3}}"
            )));
        }
        Ok(Self([bytes[0], bytes[1], bytes[2]]))
    }

    pub fn as_str(&self) -> &str {
        // Constructor guarantees ASCII.
        std::str::from_utf8(&self.0).expect("currency code is ASCII")
    }
}

impl FromStr for Currency {
    type Err = TxError;
    fn from_str(s: &str) -> Result<Self> {
        Self::new(s)
    }
}

impl TryFrom<String> for Currency {
    type Error = TxError;
    fn try_from(value: String) -> Result<Self> {
        Self::new(&value)
    }
}

impl From<Currency> for String {
    fn from(value: Currency) -> Self {
        value.as_str().to_owned()
    }
}

impl fmt::Display for Currency {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A strictly positive money amount with at most four fractional digits.
///
/// The stored scale is preserved, so `100.00` renders back as `100.00`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Amount(Decimal);

impl Amount {
    pub fn new(value: Decimal) -> Result<Self> {
        if value <= Decimal::ZERO {
            return Err(TxError::InvalidTransaction("amount must be > 0".into()));
        }
        if value.scale() > MAX_AMOUNT_SCALE {
            return Err(TxError::InvalidTransaction(format!(
                "amount must have at most {MAX_AMOUNT_SCALE} fractional digits"
            )));
        }
        Ok(Self(value))
    }

    pub fn value(&self) -> Decimal {
        self.0
    }
}

impl FromStr for Amount {
    type Err = TxError;

    fn from_str(s: &str) -> Result<Self> {
        let well_formed = !s.is_empty()
            && s.bytes().all(|b| b.is_ascii_digit() || b == b'.' || b == b'-')
            && s.bytes().filter(|&b| b == b'.').count() <= 1;
        if !well_formed {
            return Err(TxError::InvalidTransaction(format!("amount `{s}` is not a plain decimal")));
        }
        let value = Decimal::from_str_exact(s)
            .map_err(|e| TxError::InvalidTransaction(format!("amount `{s}`: {e}")))?;
        Self::new(value)
    }
}

impl fmt::Display for Amount {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TxnType {
    Transfer,
    Deposit,
    Withdrawal,
    Payment,
}

impl TxnType {
    pub const ALL: [TxnType; 4] = [Self::Transfer, Self::Deposit, Self::Withdrawal, Self::Payment];

    pub fn as_str(&self) -> &'static str {
        match self {
            Self::Transfer => "transfer",
            Self::Deposit => "deposit",
            Self::Withdrawal => "withdrawal",
            Self::Payment => "payment",
        }
    }
}

impl FromStr for TxnType {
    type Err = TxError;
    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|t| t.as_str() == s)
            .ok_or_else(|| TxError::InvalidTransaction(format!("unknown txn_type `{s}`")))
    }
}

impl fmt::Display for TxnType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Parse an RFC 3339 timestamp, normalizing any offset to UTC. Sub-second
/// precision is rejected.
pub(crate) fn parse_timestamp(raw: &str) -> Result<DateTime<Utc>> {
    let parsed = DateTime::parse_from_rfc3339(raw)
        .map_err(|e| TxError::InvalidTransaction(format!("timestamp `{raw}`: {e}")))?;
    if parsed.nanosecond() != 0 {
        return Err(TxError::InvalidTransaction(format!(
            "timestamp `{raw}` must have whole-second precision"
        )));
    }
    Ok(parsed.with_timezone(&Utc))
}

/// One money movement.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Transaction {
    txn_id: String,
    timestamp: DateTime<Utc>,
    src_account: AccountId,
    dst_account: AccountId,
    amount: Amount,
    currency: Currency,
    txn_type: TxnType,
}

impl Transaction {
    pub fn new(
        txn_id: impl Into<String>,
        timestamp: DateTime<Utc>,
        src_account: AccountId,
        dst_account: AccountId,
        amount: Amount,
        currency: Currency,
        txn_type: TxnType,
    ) -> Result<Self> {
        let txn_id = txn_id.into();
        if txn_id.is_empty() {
            return Err(TxError::InvalidTransaction("txn_id must be non-empty".into()));
        }
        if src_account == dst_account {
            return Err(TxError::InvalidTransaction(format!(
                "src_account and dst_account are both `{src_account}`"
            )));
        }
        if timestamp.nanosecond() != 0 {
            return Err(TxError::InvalidTransaction(
                "timestamp must have whole-second precision".into(),
            ));
        }
        Ok(Self { txn_id, timestamp, src_account, dst_account, amount, currency, txn_type })
    }

    pub fn txn_id(&self) -> &str {
        &self.txn_id
    }

    pub fn timestamp(&self) -> DateTime<Utc> {
        self.timestamp
    }

    pub fn src_account(&self) -> &AccountId {
        &self.src_account
    }

    pub fn dst_account(&self) -> &AccountId {
        &self.dst_account
    }

    pub fn amount(&self) -> Amount {
        self.amount
    }

    pub fn currency(&self) -> Currency {
        self.currency
    }

    pub fn txn_type(&self) -> TxnType {
        self.txn_type
    }

    /// Copy of this transaction with a different amount. Used by invariance
    /// checks that rescale a window.
    pub fn with_amount(&self, amount: Amount) -> Self {
        Self { amount, ..self.clone() }
    }

    /// Copy of this transaction with a different timestamp.
    pub fn with_timestamp(&self, timestamp: DateTime<Utc>) -> Result<Self> {
        Self::new(
            self.txn_id.clone(),
            timestamp,
            self.src_account.clone(),
            self.dst_account.clone(),
            self.amount,
            self.currency,
            self.txn_type,
        )
    }

    pub(crate) fn sort_key(&self) -> (DateTime<Utc>, &str) {
        (self.timestamp, &self.txn_id)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn amount_rejects_non_positive_and_wide_scale() {
        assert!("0".parse::<Amount>().is_err());
        assert!("-5.00".parse::<Amount>().is_err());
        assert!("1.23456".parse::<Amount>().is_err());
        assert!("1,000.00".parse::<Amount>().is_err());
        assert!("1e3".parse::<Amount>().is_err());
        assert_eq!("100.00".parse::<Amount>().unwrap().to_string(), "100.00");
        assert_eq!("0.0001".parse::<Amount>().unwrap().to_string(), "0.0001");
    }

    #[test]
    fn currency_must_be_three_uppercase_letters() {
        assert!(Currency::new("USD").is_ok());
        assert!(Currency::new("usd").is_err());
        assert!(Currency::new("US").is_err());
        assert!(Currency::new("USDT").is_err());
    }

    #[test]
    fn offsets_normalize_to_utc() {
        let ts = parse_timestamp("2024-01-01T02:00:00+02:00").unwrap();
        assert_eq!(super::super::format_timestamp(&ts), "2024-01-01T00:00:00Z");
        assert!(parse_timestamp("2024-01-01T00:00:00.5Z").is_err());
    }

    #[test]
    fn self_loop_rejected() {
        let a = AccountId::new("A").unwrap();
        let err = Transaction::new(
            "t1",
            parse_timestamp("2024-01-01T00:00:00Z").unwrap(),
            a.clone(),
            a,
            "1.00".parse().unwrap(),
            Currency::new("USD").unwrap(),
            TxnType::Transfer,
        );
        assert!(err.is_err());
    }
}

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};

use super::{ExtractError, FeatureVector, Seconds};
use crate::txmodel::{Transaction, TransactionWindow};

/// Deterministic feature extraction. This is the reference definition every
/// other backend is checked against.
pub fn extract_rules(window: &TransactionWindow) -> Result<FeatureVector, ExtractError> {
    let txns = window.transactions();
    if txns.is_empty() {
        return Err(ExtractError::EmptyWindow);
    }
    let n = txns.len();

    let currency_variety = txns.iter().map(|t| t.currency()).collect::<BTreeSet<_>>().len();

    // Windows keep transactions sorted by timestamp.
    let first = txns[0].timestamp();
    let span = (txns[n - 1].timestamp() - first).num_seconds();
    let (mean_interval, min_interval) = if n < 2 {
        (Seconds::zero(), Seconds::zero())
    } else {
        let min_gap = txns
            .windows(2)
            .map(|p| (p[1].timestamp() - p[0].timestamp()).num_seconds())
            .min()
            .expect("n >= 2");
        (Seconds::ratio(span, (n - 1) as u64), Seconds::whole(min_gap))
    };

    Ok(FeatureVector {
        linked_transaction_count: n as u64,
        amount_dispersion: coefficient_of_variation(txns),
        currency_variety: currency_variety as u64,
        mean_interval_seconds: mean_interval,
        min_interval_seconds: min_interval,
        window_span_seconds: Seconds::whole(span),
    })
}

/// Population CV of the amounts, evaluated as `sqrt(n·Σa² − (Σa)²) / Σa`
/// over exact integers so equal amounts give exactly zero.
fn coefficient_of_variation(txns: &[Transaction]) -> f64 {
    let n = txns.len();
    if n < 2 {
        return 0.0;
    }
    let scale = txns.iter().map(|t| t.amount().value().scale()).max().unwrap_or(0);
    let units: Vec<BigInt> = txns
        .iter()
        .map(|t| {
            let mut v = t.amount().value();
            v.rescale(scale);
            BigInt::from(v.mantissa())
        })
        .collect();
    let sum: BigInt = units.iter().sum();
    if sum.is_zero() {
        return 0.0;
    }
    let sum_sq: BigInt = units.iter().map(|u| u * u).sum();
    let spread = BigInt::from(n) * sum_sq - &sum * &sum;
    let spread = spread.to_f64().unwrap_or(f64::INFINITY).max(0.0);
    spread.sqrt() / sum.to_f64().unwrap_or(f64::INFINITY)
}

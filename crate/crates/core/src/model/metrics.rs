use serde::{Deserialize, Serialize};

use super::{predict_proba, Example, ModelError, ModelParams};

/// Decision threshold for the confusion matrix.
pub const THRESHOLD: f64 = 0.5;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Confusion {
    pub true_positive: u64,
    pub false_positive: u64,
    pub true_negative: u64,
    pub false_negative: u64,
}

impl Confusion {
    pub fn total(&self) -> u64 {
        self.true_positive + self.false_positive + self.true_negative + self.false_negative
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub auc: f64,
    pub precision: f64,
    pub recall: f64,
    pub confusion: Confusion,
    pub n_examples: u64,
}

/// Probability that a random positive outranks a random negative, ties
/// counting one half (Mann-Whitney U / (P·N)).
///
/// Sorts once and walks tie groups, so it runs in `O(n log n)`.
pub fn auc(scored: &[(f64, bool)]) -> Result<f64, ModelError> {
    if scored.iter().any(|(s, _)| s.is_nan()) {
        return Err(ModelError::NonFiniteScore);
    }
    let positives = scored.iter().filter(|(_, y)| *y).count() as u64;
    let negatives = scored.len() as u64 - positives;
    if positives == 0 || negatives == 0 {
        return Err(ModelError::SingleClassData);
    }

    let mut sorted: Vec<(f64, bool)> = scored.to_vec();
    sorted.sort_by(|a, b| a.0.total_cmp(&b.0));

    // Twice U, kept integral: each positive earns 2 per lower negative and
    // 1 per tied negative.
    let mut twice_u: u128 = 0;
    let mut negatives_below: u128 = 0;
    let mut i = 0;
    while i < sorted.len() {
        let mut j = i;
        while j < sorted.len() && sorted[j].0 == sorted[i].0 {
            j += 1;
        }
        let group_pos = sorted[i..j].iter().filter(|(_, y)| *y).count() as u128;
        let group_neg = (j - i) as u128 - group_pos;
        twice_u += group_pos * (2 * negatives_below + group_neg);
        negatives_below += group_neg;
        i = j;
    }
    Ok(twice_u as f64 / (2 * u128::from(positives) * u128::from(negatives)) as f64)
}

/// Score `examples` with `params` and summarize.
pub fn evaluate(params: &ModelParams, examples: &[Example]) -> Result<EvalReport, ModelError> {
    let scored = examples
        .iter()
        .map(|e| predict_proba(params, &e.features).map(|p| (p, e.label)))
        .collect::<Result<Vec<_>, _>>()?;
    let auc = auc(&scored)?;

    let mut c = Confusion::default();
    for &(p, y) in &scored {
        match (p >= THRESHOLD, y) {
            (true, true) => c.true_positive += 1,
            (true, false) => c.false_positive += 1,
            (false, false) => c.true_negative += 1,
            (false, true) => c.false_negative += 1,
        }
    }
    let ratio = |num: u64, den: u64| if den == 0 { 0.0 } else { num as f64 / den as f64 };
    Ok(EvalReport {
        auc,
        precision: ratio(c.true_positive, c.true_positive + c.false_positive),
        recall: ratio(c.true_positive, c.true_positive + c.false_negative),
        confusion: c,
        n_examples: examples.len() as u64,
    })
}

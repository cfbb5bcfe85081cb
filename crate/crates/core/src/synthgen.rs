//! Seeded synthetic transaction data: benign background traffic plus injected
//! fan-out bursts with ground-truth window labels.
//!
//! # Reproducibility
//!
//! All randomness comes from ChaCha8 ([`rand_chacha::ChaCha8Rng`]) seeded
//! with `GeneratorConfig::seed` via `seed_from_u64`. Independent streams of
//! the same key are selected with `set_stream`:
//!
//! | stream  | consumer                                   |
//! |---------|--------------------------------------------|
//! | 0       | background traffic                         |
//! | 1       | assignment of source accounts to instances |
//! | 2 + i   | fan-out instance `i`                       |
//!
//! ChaCha output is platform independent, and per-instance streams mean an
//! instance's transactions do not depend on how many instances precede it
//! (other than through the source assignment).

use std::collections::HashSet;

use chrono::{DateTime, Duration, TimeZone, Utc};
use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rust_decimal::Decimal;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::digest::sha256_hex;
use crate::txmodel::{
    build_windows, AccountId, Amount, Currency, Dataset, DatasetMeta, Label, LabeledWindow,
    Transaction, TxError, TxnType,
};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SynthError {
    #[error("invalid generator configuration: {0}")]
    InvalidConfig(String),
    #[error("fan-out spec infeasible: {0}")]
    SpecInfeasible(String),
    #[error(transparent)]
    Tx(#[from] TxError),
}

pub type Result<T, E = SynthError> = std::result::Result<T, E>;

const STREAM_BACKGROUND: u64 = 0;
const STREAM_ASSIGNMENT: u64 = 1;
const STREAM_FIRST_INSTANCE: u64 = 2;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AmountRange {
    pub min: Decimal,
    pub max: Decimal,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GeneratorConfig {
    pub seed: u64,
    pub n_accounts: usize,
    pub n_background_txns: usize,
    pub background_amount_range: AmountRange,
    pub background_span_seconds: u64,
    pub currencies: Vec<Currency>,
    /// First instant of the simulated period.
    #[serde(with = "crate::txmodel::ts_serde")]
    pub start: DateTime<Utc>,
}

impl Default for GeneratorConfig {
    fn default() -> Self {
        Self {
            seed: 42,
            n_accounts: 50,
            n_background_txns: 5_000,
            background_amount_range: AmountRange {
                min: Decimal::new(1_000, 2),
                max: Decimal::new(500_000, 2),
            },
            background_span_seconds: 30 * 86_400,
            currencies: ["USD", "EUR", "GBP"].iter().map(|c| Currency::new(c).unwrap()).collect(),
            start: Utc.with_ymd_and_hms(2024, 1, 1, 0, 0, 0).unwrap(),
        }
    }
}

impl GeneratorConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(SynthError::InvalidConfig(m.into()));
        if self.n_accounts < 2 {
            return bad("n_accounts must be >= 2");
        }
        if self.background_span_seconds == 0 {
            return bad("background_span_seconds must be positive");
        }
        if self.currencies.is_empty() {
            return bad("currencies must be non-empty");
        }
        let AmountRange { min, max } = self.background_amount_range;
        if min > max {
            return bad("background_amount_range.min must be <= max");
        }
        if self.n_background_txns > 0 {
            Amount::new(min).map_err(|e| SynthError::InvalidConfig(format!("min amount: {e}")))?;
            Amount::new(max).map_err(|e| SynthError::InvalidConfig(format!("max amount: {e}")))?;
        }
        Ok(())
    }

    pub fn account(&self, idx: usize) -> AccountId {
        AccountId::new(format!("ACC{idx:05}")).expect("generated ids are non-empty")
    }

    fn end(&self) -> DateTime<Utc> {
        self.start + secs(self.background_span_seconds)
    }
}

/// Parameters of the injected fan-out typology.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FanOutSpec {
    pub n_destinations: usize,
    pub total_amount: Decimal,
    pub dispersal_span_seconds: u64,
    pub amount_jitter_fraction: Decimal,
    pub n_instances: usize,
}

impl Default for FanOutSpec {
    fn default() -> Self {
        Self {
            n_destinations: 8,
            total_amount: Decimal::new(8_000_000, 2),
            dispersal_span_seconds: 3_600,
            amount_jitter_fraction: Decimal::new(1, 1),
            n_instances: 40,
        }
    }
}

impl FanOutSpec {
    pub fn validate(&self, config: &GeneratorConfig) -> Result<()> {
        let bad = |m: String| Err(SynthError::InvalidConfig(m));
        if self.n_destinations < 2 {
            return bad("n_destinations must be >= 2".into());
        }
        if self.total_amount <= Decimal::ZERO || self.total_amount.scale() > 2 {
            return bad("total_amount must be positive with at most 2 fractional digits".into());
        }
        if self.dispersal_span_seconds == 0 {
            return bad("dispersal_span_seconds must be positive".into());
        }
        if self.dispersal_span_seconds > config.background_span_seconds {
            return bad("dispersal_span_seconds must not exceed background_span_seconds".into());
        }
        if self.amount_jitter_fraction < Decimal::ZERO || self.amount_jitter_fraction > Decimal::new(5, 1)
        {
            return bad("amount_jitter_fraction must lie in [0, 0.5]".into());
        }
        if self.n_destinations >= config.n_accounts {
            return Err(SynthError::SpecInfeasible(format!(
                "{} destinations need more than {} accounts",
                self.n_destinations, config.n_accounts
            )));
        }
        if self.n_instances > config.n_accounts {
            return Err(SynthError::SpecInfeasible(format!(
                "{} instances need {} distinct source accounts, only {} exist",
                self.n_instances, self.n_instances, config.n_accounts
            )));
        }
        let minimum = Decimal::new(self.n_destinations as i64, 2);
        if self.total_amount < minimum {
            return Err(SynthError::SpecInfeasible(
                "total_amount is below one cent per destination".into(),
            ));
        }
        Ok(())
    }
}

/// Window geometry used for labelling.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Windowing {
    pub duration_seconds: u64,
    pub stride_seconds: u64,
}

impl Default for Windowing {
    fn default() -> Self {
        Self { duration_seconds: 86_400, stride_seconds: 86_400 }
    }
}

impl Windowing {
    /// Window duration actually used for a fan-out spec: the configured
    /// duration, grown to a whole multiple of itself when a burst would not
    /// fit.
    pub fn effective_for(&self, spec: &FanOutSpec) -> Windowing {
        let d = self.duration_seconds.max(1);
        let multiples = spec.dispersal_span_seconds.div_ceil(d).max(1);
        Windowing { duration_seconds: multiples * d, stride_seconds: self.stride_seconds }
    }
}

/// Everything the generator produces: all transactions (sorted by time and
/// id), the ids of injected ones, and the labelled windows.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SyntheticCorpus {
    pub transactions: Vec<Transaction>,
    pub injected_ids: HashSet<String>,
    pub dataset: Dataset,
}

fn secs(n: u64) -> Duration {
    Duration::seconds(n as i64)
}

fn to_units(value: Decimal, scale: u32) -> i128 {
    let mut v = value;
    v.rescale(scale);
    v.mantissa()
}

/// Benign traffic: uniform endpoints (self-loops re-drawn), uniform amounts,
/// uniform timestamps over the span.
pub fn generate_background(config: &GeneratorConfig) -> Result<Vec<Transaction>> {
    config.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    rng.set_stream(STREAM_BACKGROUND);

    let AmountRange { min, max } = config.background_amount_range;
    let scale = min.scale().max(max.scale());
    let (lo, hi) = (to_units(min, scale), to_units(max, scale));

    let mut out = Vec::with_capacity(config.n_background_txns);
    for i in 0..config.n_background_txns {
        let src = rng.gen_range(0..config.n_accounts);
        let mut dst = rng.gen_range(0..config.n_accounts);
        while dst == src {
            dst = rng.gen_range(0..config.n_accounts);
        }
        let units = rng.gen_range(lo..=hi);
        let offset = rng.gen_range(0..config.background_span_seconds);
        let currency = config.currencies[rng.gen_range(0..config.currencies.len())];
        let txn_type = TxnType::ALL[rng.gen_range(0..TxnType::ALL.len())];
        out.push(Transaction::new(
            format!("BG{:07}", i + 1),
            config.start + secs(offset),
            config.account(src),
            config.account(dst),
            Amount::new(Decimal::from_i128_with_scale(units, scale))?,
            currency,
            txn_type,
        )?);
    }
    Ok(out)
}

/// Split `total_cents` into `n` parts that sum exactly to the total, each
/// within `jitter` (relative) of the equal split.
///
/// Perturbations are drawn uniformly, centred to sum to zero and scaled so
/// the largest stays inside the cap. Truncating to whole cents leaves a small
/// residue, which is taken off the largest part.
pub(crate) fn split_amount(total_cents: i128, n: usize, jitter: f64, rng: &mut impl Rng) -> Vec<i128> {
    let n_i = n as i128;
    let base = total_cents / n_i;
    let rem = total_cents % n_i;
    let mut parts: Vec<i128> = (0..n_i).map(|k| base + i128::from(k < rem)).collect();

    let cap = ((jitter * base as f64).floor() as i128 - n_i - 1).max(0);
    let draws: Vec<f64> = (0..n).map(|_| rng.gen::<f64>() * 2.0 - 1.0).collect();
    if cap == 0 {
        return parts;
    }
    let mean = draws.iter().sum::<f64>() / n as f64;
    let centred: Vec<f64> = draws.iter().map(|d| d - mean).collect();
    let peak = centred.iter().fold(0.0f64, |m, c| m.max(c.abs()));
    if peak == 0.0 {
        return parts;
    }
    let mut residue = 0i128;
    for (part, c) in parts.iter_mut().zip(&centred) {
        let p = (c / peak * cap as f64).trunc() as i128;
        *part += p;
        residue += p;
    }
    let largest = parts
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.cmp(b.1).then(b.0.cmp(&a.0)))
        .map(|(i, _)| i)
        .expect("n >= 2");
    parts[largest] -= residue;
    parts
}

/// Inject fan-out bursts into background traffic and label windows.
pub fn inject_fanout(
    background: &[Transaction],
    spec: &FanOutSpec,
    config: &GeneratorConfig,
) -> Result<Dataset> {
    Ok(plant_fanout(background, spec, config, Windowing::default())?.dataset)
}

/// [`inject_fanout`] with explicit window geometry, returning the full corpus.
pub fn plant_fanout(
    background: &[Transaction],
    spec: &FanOutSpec,
    config: &GeneratorConfig,
    windowing: Windowing,
) -> Result<SyntheticCorpus> {
    config.validate()?;
    spec.validate(config)?;
    if windowing.stride_seconds == 0 || windowing.stride_seconds > windowing.duration_seconds {
        return Err(SynthError::InvalidConfig("window stride must lie in [1, duration]".into()));
    }
    let geometry = windowing.effective_for(spec);

    let mut assign = ChaCha8Rng::seed_from_u64(config.seed);
    assign.set_stream(STREAM_ASSIGNMENT);
    let sources = index::sample(&mut assign, config.n_accounts, spec.n_instances).into_vec();

    let total_cents = to_units(spec.total_amount, 2);
    let jitter: f64 = spec.amount_jitter_fraction.try_into().unwrap_or(0.0);

    let mut injected = Vec::new();
    for (instance, &src) in sources.iter().enumerate() {
        let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
        rng.set_stream(STREAM_FIRST_INSTANCE + instance as u64);
        let source = config.account(src);

        let start = burst_start(background, &source, spec, config, geometry, &mut rng);
        let currency = config.currencies[rng.gen_range(0..config.currencies.len())];
        let picks = index::sample(&mut rng, config.n_accounts - 1, spec.n_destinations);
        let parts = split_amount(total_cents, spec.n_destinations, jitter, &mut rng);
        for (k, (pick, cents)) in picks.into_iter().zip(parts).enumerate() {
            let dst = if pick >= src { pick + 1 } else { pick };
            let offset = rng.gen_range(0..spec.dispersal_span_seconds);
            injected.push(Transaction::new(
                format!("FO{instance:04}-{k:03}"),
                start + secs(offset),
                source.clone(),
                config.account(dst),
                Amount::new(Decimal::from_i128_with_scale(cents, 2))?,
                currency,
                TxnType::Transfer,
            )?);
        }
    }

    let injected_ids: HashSet<String> = injected.iter().map(|t| t.txn_id().to_owned()).collect();
    let mut transactions: Vec<Transaction> = background.iter().cloned().chain(injected).collect();
    transactions.sort_by(|a, b| a.sort_key().cmp(&b.sort_key()));

    let windows = build_windows(&transactions, geometry.duration_seconds, geometry.stride_seconds)?
        .into_iter()
        .map(|window| {
            let hit = window.transactions().iter().any(|t| injected_ids.contains(t.txn_id()));
            LabeledWindow { window, label: Label::from(hit) }
        })
        .collect();

    let digest_input = serde_json::to_vec(&(config, spec, windowing)).expect("config serializes");
    let dataset = Dataset {
        windows,
        meta: DatasetMeta { seed: config.seed, config_digest: sha256_hex(&digest_input) },
    };
    Ok(SyntheticCorpus { transactions, injected_ids, dataset })
}

/// Pick a burst start so the whole burst lands inside one grid slot of the
/// source account's windows. The grid is anchored at the account's earliest
/// background transaction; a burst that begins at or after that anchor
/// cannot move it.
fn burst_start(
    background: &[Transaction],
    source: &AccountId,
    spec: &FanOutSpec,
    config: &GeneratorConfig,
    geometry: Windowing,
    rng: &mut ChaCha8Rng,
) -> DateTime<Utc> {
    let burst = spec.dispersal_span_seconds;
    let end = config.end();
    let anchor = background
        .iter()
        .filter(|t| t.src_account() == source)
        .map(|t| t.timestamp())
        .min();

    match anchor {
        Some(anchor) if anchor + secs(burst) <= end => {
            let room = (end - anchor).num_seconds() as u64 - burst;
            let slots = room / geometry.stride_seconds;
            let slot = rng.gen_range(0..=slots);
            let slot_start = anchor + secs(slot * geometry.stride_seconds);
            let slack = (geometry.duration_seconds - burst)
                .min(((end - slot_start).num_seconds() as u64).saturating_sub(burst));
            slot_start + secs(rng.gen_range(0..=slack))
        }
        // No background from this source (or only at the very end): the burst
        // itself anchors the grid.
        _ => {
            let room = config.background_span_seconds - burst;
            config.start + secs(rng.gen_range(0..=room))
        }
    }
}

/// Convenience wrapper: background, injection and labelling in one call.
pub fn generate(
    config: &GeneratorConfig,
    spec: &FanOutSpec,
    windowing: Windowing,
) -> Result<SyntheticCorpus> {
    let background = generate_background(config)?;
    plant_fanout(&background, spec, config, windowing)
}

mod common;

use chrono::Duration;
use common::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use redflag::extract::FEATURE_NAMES;
use redflag::promptkit::{
    default_fanout_pattern, render_prompt, window_digest, PatternDescription, PromptError,
    TEMPLATE_VERSION,
};
use redflag::txmodel::{Amount, Currency, Transaction, TransactionWindow, TxnType};
use rust_decimal::Decimal;

fn five() -> TransactionWindow {
    day_window((0..5).map(|k| txn(&format!("id-{k}"), 600 * k, "A", &format!("D{k}"), "10000.00", "USD")).collect())
}

#[test]
fn golden_prompt() {
    let ds = oracle_dataset();
    let p = render_prompt(&ds.windows[4].window, &default_fanout_pattern()).unwrap();
    let golden = std::fs::read_to_string(fixtures().join("prompt_window4.golden.txt")).unwrap();
    assert_eq!(p.text, golden);
    assert_eq!(p.template_version, TEMPLATE_VERSION);
}

#[test]
fn prompt_contains_ids_window_and_keys() {
    let w = five();
    let p = render_prompt(&w, &default_fanout_pattern()).unwrap();
    assert!(p.text.contains(&w.to_csv()));
    for t in w.transactions() {
        assert!(p.text.contains(t.txn_id()));
    }
    for name in FEATURE_NAMES {
        assert!(p.text.contains(name), "{name}");
    }
    assert!(p.text.contains("a single source to multiple destinations within a short timeframe"));
}

#[test]
fn rendering_is_deterministic() {
    let a = render_prompt(&five(), &default_fanout_pattern()).unwrap();
    let b = render_prompt(&five(), &default_fanout_pattern()).unwrap();
    assert_eq!(a, b);
}

#[test]
fn pattern_errors() {
    let mut p = default_fanout_pattern();
    p.requested_features.push("velocity".into());
    assert_eq!(render_prompt(&five(), &p), Err(PromptError::UnknownFeature("velocity".into())));
    let dup = PatternDescription {
        requested_features: vec!["amount_dispersion".into(), "amount_dispersion".into()],
        ..default_fanout_pattern()
    };
    assert!(matches!(dup.validate(), Err(PromptError::DuplicateFeature(_))));
    let empty = TransactionWindow::new(acct("A"), t0(), 60, vec![]).unwrap();
    assert_eq!(render_prompt(&empty, &default_fanout_pattern()), Err(PromptError::EmptyWindow));
}

#[test]
fn default_pattern_requests_every_feature() {
    let p = default_fanout_pattern();
    assert_eq!(p.name, "fan-out");
    assert_eq!(p.requested_features, FEATURE_NAMES);
}

fn mutate(t: &Transaction, field: usize, rng: &mut ChaCha8Rng) -> Transaction {
    let rebuild = |id: String, dst: &str, amount: Amount, cur: Currency, ty: TxnType| {
        Transaction::new(id, t.timestamp(), t.src_account().clone(), acct(dst), amount, cur, ty).unwrap()
    };
    let (id, dst, amt, cur, ty) =
        (t.txn_id().to_owned(), t.dst_account().as_str(), t.amount(), t.currency(), t.txn_type());
    match field {
        0 => rebuild(format!("{id}x"), dst, amt, cur, ty),
        1 => {
            let ts = t.timestamp() + Duration::seconds(rng.gen_range(1..1000));
            t.with_timestamp(ts).unwrap()
        }
        2 => rebuild(id, &format!("{dst}9"), amt, cur, ty),
        3 => {
            let bump = Decimal::new(rng.gen_range(1..10_000), 4);
            rebuild(id, dst, Amount::new(amt.value() + bump).unwrap(), cur, ty)
        }
        4 => {
            let other = if cur.as_str() == "ZZZ" { "YYY" } else { "ZZZ" };
            rebuild(id, dst, amt, Currency::new(other).unwrap(), ty)
        }
        _ => {
            let next = TxnType::ALL[(TxnType::ALL.iter().position(|x| *x == ty).unwrap() + 1) % 4];
            rebuild(id, dst, amt, cur, next)
        }
    }
}

#[test]
fn digest_changes_on_every_single_field_mutation() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for round in 0..1000 {
        let n = rng.gen_range(1..8);
        let txns: Vec<_> = (0..n)
            .map(|k| {
                let cents = rng.gen_range(1..10_000_000).to_string();
                txn(&format!("r{round}-{k}"), rng.gen_range(0..80_000), "F", "D1", &cents, "USD")
            })
            .collect();
        let base = TransactionWindow::new(acct("F"), t0(), 86_400, txns.clone()).unwrap();
        let victim = rng.gen_range(0..n);
        let field = round % 6;
        let mut changed = txns;
        changed[victim] = mutate(&changed[victim], field, &mut rng);
        // The digest covers transactions only; the longer window just keeps
        // shifted timestamps in range.
        let mutated = TransactionWindow::new(acct("F"), t0(), 2 * 86_400, changed).unwrap();
        assert_ne!(window_digest(&base), window_digest(&mutated), "round {round} field {field}");
    }
}

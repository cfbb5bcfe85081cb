mod common;

use proptest::prelude::*;
use redflag::extract::{FeatureVector, Seconds, FEATURE_COUNT, FEATURE_NAMES};
use redflag::quantify::{fit_spec, quantify, QuantizationSpec, INVERTED_FEATURES};

fn arb_vector() -> impl Strategy<Value = FeatureVector> {
    (1u64..50, 0.0f64..3.0, 0u64..50, 0i64..90_000, 0i64..90_000, 0i64..90_000).prop_map(
        |(count, disp, var, a, b, c)| {
            let mut gaps = [a, b, c];
            gaps.sort_unstable();
            FeatureVector {
                linked_transaction_count: count,
                amount_dispersion: disp,
                currency_variety: 1 + var % count,
                mean_interval_seconds: Seconds::whole(gaps[1]),
                min_interval_seconds: Seconds::whole(gaps[0]),
                window_span_seconds: Seconds::whole(gaps[2]),
            }
        },
    )
}

/// Copy of `v` with feature `i` replaced by `x`.
fn with_feature(v: &FeatureVector, i: usize, x: f64) -> FeatureVector {
    let mut out = v.clone();
    match i {
        0 => out.linked_transaction_count = x as u64,
        1 => out.amount_dispersion = x,
        2 => out.currency_variety = x as u64,
        3 => out.mean_interval_seconds = Seconds::from_f64(x).unwrap(),
        4 => out.min_interval_seconds = Seconds::from_f64(x).unwrap(),
        _ => out.window_span_seconds = Seconds::from_f64(x).unwrap(),
    }
    out
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn outputs_in_unit_interval(train in prop::collection::vec(arb_vector(), 1..40), probe in arb_vector()) {
        let spec = fit_spec(&train).unwrap();
        for v in train.iter().chain(std::iter::once(&probe)) {
            prop_assert!(quantify(v, &spec).0.iter().all(|x| (0.0..=1.0).contains(x)));
        }
    }

    #[test]
    fn refit_is_idempotent(train in prop::collection::vec(arb_vector(), 1..100)) {
        let spec = fit_spec(&train).unwrap();
        prop_assert_eq!(&spec, &fit_spec(&train).unwrap());
        let json = serde_json::to_string(&spec).unwrap();
        prop_assert_eq!(serde_json::from_str::<QuantizationSpec>(&json).unwrap(), spec);
    }

    #[test]
    fn monotone_per_feature(
        train in prop::collection::vec(arb_vector(), 2..40),
        base in arb_vector(),
        i in 0usize..FEATURE_COUNT,
        a in 0.0f64..100_000.0,
        b in 0.0f64..100_000.0,
    ) {
        let spec = fit_spec(&train).unwrap();
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        let (lo, hi) = if i == 0 || i == 2 { (lo.floor(), hi.floor()) } else { (lo, hi) };
        let q_lo = quantify(&with_feature(&base, i, lo), &spec).0[i];
        let q_hi = quantify(&with_feature(&base, i, hi), &spec).0[i];
        if INVERTED_FEATURES.contains(&FEATURE_NAMES[i]) {
            prop_assert!(q_lo >= q_hi);
        } else {
            prop_assert!(q_lo <= q_hi);
        }
    }

    #[test]
    fn bounds_are_train_min_max(train in prop::collection::vec(arb_vector(), 1..40)) {
        let spec = fit_spec(&train).unwrap();
        for (i, b) in spec.bounds().iter().enumerate() {
            let xs: Vec<f64> = train.iter().map(|v| v.to_array()[i]).collect();
            let lo = xs.iter().copied().fold(f64::INFINITY, f64::min);
            let hi = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            prop_assert_eq!(b.lo, lo);
            prop_assert_eq!(b.hi, if lo == hi { lo + 1.0 } else { hi });
            prop_assert_eq!(b.invert, INVERTED_FEATURES.contains(&FEATURE_NAMES[i]));
        }
    }
}

//! Train the baseline and enriched risk models on one split and compare
//! them, without touching the filesystem.
//!
//! ```text
//! cargo run --release --example train_compare
//! ```

use redflag::extract::{extract_rules, FEATURE_NAMES};
use redflag::model::{compare, Example, Split, BASELINE_FEATURES};
use redflag::pipeline::{split_indices, PipelineConfig};
use redflag::quantify::{fit_spec, quantify};
use redflag::synthgen::{generate, FanOutSpec, GeneratorConfig, Windowing};

pub fn run() -> Result<(), Box<dyn std::error::Error>> {
    let corpus = generate(&GeneratorConfig::default(), &FanOutSpec::default(), Windowing::default())?;
    let windows = &corpus.dataset.windows;
    let raw = windows.iter().map(|lw| extract_rules(&lw.window)).collect::<Result<Vec<_>, _>>()?;

    let cfg = PipelineConfig::default().train;
    let (train, test) = split_indices(raw.len(), 0.8, cfg.seed);
    let spec = fit_spec(&train.iter().map(|&i| raw[i].clone()).collect::<Vec<_>>())?;

    let split = |names: &[&str]| {
        let rows = |idx: &[usize]| -> Vec<Example> {
            idx.iter()
                .map(|&i| Example {
                    features: quantify(&raw[i], &spec).select(names),
                    label: windows[i].label.is_positive(),
                })
                .collect()
        };
        Split { train: rows(&train), test: rows(&test) }
    };
    let (base, rich) = compare(&split(&BASELINE_FEATURES), &split(&FEATURE_NAMES), &cfg)?;
    for (name, r) in [("baseline", &base), ("enriched", &rich)] {
        println!(
            "{name:<9} auc {:.4}  precision {:.3}  recall {:.3}  {:?}",
            r.auc, r.precision, r.recall, r.confusion
        );
    }
    println!("auc delta {:+.4}", rich.auc - base.auc);
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run()
}

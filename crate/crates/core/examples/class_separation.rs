//! Per-class statistics of every rules feature on a generated corpus, plus
//! the AUC each feature achieves alone.
//!
//! ```text
//! cargo run --example class_separation [-- <config.json>]
//! ```

use redflag::extract::{extract_rules, FEATURE_NAMES};
use redflag::model::auc;
use redflag::pipeline::PipelineConfig;
use redflag::quantify::INVERTED_FEATURES;
use redflag::synthgen::generate;

fn summary(mut xs: Vec<f64>) -> String {
    xs.sort_by(f64::total_cmp);
    let q = |p: f64| xs[((xs.len() - 1) as f64 * p).round() as usize];
    let mean = xs.iter().sum::<f64>() / xs.len() as f64;
    format!("mean {mean:>10.3}  min {:>9.3}  p50 {:>9.3}  p95 {:>9.3}  max {:>9.3}", q(0.0), q(0.5), q(0.95), q(1.0))
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let cfg = match std::env::args().nth(1) {
        Some(path) => PipelineConfig::load(path.as_ref())?,
        None => PipelineConfig::default(),
    };
    let corpus = generate(&cfg.generator, &cfg.fanout, cfg.windowing())?;
    let rows = corpus
        .dataset
        .windows
        .iter()
        .map(|lw| Ok((extract_rules(&lw.window)?.to_array(), lw.label.is_positive())))
        .collect::<Result<Vec<_>, redflag::extract::ExtractError>>()?;
    let pos = rows.iter().filter(|r| r.1).count();
    println!("{} windows, {} positive\n", rows.len(), pos);

    for (i, name) in FEATURE_NAMES.iter().enumerate() {
        let sign = if INVERTED_FEATURES.contains(name) { -1.0 } else { 1.0 };
        let scored: Vec<(f64, bool)> = rows.iter().map(|(v, y)| (sign * v[i], *y)).collect();
        let class = |y: bool| rows.iter().filter(|r| r.1 == y).map(|r| r.0[i]).collect::<Vec<_>>();
        println!("{name}  (single-feature AUC {:.4})", auc(&scored)?);
        println!("  label 1: {}", summary(class(true)));
        println!("  label 0: {}", summary(class(false)));
    }
    Ok(())
}

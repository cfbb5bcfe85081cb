//! Fit a quantizer on rules features and map windows into `[0, 1]`.
//!
//! ```text
//! cargo run --example quantize
//! ```

use redflag::extract::{extract_rules, FEATURE_NAMES};
use redflag::quantify::{fit_spec, quantify};
use redflag::synthgen::{generate, FanOutSpec, GeneratorConfig, Windowing};

pub fn run() -> Result<(), Box<dyn std::error::Error>> {
    let config = GeneratorConfig { n_accounts: 30, n_background_txns: 1_500, ..Default::default() };
    let spec = FanOutSpec { n_instances: 5, n_destinations: 6, ..Default::default() };
    let corpus = generate(&config, &spec, Windowing::default())?;
    let windows = &corpus.dataset.windows;

    let raw = windows.iter().map(|lw| extract_rules(&lw.window)).collect::<Result<Vec<_>, _>>()?;
    let q = fit_spec(&raw)?;
    println!("{}", serde_json::to_string_pretty(&q)?);

    let pick = |want: bool| windows.iter().position(|lw| lw.label.is_positive() == want).expect("both classes");
    for (label, i) in [("suspicious", pick(true)), ("benign", pick(false))] {
        let v = quantify(&raw[i], &q);
        println!("\n{label} window {i}");
        for (name, x) in FEATURE_NAMES.iter().zip(v.as_slice()) {
            println!("  {name:<26} {x:.3}");
        }
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run()
}

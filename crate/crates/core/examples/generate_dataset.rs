//! Generate a synthetic corpus with planted fan-out bursts and look at one
//! suspicious window.
//!
//! ```text
//! cargo run --example generate_dataset
//! ```

use redflag::synthgen::{generate, FanOutSpec, GeneratorConfig, Windowing};

pub fn run() -> Result<(), Box<dyn std::error::Error>> {
    let config = GeneratorConfig { n_accounts: 30, n_background_txns: 1_500, ..Default::default() };
    let spec = FanOutSpec { n_instances: 5, n_destinations: 6, ..Default::default() };
    let corpus = generate(&config, &spec, Windowing::default())?;

    let ds = &corpus.dataset;
    println!(
        "{} transactions ({} injected), {} windows, {} labelled suspicious",
        corpus.transactions.len(),
        corpus.injected_ids.len(),
        ds.len(),
        ds.positives()
    );
    println!("config digest {}", ds.meta.config_digest);

    let hit = ds.windows.iter().find(|w| w.label.is_positive()).expect("bursts were planted");
    println!(
        "\nfirst suspicious window: {} from {} ({} txns)",
        hit.window.focal_account(),
        hit.window.window_start(),
        hit.window.len()
    );
    for t in hit.window.transactions() {
        let tag = if corpus.injected_ids.contains(t.txn_id()) { "injected" } else { "" };
        println!("  {} {} -> {} {:>10} {} {tag}", t.timestamp(), t.src_account(), t.dst_account(), t.amount(), t.currency());
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run()
}

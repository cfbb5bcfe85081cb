//! Ask a live chat-completions endpoint for the features of one window and
//! compare its answer with the rules backend.
//!
//! Needs an API key in `OPENAI_API_KEY` (or the variable named by
//! `REDFLAG_KEY_VAR`). `REDFLAG_ENDPOINT` and `REDFLAG_MODEL` override the
//! defaults.
//!
//! ```text
//! OPENAI_API_KEY=... cargo run --example live_llm
//! ```

use redflag::extract::{extract_rules, BackendConfig, BackendKind, CallLog, Extractor};
use redflag::promptkit::default_fanout_pattern;
use redflag::synthgen::{generate, FanOutSpec, GeneratorConfig, Windowing};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    env_logger::init();
    let mut cfg = BackendConfig { kind: BackendKind::Llm, ..Default::default() };
    if let Ok(v) = std::env::var("REDFLAG_KEY_VAR") {
        cfg.api_key_env_var = v;
    }
    if let Ok(v) = std::env::var("REDFLAG_ENDPOINT") {
        cfg.endpoint_url = v;
    }
    if let Ok(v) = std::env::var("REDFLAG_MODEL") {
        cfg.model_name = v;
    }

    let config = GeneratorConfig { n_accounts: 20, n_background_txns: 300, ..Default::default() };
    let spec = FanOutSpec { n_instances: 1, n_destinations: 6, ..Default::default() };
    let corpus = generate(&config, &spec, Windowing::default())?;
    let window = &corpus.dataset.windows.iter().find(|w| w.label.is_positive()).expect("one burst").window;

    let pattern = default_fanout_pattern();
    let extractor = Extractor::new(&cfg)?.with_log(CallLog::in_memory());
    let llm = extractor.extract(window, &pattern)?;
    let rules = extract_rules(window)?;
    println!("llm:   {llm:?}\nrules: {rules:?}\nagree within 1e-6: {}", llm.approx_eq(&rules, 1e-6));
    for rec in extractor.log().records() {
        println!("\nraw completion ({}):\n{}", rec.template_version, rec.completion);
    }
    Ok(())
}

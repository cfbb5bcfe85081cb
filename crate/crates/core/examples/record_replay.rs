//! Record replay fixtures for a set of windows.
//!
//! With `llm` the live backend answers each prompt and the raw completion
//! is stored; with `rules` the completion is the rules extractor's output
//! as JSON, which makes a replay directory that reproduces the rules
//! backend exactly.
//!
//! ```text
//! cargo run --example record_replay -- <transactions.csv> <windows.json> <replay_dir> [rules|llm]
//! ```

use std::path::PathBuf;

use redflag::extract::{
    extract_rules, BackendConfig, BackendKind, HttpChatClient, ReplayStore,
};
use redflag::promptkit::{default_fanout_pattern, render_prompt};
use redflag::txmodel::{parse_transactions_csv, Dataset, WindowsFile};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    env_logger::init();
    let args: Vec<String> = std::env::args().skip(1).collect();
    let [csv, windows, dir] = [0, 1, 2].map(|i| args.get(i).map(PathBuf::from));
    let (Some(csv), Some(windows), Some(dir)) = (csv, windows, dir) else {
        eprintln!("usage: record_replay <transactions.csv> <windows.json> <replay_dir> [rules|llm]");
        std::process::exit(2);
    };
    let source: BackendKind = args.get(3).map_or("rules", String::as_str).parse()?;

    let txns = parse_transactions_csv(&std::fs::read(csv)?)?;
    let file: WindowsFile = serde_json::from_slice(&std::fs::read(windows)?)?;
    let dataset = Dataset::from_windows_file(&file, &txns)?;
    let store = ReplayStore::new(dir);
    let pattern = default_fanout_pattern();
    let client = match source {
        BackendKind::Llm => {
            Some(HttpChatClient::from_config(&BackendConfig { kind: BackendKind::Llm, ..Default::default() })?)
        }
        _ => None,
    };

    for lw in &dataset.windows {
        let prompt = render_prompt(&lw.window, &pattern)?;
        let completion = match &client {
            Some(c) => c.complete(&prompt.text)?,
            None => serde_json::to_string(&extract_rules(&lw.window)?)?,
        };
        store.record(&prompt.window_digest, &completion)?;
        println!("{}", store.path_for(&prompt.window_digest).display());
    }
    Ok(())
}

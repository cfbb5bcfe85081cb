//! Extract features with the rules backend and with the replay backend over
//! the shipped fixtures, and show that they agree.
//!
//! ```text
//! cargo run --example extract_backends
//! ```

use std::path::PathBuf;

use redflag::extract::{batch_extract, extract_rules, BackendConfig, BackendKind};
use redflag::promptkit::default_fanout_pattern;
use redflag::txmodel::{parse_transactions_csv, Dataset, WindowsFile};

pub fn run() -> Result<(), Box<dyn std::error::Error>> {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures/oracle");
    let txns = parse_transactions_csv(&std::fs::read(dir.join("transactions.csv"))?)?;
    let file: WindowsFile = serde_json::from_slice(&std::fs::read(dir.join("windows.json"))?)?;
    let dataset = Dataset::from_windows_file(&file, &txns)?;

    let replay = BackendConfig { kind: BackendKind::Replay, replay_dir: dir.join("replay"), ..Default::default() };
    let results = batch_extract(&dataset, &default_fanout_pattern(), &replay);

    println!("{:>3} {:>5} {:>9} {:>7} {:>12} {:>9} {:>9}  agree", "#", "count", "disp", "variety", "mean_gap", "min_gap", "span");
    for (i, result) in results {
        let replayed = result?;
        let rules = extract_rules(&dataset.windows[i].window)?;
        let [c, d, v, mean, min, span] = replayed.to_array();
        println!(
            "{i:>3} {c:>5} {d:>9.5} {v:>7} {mean:>12.3} {min:>9} {span:>9}  {}",
            replayed.approx_eq(&rules, 1e-9)
        );
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run()
}

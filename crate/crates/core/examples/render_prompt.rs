//! Render the fan-out prompt for a small window.
//!
//! ```text
//! cargo run --example render_prompt
//! ```

use redflag::promptkit::{default_fanout_pattern, render_prompt};
use redflag::txmodel::{build_windows, parse_transactions_csv};

const CSV: &str = "\
txn_id,timestamp,src_account,dst_account,amount,currency,txn_type
f1,2024-05-02T14:00:00Z,SRC,D1,10000.00,USD,transfer
f2,2024-05-02T14:04:10Z,SRC,D2,9800.00,USD,transfer
f3,2024-05-02T14:05:00Z,SRC,D3,10150.00,USD,transfer
";

pub fn run() -> Result<(), Box<dyn std::error::Error>> {
    let txns = parse_transactions_csv(CSV.as_bytes())?;
    let window = build_windows(&txns, 86_400, 86_400)?.remove(0);
    let prompt = render_prompt(&window, &default_fanout_pattern())?;
    println!("template {}  window digest {}\n", prompt.template_version, prompt.window_digest);
    println!("{}", prompt.text);
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run()
}

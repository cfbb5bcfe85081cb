//! Parse a transaction CSV and slice it into per-account windows.
//!
//! ```text
//! cargo run --example windowing
//! ```

use redflag::txmodel::{build_windows, parse_transactions_csv};

const CSV: &str = "\
txn_id,timestamp,src_account,dst_account,amount,currency,txn_type
t1,2024-01-01T09:00:00Z,ACME,B1,1200.00,USD,transfer
t2,2024-01-01T09:01:40Z,ACME,B2,1150.50,USD,transfer
t3,2024-01-01T09:03:20Z,ACME,B3,1190.25,EUR,transfer
t4,2024-01-01T11:30:00+01:00,SHOP,ACME,89.99,EUR,payment
t5,2024-01-02T08:15:00Z,ACME,B1,40.00,USD,withdrawal
";

pub fn run() -> Result<(), Box<dyn std::error::Error>> {
    let txns = parse_transactions_csv(CSV.as_bytes())?;
    for (duration, stride) in [(86_400, 86_400), (150, 150), (7_200, 3_600)] {
        println!("duration {duration}s, stride {stride}s");
        for w in build_windows(&txns, duration, stride)? {
            let ids: Vec<_> = w.transactions().iter().map(|t| t.txn_id()).collect();
            println!("  {:<5} {} {:?}", w.focal_account(), w.window_start(), ids);
        }
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run()
}

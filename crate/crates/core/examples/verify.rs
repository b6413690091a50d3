//! Runs the reproduction checklist and prints one line per check.
//!
//! ```text
//! cargo run --release --example verify -- [check ids...]
//! ```

use boundent::verify::{run_checklist, VerifyOptions};

fn main() {
    let only: Vec<u8> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let opts = VerifyOptions {
        only: (!only.is_empty()).then_some(only),
        ..VerifyOptions::default()
    };
    let results = run_checklist(&opts);
    for r in &results {
        println!("{}", r.line());
    }
    let failed = results.iter().filter(|r| !r.passed).count();
    println!("{} of {} checks passed", results.len() - failed, results.len());
    std::process::exit(i32::from(failed > 0));
}

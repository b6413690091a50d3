//! Largest CCNR value found among PPT Bloch-diagonal states.
//!
//! ```text
//! cargo run --release --example ccnr_search -- [restarts] [steps]
//! ```

use std::time::Instant;

use boundent::optimize::{ccnr_ascent_bloch_ppt, CcnrConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let restarts: Option<usize> = args.next().map(|s| s.parse()).transpose()?;
    let steps: Option<usize> = args.next().map(|s| s.parse()).transpose()?;
    for d in [4, 8, 16] {
        let mut cfg = CcnrConfig::new(d);
        if let Some(r) = restarts {
            cfg.n_restarts = r;
        }
        if let Some(s) = steps {
            cfg.max_steps = s;
        }
        let start = Instant::now();
        let report = ccnr_ascent_bloch_ppt(&cfg)?;
        let finals: Vec<String> = report.restarts.iter().map(|r| format!("{:.4}", r.final_value)).collect();
        println!(
            "D = {d:>2}: best CCNR {:.6} (restart {}), {:.1} s, finals [{}]",
            report.best_value,
            report.best_restart,
            start.elapsed().as_secs_f64(),
            finals.join(", ")
        );
    }
    Ok(())
}

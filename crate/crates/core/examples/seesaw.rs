//! Lower bounds on the separable witness value across channel dimensions.
//!
//! ```text
//! cargo run --release --example seesaw -- [restarts]
//! ```

use boundent::optimize::{seesaw_classical, seesaw_quantum, SeesawConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let restarts: usize = std::env::args().nth(1).map(|s| s.parse()).transpose()?.unwrap_or(10);
    println!("D,classical,quantum,bound");
    for d in 2..=16 {
        let mut cfg = SeesawConfig::new(d);
        cfg.n_restarts = restarts;
        let classical = seesaw_classical(&cfg)?;
        let quantum = seesaw_quantum(&cfg)?;
        println!(
            "{d},{:.6},{:.6},{:.6}",
            classical.best_value,
            quantum.best_value,
            d as f64 / 16.0
        );
    }
    Ok(())
}

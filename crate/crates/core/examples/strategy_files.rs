//! Writes strategies to their JSON interchange form, reads them back and
//! re-evaluates them.
//!
//! ```text
//! cargo run --release --example strategy_files -- [directory]
//! ```

use std::path::PathBuf;

use boundent::protocol::{
    be_strategy, classical_optimal_strategy_d4, witness_brute_force, SamplingPlan, Strategy, StrategyFile, TaskSpec,
};
use boundent::states::rho_be;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let dir = std::env::args().nth(1).map(PathBuf::from).unwrap_or_else(std::env::temp_dir);
    let task = TaskSpec::rho_be(1)?;
    for (name, strategy) in [("be", be_strategy(&rho_be())?), ("classical", classical_optimal_strategy_d4()?)] {
        let path = dir.join(format!("{name}_strategy.json"));
        std::fs::write(&path, serde_json::to_string_pretty(&strategy.to_file())?)?;
        let file: StrategyFile = serde_json::from_str(&std::fs::read_to_string(&path)?)?;
        let restored = Strategy::from_file(file)?;
        let w = witness_brute_force(&restored, &task, &SamplingPlan::Full)?.value;
        println!("{name}: wrote {}, witness after reload {w:.12}", path.display());
    }
    Ok(())
}

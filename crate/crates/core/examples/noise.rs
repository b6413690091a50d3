//! White-noise robustness: the witness is affine in the visibility and drops
//! below the separable bound exactly at the critical visibility.
//!
//! ```text
//! cargo run --release --example noise
//! ```

use boundent::protocol::{critical_visibility, critical_visibility_numeric, witness_closed_form, TaskSpec};
use boundent::states::{mix_with_white_noise, rho_be};
use num_traits::ToPrimitive;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let task = TaskSpec::rho_be(1)?;
    println!("v,W,bound");
    for step in 0..=10 {
        let v = step as f64 / 10.0;
        let w = witness_closed_form(&mix_with_white_noise(&rho_be(), v)?, &task)?.value;
        println!("{v:.1},{w:.6},0.25");
    }
    for n in 1..=2 {
        let exact = critical_visibility(n);
        println!(
            "N = {n}: v_crit = {exact} = {:.12}, solved numerically {:.12}",
            exact.to_f64().unwrap_or(f64::NAN),
            critical_visibility_numeric(n)?
        );
    }
    Ok(())
}

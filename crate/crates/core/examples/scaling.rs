//! Parallel repetition: how the witness, the separable bound, the required
//! classical dimension and the noise threshold scale with the copy count.
//!
//! ```text
//! cargo run --release --example scaling -- [n_max]
//! ```

use boundent::protocol::{critical_visibility, overhead_dimension, sep_upper_bound};
use num_bigint::BigInt;
use num_rational::BigRational;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let n_max: usize = std::env::args().nth(1).map(|s| s.parse()).transpose()?.unwrap_or(8);
    let w1 = BigRational::new(BigInt::from(3), BigInt::from(8));
    println!("{:>2} {:>14} {:>14} {:>10} {:>10}", "N", "W_BE", "4^N/16^N", "D_min", "v_crit");
    for n in 1..=n_max {
        let w = num_traits::pow(w1.clone(), n);
        let bound = sep_upper_bound(4u64.pow(n as u32), n);
        println!(
            "{n:>2} {:>14} {:>14} {:>10} {:>10}",
            w.to_string(),
            bound.to_string(),
            overhead_dimension(n)?,
            critical_visibility(n).to_string()
        );
    }
    Ok(())
}

//! Builds the bound entangled state, checks PPT and evaluates the CCNR value
//! through the coefficient shortcut and the dense realignment matrix.
//!
//! ```text
//! cargo run --release --example state_info
//! ```

use boundent::pauli::PauliBasis;
use boundent::states::{ccnr_dense, ppt_check, rho_be, tensor_power};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let rho = rho_be();
    let report = ppt_check(&rho)?;
    println!("coefficients: {:?}", rho.lambdas());
    println!("spectrum of rho:      {:?}", report.spectrum_state);
    println!("spectrum of rho^T_B:  {:?}", report.spectrum_pt);
    println!("PPT: {}", report.is_ppt);

    let dense = ccnr_dense(&rho.densify()?, &PauliBasis::new(2)?)?;
    println!("CCNR: sum |lambda| = {:.12}, realignment trace norm = {dense:.12}", rho.ccnr());

    for n in 1..=3 {
        let power = tensor_power(&rho, n)?;
        let r = ppt_check(&power)?;
        println!(
            "N = {n}: CCNR = {:.6}, min eigenvalue of partial transpose = {:.3e} ({:?})",
            r.ccnr, r.min_eig_pt, r.method
        );
    }
    println!("state file: {}", serde_json::to_string(&rho.to_json())?);
    Ok(())
}

//! Task combinatorics: the sign table T, the per-copy f coefficients and the
//! orthogonality matrix M that underlies the separable bound.
//!
//! ```text
//! cargo run --release --example task_tables
//! ```

use boundent::pauli::{f_coeff, m_matrix, InputIndex, T_MATRIX};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    println!("T =");
    for row in T_MATRIX {
        println!("  {row:?}");
    }
    println!("f(x, z), rows x = 1..16, columns z = 1..16:");
    for x in InputIndex::all() {
        let row: String = InputIndex::all()
            .map(|z| if f_coeff(x, z) > 0 { " +" } else { " -" })
            .collect();
        println!("  {:>2}{row}", x.flat() + 1);
    }
    for n in 1..=2 {
        let m = m_matrix(n)?;
        println!("M({n}) is {} x {}, equal to {} I: {}", m.dim, m.dim, 16usize.pow(n as u32), m.is_scaled_identity(16i64.pow(n as u32)));
    }
    Ok(())
}

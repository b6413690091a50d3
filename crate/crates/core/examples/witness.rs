//! Evaluates the witness of the entanglement-assisted protocol three ways and
//! compares it against the best classical strategy.
//!
//! ```text
//! cargo run --release --example witness -- [copies]
//! ```

use boundent::protocol::{
    be_strategy, classical_optimal_strategy_d4, sep_upper_bound, witness_brute_force, witness_closed_form,
    witness_closed_form_power, witness_factored_total, SamplingPlan, TaskSpec,
};
use boundent::states::{rho_be, tensor_power};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let copies: usize = std::env::args().nth(1).map(|s| s.parse()).transpose()?.unwrap_or(2);
    let rho = rho_be();
    let task = TaskSpec::rho_be(1)?;

    let brute = witness_brute_force(&be_strategy(&rho)?, &task, &SamplingPlan::Full)?;
    let closed = witness_closed_form(&rho, &task)?;
    let classical = witness_brute_force(&classical_optimal_strategy_d4()?, &task, &SamplingPlan::Full)?;
    println!("one copy, D = 4");
    println!("  entangled, brute force over 4096 triples: {:.12}", brute.value);
    println!("  entangled, closed form:                   {:.12}", closed.value);
    println!("  best classical strategy:                  {:.12}", classical.value);
    println!("  separable bound D/16:                     {}", sep_upper_bound(4, 1));

    let task_n = TaskSpec::rho_be(copies)?;
    let factored = witness_factored_total(&rho, &task_n)?;
    let power = witness_closed_form_power(&rho, &task_n)?;
    println!("{copies} copies, D = {}", task_n.channel_dim());
    println!("  factored:            {:.12}", factored.value);
    println!("  closed form (power): {:.12}", power.value);
    if copies <= 2 {
        let seeded = witness_brute_force(
            &be_strategy(&tensor_power(&rho, copies)?)?,
            &task_n,
            &SamplingPlan::Seeded { count: 2000, seed: 0 },
        )?;
        println!("  sampled (2000 triples): {:.6}", seeded.value);
    }
    println!("  separable bound:     {}", sep_upper_bound(task_n.channel_dim() as u64, copies));
    Ok(())
}

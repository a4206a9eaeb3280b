//! Amplification plans for a few targets, and an exact demonstration of one
//! step starting from ker Σ ⊂ ℓ∞³.

use projconst::minproj::LpBudget;
use projconst::planner::{
    demonstrate_schedule, interleave_isometry, plan_parameters, AmplificationPlan,
};
use projconst::{Rat, Result, Subspace};

fn main() -> Result<()> {
    for lambda in [Rat::frac(3, 2), Rat::int(3), Rat::int(5), Rat::frac(31, 2)] {
        let p = plan_parameters(&lambda)?;
        println!(
            "lambda = {lambda:>5}: m = {}, N = {:?}, alpha = {}",
            p.m, p.copies, p.alpha
        );
    }

    let plan = AmplificationPlan::with_copies(Rat::frac(4, 3), 3, 1)?;
    let report =
        demonstrate_schedule(&Subspace::kernel_of_sum(3)?, &plan, 1, &LpBudget::default())?;
    println!("\nbase constant {}", report.base_lambda);
    for step in &report.steps {
        println!(
            "step {}: lambda(Y_{} in l_inf^{}) = {} (expected {})",
            step.k, step.k, step.ambient_dim, step.certified, step.expected
        );
    }

    let table = interleave_isometry(3, 12)?;
    println!(
        "\ninterleaving 3 sequences, blocks: {:?}",
        (0..3).map(|j| table.block_indices(j)).collect::<Vec<_>>()
    );
    Ok(())
}

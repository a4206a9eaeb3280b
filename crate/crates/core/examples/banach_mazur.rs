//! The Banach–Mazur bound: optimal parameter, exact parameter sets, and the
//! sequence-space model checks.

use projconst::bm::{
    check_model, compare_with_prior_bound, exact_parameter, exact_params, optimize_closed_form,
    optimize_numeric,
};
use projconst::Result;

fn main() -> Result<()> {
    let closed = optimize_closed_form();
    let numeric = optimize_numeric(0.1, 10.0, 1e-8)?;
    println!("a* = {:.12} (numeric {:.12})", closed.a_star, numeric.a_hat);
    println!("g* = {:.12}", closed.g_star);
    let cmp = compare_with_prior_bound();
    println!(
        "{:.4} < {:.4}, margin {:.4}\n",
        cmp.ours, cmp.prior, cmp.improvement
    );

    for (p, q) in [(2, 1), (3, 1), (5, 1), (7, 2)] {
        let e = exact_params(&exact_parameter(p, q)?)?;
        println!(
            "a = {:>5}: sqrt(2a+1) = {}, K = {}, g = {}",
            e.a, e.root, e.k, e.g
        );
        let check = check_model(&e.a, 64, 1024)?;
        println!(
            "          inverse ok: {}, window norms {} / {} <= K: {}",
            check.inverse_ok, check.w_norm_lower, check.w_inv_norm_lower, check.within_bound
        );
    }
    Ok(())
}
